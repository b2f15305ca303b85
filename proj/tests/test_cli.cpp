#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mexec/csv.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = fs::path(MEXEC_SOURCE_DIR) / "docs" / "scenarios";

struct CliRun {
    int code;
    std::string out;
};

CliRun run(const std::string& args) {
    const std::string command = std::string(MEXEC_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    std::string out;
    char buffer[4096];
    while (const std::size_t n = std::fread(buffer, 1, sizeof buffer, pipe)) out.append(buffer, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

mexec::Table table_of(const std::string& text) {
    std::istringstream in(text);
    return mexec::read_table(in);
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mexec_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string scenario(const std::string& name) { return (kScenarios / name).string(); }

double comment_value(const mexec::Table& t, const std::string& key) {
    for (const auto& c : t.comments)
        if (c.rfind(key + "=", 0) == 0) return std::stod(c.substr(key.size() + 1));
    ADD_FAILURE() << "missing comment " << key;
    return 0.0;
}

}  // namespace

TEST(Cli, SolveCrossingScenario) {
    const CliRun r = run("solve " + scenario("fig3_crossing.json"));
    ASSERT_EQ(r.code, 0);
    const mexec::Table t = table_of(r.out);
    EXPECT_EQ(t.header[2], "X_2");
    EXPECT_NEAR(t.rows[1][2], -6.6667, 5e-5);
    EXPECT_GT(comment_value(t, "optimal_cost"), 0.0);
}

TEST(Cli, ZeroResilienceKeepsInteriorFlat) {
    const fs::path dir = scratch("zero_rho");
    std::ofstream(dir / "s.json") << R"({"n": 2, "T": 1, "O": [[0.6, 0.8], [-0.8, 0.6]], "lambda0": [1, 1],
        "mu": [3, 1], "rho": [0, 0, 0, 0], "x0": [100, 0], "grid_steps": 200})";
    const CliRun r = run("solve " + (dir / "s.json").string());
    ASSERT_EQ(r.code, 0);
    const mexec::Table t = table_of(r.out);
    for (std::size_t i = 1; i + 1 < t.rows.size(); ++i) {
        EXPECT_LT(std::abs(t.rows[i][1]), 1e-8);
        EXPECT_LT(std::abs(t.rows[i][2]), 1e-8);
    }
}

TEST(Cli, OwDeviationConstant) {
    const CliRun r = run("solve " + scenario("ow_conley.json"));
    ASSERT_EQ(r.code, 0);
    const mexec::Table t = table_of(r.out);
    for (std::size_t i = 2; i + 1 < t.rows.size(); ++i) {
        EXPECT_NEAR(t.rows[i][3], t.rows[1][3], 1e-6);
        EXPECT_NEAR(t.rows[i][4], t.rows[1][4], 1e-6);
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("check " + scenario("ow_conley.json")).code, 0);
    EXPECT_EQ(run("check " + scenario("blowup_indefinite.json")).code, 2);
    EXPECT_EQ(run("solve " + scenario("blowup_indefinite.json")).code, 2);
    EXPECT_EQ(run("solve --force " + scenario("blowup_indefinite.json")).code, 3);
    const fs::path dir = scratch("schema");
    std::ofstream(dir / "bad.json") << R"({"n": 1, "T": 1, "unknown": 2})";
    EXPECT_EQ(run("solve " + (dir / "bad.json").string()).code, 4);
    EXPECT_EQ(run("check " + (dir / "bad.json").string()).code, 4);
}

TEST(Cli, WritesOutputFile) {
    const fs::path dir = scratch("output");
    const CliRun r = run("solve " + scenario("fig4_fig5_risk.json") + " -o " + (dir / "risk.csv").string());
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(slurp(dir / "risk.csv"), run("solve " + scenario("fig4_fig5_risk.json")).out);
}

TEST(Cli, GridOverride) {
    const CliRun r = run("solve --grid 100 " + scenario("fig3_crossing.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(table_of(r.out).rows.size(), 102u);
}

TEST(Cli, CheckPrintsTable) {
    const CliRun r = run("check " + scenario("blowup_indefinite.json"));
    EXPECT_NE(r.out.find("convexity,fail,yes"), std::string::npos);
    EXPECT_EQ(r.out, run("check " + scenario("blowup_indefinite.json")).out);
}

TEST(Cli, SimulateDeterministicMatchesSolve) {
    const fs::path dir = scratch("simulate_det");
    ASSERT_EQ(run("simulate --paths 2 --seed 3 -o " + dir.string() + " " + scenario("fig3_crossing.json")).code, 0);
    const std::string solved = run("solve " + scenario("fig3_crossing.json")).out;
    EXPECT_EQ(slurp(dir / "path_00000.csv"), solved);
    EXPECT_EQ(slurp(dir / "path_00001.csv"), solved);
    EXPECT_TRUE(fs::exists(dir / "summary.csv"));
}

TEST(Cli, SimulateStochasticIsSeeded) {
    const fs::path a = scratch("simulate_a"), b = scratch("simulate_b");
    const std::string spec = scenario("fig8_impact_noise.json");
    ASSERT_EQ(run("simulate --paths 3 -o " + a.string() + " " + spec).code, 0);
    ASSERT_EQ(run("simulate --paths 3 -o " + b.string() + " " + spec).code, 0);
    for (const char* f : {"path_00000.csv", "path_00002.csv", "summary.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f));
    const mexec::Table t = table_of(slurp(a / "path_00000.csv"));
    EXPECT_NE(slurp(a / "path_00000.csv").find("# seed=42 path=0"), std::string::npos);
    double variation = 0.0;
    for (std::size_t i = 1; i + 1 < t.rows.size(); ++i) variation = std::max(variation, std::abs(t.rows[i][3] - t.rows[1][3]));
    EXPECT_GT(variation, 1e-3);
}

TEST(Cli, CostOfSolvedPlan) {
    const fs::path dir = scratch("cost");
    const std::string spec = scenario("fig4_fig5_risk.json");
    ASSERT_EQ(run("solve " + spec + " -o " + (dir / "plan.csv").string()).code, 0);
    const mexec::Table plan = table_of(slurp(dir / "plan.csv"));
    const double analytic = comment_value(plan, "optimal_cost");
    const CliRun r = run("cost " + spec + " " + (dir / "plan.csv").string());
    ASSERT_EQ(r.code, 0);
    const mexec::Table costs = table_of(r.out);
    ASSERT_EQ(costs.rows.size(), 1u);
    EXPECT_EQ(costs.header, (std::vector<std::string>{"pathwise", "quadratic_form", "risk", "total"}));
    const double total = costs.rows[0][3];
    EXPECT_NEAR(costs.rows[0][0], costs.rows[0][1], 1e-5 * total);
    EXPECT_NEAR(total, analytic, 1e-3 * analytic);

    mexec::Table bumped = plan;
    for (std::size_t i = 1; i + 1 < bumped.rows.size(); ++i) bumped.rows[i][1] += 1.0;
    std::ofstream out(dir / "bumped.csv");
    mexec::write_table(out, bumped);
    out.close();
    const mexec::Table worse = table_of(run("cost " + spec + " " + (dir / "bumped.csv").string()).out);
    EXPECT_GT(worse.rows[0][3], total);
}

TEST(Cli, CostOfEmptyPlanIsZero) {
    const fs::path dir = scratch("cost_zero");
    std::ofstream(dir / "s.json") << R"({"n": 2, "T": 1, "O": [1, 0, 0, 1], "lambda0": [1, 1],
        "rho": [1, 0, 0, 1], "Xi": [1, 0, 0, 1], "x0": [0, 0], "grid_steps": 10})";
    ASSERT_EQ(run("solve " + (dir / "s.json").string() + " -o " + (dir / "plan.csv").string()).code, 0);
    const mexec::Table costs = table_of(run("cost " + (dir / "s.json").string() + " " + (dir / "plan.csv").string()).out);
    ASSERT_EQ(costs.rows.size(), 1u);
    for (const double v : costs.rows[0]) EXPECT_EQ(v, 0.0);
}

TEST(Cli, ExamplesWriteAllFiles) {
    const fs::path dir = scratch("examples");
    ASSERT_EQ(run("example all -o " + dir.string()).code, 0);
    for (const char* id : {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "asym", "blowup"})
        EXPECT_TRUE(fs::exists(dir / (std::string(id) + ".csv"))) << id;

    const mexec::Table fig3 = table_of(slurp(dir / "fig3.csv"));
    int sign_changes = 0;
    double crossing = -1.0;
    for (std::size_t i = 1; i + 2 < fig3.rows.size(); ++i)
        if ((fig3.rows[i][2] < 0) != (fig3.rows[i + 1][2] < 0)) {
            ++sign_changes;
            crossing = fig3.rows[i + 1][0];
        }
    EXPECT_EQ(sign_changes, 1);
    EXPECT_NEAR(crossing, 0.5, 1e-3 + 1e-12);

    const mexec::Table blowup = table_of(slurp(dir / "blowup.csv"));
    for (const auto& row : blowup.rows) EXPECT_NEAR(row[2], -0.1, 1e-12);

    const mexec::Table asym = table_of(slurp(dir / "asym.csv"));
    for (const auto& row : asym.rows) EXPECT_EQ(row[2], -row[0]);

    const mexec::Table fig1 = table_of(slurp(dir / "fig1.csv"));
    EXPECT_EQ(fig1.header.size(), 9u);
    EXPECT_EQ(fig1.rows.size(), 501u);

    EXPECT_EQ(run("example fig9 -o " + dir.string()).code, 1);
}

TEST(Cli, DocumentedScenariosParse) {
    int count = 0;
    for (const auto& entry : fs::directory_iterator(kScenarios)) {
        if (entry.path().extension() != ".json") continue;
        ++count;
        const int code = run("check " + entry.path().string()).code;
        EXPECT_TRUE(code == 0 || code == 2) << entry.path();
    }
    EXPECT_GE(count, 8);
}
