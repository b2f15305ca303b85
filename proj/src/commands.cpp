#include "mexec/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>

#include "mexec/builtin.hpp"
#include "mexec/checks.hpp"
#include "mexec/csv.hpp"
#include "mexec/error.hpp"
#include "mexec/montecarlo.hpp"
#include "mexec/optimal.hpp"
#include "mexec/scenario.hpp"

namespace mexec {

namespace {

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Schema: return kExitSchema;
        case ErrorKind::SingularDriver: return kExitSingularDriver;
        case ErrorKind::AuditFailure: return kExitAudit;
        default: return kExitFailure;
    }
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

Scenario load(const std::filesystem::path& path, std::optional<int> grid) {
    Scenario scenario = load_scenario(path);
    if (grid) {
        if (*grid < 1) fail(ErrorKind::Configuration, "--grid must be positive");
        scenario.spec.grid_steps = *grid;
    }
    return scenario;
}

void write_file(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Configuration, "cannot write " + path.string());
    write_table(out, table);
}

// Refuses on hard audit failures unless forced; forced runs still report them.
void enforce_audit(const MarketSpec& spec, bool force, std::ostream& err) {
    const AuditReport report = assumption_audit(spec);
    if (report.passed()) return;
    for (const auto& c : report.checks)
        if (c.hard && c.status == CheckStatus::Fail) err << "audit: " << c.name << " failed " << c.detail << '\n';
    if (!force) fail(ErrorKind::AuditFailure, "scenario violates a standing assumption (use --force to override)");
    err << "audit: continuing because of --force\n";
}

Table solved_table(const MarketSpec& spec, const CoefficientSet& coeffs, const OptimalSolution& sol) {
    Table table = solution_table(coeffs.grid(), sol.plan, sol.deviation, sol.hidden);
    table.comments.push_back("optimal_cost=" + format_number(sol.cost));
    table.comments.push_back("grid_steps=" + std::to_string(spec.grid_steps));
    return table;
}

Table deterministic_solution(const MarketSpec& spec) {
    const CoefficientSet coeffs = derive_coefficients(spec);
    if (coeffs.noisy()) fail(ErrorKind::UnsupportedScope, "stochastic impact: use simulate for strategy paths");
    const Feedback fb = make_feedback(spec, coeffs);
    return solved_table(spec, coeffs, optimal_strategy(spec, coeffs, fb));
}

Table path_solution(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb, std::uint64_t seed,
                    std::uint64_t path) {
    const BrownianPath w = brownian_path(coeffs.grid(), coeffs.factors(), seed, path);
    const ImpactPath impact = simulate_lambda(spec, w);
    Table table = solved_table(spec, coeffs, optimal_strategy(spec, coeffs, fb, w, impact));
    table.comments.push_back("seed=" + std::to_string(seed) + " path=" + std::to_string(path));
    return table;
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

// Deviation after a single block trade at 0, evaluated on [0, 5].
std::vector<Vector> block_trade_deviation(const Vector& trade, double rho3, int steps) {
    Matrix rho(2, 2);
    rho << 2.0, rho3, rho3, 2.0;
    MarketSpec spec = constant_market(Matrix::Identity(2, 2), rho, 5.0, Vector::Zero(2), steps);
    const CoefficientSet coeffs = derive_coefficients(spec);
    const ExecutionPlan plan{Vector::Zero(2), std::vector<Vector>(static_cast<std::size_t>(steps), trade), trade};
    const DeviationPath dev = deviation_of_plan(spec, coeffs, plan);
    std::vector<Vector> out(dev.values);
    out.push_back(dev.left_limits.back());
    return out;
}

Table resilience_panels() {
    constexpr int steps = 500;
    const TimeGrid grid(5.0, steps);
    const std::vector<std::pair<std::string, Vector>> cases = {
        {"a", vec2(3, 1)}, {"b", vec2(1, 3)}, {"c", vec2(3, -1)}, {"d", vec2(1, -3)}};
    Table table;
    table.comments.push_back("deviation in asset 1 after a block trade at 0; rho1=2, gamma=I");
    table.comments.push_back("a: dX=(3,1) b: dX=(1,3) c: dX=(3,-1) d: dX=(1,-3); nocross columns use rho3=0, others rho3=1");
    table.header.push_back("t");
    std::vector<std::vector<Vector>> series;
    for (const auto& [name, trade] : cases) {
        table.header.push_back("D_1_" + name);
        table.header.push_back("D_1_" + name + "_nocross");
        series.push_back(block_trade_deviation(trade, 1.0, steps));
        series.push_back(block_trade_deviation(trade, 0.0, steps));
    }
    for (int i = 0; i <= steps; ++i) {
        std::vector<double> row{grid.at(i)};
        for (const auto& s : series) row.push_back(s[static_cast<std::size_t>(i)](0));
        table.rows.push_back(std::move(row));
    }
    return table;
}

Table single_asset_trade() {
    constexpr int steps = 500;
    const TimeGrid grid(5.0, steps);
    const std::vector<Vector> dev = block_trade_deviation(vec2(10, 0), 1.0, steps);
    Table table;
    table.comments.push_back("deviation after a block buy of 10 in asset 1 at 0; rho1=2, rho3=1, gamma=I");
    table.header = {"t", "D_1", "D_2"};
    for (int i = 0; i <= steps; ++i)
        table.rows.push_back({grid.at(i), dev[static_cast<std::size_t>(i)](0), dev[static_cast<std::size_t>(i)](1)});
    return table;
}

Table roundtrip_table() {
    Matrix gamma_tilde(2, 2);
    gamma_tilde << 1.0, 1.0, 0.0, 1.0;
    const Matrix zero = Matrix::Zero(2, 2);
    const Matrix identity = Matrix::Identity(2, 2);
    Table table;
    table.comments.push_back("four-block round trip under asymmetric impact [[1,1],[0,1]]");
    table.header = {"N", "h", "cost_rho_zero", "cost_rho_identity", "limit"};
    for (const double n : {1.0, 10.0, 100.0})
        for (const double h : {0.1, 0.05, 0.01, 0.001})
            table.rows.push_back({n, h, asymmetric_roundtrip(gamma_tilde, zero, n, h),
                                  asymmetric_roundtrip(gamma_tilde, identity, n, h), -n});
    return table;
}

Table blowup_table() {
    constexpr double horizon = 0.2;
    Table table;
    table.comments.push_back("cost of X(s) = k(1,-1) + s k(-1,3) with gamma=[[2,1],[1,1]], rho=[[1,2],[2,5]], T=0.2");
    table.header = {"k", "cost", "cost_over_k2"};
    for (const double k : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1000.0}) {
        const double cost = blowup_demo(horizon, k, Vector::Zero(2));
        table.rows.push_back({k, cost, cost / (k * k)});
    }
    return table;
}

}  // namespace

std::vector<std::string> example_ids() {
    return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "asym", "blowup"};
}

int cmd_solve(const SolveOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const Scenario scenario = load(options.scenario, options.grid);
        enforce_audit(scenario.spec, options.force, err);
        const Table table = deterministic_solution(scenario.spec);
        if (options.output)
            write_file(*options.output, table);
        else
            write_table(out, table);
        return kExitOk;
    });
}

int cmd_simulate(const SimulateOptions& options, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const Scenario scenario = load(options.scenario, options.grid);
        const MarketSpec& spec = scenario.spec;
        enforce_audit(spec, options.force, err);
        const SimSettings sim = scenario.sim.value_or(SimSettings{1, 0});
        const std::uint64_t seed = options.seed.value_or(sim.seed);
        const std::size_t paths = options.paths.value_or(sim.n_paths);
        std::filesystem::create_directories(options.out_dir);
        const CoefficientSet coeffs = derive_coefficients(spec);
        const Feedback fb = make_feedback(spec, coeffs);
        const int width = std::max<int>(5, static_cast<int>(std::to_string(paths).size()));
        for (std::size_t p = 0; p < paths; ++p) {
            std::string name = std::to_string(p);
            name.insert(0, static_cast<std::size_t>(width) - std::min<std::size_t>(name.size(), width), '0');
            const Table table = coeffs.noisy() ? path_solution(spec, coeffs, fb, seed, p)
                                               : solved_table(spec, coeffs, optimal_strategy(spec, coeffs, fb));
            write_file(options.out_dir / ("path_" + name + ".csv"), table);
        }
        const MCEstimate mc = mc_cost(spec, coeffs, FeedbackRule{}, SimConfig{paths, seed, 0, 1});
        Table summary;
        summary.comments.push_back("seed=" + std::to_string(seed));
        summary.header = {"paths", "mc_mean", "mc_std_error", "optimal_cost"};
        summary.rows.push_back({static_cast<double>(paths), mc.mean, mc.std_error, optimal_cost(spec, coeffs, fb)});
        write_file(options.out_dir / "summary.csv", summary);
        err << "simulate: wrote " << paths << " path(s) to " << options.out_dir.string() << '\n';
        return kExitOk;
    });
}

int cmd_cost(const std::filesystem::path& scenario_path, const std::filesystem::path& plan_path,
             std::optional<int> grid, std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() -> int {
        const Scenario scenario = load(scenario_path, grid);
        const MarketSpec& spec = scenario.spec;
        const CoefficientSet coeffs = derive_coefficients(spec);
        if (coeffs.noisy()) fail(ErrorKind::UnsupportedScope, "plan costs need deterministic impact");
        std::ifstream in(plan_path);
        if (!in) fail(ErrorKind::Configuration, "cannot read plan " + plan_path.string());
        const ExecutionPlan plan = plan_from_table(read_table(in), coeffs.grid(), spec.assets);
        const double pathwise = pathwise_cost(spec, coeffs, plan);
        const double quadratic = cost_quadratic_form(spec, coeffs, plan);
        const double risk = risk_cost(coeffs, plan);
        Table table;
        table.header = {"pathwise", "quadratic_form", "risk", "total"};
        table.rows.push_back({pathwise, quadratic, risk, pathwise + risk});
        write_table(out, table);
        return kExitOk;
    });
}

int cmd_check(const std::filesystem::path& scenario_path, std::optional<int> grid, std::ostream& out,
              std::ostream& err) {
    return guarded(err, [&]() -> int {
        const Scenario scenario = load(scenario_path, grid);
        const AuditReport report = assumption_audit(scenario.spec);
        out << "check,status,hard,detail\n";
        for (const auto& c : report.checks)
            out << c.name << ',' << to_string(c.status) << ',' << (c.hard ? "yes" : "no") << ',' << c.detail << '\n';
        return report.passed() ? kExitOk : kExitAudit;
    });
}

int cmd_example(const std::string& id, const std::filesystem::path& out_dir, std::ostream& err) {
    return guarded(err, [&]() -> int {
        if (id == "all") {
            for (const auto& each : example_ids())
                if (const int code = cmd_example(each, out_dir, err); code != kExitOk) return code;
            return kExitOk;
        }
        std::filesystem::create_directories(out_dir);
        const auto emit = [&](const Table& table) -> int {
            write_file(out_dir / (id + ".csv"), table);
            err << "example: wrote " << (out_dir / (id + ".csv")).string() << '\n';
            return kExitOk;
        };
        if (id == "fig1") return emit(resilience_panels());
        if (id == "fig2") return emit(single_asset_trade());
        if (id == "fig3") return emit(deterministic_solution(builtin_spec("crossing")));
        if (id == "fig4" || id == "fig5") return emit(deterministic_solution(builtin_spec("risk")));
        if (id == "fig6" || id == "fig7") return emit(deterministic_solution(builtin_spec("impact")));
        if (id == "fig8") {
            const MarketSpec spec = builtin_spec("impact_noise");
            const CoefficientSet coeffs = derive_coefficients(spec);
            return emit(path_solution(spec, coeffs, make_feedback(spec, coeffs), kExampleSeed, 0));
        }
        if (id == "asym") return emit(roundtrip_table());
        if (id == "blowup") return emit(blowup_table());
        fail(ErrorKind::Configuration, "unknown example '" + id + "'");
    });
}

}  // namespace mexec
