#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mexec/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Optimal multi-asset execution under stochastic cross impact"};
    app.require_subcommand(1);

    int code = mexec::kExitOk;
    std::string scenario;
    std::string output;
    std::string plan;
    std::string out_dir = ".";
    std::string example;
    std::optional<int> grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    bool force = false;

    auto* solve = app.add_subcommand("solve", "Solve a scenario and write the optimal strategy CSV");
    solve->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    solve->add_option("-o,--output", output, "Output CSV (stdout when omitted)");
    solve->add_option("--grid", grid, "Override the number of grid steps");
    solve->add_flag("--force", force, "Solve despite failed hard audit checks");

    auto* simulate = app.add_subcommand("simulate", "Simulate optimal strategy paths");
    simulate->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("-o,--out-dir", out_dir, "Output directory");
    simulate->add_option("--grid", grid, "Override the number of grid steps");
    simulate->add_option("--seed", seed, "Random seed");
    simulate->add_option("--paths", paths, "Number of paths");
    simulate->add_flag("--force", force, "Simulate despite failed hard audit checks");

    auto* cost = app.add_subcommand("cost", "Evaluate the cost of a plan CSV");
    cost->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    cost->add_option("plan", plan, "Plan CSV in the solve layout")->required()->check(CLI::ExistingFile);
    cost->add_option("--grid", grid, "Override the number of grid steps");

    auto* check = app.add_subcommand("check", "Audit a scenario against the model assumptions");
    check->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    check->add_option("--grid", grid, "Override the number of grid steps");

    auto* ex = app.add_subcommand("example", "Write the data behind a built-in example");
    std::string ids = "all";
    for (const auto& id : mexec::example_ids()) ids += ", " + id;
    ex->add_option("id", example, "One of: " + ids)->required();
    ex->add_option("-o,--out-dir", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    if (solve->parsed()) {
        mexec::SolveOptions options{scenario, std::nullopt, grid, force};
        if (!output.empty()) options.output = output;
        code = mexec::cmd_solve(options, std::cout, std::cerr);
    } else if (simulate->parsed()) {
        code = mexec::cmd_simulate({scenario, out_dir, grid, seed, paths, force}, std::cerr);
    } else if (cost->parsed()) {
        code = mexec::cmd_cost(scenario, plan, grid, std::cout, std::cerr);
    } else if (check->parsed()) {
        code = mexec::cmd_check(scenario, grid, std::cout, std::cerr);
    } else if (ex->parsed()) {
        code = mexec::cmd_example(example, out_dir, std::cerr);
    }
    return code;
}
