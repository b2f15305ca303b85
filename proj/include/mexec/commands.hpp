#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mexec {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitAudit = 2,
    kExitSingularDriver = 3,
    kExitSchema = 4,
};

struct SolveOptions {
    std::filesystem::path scenario;
    std::optional<std::filesystem::path> output;  // stdout when absent
    std::optional<int> grid;
    bool force = false;
};

struct SimulateOptions {
    std::filesystem::path scenario;
    std::filesystem::path out_dir;
    std::optional<int> grid;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    bool force = false;
};

int cmd_solve(const SolveOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& err);
int cmd_cost(const std::filesystem::path& scenario, const std::filesystem::path& plan, std::optional<int> grid,
             std::ostream& out, std::ostream& err);
int cmd_check(const std::filesystem::path& scenario, std::optional<int> grid, std::ostream& out, std::ostream& err);
int cmd_example(const std::string& id, const std::filesystem::path& out_dir, std::ostream& err);

std::vector<std::string> example_ids();

/// Seed used for the stochastic built-in example.
inline constexpr std::uint64_t kExampleSeed = 42;

}  // namespace mexec
