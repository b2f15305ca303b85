#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mexec/optimal.hpp"

namespace mexec {

struct SimConfig {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 0;
    int grid_steps = 0;    // 0 keeps the trading grid; otherwise a multiple of it
    unsigned workers = 1;  // result does not depend on this
};

struct MCEstimate {
    double mean;
    double std_error;
    std::size_t n_paths;
};

/// Increments of path `path` under `seed`; the same pair always yields the same path.
BrownianPath brownian_path(const TimeGrid& grid, int factors, std::uint64_t seed, std::uint64_t path);

/// Exact log-scheme eigenvalues along a Brownian path, coefficients frozen at the left node.
ImpactPath simulate_lambda(const MarketSpec& spec, const BrownianPath& w);

struct FixedPlanRule {
    ExecutionPlan plan;
};
struct FeedbackRule {};
using StrategyRule = std::variant<FixedPlanRule, FeedbackRule>;

/// Close everything at time 0 and deliver the terminal target at T.
ExecutionPlan immediate_close(const MarketSpec& spec);

/// Per-path pathwise cost in quadratic form, paths in index order.
std::vector<double> mc_path_costs(const MarketSpec& spec, const CoefficientSet& coeffs, const StrategyRule& rule,
                                  const SimConfig& config);
MCEstimate mc_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const StrategyRule& rule,
                   const SimConfig& config);

/// Mean and standard error with a fixed pairwise reduction order.
MCEstimate summarize(std::span<const double> samples);

/// Cost of the four-block round trip N e1, a e2, -N e1, -a e2 at 0, h, 2h, 3h under constant impact gamma_tilde.
double asymmetric_roundtrip(const Matrix& gamma_tilde, const Matrix& rho, double n_blocks, double h,
                            std::optional<int> direction = std::nullopt);

/// Cost of the blowup strategy X(s) = x + k(1,-1) + s k(-1,3) in the two-asset market with
/// gamma = [[2,1],[1,1]], rho = [[1,2],[2,5]].
double blowup_demo(double horizon, double k, const Vector& x);

/// The blowup strategy sampled on a grid.
ExecutionPlan blowup_plan(double k, const Vector& x, const TimeGrid& grid);

}  // namespace mexec
