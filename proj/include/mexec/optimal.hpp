#pragma once

#include <optional>
#include <vector>

#include "mexec/lindyn.hpp"
#include "mexec/riccati.hpp"

namespace mexec {

enum class TargetMode { Zero, General };

/// Optimal feedback u = gain H + offset with everything it was built from.
struct Feedback {
    TargetMode mode;
    RiccatiSolution riccati;
    std::vector<Matrix> theta;  // theta or theta_hat
    FPath f;                    // zero in zero-target mode
    std::optional<TargetSolution> targets;
    std::vector<Matrix> gain;   // theta, or F + theta_hat
    std::vector<Vector> offset; // 0, or F gamma^1/2 zeta - theta0
};

/// Picks the zero-target route when xi and zeta vanish.
Feedback make_feedback(const MarketSpec& spec, const CoefficientSet& coeffs);
Feedback make_feedback(const MarketSpec& spec, const CoefficientSet& coeffs, TargetMode mode);

HiddenState optimal_state(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb);
HiddenState optimal_state(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb,
                          const BrownianPath& w);

struct OptimalSolution {
    HiddenState hidden;
    ExecutionPlan plan;
    DeviationPath deviation;
    double cost;  // analytic optimal cost
};

OptimalSolution optimal_strategy(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb);
/// One path of the optimal strategy under stochastic impact; `impact` lives on the trading grid.
OptimalSolution optimal_strategy(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb,
                                 const BrownianPath& w, const ImpactPath& impact);

double optimal_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb);

/// Closed-form optimal plan for a two-asset OW market with commuting impact and resilience, x = (x1, 0).
ExecutionPlan crossing_zero_oracle(double horizon, double x1, double rho1, double rho2, double rho3,
                                   const TimeGrid& grid);

}  // namespace mexec
