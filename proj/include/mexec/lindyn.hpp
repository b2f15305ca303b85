#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mexec/model.hpp"

namespace mexec {

/// nu solves d nu = nu rho ds with nu(0) = I; nu_inv is its inverse, integrated alongside.
struct Resolvent {
    TimeGrid grid;
    std::vector<Matrix> nu;
    std::vector<Matrix> nu_inv;
};

Resolvent resolvent(const MatrixFunction& rho, const TimeGrid& grid);

/// Piecewise-constant position: x_pre before the first trade, values[i] on [t_i, t_{i+1}), terminal at T.
struct ExecutionPlan {
    Vector x_pre;
    std::vector<Vector> values;
    Vector terminal;

    std::size_t steps() const noexcept { return values.size(); }
    /// Trade at node i; i == steps() is the terminal trade.
    Vector jump(std::size_t i) const;
};

/// Deviation right after each trade, with left limits D(t_i-) for i = 0..N.
struct DeviationPath {
    Vector d_pre;
    std::vector<Vector> values;
    std::vector<Vector> left_limits;
    Vector terminal;
};

/// One Brownian path as increments over the steps of a grid.
struct BrownianPath {
    TimeGrid grid;
    std::vector<Vector> increments;
};

/// Control sampled at the step endpoints (the right one as a left limit) and midpoints.
struct ControlPath {
    std::vector<Vector> left;
    std::vector<Vector> mid;
    std::vector<Vector> right;

    std::size_t steps() const noexcept { return left.size(); }
    /// Control that is constant on each step.
    static ControlPath piecewise_constant(const std::vector<Vector>& values);
};

/// Hidden state at the trading-grid nodes.
struct HiddenState {
    std::vector<Vector> values;
};

DeviationPath deviation_of_plan(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan);
/// Same along a simulated impact path whose grid refines the trading grid.
DeviationPath deviation_of_plan(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan,
                                const ImpactPath& impact);

double pathwise_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan);
double pathwise_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan,
                     const ImpactPath& impact);

/// Pathwise cost for a constant, possibly asymmetric, impact matrix.
double pathwise_cost_raw_impact(const Matrix& impact, const MatrixFunction& rho, const TimeGrid& grid,
                                const ExecutionPlan& plan, const Vector& d0);

double cost_quadratic_form(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan);
double cost_quadratic_form(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan,
                           const ImpactPath& impact);

/// Running risk of the position against the running target.
double risk_cost(const CoefficientSet& coeffs, const ExecutionPlan& plan);

Vector initial_hidden_state(const MarketSpec& spec);

HiddenState hidden_state(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u);
HiddenState hidden_state(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u,
                         const BrownianPath& w);

/// gamma^-1/2 D of a plan.
ControlPath phi(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan);
/// Plan whose scaled deviation is u: X = gamma^-1/2 (u - H^u) on [0, T), X(T) = xi.
ExecutionPlan phi_bar(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u);

/// Distance between plans: L2 norm of gamma^-1/2 (D - D~).
double metric(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& a, const ExecutionPlan& b);

/// Cost of a control in the hidden-state formulation, net of the initial -d^T gamma^-1 d / 2.
double lq_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u);

struct FvApproximation {
    int pieces;
    ControlPath control;
    ExecutionPlan plan;
    double distance;  // to phi_bar(u)
    double cost;
};

/// Step-function approximations of u on `pieces` equal intervals, mapped back to plans.
std::vector<FvApproximation> fv_approximate(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u,
                                            std::span<const int> pieces);

}  // namespace mexec
