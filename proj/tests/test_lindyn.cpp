#include <gtest/gtest.h>

#include <array>

#include "mexec/builtin.hpp"
#include "mexec/error.hpp"
#include "mexec/lindyn.hpp"
#include "mexec/montecarlo.hpp"
#include "support/oracles.hpp"
#include "support/plans.hpp"

using namespace mexec;
using oracle::mat2;
using oracle::vec2;

namespace {

ExecutionPlan block_trade(const Vector& trade, int steps) {
    return {Vector::Zero(trade.size()), std::vector<Vector>(static_cast<std::size_t>(steps), trade), trade};
}

}  // namespace

TEST(Resolvent, MatchesSymmetricExponential) {
    const Matrix rho = mat2(2, 1, 1, 2);
    const TimeGrid grid(1.0, 1000);
    const Resolvent r = resolvent(rho, grid);
    EXPECT_LT(max_abs_diff(r.nu_inv.back(), oracle::decay(rho, 1.0)), 1e-10);
    EXPECT_LT(max_abs_diff(r.nu.back() * r.nu_inv.back(), Matrix::Identity(2, 2)), 1e-10);
}

TEST(Deviation, BlockTradeDecay) {
    const MarketSpec spec = constant_market(Matrix::Identity(2, 2), mat2(2, 1, 1, 2), 1.0, Vector::Zero(2), 200);
    const CoefficientSet coeffs = derive_coefficients(spec);
    const DeviationPath dev = deviation_of_plan(spec, coeffs, block_trade(vec2(10, 0), 200));
    const Vector at_one = dev.left_limits.back();
    const Vector expected = oracle::block_trade_deviation(2.0, 1.0, vec2(10, 0), 1.0);
    EXPECT_LT((at_one - expected).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(at_one(0), 2.08833, 5e-6);
    EXPECT_NEAR(at_one(1), -1.59046, 5e-6);
}

TEST(Deviation, InitialJumpIsGammaTimesTrade) {
    const MarketSpec spec = builtin_spec("ow");
    const CoefficientSet coeffs = derive_coefficients(spec);
    ExecutionPlan plan = immediate_close(spec);
    const DeviationPath dev = deviation_of_plan(spec, coeffs, plan);
    EXPECT_LT((dev.values.front() - mat2(2, 1, 1, 1) * (-spec.x0)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Cost, ImmediateCloseWithMatchedDeviation) {
    MarketSpec spec = builtin_spec("ow");
    const Matrix gamma = mat2(2, 1, 1, 1);
    spec.d0 = gamma * spec.x0;
    const CoefficientSet coeffs = derive_coefficients(spec);
    const double expected = -0.5 * spec.x0.dot(gamma * spec.x0);
    EXPECT_NEAR(pathwise_cost(spec, coeffs, immediate_close(spec)), expected, 1e-9);
}

TEST(Cost, EmptyPlanCostsNothing) {
    MarketSpec spec = builtin_spec("ow");
    spec.x0 = Vector::Zero(2);
    const CoefficientSet coeffs = derive_coefficients(spec);
    const ExecutionPlan plan = block_trade(Vector::Zero(2), spec.grid_steps);
    EXPECT_EQ(pathwise_cost(spec, coeffs, plan), 0.0);
    EXPECT_EQ(cost_quadratic_form(spec, coeffs, plan), 0.0);
}

TEST(Cost, RawImpactAgreesForSymmetricImpact) {
    const MarketSpec spec = builtin_spec("ow");
    const CoefficientSet coeffs = derive_coefficients(spec);
    const ExecutionPlan plan = plans::smooth_plan(spec, coeffs.grid());
    const double raw = pathwise_cost_raw_impact(mat2(2, 1, 1, 1), spec.resilience, coeffs.grid(), plan, spec.d0);
    EXPECT_NEAR(raw, pathwise_cost(spec, coeffs, plan), 1e-8 * std::abs(raw));
}

TEST(Cost, QuadraticFormConvergesToPathwise) {
    std::array<double, 3> gap{};
    const std::array<int, 3> grids{250, 500, 1000};
    for (std::size_t g = 0; g < grids.size(); ++g) {
        MarketSpec spec = plans::generic_spec();
        spec.grid_steps = grids[g];
        const CoefficientSet coeffs = derive_coefficients(spec);
        const ExecutionPlan plan = plans::smooth_plan(spec, coeffs.grid());
        gap[g] = std::abs(pathwise_cost(spec, coeffs, plan) - cost_quadratic_form(spec, coeffs, plan));
    }
    EXPECT_LT(gap[1], 0.55 * gap[0]);
    EXPECT_LT(gap[2], 0.55 * gap[1]);
}

TEST(HiddenState, ConstantControlClosedForm) {
    MarketSpec spec = constant_market(mat2(2, 1, 1, 1), Matrix::Identity(2, 2), 1.0, vec2(3, -1), 200);
    spec.drift = vec2(0.5, 0.2);
    const CoefficientSet coeffs = derive_coefficients(spec);
    const Vector u = vec2(1.0, -2.0);
    const ControlPath path = ControlPath::piecewise_constant(std::vector<Vector>(200, u));
    const HiddenState h = hidden_state(spec, coeffs, path);
    const Matrix a = coeffs.node(0).A, b = coeffs.node(0).B;
    EXPECT_LT(max_abs_diff(b, coeffs.node(200).B), 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    const Vector e = es.eigenvalues().array().exp();
    const Matrix expa = es.eigenvectors() * e.asDiagonal() * es.eigenvectors().transpose();
    const Matrix phi = es.eigenvectors() * ((e.array() - 1.0) / es.eigenvalues().array()).matrix().asDiagonal() *
                       es.eigenvectors().transpose();
    const Vector expected = expa * h.values.front() + phi * b * u;
    EXPECT_LT((h.values.back() - expected).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(HiddenState, InitialValue) {
    MarketSpec spec = builtin_spec("ow");
    spec.d0 = vec2(1, 2);
    const Matrix gamma = mat2(2, 1, 1, 1);
    const Vector expected = oracle::spd_power(gamma, -0.5) * spec.d0 - oracle::spd_power(gamma, 0.5) * spec.x0;
    EXPECT_LT((initial_hidden_state(spec) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(HiddenState, DeviationIdentityOnSmoothPlan) {
    const MarketSpec spec = plans::generic_spec();
    const CoefficientSet coeffs = derive_coefficients(spec);
    EXPECT_LT(plans::hidden_identity_error(spec, coeffs, plans::smooth_plan(spec, coeffs.grid())), 1e-9);
}

TEST(Bijection, RoundTripErrorIsFirstOrder) {
    std::array<double, 3> err{};
    const std::array<int, 3> grids{250, 500, 1000};
    for (std::size_t g = 0; g < grids.size(); ++g) {
        MarketSpec spec = plans::generic_spec();
        spec.grid_steps = grids[g];
        const CoefficientSet coeffs = derive_coefficients(spec);
        const ControlPath u = plans::smooth_control(coeffs.grid(), 2);
        err[g] = plans::control_distance(phi(spec, coeffs, phi_bar(spec, coeffs, u)), u);
        EXPECT_LT(err[g], 2.0 * coeffs.grid().dt());
    }
    EXPECT_LT(err[1], 0.55 * err[0]);
    EXPECT_LT(err[2], 0.55 * err[1]);
}

TEST(Bijection, PhiBarHitsTerminalTarget) {
    MarketSpec spec = plans::generic_spec();
    spec.terminal_target = vec2(2, 3);
    const CoefficientSet coeffs = derive_coefficients(spec);
    const ExecutionPlan plan = phi_bar(spec, coeffs, plans::smooth_control(coeffs.grid(), 2));
    EXPECT_EQ(plan.terminal, spec.terminal_target);
    EXPECT_EQ(plan.x_pre, spec.x0);
}

TEST(Metric, IsADistance) {
    const MarketSpec spec = plans::generic_spec();
    const CoefficientSet coeffs = derive_coefficients(spec);
    const ExecutionPlan a = plans::smooth_plan(spec, coeffs.grid());
    const ExecutionPlan b = immediate_close(spec);
    EXPECT_EQ(metric(spec, coeffs, a, a), 0.0);
    EXPECT_GT(metric(spec, coeffs, a, b), 0.0);
    EXPECT_NEAR(metric(spec, coeffs, a, b), metric(spec, coeffs, b, a), 1e-12);
}

TEST(FvApproximation, DistanceAndCostConverge) {
    MarketSpec spec = plans::generic_spec();
    spec.grid_steps = 960;
    const CoefficientSet coeffs = derive_coefficients(spec);
    const ControlPath u = plans::sine_control(coeffs.grid(), 2);
    const std::array<int, 3> levels{4, 8, 16};
    const auto approx = fv_approximate(spec, coeffs, u, levels);
    ASSERT_EQ(approx.size(), 3u);
    const double target = lq_cost(spec, coeffs, u);
    for (std::size_t k = 1; k < approx.size(); ++k) {
        EXPECT_LT(approx[k].distance, approx[k - 1].distance);
        EXPECT_LT(std::abs(approx[k].cost - target), std::abs(approx[k - 1].cost - target));
    }
}

TEST(FvApproximation, RejectsNonDividingLevels) {
    const MarketSpec spec = plans::generic_spec();
    const CoefficientSet coeffs = derive_coefficients(spec);
    const std::array<int, 1> levels{7};
    EXPECT_THROW(fv_approximate(spec, coeffs, plans::sine_control(coeffs.grid(), 2), levels), Error);
}

TEST(LqCost, MatchesPlanCostOfPhiBar) {
    const MarketSpec spec = plans::generic_spec();
    const CoefficientSet coeffs = derive_coefficients(spec);
    const ControlPath u = plans::smooth_control(coeffs.grid(), 2);
    const ExecutionPlan plan = phi_bar(spec, coeffs, u);
    const double plan_cost = plans::plan_cost(spec, coeffs, plan);
    EXPECT_NEAR(lq_cost(spec, coeffs, u), plan_cost, 1e-2 * (1.0 + std::abs(plan_cost)));
}
