#include <gtest/gtest.h>

#include "mexec/builtin.hpp"
#include "mexec/error.hpp"
#include "mexec/montecarlo.hpp"
#include "mexec/optimal.hpp"
#include "support/oracles.hpp"
#include "support/plans.hpp"

using namespace mexec;
using oracle::mat2;
using oracle::vec2;

namespace {

OptimalSolution solve(const MarketSpec& spec) {
    const CoefficientSet coeffs = derive_coefficients(spec);
    return optimal_strategy(spec, coeffs, make_feedback(spec, coeffs));
}

}  // namespace

TEST(Optimal, CrossingZeroPath) {
    const MarketSpec spec = builtin_spec("crossing");
    const OptimalSolution sol = solve(spec);
    const TimeGrid grid = spec.grid();
    const ExecutionPlan closed = crossing_zero_oracle(1.0, 100.0, 2.0, 2.0, -1.0, grid);
    for (std::size_t i = 0; i < sol.plan.values.size(); ++i) {
        const double s = grid.at(static_cast<int>(i));
        const Vector expected = oracle::crossing_position(1.0, 100.0, 2.0, 2.0, -1.0, s);
        EXPECT_LT((sol.plan.values[i] - expected).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LT((closed.values[i] - expected).cwiseAbs().maxCoeff(), 1e-12);
    }
    EXPECT_NEAR(sol.plan.values.front()(1), -100.0 / 15.0, 1e-6);
    EXPECT_NEAR(sol.plan.values.front()(0), 1100.0 / 15.0, 1e-6);
    EXPECT_TRUE(sol.plan.terminal.isZero(0.0));
}

TEST(Optimal, CommutingClosedFormWithInitialDeviation) {
    const Matrix rho = mat2(2, -1, -1, 2);
    MarketSpec spec = constant_market(Matrix::Identity(2, 2), rho, 1.0, vec2(100, 0));
    spec.d0 = vec2(5, -3);
    const OptimalSolution sol = solve(spec);
    const Matrix inv = (2.0 * Matrix::Identity(2, 2) + rho).inverse();
    const Vector target = spec.x0 - spec.d0;
    for (std::size_t i = 0; i < sol.plan.values.size(); i += 100) {
        const double s = spec.grid().at(static_cast<int>(i));
        const Vector x = (Matrix::Identity(2, 2) + (1.0 - s) * rho) * inv * target;
        EXPECT_LT((sol.plan.values[i] - x).cwiseAbs().maxCoeff(), 1e-8);
        EXPECT_LT((sol.deviation.values[i] - inv * (spec.d0 - spec.x0)).cwiseAbs().maxCoeff(), 1e-8);
    }
    EXPECT_LT((sol.deviation.terminal - 2.0 * inv * (spec.d0 - spec.x0)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Optimal, ScalarResilienceCost) {
    const Matrix gamma = mat2(2, 1, 1, 1);
    const MarketSpec spec = constant_market(gamma, 2.0 * Matrix::Identity(2, 2), 1.0, vec2(100, -30));
    EXPECT_NEAR(solve(spec).cost, 3725.0, 1e-9);
    EXPECT_NEAR(oracle::scalar_resilience_cost(gamma, 2.0, 1.0, vec2(100, -30)), 3725.0, 1e-12);
}

TEST(Optimal, OwCostFromRiccati) {
    const MarketSpec spec = builtin_spec("ow");
    const Matrix gamma = mat2(2, 1, 1, 1);
    const Vector gx = oracle::spd_power(gamma, 0.5) * spec.x0;
    const double expected = gx.dot(oracle::ow_riccati(gamma, mat2(3, 2, 2, 5), 1.0, 0.0) * gx);
    EXPECT_NEAR(solve(spec).cost, expected, 1e-8 * expected);
}

TEST(Optimal, AnalyticCostMatchesPlanCost) {
    for (const auto& [name, spec] : plans::optimality_specs()) {
        const CoefficientSet coeffs = derive_coefficients(spec);
        const OptimalSolution sol = optimal_strategy(spec, coeffs, make_feedback(spec, coeffs));
        const double plan = plans::plan_cost(spec, coeffs, sol.plan);
        EXPECT_NEAR(plan, sol.cost, 1e-3 * std::abs(sol.cost)) << name;
        EXPECT_GE(plan, sol.cost - 1e-9 * std::abs(sol.cost)) << name;
    }
}

TEST(Optimal, GeneralTargetsReachTerminalTarget) {
    const MarketSpec spec = plans::optimality_specs()[2].second;
    const CoefficientSet coeffs = derive_coefficients(spec);
    const Feedback fb = make_feedback(spec, coeffs);
    EXPECT_EQ(fb.mode, TargetMode::General);
    ASSERT_TRUE(fb.targets.has_value());
    const OptimalSolution sol = optimal_strategy(spec, coeffs, fb);
    EXPECT_EQ(sol.plan.terminal, spec.terminal_target);
}

TEST(Optimal, ZeroResilienceClosesImmediately) {
    MarketSpec spec = builtin_spec("impact");
    spec.resilience = Matrix(Matrix::Zero(2, 2));
    const OptimalSolution sol = solve(spec);
    for (const auto& v : sol.plan.values) EXPECT_LT(v.norm(), 1e-8);
}

TEST(Optimal, MatchedDeviationClosesImmediately) {
    MarketSpec spec = builtin_spec("ow");
    const Matrix gamma = mat2(2, 1, 1, 1);
    spec.d0 = gamma * spec.x0;
    const OptimalSolution sol = solve(spec);
    for (const auto& v : sol.plan.values) EXPECT_LT(v.norm(), 1e-8);
    EXPECT_NEAR(sol.cost, -0.5 * spec.x0.dot(gamma * spec.x0), 1e-9);
}

TEST(Optimal, ConstantDeviationInRotatingImpact) {
    const OptimalSolution sol = solve(builtin_spec("impact"));
    for (const auto& d : sol.deviation.values) EXPECT_LT((d - sol.deviation.values.front()).norm(), 1e-6);
}

TEST(Optimal, ModesAgreeWithoutTargets) {
    const MarketSpec spec = builtin_spec("risk");
    const CoefficientSet coeffs = derive_coefficients(spec);
    const Feedback zero = make_feedback(spec, coeffs, TargetMode::Zero);
    const Feedback general = make_feedback(spec, coeffs, TargetMode::General);
    EXPECT_NEAR(optimal_cost(spec, coeffs, zero), optimal_cost(spec, coeffs, general), 1e-8);
    const HiddenState a = optimal_state(spec, coeffs, zero), b = optimal_state(spec, coeffs, general);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        EXPECT_LT((a.values[i] - b.values[i]).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Optimal, ZeroModeRejectsTargets) {
    const MarketSpec spec = plans::optimality_specs()[2].second;
    const CoefficientSet coeffs = derive_coefficients(spec);
    EXPECT_THROW(make_feedback(spec, coeffs, TargetMode::Zero), Error);
}

TEST(Optimal, StochasticTargetsUnsupported) {
    MarketSpec spec = builtin_spec("impact_noise");
    spec.terminal_target = vec2(1, 0);
    const CoefficientSet coeffs = derive_coefficients(spec);
    try {
        make_feedback(spec, coeffs);
        FAIL() << "expected an unsupported-scope error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UnsupportedScope);
    }
}

TEST(Optimal, IndefiniteKappaRefused) {
    const MarketSpec spec = builtin_spec("blowup");
    const CoefficientSet coeffs = derive_coefficients(spec);
    try {
        make_feedback(spec, coeffs);
        FAIL() << "expected a singular-driver error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularDriver);
    }
}

TEST(Optimal, PerturbationsCostMore) {
    for (const auto& [name, spec] : plans::optimality_specs()) {
        const CoefficientSet coeffs = derive_coefficients(spec);
        const OptimalSolution sol = optimal_strategy(spec, coeffs, make_feedback(spec, coeffs));
        const plans::OptimalityReport r = plans::optimality_report(spec, coeffs, sol.plan, 10, 7);
        EXPECT_EQ(r.dominated, r.perturbations) << name;
        EXPECT_LT(r.stationarity, 1e-4) << name;
    }
}

TEST(Optimal, NoisyPathKeepsFeedbackStructure) {
    const MarketSpec spec = builtin_spec("impact_noise");
    const CoefficientSet coeffs = derive_coefficients(spec);
    const Feedback fb = make_feedback(spec, coeffs);
    const BrownianPath w = brownian_path(coeffs.grid(), 1, 42, 0);
    const OptimalSolution sol = optimal_strategy(spec, coeffs, fb, w, simulate_lambda(spec, w));
    double variation = 0.0;
    for (const auto& d : sol.deviation.values) variation = std::max(variation, (d - sol.deviation.values.front()).norm());
    EXPECT_GT(variation, 1e-3);
    EXPECT_TRUE(sol.plan.terminal.isZero(0.0));
}
