#include <gtest/gtest.h>

#include <cstring>

#include "mexec/builtin.hpp"
#include "mexec/error.hpp"
#include "mexec/montecarlo.hpp"
#include "support/oracles.hpp"

using namespace mexec;
using oracle::mat2;
using oracle::vec2;

TEST(Brownian, ReproducibleAndDistinctPerPath) {
    const TimeGrid grid(1.0, 50);
    const BrownianPath a = brownian_path(grid, 2, 9, 3), b = brownian_path(grid, 2, 9, 3);
    const BrownianPath c = brownian_path(grid, 2, 9, 4), d = brownian_path(grid, 2, 10, 3);
    ASSERT_EQ(a.increments.size(), 50u);
    for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(a.increments[i], b.increments[i]);
    EXPECT_NE(a.increments[0], c.increments[0]);
    EXPECT_NE(a.increments[0], d.increments[0]);
}

TEST(Brownian, IncrementVariance) {
    const TimeGrid grid(1.0, 100);
    double sum = 0.0;
    constexpr int paths = 2000;
    for (int p = 0; p < paths; ++p)
        for (const auto& dw : brownian_path(grid, 1, 1, p).increments) sum += dw(0) * dw(0);
    EXPECT_NEAR(sum / paths, 1.0, 0.01);
}

TEST(Lambda, DiscountedEigenvaluesAreMartingales) {
    const MarketSpec spec = builtin_spec("impact_noise");
    const TimeGrid grid(1.0, 20);
    constexpr int paths = 100000;
    std::vector<double> first(paths), second(paths);
    for (int p = 0; p < paths; ++p) {
        const ImpactPath path = simulate_lambda(spec, brownian_path(grid, 1, 5, p));
        first[p] = path.eigenvalues(20)(0) * std::exp(-3.0);
        second[p] = path.eigenvalues(20)(1) * std::exp(-1.0);
    }
    const MCEstimate a = summarize(first), b = summarize(second);
    EXPECT_LT(std::abs(a.mean - 1.0), 4.0 * a.std_error);
    EXPECT_LT(std::abs(b.mean - 1.0), 4.0 * b.std_error);
}

TEST(Summary, MeanAndStandardError) {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const MCEstimate e = summarize(x);
    EXPECT_DOUBLE_EQ(e.mean, 2.5);
    EXPECT_NEAR(e.std_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
    EXPECT_EQ(e.n_paths, 4u);
}

TEST(MonteCarlo, DeterministicSpecHasNoSpread) {
    const MarketSpec spec = builtin_spec("impact");
    const CoefficientSet coeffs = derive_coefficients(spec);
    const Feedback fb = make_feedback(spec, coeffs);
    const MCEstimate e = mc_cost(spec, coeffs, FeedbackRule{}, SimConfig{16, 3, 0, 1});
    EXPECT_LT(e.std_error, 1e-12 * std::abs(e.mean));
    EXPECT_NEAR(e.mean, optimal_cost(spec, coeffs, fb), 1e-5 * std::abs(e.mean));
}

TEST(MonteCarlo, WorkerCountDoesNotChangeResults) {
    const MarketSpec spec = builtin_spec("impact_noise");
    const CoefficientSet coeffs = derive_coefficients(spec);
    SimConfig config{64, 11, 0, 1};
    const auto one = mc_path_costs(spec, coeffs, FeedbackRule{}, config);
    config.workers = 3;
    const auto three = mc_path_costs(spec, coeffs, FeedbackRule{}, config);
    ASSERT_EQ(one.size(), three.size());
    EXPECT_EQ(std::memcmp(one.data(), three.data(), one.size() * sizeof(double)), 0);
}

TEST(MonteCarlo, FeedbackBeatsImmediateCloseOnCommonNumbers) {
    const MarketSpec spec = builtin_spec("impact_noise");
    const CoefficientSet coeffs = derive_coefficients(spec);
    const SimConfig config{500, 17, 0, 1};
    const MCEstimate feedback = mc_cost(spec, coeffs, FeedbackRule{}, config);
    const MCEstimate close = mc_cost(spec, coeffs, FixedPlanRule{immediate_close(spec)}, config);
    EXPECT_LT(feedback.mean, close.mean);
}

TEST(MonteCarlo, RefinedSimulationGrid) {
    const MarketSpec spec = builtin_spec("impact");
    const CoefficientSet coeffs = derive_coefficients(spec);
    const ExecutionPlan plan = immediate_close(spec);
    const MCEstimate base = mc_cost(spec, coeffs, FixedPlanRule{plan}, SimConfig{2, 1, 0, 1});
    const MCEstimate fine = mc_cost(spec, coeffs, FixedPlanRule{plan}, SimConfig{2, 1, 2000, 1});
    EXPECT_NEAR(base.mean, fine.mean, 1e-6 * std::abs(base.mean));
    EXPECT_THROW(mc_cost(spec, coeffs, FixedPlanRule{plan}, SimConfig{2, 1, 1500, 1}), Error);
}

TEST(MonteCarlo, ImmediateClosePlan) {
    MarketSpec spec = builtin_spec("ow");
    spec.terminal_target = vec2(1, 2);
    const ExecutionPlan plan = immediate_close(spec);
    EXPECT_EQ(plan.x_pre, spec.x0);
    EXPECT_EQ(plan.steps(), static_cast<std::size_t>(spec.grid_steps));
    for (const auto& v : plan.values) EXPECT_TRUE(v.isZero(0.0));
    EXPECT_EQ(plan.terminal, spec.terminal_target);
}

TEST(RoundTrip, NoResilienceIsExactArbitrage) {
    const Matrix g = mat2(1, 1, 0, 1);
    for (const double n : {1.0, 10.0, 100.0})
        for (const double h : {0.1, 0.05, 0.01, 0.001})
            EXPECT_NEAR(asymmetric_roundtrip(g, Matrix::Zero(2, 2), n, h), oracle::roundtrip_no_resilience(g, n, 1.0),
                        1e-10);
}

TEST(RoundTrip, ResilienceGapShrinksWithSpacing) {
    const Matrix g = mat2(1, 1, 0, 1);
    double previous = INFINITY;
    for (const double h : {0.1, 0.05, 0.01, 0.001}) {
        const double gap = std::abs(asymmetric_roundtrip(g, Matrix::Identity(2, 2), 10.0, h) + 10.0);
        EXPECT_LT(gap, previous);
        previous = gap;
    }
}

TEST(RoundTrip, TransposeWithFixedDirectionFlipsSign) {
    const Matrix g = mat2(1, 1, 0, 1);
    const Matrix zero = Matrix::Zero(2, 2);
    EXPECT_NEAR(asymmetric_roundtrip(g, zero, 10.0, 0.1, 1), -10.0, 1e-12);
    EXPECT_NEAR(asymmetric_roundtrip(g.transpose(), zero, 10.0, 0.1, 1), 10.0, 1e-12);
    // With the direction chosen from the skew the agent always profits.
    EXPECT_NEAR(asymmetric_roundtrip(g.transpose(), zero, 10.0, 0.1), -10.0, 1e-12);
}

TEST(Blowup, CostIsQuadraticInK) {
    for (const double k : {1.0, 3.0, 10.0, 100.0}) {
        EXPECT_NEAR(blowup_demo(0.2, k, Vector::Zero(2)), oracle::blowup_cost(0.2, k), 1e-9);
        EXPECT_NEAR(blowup_demo(0.2, k, Vector::Zero(2)) / (k * k), -0.1, 1e-14);
    }
}

TEST(Blowup, PlanCostMatchesFormula) {
    const MarketSpec spec = builtin_spec("blowup");
    const CoefficientSet coeffs = derive_coefficients(spec);
    const Vector x = vec2(1.0, -2.0);
    MarketSpec shifted = spec;
    shifted.x0 = x;
    const ExecutionPlan plan = blowup_plan(10.0, x, coeffs.grid());
    const double expected = blowup_demo(0.2, 10.0, x);
    EXPECT_NEAR(pathwise_cost(shifted, coeffs, plan), expected, 1e-2 * std::abs(expected));
}
