#include "mexec/optimal.hpp"

#include <functional>

#include "mexec/error.hpp"

namespace mexec {

namespace {

Vector h0_of(const MarketSpec& spec) { return initial_hidden_state(spec); }

Vector state_drift(const CoefficientSample& s, const Matrix& gain, const Vector& offset, const Vector& h) {
    return s.A * h + s.B * (gain * h + offset);
}

OptimalSolution assemble(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb, HiddenState hidden,
                         const std::function<Vector(std::size_t, double, const Vector&)>& apply) {
    const auto steps = static_cast<std::size_t>(coeffs.grid().steps());
    OptimalSolution out{std::move(hidden), {}, {}, optimal_cost(spec, coeffs, fb)};
    const auto& h = out.hidden.values;
    const auto control = [&](std::size_t i) -> Vector { return fb.gain[2 * i] * h[i] + fb.offset[2 * i]; };
    out.plan.x_pre = spec.x0;
    out.plan.terminal = spec.terminal_target;
    out.plan.values.resize(steps);
    out.deviation.d_pre = spec.d0;
    out.deviation.values.resize(steps);
    out.deviation.left_limits.resize(steps + 1);
    out.deviation.left_limits[0] = spec.d0;
    for (std::size_t i = 0; i <= steps; ++i) {
        const Vector u = control(i);
        if (i < steps) {
            out.plan.values[i] = apply(i, -0.5, Vector(u - h[i]));
            out.deviation.values[i] = apply(i, 0.5, u);
        }
        if (i > 0) out.deviation.left_limits[i] = apply(i, 0.5, u);
    }
    out.deviation.terminal = apply(steps, 0.5, Vector(h[steps] + apply(steps, 0.5, spec.terminal_target)));
    return out;
}

}  // namespace

Feedback make_feedback(const MarketSpec& spec, const CoefficientSet& coeffs) {
    return make_feedback(spec, coeffs, spec.has_targets() ? TargetMode::General : TargetMode::Zero);
}

Feedback make_feedback(const MarketSpec& spec, const CoefficientSet& coeffs, TargetMode mode) {
    const auto n = coeffs.assets();
    const std::size_t size = coeffs.half_size();
    if (mode == TargetMode::Zero) {
        if (spec.has_targets()) fail(ErrorKind::Precondition, "zero-target route needs xi = 0 and zeta = 0");
        RiccatiSolution y = solve_riccati(coeffs);
        std::vector<Matrix> th = theta(coeffs, y);
        return Feedback{mode, std::move(y), th, FPath(size, Matrix::Zero(n, n)), std::nullopt, th,
                        std::vector<Vector>(size, Vector::Zero(n))};
    }
    FPath f = choose_F(coeffs);
    RiccatiSolution yhat = solve_riccati_hat(coeffs, f);
    std::vector<Matrix> th = theta_hat(coeffs, f, yhat);
    TargetSolution targets = solve_targets(spec, coeffs, f, yhat, th);
    std::vector<Matrix> gain(size);
    std::vector<Vector> offset(size);
    for (std::size_t j = 0; j < size; ++j) {
        const CoefficientSample& s = coeffs.half(j);
        gain[j] = f[j] + th[j];
        offset[j] = f[j] * (s.gamma_half * s.running_target) - targets.theta0[j];
    }
    return Feedback{mode, std::move(yhat), std::move(th), std::move(f), std::move(targets), std::move(gain),
                    std::move(offset)};
}

HiddenState optimal_state(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb) {
    if (coeffs.noisy()) fail(ErrorKind::Precondition, "stochastic impact needs a Brownian path");
    const auto steps = static_cast<std::size_t>(coeffs.grid().steps());
    const double h = coeffs.grid().dt();
    const auto f = [&](std::size_t j, const Vector& y) {
        return state_drift(coeffs.half(j), fb.gain[j], fb.offset[j], y);
    };
    HiddenState out;
    out.values.reserve(steps + 1);
    out.values.push_back(h0_of(spec));
    for (std::size_t i = 0; i < steps; ++i) {
        const Vector& y = out.values.back();
        const Vector k1 = f(2 * i, y);
        const Vector k2 = f(2 * i + 1, y + 0.5 * h * k1);
        const Vector k3 = f(2 * i + 1, y + 0.5 * h * k2);
        const Vector k4 = f(2 * i + 2, y + h * k3);
        out.values.push_back(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    return out;
}

HiddenState optimal_state(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb,
                          const BrownianPath& w) {
    if (!coeffs.noisy()) return optimal_state(spec, coeffs, fb);
    const auto steps = static_cast<std::size_t>(coeffs.grid().steps());
    require(w.grid == coeffs.grid() && w.increments.size() == steps, ErrorKind::Shape,
            "Brownian path must live on the trading grid");
    const double h = coeffs.grid().dt();
    const auto n = coeffs.assets();
    const Matrix identity = Matrix::Identity(n, n);
    HiddenState out;
    out.values.reserve(steps + 1);
    out.values.push_back(h0_of(spec));
    for (std::size_t i = 0; i < steps; ++i) {
        const CoefficientSample& s = coeffs.node(i);
        const Matrix& gain = fb.gain[2 * i];
        const Vector& offset = fb.offset[2 * i];
        const Vector& y = out.values.back();
        Vector next = y + h * state_drift(s, gain, offset, y);
        const Vector diffusion = (identity - 2.0 * gain) * y - 2.0 * offset;
        for (std::size_t k = 0; k < s.C.size(); ++k) next += w.increments[i](k) * (s.C[k] * diffusion);
        out.values.push_back(std::move(next));
    }
    return out;
}

OptimalSolution optimal_strategy(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb) {
    HiddenState hidden = optimal_state(spec, coeffs, fb);
    const ImpactPath& impact = coeffs.impact();
    return assemble(spec, coeffs, fb, std::move(hidden),
                    [&](std::size_t i, double alpha, const Vector& v) { return impact.apply(2 * i, alpha, v); });
}

OptimalSolution optimal_strategy(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb,
                                 const BrownianPath& w, const ImpactPath& impact) {
    require(impact.grid() == coeffs.grid(), ErrorKind::Shape, "impact path must live on the trading grid");
    HiddenState hidden = optimal_state(spec, coeffs, fb, w);
    return assemble(spec, coeffs, fb, std::move(hidden),
                    [&](std::size_t i, double alpha, const Vector& v) { return impact.apply(i, alpha, v); });
}

double optimal_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const Feedback& fb) {
    const Vector h0 = h0_of(spec);
    const Vector scaled_d = coeffs.node(0).gamma_inv_half * spec.d0;
    double cost = h0.dot(fb.riccati.values.front() * h0) - 0.5 * scaled_d.squaredNorm();
    if (fb.targets) cost += -2.0 * h0.dot(fb.targets->psi.front()) + fb.targets->v0;
    return cost;
}

ExecutionPlan crossing_zero_oracle(double horizon, double x1, double rho1, double rho2, double rho3,
                                   const TimeGrid& grid) {
    if (!(rho1 > 0.0 && rho1 * rho2 - rho3 * rho3 > 0.0))
        fail(ErrorKind::NumericDomain, "resilience must be positive definite");
    const double t = horizon;
    const double denom = (2.0 + t * rho1) * (2.0 + t * rho2) - t * t * rho3 * rho3;
    ExecutionPlan plan{Vector::Zero(2), std::vector<Vector>(static_cast<std::size_t>(grid.steps())), Vector::Zero(2)};
    plan.x_pre << x1, 0.0;
    for (std::size_t i = 0; i < plan.values.size(); ++i) {
        const double s = grid.at(static_cast<int>(i));
        Vector x(2);
        x << ((1.0 + (t - s) * rho1) * (2.0 + t * rho2) - t * (t - s) * rho3 * rho3) * x1 / denom,
            (t - 2.0 * s) * rho3 * x1 / denom;
        plan.values[i] = x;
    }
    return plan;
}

}  // namespace mexec
