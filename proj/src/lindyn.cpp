#include "mexec/lindyn.hpp"

#include <cmath>

#include "mexec/error.hpp"

namespace mexec {

namespace {

std::size_t stride_between(const TimeGrid& fine, const TimeGrid& coarse) {
    require(fine.steps() % coarse.steps() == 0 && std::abs(fine.horizon() - coarse.horizon()) <= 1e-12 * coarse.horizon(),
            ErrorKind::Shape, "grid does not refine the trading grid");
    return static_cast<std::size_t>(fine.steps() / coarse.steps());
}

void check_plan(const ExecutionPlan& plan, const TimeGrid& grid, Eigen::Index n) {
    require(plan.values.size() == static_cast<std::size_t>(grid.steps()), ErrorKind::Shape,
            "plan length must match the trading grid");
    require(plan.x_pre.size() == n && plan.terminal.size() == n, ErrorKind::Shape, "plan dimension mismatch");
    for (const auto& v : plan.values) require(v.size() == n, ErrorKind::Shape, "plan dimension mismatch");
}

void check_control(const ControlPath& u, const TimeGrid& grid, Eigen::Index n) {
    const auto steps = static_cast<std::size_t>(grid.steps());
    require(u.left.size() == steps && u.mid.size() == steps && u.right.size() == steps, ErrorKind::Shape,
            "control length must match the trading grid");
    for (std::size_t i = 0; i < steps; ++i)
        require(u.left[i].size() == n && u.mid[i].size() == n && u.right[i].size() == n, ErrorKind::Shape,
                "control dimension mismatch");
}

struct Accumulated {
    DeviationPath deviation;
    std::vector<Vector> sums;  // d + sum_{k <= i} nu gamma dX, i = 0..N
};

// Impact at trading node i is supplied by the caller; the resolvent may live on a refinement.
template <class ImpactAt>
Accumulated accumulate(const Resolvent& nu, const TimeGrid& grid, const ExecutionPlan& plan, const Vector& d0,
                       ImpactAt&& impact_at) {
    const std::size_t steps = plan.steps();
    const std::size_t r = stride_between(nu.grid, grid);
    Accumulated out;
    DeviationPath& dev = out.deviation;
    dev.d_pre = d0;
    dev.values.resize(steps);
    dev.left_limits.resize(steps + 1);
    dev.left_limits[0] = d0;
    out.sums.resize(steps + 1);
    Vector sum = d0;
    for (std::size_t i = 0; i <= steps; ++i) {
        sum += nu.nu[r * i] * (impact_at(i) * plan.jump(i));
        out.sums[i] = sum;
        if (i < steps) {
            dev.values[i] = nu.nu_inv[r * i] * sum;
            dev.left_limits[i + 1] = nu.nu_inv[r * (i + 1)] * sum;
        } else {
            dev.terminal = nu.nu_inv[r * i] * sum;
        }
    }
    return out;
}

template <class ImpactAt>
double pathwise_from(const DeviationPath& dev, const ExecutionPlan& plan, ImpactAt&& impact_at) {
    double total = 0.0;
    for (std::size_t i = 0; i <= plan.steps(); ++i) {
        const Vector dx = plan.jump(i);
        total += dev.left_limits[i].dot(dx) + 0.5 * dx.dot(impact_at(i) * dx);
    }
    return total;
}

Accumulated accumulate_on(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan,
                          const ImpactPath& impact) {
    check_plan(plan, coeffs.grid(), spec.assets);
    const std::size_t r = stride_between(impact.grid(), coeffs.grid());
    const Resolvent nu = resolvent(spec.resilience, coeffs.grid().refined(2));
    return accumulate(nu, coeffs.grid(), plan, spec.d0, [&](std::size_t i) { return impact.power(r * i, 1.0); });
}

double quadratic_form_on(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan,
                         const ImpactPath& impact) {
    const DeviationPath dev = accumulate_on(spec, coeffs, plan, impact).deviation;
    const std::size_t r = stride_between(impact.grid(), coeffs.grid());
    const std::size_t steps = plan.steps();
    const double h = coeffs.grid().dt();
    const auto integrand = [&](std::size_t node, const Vector& d) {
        const Vector scaled = impact.apply(r * node, -0.5, d);
        return scaled.dot(coeffs.node(node).kappa * scaled);
    };
    double running = 0.0;
    for (std::size_t i = 0; i < steps; ++i)
        running += 0.5 * h * (integrand(i, dev.values[i]) + integrand(i + 1, dev.left_limits[i + 1]));
    const double terminal = 0.5 * dev.terminal.dot(impact.apply(r * steps, -1.0, dev.terminal));
    const double initial = 0.5 * spec.d0.dot(impact.apply(0, -1.0, spec.d0));
    return terminal - initial + running;
}

void require_deterministic(const CoefficientSet& coeffs, const char* what) {
    if (coeffs.noisy()) fail(ErrorKind::Precondition, std::string(what) + " needs deterministic impact");
}

Vector drift(const CoefficientSample& s, const Vector& h, const Vector& u) { return s.A * h + s.B * u; }

}  // namespace

Resolvent resolvent(const MatrixFunction& rho, const TimeGrid& grid) {
    Resolvent out{grid, {}, {}};
    const double h = grid.dt();
    Matrix rho0 = rho(0.0);
    const auto n = rho0.rows();
    require(rho0.cols() == n, ErrorKind::Shape, "resilience must be square");
    out.nu.reserve(grid.nodes());
    out.nu_inv.reserve(grid.nodes());
    out.nu.push_back(Matrix::Identity(n, n));
    out.nu_inv.push_back(Matrix::Identity(n, n));
    for (int i = 0; i < grid.steps(); ++i) {
        const double t = grid.at(i);
        const Matrix r1 = i == 0 ? rho0 : rho(t);
        const Matrix r2 = rho(t + 0.5 * h);
        const Matrix r4 = rho(grid.at(i + 1));
        const Matrix& v = out.nu.back();
        const Matrix k1 = v * r1;
        const Matrix k2 = (v + 0.5 * h * k1) * r2;
        const Matrix k3 = (v + 0.5 * h * k2) * r2;
        const Matrix k4 = (v + h * k3) * r4;
        Matrix next = v + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const Matrix& w = out.nu_inv.back();
        const Matrix j1 = -r1 * w;
        const Matrix j2 = -r2 * (w + 0.5 * h * j1);
        const Matrix j3 = -r2 * (w + 0.5 * h * j2);
        const Matrix j4 = -r4 * (w + h * j3);
        Matrix next_inv = w + h / 6.0 * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
        if (!next.allFinite() || !next_inv.allFinite())
            fail(ErrorKind::NumericDomain, "resolvent overflow", grid.at(i + 1));
        out.nu.push_back(std::move(next));
        out.nu_inv.push_back(std::move(next_inv));
    }
    return out;
}

Vector ExecutionPlan::jump(std::size_t i) const {
    if (i == 0) return values.empty() ? Vector(terminal - x_pre) : Vector(values[0] - x_pre);
    if (i < values.size()) return values[i] - values[i - 1];
    return terminal - values.back();
}

ControlPath ControlPath::piecewise_constant(const std::vector<Vector>& values) {
    return ControlPath{values, values, values};
}

DeviationPath deviation_of_plan(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan) {
    return deviation_of_plan(spec, coeffs, plan, coeffs.impact());
}

DeviationPath deviation_of_plan(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan,
                                const ImpactPath& impact) {
    return accumulate_on(spec, coeffs, plan, impact).deviation;
}

double pathwise_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan) {
    return pathwise_cost(spec, coeffs, plan, coeffs.impact());
}

double pathwise_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan,
                     const ImpactPath& impact) {
    const DeviationPath dev = accumulate_on(spec, coeffs, plan, impact).deviation;
    const std::size_t r = stride_between(impact.grid(), coeffs.grid());
    return pathwise_from(dev, plan, [&](std::size_t i) { return impact.power(r * i, 1.0); });
}

double pathwise_cost_raw_impact(const Matrix& impact, const MatrixFunction& rho, const TimeGrid& grid,
                                const ExecutionPlan& plan, const Vector& d0) {
    check_plan(plan, grid, impact.rows());
    const Resolvent nu = resolvent(rho, grid);
    const auto at = [&](std::size_t) -> const Matrix& { return impact; };
    const DeviationPath dev = accumulate(nu, grid, plan, d0, at).deviation;
    return pathwise_from(dev, plan, at);
}

double cost_quadratic_form(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan) {
    return quadratic_form_on(spec, coeffs, plan, coeffs.impact());
}

double cost_quadratic_form(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan,
                           const ImpactPath& impact) {
    return quadratic_form_on(spec, coeffs, plan, impact);
}

double risk_cost(const CoefficientSet& coeffs, const ExecutionPlan& plan) {
    check_plan(plan, coeffs.grid(), coeffs.assets());
    const double h = coeffs.grid().dt();
    const auto integrand = [&](std::size_t node, const Vector& x) {
        const CoefficientSample& s = coeffs.node(node);
        const Vector e = x - s.running_target;
        return e.dot(s.risk * e);
    };
    double total = 0.0;
    for (std::size_t i = 0; i < plan.steps(); ++i)
        total += 0.5 * h * (integrand(i, plan.values[i]) + integrand(i + 1, plan.values[i]));
    return total;
}

Vector initial_hidden_state(const MarketSpec& spec) {
    const Vector sqrt_lambda = spec.lambda0.array().sqrt();
    return from_frame(spec.frame, sqrt_lambda.cwiseInverse()) * spec.d0 - from_frame(spec.frame, sqrt_lambda) * spec.x0;
}

HiddenState hidden_state(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u) {
    require_deterministic(coeffs, "hidden_state without a Brownian path");
    check_control(u, coeffs.grid(), spec.assets);
    const double h = coeffs.grid().dt();
    HiddenState out;
    out.values.reserve(coeffs.grid().nodes());
    out.values.push_back(initial_hidden_state(spec));
    for (std::size_t i = 0; i < u.steps(); ++i) {
        const Vector& y = out.values.back();
        const Vector k1 = drift(coeffs.node(i), y, u.left[i]);
        const Vector k2 = drift(coeffs.mid(i), y + 0.5 * h * k1, u.mid[i]);
        const Vector k3 = drift(coeffs.mid(i), y + 0.5 * h * k2, u.mid[i]);
        const Vector k4 = drift(coeffs.node(i + 1), y + h * k3, u.right[i]);
        out.values.push_back(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    return out;
}

HiddenState hidden_state(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u,
                         const BrownianPath& w) {
    if (!coeffs.noisy()) return hidden_state(spec, coeffs, u);
    check_control(u, coeffs.grid(), spec.assets);
    require(w.grid == coeffs.grid() && w.increments.size() == u.steps(), ErrorKind::Shape,
            "Brownian path must live on the trading grid");
    const double h = coeffs.grid().dt();
    HiddenState out;
    out.values.reserve(coeffs.grid().nodes());
    out.values.push_back(initial_hidden_state(spec));
    for (std::size_t i = 0; i < u.steps(); ++i) {
        const CoefficientSample& s = coeffs.node(i);
        const Vector& y = out.values.back();
        Vector next = y + h * drift(s, y, u.left[i]);
        for (std::size_t k = 0; k < s.C.size(); ++k) next += w.increments[i](k) * (s.C[k] * (y - 2.0 * u.left[i]));
        out.values.push_back(std::move(next));
    }
    return out;
}

ControlPath phi(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& plan) {
    require_deterministic(coeffs, "phi");
    check_plan(plan, coeffs.grid(), spec.assets);
    const Resolvent nu = resolvent(spec.resilience, coeffs.grid().refined(2));
    const ImpactPath& impact = coeffs.impact();
    const Accumulated acc =
        accumulate(nu, coeffs.grid(), plan, spec.d0, [&](std::size_t i) { return impact.power(2 * i, 1.0); });
    const std::size_t steps = plan.steps();
    ControlPath u;
    u.left.resize(steps);
    u.mid.resize(steps);
    u.right.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        u.left[i] = coeffs.node(i).gamma_inv_half * acc.deviation.values[i];
        u.mid[i] = coeffs.mid(i).gamma_inv_half * (nu.nu_inv[2 * i + 1] * acc.sums[i]);
        u.right[i] = coeffs.node(i + 1).gamma_inv_half * acc.deviation.left_limits[i + 1];
    }
    return u;
}

ExecutionPlan phi_bar(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u) {
    const HiddenState h = hidden_state(spec, coeffs, u);
    ExecutionPlan plan{spec.x0, std::vector<Vector>(u.steps()), spec.terminal_target};
    for (std::size_t i = 0; i < u.steps(); ++i)
        plan.values[i] = coeffs.node(i).gamma_inv_half * (u.left[i] - h.values[i]);
    return plan;
}

double metric(const MarketSpec& spec, const CoefficientSet& coeffs, const ExecutionPlan& a, const ExecutionPlan& b) {
    const ControlPath ua = phi(spec, coeffs, a);
    const ControlPath ub = phi(spec, coeffs, b);
    const double h = coeffs.grid().dt();
    double total = 0.0;
    for (std::size_t i = 0; i < ua.steps(); ++i)
        total += h / 6.0 *
                 ((ua.left[i] - ub.left[i]).squaredNorm() + 4.0 * (ua.mid[i] - ub.mid[i]).squaredNorm() +
                  (ua.right[i] - ub.right[i]).squaredNorm());
    return std::sqrt(total);
}

double lq_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u) {
    const HiddenState state = hidden_state(spec, coeffs, u);
    const double h = coeffs.grid().dt();
    const auto integrand = [&](std::size_t node, const Vector& control, const Vector& hidden) {
        const CoefficientSample& s = coeffs.node(node);
        const Vector shifted = hidden + s.gamma_half * s.running_target;
        return control.dot(s.R * control) + shifted.dot(s.Q * shifted) - 2.0 * control.dot(s.Q * shifted);
    };
    double running = 0.0;
    for (std::size_t i = 0; i < u.steps(); ++i)
        running += 0.5 * h *
                   (integrand(i, u.left[i], state.values[i]) + integrand(i + 1, u.right[i], state.values[i + 1]));
    const std::size_t last = u.steps();
    const Vector end = state.values[last] + coeffs.node(last).gamma_half * spec.terminal_target;
    const Vector scaled_d = coeffs.node(0).gamma_inv_half * spec.d0;
    return 0.5 * end.squaredNorm() + running - 0.5 * scaled_d.squaredNorm();
}

std::vector<FvApproximation> fv_approximate(const MarketSpec& spec, const CoefficientSet& coeffs, const ControlPath& u,
                                            std::span<const int> pieces) {
    if (coeffs.noisy())
        fail(ErrorKind::UnsupportedScope, "finite-variation approximation is implemented for deterministic impact");
    check_control(u, coeffs.grid(), spec.assets);
    const std::size_t steps = u.steps();
    const double h = coeffs.grid().dt();
    std::vector<Vector> cell_mean(steps);
    for (std::size_t i = 0; i < steps; ++i) cell_mean[i] = (u.left[i] + 4.0 * u.mid[i] + u.right[i]) / 6.0;

    std::vector<FvApproximation> out;
    for (const int count : pieces) {
        require(count >= 1 && steps % static_cast<std::size_t>(count) == 0, ErrorKind::Configuration,
                "approximation pieces must divide the grid");
        const std::size_t width = steps / static_cast<std::size_t>(count);
        std::vector<Vector> values(steps);
        for (std::size_t p = 0; p < steps; p += width) {
            Vector mean = Vector::Zero(spec.assets);
            for (std::size_t i = p; i < p + width; ++i) mean += cell_mean[i];
            mean /= static_cast<double>(width);
            for (std::size_t i = p; i < p + width; ++i) values[i] = mean;
        }
        ControlPath approx = ControlPath::piecewise_constant(values);
        double squared = 0.0;
        for (std::size_t i = 0; i < steps; ++i)
            squared += h / 6.0 *
                       ((values[i] - u.left[i]).squaredNorm() + 4.0 * (values[i] - u.mid[i]).squaredNorm() +
                        (values[i] - u.right[i]).squaredNorm());
        ExecutionPlan plan = phi_bar(spec, coeffs, approx);
        const double cost = lq_cost(spec, coeffs, approx);
        out.push_back(FvApproximation{count, std::move(approx), std::move(plan), std::sqrt(squared), cost});
    }
    return out;
}

}  // namespace mexec
