#include "mexec/montecarlo.hpp"

#include <cmath>
#include <exception>
#include <functional>
#include <random>
#include <thread>
#include <unsupported/Eigen/MatrixFunctions>

#include "mexec/error.hpp"

namespace mexec {

namespace {

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double total = 0.0;
        for (const double v : values) total += v;
        return total;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

// Per-step log drift (mu - |sigma_j|^2 / 2) h and volatility, frozen at the left node.
struct LambdaTables {
    TimeGrid grid;
    Matrix frame;
    Vector lambda0;
    std::vector<Vector> drift;
    std::vector<Matrix> sigma;
};

LambdaTables lambda_tables(const MarketSpec& spec, const TimeGrid& grid) {
    LambdaTables out{grid, spec.frame, spec.lambda0, {}, {}};
    const double h = grid.dt();
    for (int i = 0; i < grid.steps(); ++i) {
        const double t = grid.at(i);
        Matrix sigma = spec.volatility(t);
        out.drift.push_back((spec.drift(t) - 0.5 * sigma.rowwise().squaredNorm()) * h);
        out.sigma.push_back(std::move(sigma));
    }
    return out;
}

ImpactPath simulate_with(const LambdaTables& tables, const BrownianPath& w) {
    require(w.grid == tables.grid && w.increments.size() == tables.drift.size(), ErrorKind::Shape,
            "Brownian path does not match the simulation grid");
    std::vector<Vector> eigen;
    eigen.reserve(tables.drift.size() + 1);
    Vector log_lambda = tables.lambda0.array().log();
    eigen.push_back(tables.lambda0);
    for (std::size_t i = 0; i < tables.drift.size(); ++i) {
        log_lambda += tables.drift[i] + tables.sigma[i] * w.increments[i];
        eigen.push_back(log_lambda.array().exp());
    }
    return ImpactPath(tables.frame, tables.grid, std::move(eigen));
}

ExecutionPlan refine_plan(const ExecutionPlan& plan, std::size_t factor) {
    ExecutionPlan out{plan.x_pre, {}, plan.terminal};
    out.values.reserve(plan.values.size() * factor);
    for (const auto& v : plan.values)
        for (std::size_t r = 0; r < factor; ++r) out.values.push_back(v);
    return out;
}

class PathEvaluator {
public:
    PathEvaluator(const MarketSpec& spec, const CoefficientSet& coeffs, const StrategyRule& rule)
        : spec_(spec), coeffs_(coeffs), tables_(lambda_tables(spec, coeffs.grid())) {
        const Vector scaled_d = coeffs.node(0).gamma_inv_half * spec.d0;
        initial_term_ = 0.5 * scaled_d.squaredNorm();
        if (const auto* fixed = std::get_if<FixedPlanRule>(&rule)) {
            plan_ = fixed->plan;
            require(plan_->steps() == static_cast<std::size_t>(coeffs.grid().steps()), ErrorKind::Shape,
                    "plan length must match the simulation grid");
            const Resolvent nu = resolvent(spec.resilience, coeffs.grid());
            nu_ = nu.nu;
            nu_inv_ = nu.nu_inv;
            plan_risk_ = risk_cost(coeffs, *plan_);
        } else {
            feedback_ = make_feedback(spec, coeffs);
            if (!coeffs.noisy()) fixed_state_ = optimal_state(spec, coeffs, *feedback_);
        }
    }

    double cost(std::uint64_t seed, std::uint64_t path) const {
        if (!coeffs_.noisy()) {
            const ImpactPath& impact = coeffs_.impact();
            const auto apply = [&](std::size_t i, double a, const Vector& v) { return impact.apply(2 * i, a, v); };
            return plan_ ? plan_cost(apply) : feedback_cost(*fixed_state_, apply);
        }
        const BrownianPath w = brownian_path(coeffs_.grid(), coeffs_.factors(), seed, path);
        const ImpactPath impact = simulate_with(tables_, w);
        const auto apply = [&](std::size_t i, double a, const Vector& v) { return impact.apply(i, a, v); };
        if (plan_) return plan_cost(apply);
        return feedback_cost(optimal_state(spec_, coeffs_, *feedback_, w), apply);
    }

private:
    using Apply = std::function<Vector(std::size_t, double, const Vector&)>;

    double plan_cost(const Apply& apply) const {
        const ExecutionPlan& plan = *plan_;
        const std::size_t steps = plan.steps();
        const double h = coeffs_.grid().dt();
        const auto kappa_term = [&](std::size_t i, const Vector& d) {
            const Vector scaled = apply(i, -0.5, d);
            return scaled.dot(coeffs_.node(i).kappa * scaled);
        };
        Vector sum = spec_.d0;
        double running = 0.0;
        for (std::size_t i = 0; i < steps; ++i) {
            sum += nu_[i] * apply(i, 1.0, plan.jump(i));
            running += 0.5 * h * (kappa_term(i, nu_inv_[i] * sum) + kappa_term(i + 1, nu_inv_[i + 1] * sum));
        }
        sum += nu_[steps] * apply(steps, 1.0, plan.jump(steps));
        const Vector terminal = nu_inv_[steps] * sum;
        return 0.5 * terminal.dot(apply(steps, -1.0, terminal)) + running + plan_risk_ - initial_term_;
    }

    double feedback_cost(const HiddenState& state, const Apply& apply) const {
        const Feedback& fb = *feedback_;
        const auto& hidden = state.values;
        const std::size_t steps = hidden.size() - 1;
        const double h = coeffs_.grid().dt();
        const auto integrand = [&](std::size_t i) {
            const CoefficientSample& s = coeffs_.node(i);
            const Vector u = fb.gain[2 * i] * hidden[i] + fb.offset[2 * i];
            double value = u.dot(s.kappa * u);
            if (!s.risk.isZero(0.0)) {
                const Vector e = apply(i, -0.5, Vector(u - hidden[i])) - s.running_target;
                value += e.dot(s.risk * e);
            }
            return value;
        };
        double running = 0.0;
        double left = integrand(0);
        for (std::size_t i = 0; i < steps; ++i) {
            const double right = integrand(i + 1);
            running += 0.5 * h * (left + right);
            left = right;
        }
        const Vector end = hidden[steps] + apply(steps, 0.5, spec_.terminal_target);
        return 0.5 * end.squaredNorm() + running - initial_term_;
    }

    const MarketSpec& spec_;
    const CoefficientSet& coeffs_;
    LambdaTables tables_;
    double initial_term_ = 0.0;
    std::optional<ExecutionPlan> plan_;
    std::vector<Matrix> nu_;
    std::vector<Matrix> nu_inv_;
    double plan_risk_ = 0.0;
    std::optional<Feedback> feedback_;
    std::optional<HiddenState> fixed_state_;
};

}  // namespace

BrownianPath brownian_path(const TimeGrid& grid, int factors, std::uint64_t seed, std::uint64_t path) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
    std::mt19937_64 engine(seq);
    std::normal_distribution<double> normal;
    const double scale = std::sqrt(grid.dt());
    BrownianPath out{grid, std::vector<Vector>(static_cast<std::size_t>(grid.steps()))};
    for (auto& dw : out.increments) {
        dw.resize(factors);
        for (int k = 0; k < factors; ++k) dw(k) = scale * normal(engine);
    }
    return out;
}

ImpactPath simulate_lambda(const MarketSpec& spec, const BrownianPath& w) {
    return simulate_with(lambda_tables(spec, w.grid), w);
}

ExecutionPlan immediate_close(const MarketSpec& spec) {
    return ExecutionPlan{spec.x0, std::vector<Vector>(static_cast<std::size_t>(spec.grid_steps), Vector::Zero(spec.assets)),
                         spec.terminal_target};
}

std::vector<double> mc_path_costs(const MarketSpec& spec, const CoefficientSet& coeffs, const StrategyRule& rule,
                                  const SimConfig& config) {
    require(config.n_paths >= 1, ErrorKind::Configuration, "need at least one path");
    require(config.workers >= 1, ErrorKind::Configuration, "need at least one worker");
    const int trading_steps = coeffs.grid().steps();
    if (config.grid_steps != 0 && config.grid_steps != trading_steps) {
        require(config.grid_steps % trading_steps == 0, ErrorKind::Configuration,
                "simulation grid must refine the trading grid");
        MarketSpec fine = spec;
        fine.grid_steps = config.grid_steps;
        const CoefficientSet fine_coeffs = derive_coefficients(fine);
        StrategyRule fine_rule = rule;
        if (const auto* fixed = std::get_if<FixedPlanRule>(&rule))
            fine_rule = FixedPlanRule{refine_plan(fixed->plan, static_cast<std::size_t>(config.grid_steps / trading_steps))};
        SimConfig same = config;
        same.grid_steps = 0;
        return mc_path_costs(fine, fine_coeffs, fine_rule, same);
    }

    const PathEvaluator evaluator(spec, coeffs, rule);
    std::vector<double> costs(config.n_paths);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(config.workers, config.n_paths));
    std::vector<std::exception_ptr> errors(workers);
    const auto work = [&](unsigned id) {
        try {
            for (std::size_t p = id; p < config.n_paths; p += workers) costs[p] = evaluator.cost(config.seed, p);
        } catch (...) {
            errors[id] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (unsigned id = 0; id < workers; ++id) threads.emplace_back(work, id);
        for (auto& t : threads) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return costs;
}

MCEstimate mc_cost(const MarketSpec& spec, const CoefficientSet& coeffs, const StrategyRule& rule,
                   const SimConfig& config) {
    const std::vector<double> costs = mc_path_costs(spec, coeffs, rule, config);
    return summarize(costs);
}

MCEstimate summarize(std::span<const double> samples) {
    require(!samples.empty(), ErrorKind::DegenerateInput, "no samples");
    const auto n = static_cast<double>(samples.size());
    const double mean = pairwise_sum(samples) / n;
    if (samples.size() == 1) return {mean, 0.0, 1};
    std::vector<double> squares(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) squares[i] = (samples[i] - mean) * (samples[i] - mean);
    const double variance = pairwise_sum(squares) / (n - 1.0);
    return {mean, std::sqrt(variance / n), samples.size()};
}

double asymmetric_roundtrip(const Matrix& gamma_tilde, const Matrix& rho, double n_blocks, double h,
                            std::optional<int> direction) {
    const auto n = gamma_tilde.rows();
    require(n >= 2 && gamma_tilde.cols() == n && rho.rows() == n && rho.cols() == n, ErrorKind::Shape,
            "round trip needs two or more assets");
    require(h > 0.0, ErrorKind::Configuration, "block spacing must be positive");
    const double skew = gamma_tilde(0, 1) - gamma_tilde(1, 0);
    const double a = direction ? static_cast<double>(*direction) : static_cast<double>((skew > 0.0) - (skew < 0.0));
    std::vector<Vector> trades(4, Vector::Zero(n));
    trades[0](0) = n_blocks;
    trades[1](1) = a;
    trades[2](0) = -n_blocks;
    trades[3](1) = -a;
    std::vector<Matrix> nu(4), nu_inv(4);
    for (int k = 0; k < 4; ++k) {
        nu[k] = (rho * (k * h)).exp();
        nu_inv[k] = (rho * (-k * h)).exp();
    }
    double total = 0.0;
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < j; ++k)
            total += trades[k].dot(gamma_tilde.transpose() * nu[k].transpose() * nu_inv[j].transpose() * trades[j]);
        total += 0.5 * trades[j].dot(gamma_tilde * trades[j]);
    }
    return total;
}

double blowup_demo(double horizon, double k, const Vector& x) {
    require(horizon > 0.0, ErrorKind::Configuration, "horizon must be positive");
    require(x.size() == 2, ErrorKind::Shape, "blowup example has two assets");
    Matrix gamma(2, 2);
    gamma << 2.0, 1.0, 1.0, 1.0;
    const double t = horizon;
    const double initial = k * k / 2.0;
    const double running = -t * k * k;
    const double terminal = 0.5 * k * k * (5.0 * t * t - 1.0) + 0.5 * k * (2.0 * t * x(0) + 4.0 * t * x(1)) +
                            0.5 * x.dot(gamma * x);
    return initial + running + terminal;
}

ExecutionPlan blowup_plan(double k, const Vector& x, const TimeGrid& grid) {
    require(x.size() == 2, ErrorKind::Shape, "blowup example has two assets");
    ExecutionPlan plan{x, std::vector<Vector>(static_cast<std::size_t>(grid.steps())), Vector::Zero(2)};
    for (std::size_t i = 0; i < plan.values.size(); ++i) {
        const double s = grid.at(static_cast<int>(i));
        Vector v(2);
        v << x(0) + k - s * k, x(1) - k + 3.0 * s * k;
        plan.values[i] = v;
    }
    return plan;
}

}  // namespace mexec
