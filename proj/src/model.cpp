#include "mexec/model.hpp"

#include <cmath>
#include <string>

#include "mexec/error.hpp"

namespace mexec {

namespace {

constexpr double kFrameTolerance = 1e-12;
constexpr double kStructureTolerance = 1e-12;

template <class Value>
void check_table(const TimeFunction<Value>& fn, const char* name) {
    if (const auto* table = fn.table()) {
        require(!table->times.empty() && table->times.size() == table->values.size(), ErrorKind::Configuration,
                std::string(name) + ": table needs matching non-empty times and values");
        for (std::size_t k = 1; k < table->times.size(); ++k)
            require(table->times[k] > table->times[k - 1], ErrorKind::Configuration,
                    std::string(name) + ": table times must increase");
    }
}

void check_shape(const Matrix& value, Eigen::Index rows, Eigen::Index cols, const char* name, double t) {
    if (value.rows() != rows || value.cols() != cols)
        fail(ErrorKind::Shape,
             std::string(name) + " must be " + std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                 std::to_string(value.rows()) + "x" + std::to_string(value.cols()),
             t);
    if (!value.allFinite()) fail(ErrorKind::NumericDomain, std::string(name) + " is not finite", t);
}

Vector row_half_squares(const Matrix& sigma) { return 0.5 * sigma.rowwise().squaredNorm(); }

// Integral of mu - |sigma_j|^2 / 2 from 0 to t, for every node of the grid.
std::vector<Vector> log_drift(const MarketSpec& spec, const TimeGrid& grid) {
    const auto identity = [](const Vector& v) -> Vector { return v; };
    std::vector<Vector> out(grid.nodes());
    Vector running = Vector::Zero(spec.assets);
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
        const double t = grid.at(static_cast<int>(k));
        if (spec.drift.is_callable() || spec.volatility.is_callable()) {
            if (k > 0) {
                const double s = grid.at(static_cast<int>(k) - 1);
                running += spec.drift.integrate(s, t, identity) - spec.volatility.integrate(s, t, row_half_squares);
            }
            out[k] = running;
        } else {
            out[k] = spec.drift.integrate(0.0, t, identity) - spec.volatility.integrate(0.0, t, row_half_squares);
        }
    }
    return out;
}

void require_deterministic_structure(const Matrix& frame, const Matrix& sigma, const Matrix& rho, const Matrix& risk,
                                     double t) {
    const Matrix s = frame * rho * frame.transpose();
    const Matrix p = frame * risk * frame.transpose();
    const double s_tol = kStructureTolerance * (1.0 + s.cwiseAbs().maxCoeff());
    const double p_tol = kStructureTolerance * (1.0 + p.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            if (std::abs(s(i, j)) > s_tol && (sigma.row(i) - sigma.row(j)).cwiseAbs().maxCoeff() > kStructureTolerance)
                fail(ErrorKind::UnsupportedScope,
                     "resilience couples eigen-directions with different volatility; coefficients would be random", t);
            if (std::abs(p(i, j)) > p_tol && (sigma.row(i) + sigma.row(j)).cwiseAbs().maxCoeff() > kStructureTolerance)
                fail(ErrorKind::UnsupportedScope, "risk weight on a volatile eigen-direction; coefficients would be random",
                     t);
        }
    }
}

}  // namespace

MarketSpec MarketSpec::zeros(int assets, int factors, double horizon) {
    MarketSpec spec;
    spec.assets = assets;
    spec.factors = factors;
    spec.horizon = horizon;
    spec.frame = Matrix::Identity(assets, assets);
    spec.lambda0 = Vector::Ones(assets);
    spec.drift = Vector(Vector::Zero(assets));
    spec.volatility = Matrix(Matrix::Zero(assets, factors));
    spec.resilience = Matrix(Matrix::Zero(assets, assets));
    spec.risk = Matrix(Matrix::Zero(assets, assets));
    spec.terminal_target = Vector::Zero(assets);
    spec.running_target = Vector(Vector::Zero(assets));
    spec.x0 = Vector::Zero(assets);
    spec.d0 = Vector::Zero(assets);
    return spec;
}

void MarketSpec::validate() const {
    require(assets >= 1, ErrorKind::Configuration, "need at least one asset");
    require(factors >= 1, ErrorKind::Configuration, "need at least one noise factor");
    require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::Configuration, "horizon must be positive");
    require(grid_steps >= 1, ErrorKind::Configuration, "grid_steps must be positive");
    check_shape(frame, assets, assets, "frame", 0.0);
    require((frame.transpose() * frame - Matrix::Identity(assets, assets)).cwiseAbs().maxCoeff() <= kFrameTolerance,
            ErrorKind::Configuration, "frame is not orthogonal");
    check_shape(lambda0, assets, 1, "lambda0", 0.0);
    require((lambda0.array() > 0.0).all(), ErrorKind::Configuration, "lambda0 must be positive");
    check_shape(x0, assets, 1, "x0", 0.0);
    check_shape(d0, assets, 1, "d0", 0.0);
    check_shape(terminal_target, assets, 1, "terminal target", horizon);
    check_table(drift, "drift");
    check_table(volatility, "volatility");
    check_table(resilience, "resilience");
    check_table(risk, "risk");
    check_table(running_target, "running target");
    const TimeGrid half = grid().refined(2);
    for (std::size_t k = 0; k < half.nodes(); ++k) {
        const double t = half.at(static_cast<int>(k));
        check_shape(drift(t), assets, 1, "drift", t);
        check_shape(volatility(t), assets, factors, "volatility", t);
        check_shape(resilience(t), assets, assets, "resilience", t);
        const Matrix xi = risk(t);
        check_shape(xi, assets, assets, "risk", t);
        if (asymmetry(xi) > kFrameTolerance) fail(ErrorKind::Configuration, "risk weight is not symmetric", t);
        check_shape(running_target(t), assets, 1, "running target", t);
    }
}

bool MarketSpec::has_noise() const {
    const TimeGrid half = grid().refined(2);
    for (std::size_t k = 0; k < half.nodes(); ++k)
        if (!volatility(half.at(static_cast<int>(k))).isZero(0.0)) return true;
    return false;
}

bool MarketSpec::has_targets() const {
    if (!terminal_target.isZero(0.0)) return true;
    const TimeGrid half = grid().refined(2);
    for (std::size_t k = 0; k < half.nodes(); ++k)
        if (!running_target(half.at(static_cast<int>(k))).isZero(0.0)) return true;
    return false;
}

ImpactPath::ImpactPath(Matrix frame, TimeGrid grid, std::vector<Vector> eigenvalues)
    : frame_(std::move(frame)), grid_(grid), eigenvalues_(std::move(eigenvalues)) {
    require(eigenvalues_.size() == grid_.nodes(), ErrorKind::Shape, "impact path length must match its grid");
    for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
        const Vector& lambda = eigenvalues_[k];
        if (!lambda.allFinite() || (lambda.array() <= 0.0).any())
            fail(ErrorKind::NumericDomain, "impact eigenvalue left (0, inf)", grid_.at(static_cast<int>(k)));
    }
}

Matrix ImpactPath::power(std::size_t k, double alpha) const {
    return from_frame(frame_, eigenvalues_.at(k).array().pow(alpha).matrix());
}

Vector ImpactPath::apply(std::size_t k, double alpha, const Vector& v) const {
    const Vector rotated = frame_ * v;
    return frame_.transpose() * (eigenvalues_.at(k).array().pow(alpha) * rotated.array()).matrix();
}

ImpactPath reference_impact(const MarketSpec& spec, const TimeGrid& grid) {
    const std::vector<Vector> drift = log_drift(spec, grid);
    std::vector<Vector> eigenvalues(grid.nodes());
    for (std::size_t k = 0; k < grid.nodes(); ++k)
        eigenvalues[k] = (spec.lambda0.array() * drift[k].array().exp()).matrix();
    return ImpactPath(spec.frame, grid, std::move(eigenvalues));
}

Matrix gamma_power(const MarketSpec& spec, double t, double alpha) {
    require(t >= 0.0 && t <= spec.horizon, ErrorKind::Precondition, "time outside [0, T]");
    if (t > 0.0 && spec.has_noise())
        fail(ErrorKind::Precondition, "stochastic eigenvalues need a simulated impact path", t);
    const auto identity = [](const Vector& v) -> Vector { return v; };
    const Vector lambda = (spec.lambda0.array() * spec.drift.integrate(0.0, t, identity).array().exp()).matrix();
    if (!lambda.allFinite() || (lambda.array() <= 0.0).any())
        fail(ErrorKind::NumericDomain, "impact eigenvalue left (0, inf)", t);
    return from_frame(spec.frame, lambda.array().pow(alpha).matrix());
}

CoefficientSet::CoefficientSet(TimeGrid grid, std::vector<CoefficientSample> samples, ImpactPath impact)
    : grid_(grid), samples_(std::move(samples)), impact_(std::move(impact)), noisy_(false) {
    require(samples_.size() == 2 * static_cast<std::size_t>(grid_.steps()) + 1, ErrorKind::Shape,
            "coefficient samples must cover nodes and midpoints");
    for (const auto& s : samples_)
        for (const auto& c : s.C)
            if (!c.isZero(0.0)) noisy_ = true;
}

CoefficientSet derive_coefficients(const MarketSpec& spec) {
    spec.validate();
    const TimeGrid grid = spec.grid();
    const TimeGrid half = grid.refined(2);
    ImpactPath impact = reference_impact(spec, half);
    const Matrix& frame = spec.frame;
    const int n = spec.assets;
    std::vector<CoefficientSample> samples(half.nodes());
    for (std::size_t j = 0; j < half.nodes(); ++j) {
        CoefficientSample& s = samples[j];
        const double t = half.at(static_cast<int>(j));
        s.time = t;
        const Vector sqrt_lambda = impact.eigenvalues(j).array().sqrt();
        s.gamma_half = from_frame(frame, sqrt_lambda);
        s.gamma_inv_half = from_frame(frame, sqrt_lambda.cwiseInverse());
        const Matrix mu = from_frame(frame, spec.drift(t));
        const Matrix sigma = spec.volatility(t);
        s.rho = spec.resilience(t);
        s.risk = spec.risk(t);
        s.running_target = spec.running_target(t);
        if (!sigma.isZero(0.0)) require_deterministic_structure(frame, sigma, s.rho, s.risk, t);

        s.C.resize(spec.factors);
        s.sum_CC = Matrix::Zero(n, n);
        for (int k = 0; k < spec.factors; ++k) {
            s.C[k] = symmetrized(0.5 * from_frame(frame, sigma.col(k)));
            s.sum_CC += s.C[k] * s.C[k];
        }
        s.sum_CC = symmetrized(s.sum_CC);
        const Matrix g = s.gamma_inv_half * s.rho * s.gamma_half;
        if (!g.allFinite()) fail(ErrorKind::IllConditionedImpact, "gamma^-1/2 rho gamma^1/2 is not finite", t);
        s.A = symmetrized(0.5 * mu - 0.5 * s.sum_CC);
        s.B = -g - mu + 2.0 * s.sum_CC;
        s.kappa = symmetrized(0.5 * mu - 2.0 * s.sum_CC + 0.5 * g + 0.5 * g.transpose());
        s.Q = symmetrized(s.gamma_inv_half * s.risk * s.gamma_inv_half);
        s.R = s.Q + s.kappa;
        if (!s.B.allFinite() || !s.kappa.allFinite() || !s.Q.allFinite())
            fail(ErrorKind::NumericDomain, "coefficients are not finite", t);
    }
    return CoefficientSet(grid, std::move(samples), std::move(impact));
}

FPath choose_F(const CoefficientSet& coeffs) {
    const int n = coeffs.assets();
    bool risk_free = true;
    for (std::size_t j = 0; j < coeffs.half_size(); ++j)
        if (!coeffs.half(j).Q.isZero(0.0)) risk_free = false;
    if (risk_free) return FPath(coeffs.half_size(), Matrix::Zero(n, n));

    FPath f(coeffs.half_size());
    for (std::size_t j = 0; j < coeffs.half_size(); ++j) {
        const CoefficientSample& s = coeffs.half(j);
        if (min_eigenvalue(s.R) < kPositivityFloor)
            fail(ErrorKind::NoValidF, "R is not positive definite, R F = Q has no reliable solution", s.time);
        f[j] = lu_solve(s.R, s.Q);
        const double scale = 1.0 + s.Q.cwiseAbs().maxCoeff();
        if (!f[j].allFinite() || (s.R * f[j] - s.Q).cwiseAbs().maxCoeff() > 1e-10 * scale)
            fail(ErrorKind::NoValidF, "R F = Q residual too large", s.time);
    }
    return f;
}

}  // namespace mexec
