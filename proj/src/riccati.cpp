#include "mexec/riccati.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "mexec/error.hpp"

namespace mexec {

namespace {

Matrix sum_cyc(const CoefficientSample& s, const Matrix& y) {
    Matrix out = Matrix::Zero(y.rows(), y.cols());
    for (const auto& c : s.C) out += c * y * c;
    return out;
}

struct Block {
    Matrix weight;  // R + 4 sum C Y C
    Matrix cross;   // right factor of the quadratic term
};

// Returns M^-1 L; a block below the floor is tolerated only when the cross term vanishes.
Matrix solve_block(const Block& b, double t, double& min_eig) {
    const double eig = min_eigenvalue(b.weight);
    min_eig = std::min(min_eig, eig);
    if (eig < kPositivityFloor) {
        if (b.cross.isZero(0.0)) return Matrix::Zero(b.cross.rows(), b.cross.cols());
        fail(ErrorKind::SingularDriver, "R + 4 sum C Y C is not positive definite", t);
    }
    return lu_solve(b.weight, b.cross);
}

Block plain_block(const CoefficientSample& s, const Matrix& y) {
    const Matrix cyc = sum_cyc(s, y);
    return {s.R + 4.0 * cyc, s.B.transpose() * y - s.Q - 2.0 * cyc};
}

Block hat_block(const CoefficientSample& s, const Matrix& f, const Matrix& y) {
    const Matrix cyc = sum_cyc(s, y);
    const Matrix k = Matrix::Identity(y.rows(), y.cols()) - 2.0 * f;
    return {s.R + 4.0 * cyc, s.B.transpose() * y - 2.0 * cyc * k};
}

using Driver = std::function<Matrix(std::size_t half_index, const Matrix& y, double& min_eig)>;

RiccatiSolution integrate_backward(const CoefficientSet& coeffs, RiccatiDriver kind, const Driver& g) {
    const TimeGrid& grid = coeffs.grid();
    const auto steps = static_cast<std::size_t>(grid.steps());
    const auto n = coeffs.assets();
    const double h = grid.dt();
    RiccatiSolution sol{grid, kind, std::vector<Matrix>(steps + 1), std::vector<Matrix>(steps),
                        std::numeric_limits<double>::infinity(), 0.0};
    sol.values[steps] = 0.5 * Matrix::Identity(n, n);
    for (std::size_t i = steps; i-- > 0;) {
        const Matrix& y = sol.values[i + 1];
        const Matrix k1 = g(2 * i + 2, y, sol.min_block_eigenvalue);
        const Matrix k2 = g(2 * i + 1, y + 0.5 * h * k1, sol.min_block_eigenvalue);
        const Matrix k3 = g(2 * i + 1, y + 0.5 * h * k2, sol.min_block_eigenvalue);
        const Matrix k4 = g(2 * i, y + h * k3, sol.min_block_eigenvalue);
        Matrix next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!next.allFinite()) fail(ErrorKind::NumericDomain, "Riccati solution overflow", grid.at(static_cast<int>(i)));
        sol.max_symmetry_drift = std::max(sol.max_symmetry_drift, asymmetry(next));
        sol.values[i] = symmetrized(next);
    }
    // dY/ds = -g at the nodes feeds the Hermite midpoints.
    std::vector<Matrix> slope(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) slope[i] = -g(2 * i, sol.values[i], sol.min_block_eigenvalue);
    for (std::size_t i = 0; i < steps; ++i)
        sol.midpoints[i] =
            symmetrized(0.5 * (sol.values[i] + sol.values[i + 1]) + h / 8.0 * (slope[i] - slope[i + 1]));
    return sol;
}

std::vector<Vector> hermite_midpoints(const std::vector<Vector>& values, const std::vector<Vector>& slope, double h) {
    std::vector<Vector> mid(values.size() - 1);
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        mid[i] = 0.5 * (values[i] + values[i + 1]) + h / 8.0 * (slope[i] - slope[i + 1]);
    return mid;
}

}  // namespace

RiccatiSolution solve_riccati(const CoefficientSet& coeffs) {
    return integrate_backward(coeffs, RiccatiDriver::Plain, [&](std::size_t j, const Matrix& y, double& min_eig) {
        const CoefficientSample& s = coeffs.half(j);
        const Block b = plain_block(s, y);
        const Matrix gain = solve_block(b, s.time, min_eig);
        return Matrix(y * s.A + s.A * y + s.Q + sum_cyc(s, y) - b.cross.transpose() * gain);
    });
}

RiccatiSolution solve_riccati_hat(const CoefficientSet& coeffs, const FPath& f) {
    require(f.size() == coeffs.half_size(), ErrorKind::Shape, "F must live on the half-step grid");
    return integrate_backward(coeffs, RiccatiDriver::Hat, [&](std::size_t j, const Matrix& y, double& min_eig) {
        const CoefficientSample& s = coeffs.half(j);
        const Matrix& fj = f[j];
        const Matrix identity = Matrix::Identity(y.rows(), y.cols());
        const Matrix k = identity - 2.0 * fj;
        const Matrix a = s.A + s.B * fj;
        const Block b = hat_block(s, fj, y);
        const Matrix gain = solve_block(b, s.time, min_eig);
        return Matrix(y * a + a.transpose() * y + symmetrized(s.Q * (identity - fj)) +
                      k.transpose() * sum_cyc(s, y) * k - b.cross.transpose() * gain);
    });
}

namespace {

std::vector<Matrix> gains(const CoefficientSet& coeffs, const RiccatiSolution& y,
                          const std::function<Block(std::size_t, const Matrix&)>& block) {
    std::vector<Matrix> out(coeffs.half_size());
    for (std::size_t j = 0; j < coeffs.half_size(); ++j) {
        const Block b = block(j, y.at_half(j));
        if (min_eigenvalue(b.weight) < kPositivityFloor)
            fail(ErrorKind::SingularDriver, "feedback gain undefined: R + 4 sum C Y C is singular", coeffs.half(j).time);
        out[j] = -lu_solve(b.weight, b.cross);
    }
    return out;
}

}  // namespace

std::vector<Matrix> theta(const CoefficientSet& coeffs, const RiccatiSolution& y) {
    return gains(coeffs, y, [&](std::size_t j, const Matrix& yj) { return plain_block(coeffs.half(j), yj); });
}

std::vector<Matrix> theta_hat(const CoefficientSet& coeffs, const FPath& f, const RiccatiSolution& yhat) {
    require(f.size() == coeffs.half_size(), ErrorKind::Shape, "F must live on the half-step grid");
    return gains(coeffs, yhat, [&](std::size_t j, const Matrix& yj) { return hat_block(coeffs.half(j), f[j], yj); });
}

TargetSolution solve_targets(const MarketSpec& spec, const CoefficientSet& coeffs, const FPath& f,
                             const RiccatiSolution& yhat, const std::vector<Matrix>& theta_hat) {
    require(f.size() == coeffs.half_size() && theta_hat.size() == coeffs.half_size(), ErrorKind::Shape,
            "F and theta_hat must live on the half-step grid");
    if (coeffs.noisy() && spec.has_targets())
        fail(ErrorKind::UnsupportedScope, "nonzero targets with stochastic impact make the target equation random");
    const TimeGrid& grid = coeffs.grid();
    const auto steps = static_cast<std::size_t>(grid.steps());
    const auto n = coeffs.assets();
    const double h = grid.dt();
    const Matrix identity = Matrix::Identity(n, n);

    struct Frozen {
        Vector target;   // gamma^1/2 zeta
        Vector shifted;  // F gamma^1/2 zeta
        Matrix weight;   // R + 4 sum C Yhat C
    };
    std::vector<Frozen> frozen(coeffs.half_size());
    for (std::size_t j = 0; j < coeffs.half_size(); ++j) {
        const CoefficientSample& s = coeffs.half(j);
        const Vector target = s.gamma_half * s.running_target;
        frozen[j] = {target, f[j] * target, s.R + 4.0 * sum_cyc(s, yhat.at_half(j))};
    }
    const auto driver = [&](std::size_t j, const Vector& psi) {
        const CoefficientSample& s = coeffs.half(j);
        const Matrix& y = yhat.at_half(j);
        const Matrix gain = f[j] + theta_hat[j];
        const Vector& z = frozen[j].shifted;
        Vector out = (s.A + s.B * gain).transpose() * psi - s.Q * (identity - f[j]) * frozen[j].target - y * s.B * z;
        for (const auto& c : s.C) out += (identity - 2.0 * gain).transpose() * c * (2.0 * y * c * z);
        return out;
    };

    TargetSolution sol;
    sol.psi.resize(steps + 1);
    sol.psi[steps] = -0.5 * (coeffs.node(steps).gamma_half * spec.terminal_target);
    for (std::size_t i = steps; i-- > 0;) {
        const Vector& p = sol.psi[i + 1];
        const Vector k1 = driver(2 * i + 2, p);
        const Vector k2 = driver(2 * i + 1, p + 0.5 * h * k1);
        const Vector k3 = driver(2 * i + 1, p + 0.5 * h * k2);
        const Vector k4 = driver(2 * i, p + h * k3);
        sol.psi[i] = p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    std::vector<Vector> slope(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) slope[i] = -driver(2 * i, sol.psi[i]);
    sol.psi_mid = hermite_midpoints(sol.psi, slope, h);

    sol.theta0.resize(coeffs.half_size());
    std::vector<double> integrand(coeffs.half_size());
    for (std::size_t j = 0; j < coeffs.half_size(); ++j) {
        const CoefficientSample& s = coeffs.half(j);
        const Matrix& y = yhat.at_half(j);
        const Vector& psi = j % 2 == 0 ? sol.psi[j / 2] : sol.psi_mid[j / 2];
        const Vector& z = frozen[j].shifted;
        Vector cross = s.B.transpose() * psi;
        double noise_term = 0.0;
        for (const auto& c : s.C) {
            cross -= 4.0 * c * y * c * z;
            const Vector cz = c * z;
            noise_term += cz.dot(y * cz);
        }
        sol.theta0[j] = -lu_solve(frozen[j].weight, cross);
        const Vector& target = frozen[j].target;
        integrand[j] = target.dot(s.Q * (identity - f[j]) * target) - 2.0 * (s.B * z).dot(psi) + 4.0 * noise_term -
                       sol.theta0[j].dot(frozen[j].weight * sol.theta0[j]);
    }
    double running = 0.0;
    for (std::size_t i = 0; i < steps; ++i)
        running += h / 6.0 * (integrand[2 * i] + 4.0 * integrand[2 * i + 1] + integrand[2 * i + 2]);
    sol.v0 = 0.5 * (coeffs.node(steps).gamma_half * spec.terminal_target).squaredNorm() + running;
    return sol;
}

RiccatiSolution ow_closed_form(const Matrix& B, const Matrix& R, const TimeGrid& grid) {
    const auto n = B.rows();
    const Matrix identity = Matrix::Identity(n, n);
    const Matrix k = B * lu_solve(R, B.transpose());
    const auto value = [&](double s) { return Matrix(symmetrized(0.5 * lu_solve(identity + 0.5 * (grid.horizon() - s) * k, identity))); };
    const auto steps = static_cast<std::size_t>(grid.steps());
    RiccatiSolution sol{grid, RiccatiDriver::Plain, std::vector<Matrix>(steps + 1), std::vector<Matrix>(steps),
                        std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t i = 0; i <= steps; ++i) sol.values[i] = value(grid.at(static_cast<int>(i)));
    for (std::size_t i = 0; i < steps; ++i) sol.midpoints[i] = value(grid.at(static_cast<int>(i)) + 0.5 * grid.dt());
    sol.min_block_eigenvalue = min_eigenvalue(R);
    return sol;
}

StepHalvingReport riccati_step_halving(const MarketSpec& spec) {
    MarketSpec fine = spec;
    const auto solve_at = [&](int steps) {
        fine.grid_steps = steps;
        return solve_riccati(derive_coefficients(fine));
    };
    const RiccatiSolution a = solve_at(spec.grid_steps);
    const RiccatiSolution b = solve_at(2 * spec.grid_steps);
    const RiccatiSolution c = solve_at(4 * spec.grid_steps);
    StepHalvingReport report{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        report.coarse_error = std::max(report.coarse_error, max_abs_diff(a.values[i], b.values[2 * i]));
        report.fine_error = std::max(report.fine_error, max_abs_diff(b.values[2 * i], c.values[4 * i]));
    }
    report.ratio = report.fine_error > 0.0 ? report.coarse_error / report.fine_error
                                           : std::numeric_limits<double>::infinity();
    return report;
}

}  // namespace mexec
