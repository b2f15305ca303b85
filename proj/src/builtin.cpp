#include "mexec/builtin.hpp"

#include <Eigen/Eigenvalues>

#include "mexec/error.hpp"

namespace mexec {

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

MarketSpec rotating_impact(bool noisy) {
    MarketSpec spec = MarketSpec::zeros(2, 1, 1.0);
    spec.frame = mat2(3.0, 4.0, -4.0, 3.0) / 5.0;
    spec.lambda0 = vec2(1.0, 1.0);
    spec.drift = vec2(3.0, 1.0);
    spec.resilience = Matrix(Matrix::Identity(2, 2));
    if (noisy) spec.volatility = Matrix(Matrix::Ones(2, 1));
    spec.x0 = vec2(100.0, 0.0);
    return spec;
}

}  // namespace

MarketSpec constant_market(const Matrix& gamma, const Matrix& rho, double horizon, const Vector& x0,
                           int grid_steps) {
    require(gamma.rows() == gamma.cols() && asymmetry(gamma) <= 1e-12, ErrorKind::Configuration,
            "impact must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gamma);
    const auto n = static_cast<int>(gamma.rows());
    MarketSpec spec = MarketSpec::zeros(n, 1, horizon);
    spec.frame = solver.eigenvectors().transpose();
    spec.lambda0 = solver.eigenvalues();
    spec.resilience = rho;
    spec.x0 = x0;
    spec.grid_steps = grid_steps;
    return spec;
}

MarketSpec builtin_spec(std::string_view id) {
    const Matrix identity = Matrix::Identity(2, 2);
    if (id == "crossing") return constant_market(identity, mat2(2.0, -1.0, -1.0, 2.0), 1.0, vec2(100.0, 0.0));
    if (id == "risk") {
        MarketSpec spec = constant_market(identity, 3.0 * identity, 1.0, vec2(100.0, 0.0));
        spec.risk = mat2(1.0, 0.5, 0.5, 1.0);
        return spec;
    }
    if (id == "impact") return rotating_impact(false);
    if (id == "impact_noise") return rotating_impact(true);
    if (id == "blowup") return constant_market(mat2(2.0, 1.0, 1.0, 1.0), mat2(1.0, 2.0, 2.0, 5.0), 0.2, vec2(0.0, 0.0));
    if (id == "ow") return constant_market(mat2(2.0, 1.0, 1.0, 1.0), mat2(3.0, 2.0, 2.0, 5.0), 1.0, vec2(100.0, -30.0));
    fail(ErrorKind::Configuration, "unknown built-in scenario '" + std::string(id) + "'");
}

std::vector<std::string> builtin_spec_ids() { return {"crossing", "risk", "impact", "impact_noise", "blowup", "ow"}; }

}  // namespace mexec
