#pragma once

#include <cstddef>
#include <vector>

#include "mexec/linalg.hpp"
#include "mexec/time_function.hpp"
#include "mexec/time_grid.hpp"

namespace mexec {

/// Market and execution problem on a uniform trading grid.
struct MarketSpec {
    int assets = 1;
    int factors = 1;
    double horizon = 1.0;
    Matrix frame;                   // O, orthogonal; gamma = O^T diag(lambda) O
    Vector lambda0;                 // initial impact eigenvalues
    VectorFunction drift;           // mu, eigenvalue drift
    MatrixFunction volatility;      // sigma, assets x factors
    MatrixFunction resilience;      // rho
    MatrixFunction risk;            // Xi
    Vector terminal_target;         // xi
    VectorFunction running_target;  // zeta
    Vector x0;
    Vector d0;
    int grid_steps = 1000;

    /// All-zero coefficients, identity frame, unit eigenvalues.
    static MarketSpec zeros(int assets, int factors, double horizon);

    TimeGrid grid() const { return TimeGrid(horizon, grid_steps); }
    void validate() const;
    bool has_noise() const;
    bool has_targets() const;
};

/// Impact eigenvalues sampled on a grid, deterministic or along one simulated path.
class ImpactPath {
public:
    ImpactPath(Matrix frame, TimeGrid grid, std::vector<Vector> eigenvalues);

    const TimeGrid& grid() const noexcept { return grid_; }
    const Matrix& frame() const noexcept { return frame_; }
    const Vector& eigenvalues(std::size_t k) const { return eigenvalues_.at(k); }
    std::size_t size() const noexcept { return eigenvalues_.size(); }

    /// gamma^alpha at node k.
    Matrix power(std::size_t k, double alpha) const;
    /// gamma^alpha v at node k without forming the matrix.
    Vector apply(std::size_t k, double alpha, const Vector& v) const;

private:
    Matrix frame_;
    TimeGrid grid_;
    std::vector<Vector> eigenvalues_;
};

/// gamma^alpha(t) for deterministic eigenvalues.
Matrix gamma_power(const MarketSpec& spec, double t, double alpha);

/// Deterministic part of the eigenvalue dynamics, lambda0 exp(int (mu - |sigma|^2 / 2)), on a grid.
ImpactPath reference_impact(const MarketSpec& spec, const TimeGrid& grid);

struct CoefficientSample {
    double time = 0.0;
    Matrix A;
    Matrix B;
    std::vector<Matrix> C;  // one per noise factor
    Matrix sum_CC;          // sum_k C_k C_k
    Matrix Q;
    Matrix kappa;
    Matrix R;               // Q + kappa
    Matrix rho;
    Matrix risk;
    Vector running_target;
    Matrix gamma_half;
    Matrix gamma_inv_half;
};

/// Coefficients of the hidden-state control problem sampled at the nodes and midpoints of the trading grid.
class CoefficientSet {
public:
    CoefficientSet(TimeGrid grid, std::vector<CoefficientSample> samples, ImpactPath impact);

    const TimeGrid& grid() const noexcept { return grid_; }
    int assets() const { return static_cast<int>(samples_.front().A.rows()); }
    int factors() const { return static_cast<int>(samples_.front().C.size()); }

    /// Sample j lives at time j dt / 2.
    const CoefficientSample& half(std::size_t j) const { return samples_.at(j); }
    const CoefficientSample& node(std::size_t i) const { return samples_.at(2 * i); }
    const CoefficientSample& mid(std::size_t i) const { return samples_.at(2 * i + 1); }
    std::size_t half_size() const noexcept { return samples_.size(); }

    /// Reference impact path on the half-step grid.
    const ImpactPath& impact() const noexcept { return impact_; }
    bool noisy() const noexcept { return noisy_; }

private:
    TimeGrid grid_;
    std::vector<CoefficientSample> samples_;
    ImpactPath impact_;
    bool noisy_;
};

CoefficientSet derive_coefficients(const MarketSpec& spec);

/// Solution of R F = Q on the half-step grid; zero when Q vanishes identically.
using FPath = std::vector<Matrix>;

inline constexpr double kPositivityFloor = 1e-9;

FPath choose_F(const CoefficientSet& coeffs);

}  // namespace mexec
