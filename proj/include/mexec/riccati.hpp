#pragma once

#include <vector>

#include "mexec/model.hpp"

namespace mexec {

enum class RiccatiDriver { Plain, Hat };

/// Backward solution of the deterministic Riccati equation with terminal value I/2.
struct RiccatiSolution {
    TimeGrid grid;
    RiccatiDriver driver;
    std::vector<Matrix> values;     // at the nodes
    std::vector<Matrix> midpoints;  // cubic Hermite interpolant at step midpoints
    double min_block_eigenvalue;    // smallest eigenvalue of R + 4 sum C Y C seen
    double max_symmetry_drift;      // largest asymmetry removed after a step

    /// Value at half-step index j.
    const Matrix& at_half(std::size_t j) const { return j % 2 == 0 ? values.at(j / 2) : midpoints.at(j / 2); }
};

RiccatiSolution solve_riccati(const CoefficientSet& coeffs);
RiccatiSolution solve_riccati_hat(const CoefficientSet& coeffs, const FPath& f);

/// Feedback gains on the half-step grid.
std::vector<Matrix> theta(const CoefficientSet& coeffs, const RiccatiSolution& y);
std::vector<Matrix> theta_hat(const CoefficientSet& coeffs, const FPath& f, const RiccatiSolution& yhat);

/// Deterministic solution of the linear target equation.
struct TargetSolution {
    std::vector<Vector> psi;      // at the nodes
    std::vector<Vector> psi_mid;  // at step midpoints
    std::vector<Vector> theta0;   // offset on the half-step grid
    double v0;                    // target-only part of the optimal cost
};

TargetSolution solve_targets(const MarketSpec& spec, const CoefficientSet& coeffs, const FPath& f,
                             const RiccatiSolution& yhat, const std::vector<Matrix>& theta_hat);

/// Y(s) = (I + (T - s) B R^-1 B^T / 2)^-1 / 2 for constant B and R without noise or risk.
RiccatiSolution ow_closed_form(const Matrix& B, const Matrix& R, const TimeGrid& grid);

struct StepHalvingReport {
    double coarse_error;  // |Y_N - Y_2N| on the coarse nodes
    double fine_error;    // |Y_2N - Y_4N| on the coarse nodes
    double ratio;
};

/// Richardson-style convergence diagnostic of the plain Riccati solver.
StepHalvingReport riccati_step_halving(const MarketSpec& spec);

}  // namespace mexec
