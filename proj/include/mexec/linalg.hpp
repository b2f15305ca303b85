#pragma once

#include <Eigen/Dense>

namespace mexec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Largest absolute entry of a - a^T.
double asymmetry(const Matrix& a);

/// Smallest eigenvalue of the symmetric part of a.
double min_eigenvalue(const Matrix& a);

/// Largest eigenvalue of the symmetric part of a.
double max_eigenvalue(const Matrix& a);

/// Solves a x = b by LU with partial pivoting.
Matrix lu_solve(const Matrix& a, const Matrix& b);

/// Q^T diag(values) Q for an orthogonal frame Q.
Matrix from_frame(const Matrix& frame, const Vector& values);

bool all_finite(const Matrix& a);

/// Infinity norm of the entrywise difference.
inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace mexec
