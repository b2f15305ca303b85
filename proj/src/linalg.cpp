#include "mexec/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace mexec {

double asymmetry(const Matrix& a) { return a.size() == 0 ? 0.0 : (a - a.transpose()).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(a), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double max_eigenvalue(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(a), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().maxCoeff();
}

Matrix lu_solve(const Matrix& a, const Matrix& b) { return a.partialPivLu().solve(b); }

Matrix from_frame(const Matrix& frame, const Vector& values) {
    return frame.transpose() * values.asDiagonal() * frame;
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace mexec
