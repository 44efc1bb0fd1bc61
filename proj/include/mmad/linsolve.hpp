#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <chrono>
#include <stdexcept>
#include <string>

namespace mmad {

struct SolveReport {
  int n = 0;
  long nnz = 0;
  double relative_residual = 0;
  double factor_seconds = 0;
  double solve_seconds = 0;
};

struct SolveFailure : std::runtime_error {
  double relative_residual;
  explicit SolveFailure(const std::string& what, double rel = -1)
      : std::runtime_error(what), relative_residual(rel) {}
};

/// Sparse direct solve (LU with column reordering). The residual is
/// recomputed against the original matrix, never trusted from the
/// factorization; relative_residual > tol is a failure.
inline SolveReport solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                         Eigen::VectorXd& x, double tol = 1e-10) {
  using clock = std::chrono::steady_clock;
  if (A.rows() != A.cols()) throw SolveFailure("matrix is not square");
  if (A.rows() != b.size()) throw SolveFailure("matrix/rhs size mismatch");

  SolveReport rep;
  rep.n = static_cast<int>(A.rows());
  rep.nnz = static_cast<long>(A.nonZeros());

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  const auto t0 = clock::now();
  lu.analyzePattern(A);
  lu.factorize(A);
  const auto t1 = clock::now();
  if (lu.info() != Eigen::Success)
    throw SolveFailure("factorization failed: " + lu.lastErrorMessage());
  x = lu.solve(b);
  const auto t2 = clock::now();
  if (lu.info() != Eigen::Success) throw SolveFailure("back-substitution failed");

  rep.factor_seconds = std::chrono::duration<double>(t1 - t0).count();
  rep.solve_seconds = std::chrono::duration<double>(t2 - t1).count();

  const double bnorm = b.norm();
  const double rnorm = (A * x - b).norm();
  rep.relative_residual = bnorm > 0 ? rnorm / bnorm : rnorm;
  if (!(rep.relative_residual <= tol))
    throw SolveFailure("residual " + std::to_string(rep.relative_residual) +
                           " exceeds tolerance " + std::to_string(tol),
                       rep.relative_residual);
  return rep;
}

}  // namespace mmad
