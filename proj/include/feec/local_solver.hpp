// Dense constrained linear algebra for patch-local systems. Every local
// solve in this project has the shape
//     A x + B^T mu = a      (stationarity of a PSD quadratic form)
//     B x          = b      (gauge / constraint rows),
// where the constraint rows may be redundant but consistent. Rows of B are
// reduced to a full-rank subset before assembling the KKT matrix, so the
// multiplier is well defined whenever the primal solution is.

#ifndef FEEC_LOCAL_SOLVER_HPP
#define FEEC_LOCAL_SOLVER_HPP

#include <stdexcept>

#include <Eigen/Dense>

namespace feec {

struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  double rank_tol = 1e-9;
  double residual_tol = 1e-10;
};

struct GaugedSolve {
  Eigen::MatrixXd solution;  ///< one column per right-hand side
  double residual = 0.0;     ///< worst relative residual over all rhs columns
  bool fallback = false;     ///< minimum-norm least squares was used
};

/// Solves the gauged system for multiple right-hand sides (columns of
/// rhs_a/rhs_b). Throws SingularSystemError when the residual stays above
/// tolerance even after the minimum-norm fallback.
GaugedSolve solve_gauged(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& rhs_a, const Eigen::MatrixXd& rhs_b,
                         const SolverOptions& opts = {});

struct RankNullspace {
  int rank = 0;
  Eigen::MatrixXd nullspace;  ///< orthonormal columns
};

RankNullspace rank_and_nullspace(const Eigen::MatrixXd& M, double tol = 1e-9);

/// Indices of a maximal linearly independent subset of rows of B.
std::vector<int> independent_rows(const Eigen::MatrixXd& B, double tol = 1e-9);

}  // namespace feec

#endif
