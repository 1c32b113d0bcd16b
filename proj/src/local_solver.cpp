#include "feec/local_solver.hpp"

#include <algorithm>

namespace feec {

std::vector<int> independent_rows(const Eigen::MatrixXd& B, double tol) {
  std::vector<int> rows;
  if (B.rows() == 0 || B.cols() == 0) return rows;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B.transpose());
  qr.setThreshold(tol);
  const int rank = static_cast<int>(qr.rank());
  const auto& perm = qr.colsPermutation().indices();
  rows.reserve(rank);
  for (int i = 0; i < rank; ++i) rows.push_back(perm[i]);
  std::sort(rows.begin(), rows.end());
  return rows;
}

GaugedSolve solve_gauged(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                         const Eigen::MatrixXd& rhs_a, const Eigen::MatrixXd& rhs_b,
                         const SolverOptions& opts) {
  const int nx = static_cast<int>(A.rows());
  if (A.cols() != nx) throw SingularSystemError("quadratic form must be square");
  const int nrhs = static_cast<int>(rhs_a.cols());

  const std::vector<int> rows = independent_rows(B, opts.rank_tol);
  const int nb = static_cast<int>(rows.size());
  Eigen::MatrixXd Bred(nb, nx), bred(nb, nrhs);
  for (int i = 0; i < nb; ++i) {
    Bred.row(i) = B.row(rows[i]);
    bred.row(i) = rhs_b.row(rows[i]);
  }

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nx + nb, nx + nb);
  K.topLeftCorner(nx, nx) = A;
  K.topRightCorner(nx, nb) = Bred.transpose();
  K.bottomLeftCorner(nb, nx) = Bred;
  Eigen::MatrixXd rhs(nx + nb, nrhs);
  rhs.topRows(nx) = rhs_a;
  rhs.bottomRows(nb) = bred;

  GaugedSolve out;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  lu.setThreshold(opts.rank_tol);
  Eigen::MatrixXd sol;
  if (lu.isInvertible()) {
    sol = lu.solve(rhs);
  } else {
    out.fallback = true;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(K);
    cod.setThreshold(opts.rank_tol);
    sol = cod.solve(rhs);
  }
  out.solution = sol.topRows(nx);

  const double scale =
      std::max({1.0, A.norm(), B.rows() > 0 ? B.norm() : 0.0, rhs.norm()});
  double residual = (K * sol - rhs).norm();
  // the dropped constraint rows must still be satisfied
  if (B.rows() > nb)
    residual = std::max(residual, (B * out.solution - rhs_b).norm());
  out.residual = residual / scale;
  if (out.residual > opts.residual_tol)
    throw SingularSystemError("gauged system unsolvable, residual " +
                              std::to_string(out.residual));
  return out;
}

RankNullspace rank_and_nullspace(const Eigen::MatrixXd& M, double tol) {
  RankNullspace out;
  if (M.rows() == 0 || M.cols() == 0) {
    out.rank = 0;
    out.nullspace = Eigen::MatrixXd::Identity(M.cols(), M.cols());
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) ++rank;
  out.rank = rank;
  out.nullspace = svd.matrixV().rightCols(M.cols() - rank);
  return out;
}

}  // namespace feec
