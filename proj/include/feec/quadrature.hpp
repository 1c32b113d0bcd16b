// Simplex quadrature of Grundmann-Moller type, arbitrary odd exactness
// degree, used only for black-box (sampled) inputs; polynomial integrands go
// through the closed-form moment formulas in polyform.

#ifndef FEEC_QUADRATURE_HPP
#define FEEC_QUADRATURE_HPP

#include <vector>

#include <Eigen/Dense>

namespace feec {

struct QuadratureRule {
  /// Barycentric nodes, one column per node ((m+1) x npts).
  Eigen::MatrixXd points;
  /// Weights scaled so that they sum to one (multiply by |T| to integrate).
  Eigen::VectorXd weights;
  int degree = 0;
  int npts() const { return static_cast<int>(weights.size()); }
};

/// Rule on the m-simplex exact for polynomials up to `degree`.
const QuadratureRule& simplex_quadrature(int m, int degree);

}  // namespace feec

#endif
