// Polynomial differential forms on a single simplex, written in barycentric
// coordinates: sums of terms  c * lambda^alpha dlambda_{s_1}^...^dlambda_{s_k}.
//
// Canonical representation on an m-simplex:
//  - index sets are strictly increasing subsets of {1..m}; dlambda_0 has been
//    eliminated through dlambda_0 = -sum_{i>=1} dlambda_i;
//  - all monomials share the same total degree (homogenized with
//    sum_i lambda_i = 1), so equal forms have equal term lists.

#ifndef FEEC_POLYFORM_HPP
#define FEEC_POLYFORM_HPP

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace feec {

struct FormError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Geometry of an m-simplex embedded in R^n (columns = vertex coordinates).
class SimplexGeometry {
public:
  explicit SimplexGeometry(Eigen::MatrixXd coords);

  int dim() const { return static_cast<int>(m_coords.cols()) - 1; }
  int ambient_dim() const { return static_cast<int>(m_coords.rows()); }
  const Eigen::MatrixXd& coords() const { return m_coords; }
  double volume() const { return m_volume; }
  double diameter() const;
  /// +1 when the vertex order is positively oriented (only for m == n).
  int orientation_sign() const { return m_orientation; }
  /// n x (m+1) gradients of the barycentric coordinates (tangent to the
  /// affine hull).
  const Eigen::MatrixXd& grad_lambda() const { return m_grad; }
  /// Inner products of the barycentric differentials,
  /// (i,j) -> <dlambda_i, dlambda_j>, for i,j = 1..m.
  const Eigen::MatrixXd& dlambda_gram() const { return m_dl_gram; }
  /// Point in R^n with the given barycentric coordinates.
  Eigen::VectorXd point(const Eigen::VectorXd& bary) const { return m_coords * bary; }
  Eigen::VectorXd barycentric(const Eigen::VectorXd& x) const;

private:
  Eigen::MatrixXd m_coords;
  Eigen::MatrixXd m_grad;
  Eigen::MatrixXd m_dl_gram;
  double m_volume = 0.0;
  int m_orientation = 1;
};

struct FormTerm {
  std::vector<int> alpha;  ///< exponents, size m+1
  std::vector<int> sigma;  ///< ascending subset of {1..m}, size k
  double coeff = 0.0;
};

class PolyForm {
public:
  PolyForm() = default;
  PolyForm(int simplex_dim, int form_degree)
      : m_dim(simplex_dim), m_degree(form_degree) {}

  static PolyForm zero(int simplex_dim, int form_degree);
  /// The barycentric coordinate lambda_i as a 0-form.
  static PolyForm barycentric(int simplex_dim, int i);
  static PolyForm d_lambda(int simplex_dim, int i);
  /// c * lambda^alpha dlambda_sigma, sigma an ascending subset of {0..m}.
  static PolyForm monomial(int simplex_dim, std::vector<int> alpha,
                           std::vector<int> sigma, double coeff);
  static PolyForm constant(int simplex_dim, double value);
  /// Whitney form of the face spanned by the given vertex positions.
  static PolyForm whitney(int simplex_dim, const std::vector<int>& face_positions);
  /// Constant volume form of the simplex with unit integral under the
  /// orientation of the vertex order.
  static PolyForm unit_volume_form(int simplex_dim);

  int simplex_dim() const { return m_dim; }
  int form_degree() const { return m_degree; }
  int poly_degree() const { return m_poly_degree; }
  const std::vector<FormTerm>& terms() const { return m_terms; }
  bool is_zero() const { return m_terms.empty(); }
  double max_abs_coeff() const;

  PolyForm operator+(const PolyForm& other) const;
  PolyForm operator-(const PolyForm& other) const;
  PolyForm scaled(double s) const;
  PolyForm wedge(const PolyForm& other) const;
  PolyForm exterior_derivative() const;
  /// Pullback to the face spanned by the given ascending vertex positions.
  /// Returns the zero form when the face dimension is below the form degree.
  PolyForm trace(const std::vector<int>& face_positions) const;
  /// Contraction with the position vector based at vertex 0.
  PolyForm koszul_contract() const;
  /// Raises the monomial degree, multiplying by (sum lambda)^(deg - current).
  PolyForm homogenized(int degree) const;

  /// Components with respect to the ambient coordinate basis dx_I,
  /// I ascending, lexicographic order (size C(n,k)).
  Eigen::VectorXd evaluate(const SimplexGeometry& geom,
                           const Eigen::VectorXd& bary) const;

private:
  int m_dim = 0;
  int m_degree = 0;
  int m_poly_degree = 0;
  std::vector<FormTerm> m_terms;

  void canonicalize(std::vector<FormTerm> raw);
  friend PolyForm canonical_from_terms(int, int, std::vector<FormTerm>);
};

/// Exact L^2 inner product of two k-forms over the simplex (Euclidean metric
/// on alternating forms, Lebesgue measure).
double integrate_inner_product(const PolyForm& u, const PolyForm& v,
                               const SimplexGeometry& geom);

/// Integral of u ^ z over the simplex oriented by its vertex order;
/// the degrees must sum to the simplex dimension. Purely combinatorial.
double integrate_wedge(const PolyForm& u, const PolyForm& z);

/// Integral over the oriented simplex of a form whose degree equals the
/// simplex dimension.
double integrate_top_form(const PolyForm& u);

enum class Family { Full, Minus };

struct LocalSpaceBasis {
  Family family = Family::Full;
  int r = 0;
  int k = 0;
  int simplex_dim = 0;
  std::vector<PolyForm> forms;
  int dim() const { return static_cast<int>(forms.size()); }
};

/// Basis of P_r Lambda^k or P_r^- Lambda^k on an m-simplex. The full family
/// accepts r >= 0 (r = 0 gives constant-coefficient forms); the minus family
/// requires r >= 1. For the minus family the basis is extracted from the
/// spanning set lambda^alpha phi_f^k by rank-revealing selection.
LocalSpaceBasis local_basis(Family family, int r, int k, int simplex_dim);

int full_space_dimension(int r, int k, int m);
int minus_space_dimension(int r, int k, int m);

/// Pointwise Euclidean inner product of two component vectors in the dx_I
/// basis (plain dot product, kept for readability at call sites).
inline double component_inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b);
}

/// Components of the wedge a ^ b where a has degree k, b degree l, both as
/// dx_I component vectors in ambient dimension n.
Eigen::VectorXd component_wedge(const Eigen::VectorXd& a, int k,
                                const Eigen::VectorXd& b, int l, int n);

/// Ascending index subsets of {0..n-1} of size k in lexicographic order.
const std::vector<std::vector<int>>& index_subsets(int n, int k);

/// Nonnegative multi-indices over `vars` variables with total degree
/// `degree`, lexicographic order.
const std::vector<std::vector<int>>& multi_indices(int vars, int degree);

long binomial(int n, int k);

}  // namespace feec

#endif
