#include "feec/polyform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace feec {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

const std::vector<std::vector<int>>& index_subsets(int n, int k) {
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(n, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> out;
  if (k == 0) {
    out.push_back({});
  } else if (k <= n) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      out.push_back(idx);
      int pos = k - 1;
      while (pos >= 0 && idx[pos] == n - k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return cache.emplace(key, std::move(out)).first->second;
}

const std::vector<std::vector<int>>& multi_indices(int vars, int degree) {
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(vars, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<int>> out;
  std::vector<int> current(vars, 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == vars - 1) {
      current[pos] = remaining;
      out.push_back(current);
      return;
    }
    for (int d = remaining; d >= 0; --d) {
      current[pos] = d;
      self(self, pos + 1, remaining - d);
    }
  };
  if (vars > 0) rec(rec, 0, degree);
  return cache.emplace(key, std::move(out)).first->second;
}

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Dirichlet integral over the simplex parametrized by lambda_1..lambda_m:
// int lambda^gamma dlambda_1...dlambda_m = prod(gamma_i!) / (|gamma| + m)!.
double dirichlet_moment(const std::vector<int>& gamma, int m) {
  double num = 1.0;
  int total = 0;
  for (int g : gamma) {
    num *= factorial(g);
    total += g;
  }
  return num / factorial(total + m);
}

// Sorts indices ascending; returns 0 on repeated index, else the permutation
// sign.
int sort_sign(std::vector<int>& idx) {
  int sign = 1;
  for (size_t i = 1; i < idx.size(); ++i) {
    size_t j = i;
    while (j > 0 && idx[j] < idx[j - 1]) {
      std::swap(idx[j], idx[j - 1]);
      sign = -sign;
      --j;
    }
  }
  for (size_t i = 1; i < idx.size(); ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}

struct TermOrder {
  bool operator()(const FormTerm& a, const FormTerm& b) const {
    if (a.sigma != b.sigma) return a.sigma < b.sigma;
    return a.alpha < b.alpha;
  }
};

}  // namespace

// --- SimplexGeometry ---------------------------------------------------------

SimplexGeometry::SimplexGeometry(Eigen::MatrixXd coords) : m_coords(std::move(coords)) {
  const int m = dim();
  const int n = ambient_dim();
  if (m > n) throw FormError("simplex dimension exceeds ambient dimension");
  Eigen::MatrixXd E(n, m);
  for (int i = 0; i < m; ++i) E.col(i) = m_coords.col(i + 1) - m_coords.col(0);
  if (m == 0) {
    m_volume = 1.0;
    m_grad = Eigen::MatrixXd::Zero(n, 1);
    m_dl_gram = Eigen::MatrixXd::Zero(0, 0);
    return;
  }
  Eigen::MatrixXd M = E.transpose() * E;
  double detM = M.determinant();
  if (!(detM > 0)) throw FormError("degenerate simplex");
  m_volume = std::sqrt(detM) / factorial(m);
  Eigen::MatrixXd Minv = M.inverse();
  m_dl_gram = Minv;
  m_grad = Eigen::MatrixXd(n, m + 1);
  Eigen::MatrixXd G = E * Minv;  // columns = grad lambda_i, i = 1..m
  for (int i = 0; i < m; ++i) m_grad.col(i + 1) = G.col(i);
  m_grad.col(0) = -G.rowwise().sum();
  m_orientation = 1;
  if (m == n && E.determinant() < 0) m_orientation = -1;
}

double SimplexGeometry::diameter() const {
  double d = 0.0;
  for (int i = 0; i < m_coords.cols(); ++i)
    for (int j = i + 1; j < m_coords.cols(); ++j)
      d = std::max(d, (m_coords.col(i) - m_coords.col(j)).norm());
  return d;
}

Eigen::VectorXd SimplexGeometry::barycentric(const Eigen::VectorXd& x) const {
  const int m = dim();
  Eigen::MatrixXd E(ambient_dim(), m);
  for (int i = 0; i < m; ++i) E.col(i) = m_coords.col(i + 1) - m_coords.col(0);
  Eigen::VectorXd rest = m_dl_gram * (E.transpose() * (x - m_coords.col(0)));
  Eigen::VectorXd bary(m + 1);
  bary[0] = 1.0 - rest.sum();
  bary.tail(m) = rest;
  return bary;
}

// --- PolyForm ----------------------------------------------------------------

void PolyForm::canonicalize(std::vector<FormTerm> raw) {
  std::vector<FormTerm> flat;
  // Sort index sets and eliminate dlambda_0.
  for (auto& t : raw) {
    if (t.coeff == 0.0) continue;
    int sign = sort_sign(t.sigma);
    if (sign == 0) continue;
    t.coeff *= sign;
    if (!t.sigma.empty() && t.sigma.front() == 0) {
      std::vector<int> rest(t.sigma.begin() + 1, t.sigma.end());
      for (int i = 1; i <= m_dim; ++i) {
        FormTerm nt;
        nt.alpha = t.alpha;
        nt.sigma = rest;
        nt.sigma.insert(nt.sigma.begin(), i);
        int s = sort_sign(nt.sigma);
        if (s == 0) continue;
        nt.coeff = -t.coeff * s;
        flat.push_back(std::move(nt));
      }
    } else {
      flat.push_back(std::move(t));
    }
  }
  // Homogenize all monomials to the maximal total degree.
  int deg = 0;
  for (const auto& t : flat) {
    int d = 0;
    for (int a : t.alpha) d += a;
    deg = std::max(deg, d);
  }
  std::vector<FormTerm> result;
  for (auto& t : flat) {
    int d = 0;
    for (int a : t.alpha) d += a;
    int diff = deg - d;
    if (diff == 0) {
      result.push_back(std::move(t));
      continue;
    }
    for (const auto& gamma : multi_indices(m_dim + 1, diff)) {
      FormTerm nt = t;
      double mult = factorial(diff);
      for (int i = 0; i <= m_dim; ++i) {
        nt.alpha[i] += gamma[i];
        mult /= factorial(gamma[i]);
      }
      nt.coeff = t.coeff * mult;
      result.push_back(std::move(nt));
    }
  }
  std::sort(result.begin(), result.end(), TermOrder{});
  m_terms.clear();
  for (auto& t : result) {
    if (!m_terms.empty() && m_terms.back().sigma == t.sigma && m_terms.back().alpha == t.alpha)
      m_terms.back().coeff += t.coeff;
    else
      m_terms.push_back(std::move(t));
  }
  m_terms.erase(std::remove_if(m_terms.begin(), m_terms.end(),
                               [](const FormTerm& t) { return t.coeff == 0.0; }),
                m_terms.end());
  m_poly_degree = m_terms.empty() ? 0 : deg;
}

PolyForm canonical_from_terms(int simplex_dim, int form_degree, std::vector<FormTerm> raw) {
  PolyForm u(simplex_dim, form_degree);
  u.canonicalize(std::move(raw));
  return u;
}

PolyForm PolyForm::zero(int simplex_dim, int form_degree) {
  return PolyForm(simplex_dim, form_degree);
}

PolyForm PolyForm::barycentric(int simplex_dim, int i) {
  std::vector<int> alpha(simplex_dim + 1, 0);
  alpha[i] = 1;
  return monomial(simplex_dim, std::move(alpha), {}, 1.0);
}

PolyForm PolyForm::d_lambda(int simplex_dim, int i) {
  return monomial(simplex_dim, std::vector<int>(simplex_dim + 1, 0), {i}, 1.0);
}

PolyForm PolyForm::monomial(int simplex_dim, std::vector<int> alpha,
                            std::vector<int> sigma, double coeff) {
  FormTerm t{std::move(alpha), std::move(sigma), coeff};
  return canonical_from_terms(simplex_dim, static_cast<int>(t.sigma.size()), {t});
}

PolyForm PolyForm::constant(int simplex_dim, double value) {
  return monomial(simplex_dim, std::vector<int>(simplex_dim + 1, 0), {}, value);
}

PolyForm PolyForm::whitney(int simplex_dim, const std::vector<int>& face_positions) {
  const int k = static_cast<int>(face_positions.size()) - 1;
  std::vector<FormTerm> raw;
  for (int i = 0; i <= k; ++i) {
    FormTerm t;
    t.alpha.assign(simplex_dim + 1, 0);
    t.alpha[face_positions[i]] = 1;
    for (int j = 0; j <= k; ++j)
      if (j != i) t.sigma.push_back(face_positions[j]);
    t.coeff = (i % 2 == 0) ? 1.0 : -1.0;
    raw.push_back(std::move(t));
  }
  return canonical_from_terms(simplex_dim, k, std::move(raw));
}

PolyForm PolyForm::unit_volume_form(int simplex_dim) {
  std::vector<int> sigma(simplex_dim);
  for (int i = 0; i < simplex_dim; ++i) sigma[i] = i + 1;
  return monomial(simplex_dim, std::vector<int>(simplex_dim + 1, 0), std::move(sigma),
                  factorial(simplex_dim));
}

double PolyForm::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& t : m_terms) m = std::max(m, std::abs(t.coeff));
  return m;
}

PolyForm PolyForm::operator+(const PolyForm& other) const {
  if (m_dim != other.m_dim || m_degree != other.m_degree)
    throw FormError("form shape mismatch in +");
  std::vector<FormTerm> raw = m_terms;
  raw.insert(raw.end(), other.m_terms.begin(), other.m_terms.end());
  return canonical_from_terms(m_dim, m_degree, std::move(raw));
}

PolyForm PolyForm::operator-(const PolyForm& other) const {
  return *this + other.scaled(-1.0);
}

PolyForm PolyForm::scaled(double s) const {
  PolyForm u = *this;
  for (auto& t : u.m_terms) t.coeff *= s;
  if (s == 0.0) u.m_terms.clear();
  return u;
}

PolyForm PolyForm::wedge(const PolyForm& other) const {
  if (m_dim != other.m_dim) throw FormError("wedge on different simplices");
  std::vector<FormTerm> raw;
  for (const auto& a : m_terms)
    for (const auto& b : other.m_terms) {
      FormTerm t;
      t.alpha.resize(m_dim + 1);
      for (int i = 0; i <= m_dim; ++i) t.alpha[i] = a.alpha[i] + b.alpha[i];
      t.sigma = a.sigma;
      t.sigma.insert(t.sigma.end(), b.sigma.begin(), b.sigma.end());
      t.coeff = a.coeff * b.coeff;
      raw.push_back(std::move(t));
    }
  return canonical_from_terms(m_dim, m_degree + other.m_degree, std::move(raw));
}

PolyForm PolyForm::exterior_derivative() const {
  std::vector<FormTerm> raw;
  for (const auto& t : m_terms)
    for (int i = 0; i <= m_dim; ++i) {
      if (t.alpha[i] == 0) continue;
      FormTerm nt;
      nt.alpha = t.alpha;
      nt.alpha[i] -= 1;
      nt.sigma = t.sigma;
      nt.sigma.insert(nt.sigma.begin(), i);
      nt.coeff = t.coeff * t.alpha[i];
      raw.push_back(std::move(nt));
    }
  return canonical_from_terms(m_dim, m_degree + 1, std::move(raw));
}

PolyForm PolyForm::trace(const std::vector<int>& face_positions) const {
  const int q = static_cast<int>(face_positions.size()) - 1;
  if (m_degree > q) return PolyForm::zero(q, m_degree);
  std::vector<int> pos_of(m_dim + 1, -1);
  for (int j = 0; j <= q; ++j) pos_of[face_positions[j]] = j;
  std::vector<FormTerm> raw;
  for (const auto& t : m_terms) {
    FormTerm nt;
    nt.alpha.assign(q + 1, 0);
    bool dead = false;
    for (int i = 0; i <= m_dim && !dead; ++i) {
      if (t.alpha[i] == 0) continue;
      if (pos_of[i] < 0) dead = true;  // lambda_i vanishes on the face
      else nt.alpha[pos_of[i]] = t.alpha[i];
    }
    if (dead) continue;
    for (int s : t.sigma) {
      if (pos_of[s] < 0) { dead = true; break; }  // tr dlambda_s = 0
      nt.sigma.push_back(pos_of[s]);
    }
    if (dead) continue;
    nt.coeff = t.coeff;
    raw.push_back(std::move(nt));
  }
  return canonical_from_terms(q, m_degree, std::move(raw));
}

PolyForm PolyForm::koszul_contract() const {
  if (m_degree < 1) throw FormError("contraction of a 0-form");
  // dlambda_j applied to (x - x_0) is lambda_j - delta_{j0}; canonical index
  // sets never contain 0.
  std::vector<FormTerm> raw;
  for (const auto& t : m_terms)
    for (size_t p = 0; p < t.sigma.size(); ++p) {
      FormTerm nt;
      nt.alpha = t.alpha;
      nt.alpha[t.sigma[p]] += 1;
      for (size_t j = 0; j < t.sigma.size(); ++j)
        if (j != p) nt.sigma.push_back(t.sigma[j]);
      nt.coeff = (p % 2 == 0) ? t.coeff : -t.coeff;
      raw.push_back(std::move(nt));
    }
  return canonical_from_terms(m_dim, m_degree - 1, std::move(raw));
}

PolyForm PolyForm::homogenized(int degree) const {
  if (degree < m_poly_degree) throw FormError("cannot lower homogenization degree");
  std::vector<FormTerm> raw;
  for (const auto& t : m_terms) {
    const int diff = degree - m_poly_degree;
    for (const auto& gamma : multi_indices(m_dim + 1, diff)) {
      FormTerm nt = t;
      double mult = factorial(diff);
      for (int i = 0; i <= m_dim; ++i) {
        nt.alpha[i] += gamma[i];
        mult /= factorial(gamma[i]);
      }
      nt.coeff = t.coeff * mult;
      raw.push_back(std::move(nt));
    }
  }
  PolyForm u(m_dim, m_degree);
  u.canonicalize(std::move(raw));
  u.m_poly_degree = degree;
  return u;
}

Eigen::VectorXd PolyForm::evaluate(const SimplexGeometry& geom,
                                   const Eigen::VectorXd& bary) const {
  const int n = geom.ambient_dim();
  const auto& subsets = index_subsets(n, m_degree);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(subsets.size());
  const Eigen::MatrixXd& grad = geom.grad_lambda();
  for (const auto& t : m_terms) {
    double p = t.coeff;
    for (int i = 0; i <= m_dim; ++i)
      for (int a = 0; a < t.alpha[i]; ++a) p *= bary[i];
    if (p == 0.0) continue;
    const int k = m_degree;
    Eigen::MatrixXd sub(k, k);
    for (size_t ci = 0; ci < subsets.size(); ++ci) {
      for (int s = 0; s < k; ++s)
        for (int c = 0; c < k; ++c) sub(s, c) = grad(subsets[ci][c], t.sigma[s]);
      double det = k == 0 ? 1.0 : sub.determinant();
      out[ci] += p * det;
    }
  }
  return out;
}

// --- integration -------------------------------------------------------------

double integrate_inner_product(const PolyForm& u, const PolyForm& v,
                               const SimplexGeometry& geom) {
  if (u.form_degree() != v.form_degree())
    throw FormError("inner product of forms of different degree");
  if (u.simplex_dim() != geom.dim() || v.simplex_dim() != geom.dim())
    throw FormError("form/geometry dimension mismatch");
  const int m = geom.dim();
  const int k = u.form_degree();
  const Eigen::MatrixXd& G = geom.dlambda_gram();
  double total = 0.0;
  Eigen::MatrixXd sub(k, k);
  std::vector<int> gamma(m + 1);
  for (const auto& a : u.terms())
    for (const auto& b : v.terms()) {
      double gram = 1.0;
      if (k > 0) {
        for (int i = 0; i < k; ++i)
          for (int j = 0; j < k; ++j) sub(i, j) = G(a.sigma[i] - 1, b.sigma[j] - 1);
        gram = sub.determinant();
      }
      for (int i = 0; i <= m; ++i) gamma[i] = a.alpha[i] + b.alpha[i];
      // int_T lambda^gamma dx = |T| m! prod(gamma!) / (|gamma|+m)!
      total += a.coeff * b.coeff * gram * factorial(m) * dirichlet_moment(gamma, m);
    }
  return total * geom.volume();
}

double integrate_wedge(const PolyForm& u, const PolyForm& z) {
  const int m = u.simplex_dim();
  if (z.simplex_dim() != m) throw FormError("wedge integral on different simplices");
  if (u.form_degree() + z.form_degree() != m)
    throw FormError("wedge integral degrees must sum to the simplex dimension");
  double total = 0.0;
  std::vector<int> gamma(m + 1), merged;
  for (const auto& a : u.terms())
    for (const auto& b : z.terms()) {
      merged = a.sigma;
      merged.insert(merged.end(), b.sigma.begin(), b.sigma.end());
      int sign = sort_sign(merged);
      if (sign == 0) continue;
      for (int i = 0; i <= m; ++i) gamma[i] = a.alpha[i] + b.alpha[i];
      total += sign * a.coeff * b.coeff * dirichlet_moment(gamma, m);
    }
  return total;
}

double integrate_top_form(const PolyForm& u) {
  return integrate_wedge(u, PolyForm::constant(u.simplex_dim(), 1.0));
}

// --- local bases -------------------------------------------------------------

int full_space_dimension(int r, int k, int m) {
  if (r < 0 || k < 0 || k > m) return 0;
  return static_cast<int>(binomial(r + m, m) * binomial(m, k));
}

int minus_space_dimension(int r, int k, int m) {
  if (r < 1 || k < 0 || k > m) return 0;
  return static_cast<int>(binomial(r + k - 1, k) * binomial(r + m, m - k));
}

LocalSpaceBasis local_basis(Family family, int r, int k, int m) {
  LocalSpaceBasis basis;
  basis.family = family;
  basis.r = r;
  basis.k = k;
  basis.simplex_dim = m;
  if (k < 0 || k > m) return basis;

  if (family == Family::Full) {
    if (r < 0) return basis;
    for (const auto& sigma0 : index_subsets(m, k)) {
      std::vector<int> sigma(sigma0.size());
      for (size_t i = 0; i < sigma0.size(); ++i) sigma[i] = sigma0[i] + 1;
      for (const auto& alpha : multi_indices(m + 1, r))
        basis.forms.push_back(PolyForm::monomial(m, alpha, sigma, 1.0));
    }
    return basis;
  }

  if (r < 1) return basis;
  // Spanning set lambda^alpha phi_f^k, |alpha| = r-1, f over k-faces; a basis
  // is extracted by rank-revealing column selection on the coefficient matrix.
  std::vector<PolyForm> span;
  for (const auto& face : index_subsets(m + 1, k + 1)) {
    PolyForm phi = PolyForm::whitney(m, face);
    for (const auto& alpha : multi_indices(m + 1, r - 1)) {
      PolyForm mono = PolyForm::monomial(m, alpha, {}, 1.0);
      span.push_back(mono.wedge(phi));
    }
  }
  const auto& sigmas = index_subsets(m, k);
  const auto& alphas = multi_indices(m + 1, r);
  std::map<std::vector<int>, int> sigma_slot, alpha_slot;
  for (size_t i = 0; i < sigmas.size(); ++i) {
    std::vector<int> s(sigmas[i].size());
    for (size_t j = 0; j < s.size(); ++j) s[j] = sigmas[i][j] + 1;
    sigma_slot[s] = static_cast<int>(i);
  }
  for (size_t i = 0; i < alphas.size(); ++i) alpha_slot[alphas[i]] = static_cast<int>(i);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(sigmas.size() * alphas.size(), span.size());
  for (size_t j = 0; j < span.size(); ++j) {
    PolyForm u = span[j].poly_degree() < r ? span[j].homogenized(r) : span[j];
    for (const auto& t : u.terms())
      C(sigma_slot.at(t.sigma) * alphas.size() + alpha_slot.at(t.alpha), j) = t.coeff;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
  qr.setThreshold(1e-9);
  const int rank = static_cast<int>(qr.rank());
  if (rank != minus_space_dimension(r, k, m))
    throw FormError("trimmed-space rank does not match the dimension formula");
  for (int i = 0; i < rank; ++i)
    basis.forms.push_back(span[qr.colsPermutation().indices()[i]]);
  return basis;
}

Eigen::VectorXd component_wedge(const Eigen::VectorXd& a, int k,
                                const Eigen::VectorXd& b, int l, int n) {
  const auto& out_sets = index_subsets(n, k + l);
  const auto& a_sets = index_subsets(n, k);
  const auto& b_sets = index_subsets(n, l);
  std::map<std::vector<int>, int> a_slot, b_slot;
  for (size_t i = 0; i < a_sets.size(); ++i) a_slot[a_sets[i]] = static_cast<int>(i);
  for (size_t i = 0; i < b_sets.size(); ++i) b_slot[b_sets[i]] = static_cast<int>(i);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(out_sets.size());
  for (size_t oi = 0; oi < out_sets.size(); ++oi) {
    const auto& I = out_sets[oi];
    for (const auto& split : index_subsets(k + l, k)) {
      std::vector<int> ia, ib;
      std::vector<bool> taken(k + l, false);
      for (int p : split) {
        ia.push_back(I[p]);
        taken[p] = true;
      }
      for (int p = 0; p < k + l; ++p)
        if (!taken[p]) ib.push_back(I[p]);
      // permutation sign of (ia, ib) relative to I
      std::vector<int> merged = ia;
      merged.insert(merged.end(), ib.begin(), ib.end());
      int sign = sort_sign(merged);
      out[oi] += sign * a[a_slot.at(ia)] * b[b_slot.at(ib)];
    }
  }
  return out;
}

}  // namespace feec
