// Shared test utilities: an independent quadrature oracle (Gauss-Legendre
// tensor rules collapsed onto the simplex, unrelated to the library's
// Grundmann-Moller rules), pointwise form evaluation against tangent
// vectors, and seeded random generators.

#ifndef FEEC_TESTS_HELPERS_HPP
#define FEEC_TESTS_HELPERS_HPP

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "feec/polyform.hpp"

namespace feec::testing {

struct OracleRule {
  Eigen::MatrixXd points;  // (m+1) x npts barycentric
  Eigen::VectorXd weights; // sums to one
};

// Gauss-Legendre nodes/weights on [0,1] via Newton iteration.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int j = 2; j <= n; ++j) {
      double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[i] = 0.5 * (1.0 + t);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Duffy-collapsed tensor rule on the m-simplex, exact well beyond `per_axis`.
inline OracleRule duffy_rule(int m, int per_axis) {
  std::vector<double> gx, gw;
  gauss_legendre(per_axis, gx, gw);
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> wts;
  if (m == 1) {
    for (int i = 0; i < per_axis; ++i) {
      Eigen::VectorXd p(2);
      p << 1.0 - gx[i], gx[i];
      pts.push_back(p);
      wts.push_back(gw[i]);
    }
  } else if (m == 2) {
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < per_axis; ++j) {
        double xi = gx[i], eta = gx[j] * (1.0 - gx[i]);
        Eigen::VectorXd p(3);
        p << 1.0 - xi - eta, xi, eta;
        pts.push_back(p);
        wts.push_back(gw[i] * gw[j] * (1.0 - gx[i]) * 2.0);
      }
  } else {
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < per_axis; ++j)
        for (int l = 0; l < per_axis; ++l) {
          double xi = gx[i];
          double eta = gx[j] * (1.0 - gx[i]);
          double zeta = gx[l] * (1.0 - gx[i]) * (1.0 - gx[j]);
          Eigen::VectorXd p(4);
          p << 1.0 - xi - eta - zeta, xi, eta, zeta;
          pts.push_back(p);
          double jac = (1.0 - gx[i]) * (1.0 - gx[i]) * (1.0 - gx[j]);
          wts.push_back(gw[i] * gw[j] * gw[l] * jac * 6.0);
        }
  }
  OracleRule rule;
  rule.points.resize(m + 1, pts.size());
  rule.weights.resize(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    rule.points.col(i) = pts[i];
    rule.weights[i] = wts[i];
  }
  return rule;
}

// Quadrature oracle for the L2 pairing of two polynomial forms.
inline double oracle_inner_product(const PolyForm& u, const PolyForm& v,
                                   const SimplexGeometry& geom, int per_axis = 8) {
  OracleRule rule = duffy_rule(geom.dim(), per_axis);
  double total = 0.0;
  for (int q = 0; q < rule.weights.size(); ++q) {
    Eigen::VectorXd a = u.evaluate(geom, rule.points.col(q));
    Eigen::VectorXd b = v.evaluate(geom, rule.points.col(q));
    total += rule.weights[q] * a.dot(b);
  }
  return total * geom.volume();
}

// Applies a k-form given by dx_I components to k tangent vectors.
inline double apply_form(const Eigen::VectorXd& comps, int k,
                         const std::vector<Eigen::VectorXd>& vecs, int n) {
  const auto& sets = index_subsets(n, k);
  double total = 0.0;
  Eigen::MatrixXd sub(k, k);
  for (size_t ci = 0; ci < sets.size(); ++ci) {
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) sub(r, c) = vecs[c][sets[ci][r]];
    total += comps[ci] * (k == 0 ? 1.0 : sub.determinant());
  }
  return total;
}

inline std::mt19937_64 rng(unsigned seed = 42) { return std::mt19937_64(seed); }

inline PolyForm random_form(std::mt19937_64& gen, int m, int k, int r) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  PolyForm u = PolyForm::zero(m, k);
  for (const auto& sigma0 : index_subsets(m, k)) {
    std::vector<int> sigma(sigma0.size());
    for (size_t i = 0; i < sigma0.size(); ++i) sigma[i] = sigma0[i] + 1;
    for (const auto& alpha : multi_indices(m + 1, r))
      u = u + PolyForm::monomial(m, alpha, sigma, dist(gen));
  }
  return u;
}

inline Eigen::VectorXd random_bary(std::mt19937_64& gen, int m) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  Eigen::VectorXd b(m + 1);
  for (int i = 0; i <= m; ++i) b[i] = dist(gen);
  b /= b.sum();
  return b;
}

inline Eigen::MatrixXd random_simplex(std::mt19937_64& gen, int m, int n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  while (true) {
    Eigen::MatrixXd X(n, m + 1);
    for (int i = 0; i < X.size(); ++i) X.data()[i] = dist(gen);
    try {
      SimplexGeometry geom(X);
      if (geom.volume() > 0.05) return X;
    } catch (...) {
    }
  }
}

}  // namespace feec::testing

#endif
