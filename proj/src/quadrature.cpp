#include "feec/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "feec/polyform.hpp"

namespace feec {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Grundmann-Moller rule of index s on the m-simplex, exact for degree 2s+1.
QuadratureRule build_gm(int m, int s) {
  QuadratureRule rule;
  const int d = 2 * s + 1;
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> wts;
  for (int i = 0; i <= s; ++i) {
    const double denom = d + m - 2 * i;
    double w = std::pow(2.0, -2 * s) * std::pow(denom, d) /
               (factorial(i) * factorial(d + m - i));
    if (i % 2 == 1) w = -w;
    for (const auto& beta : multi_indices(m + 1, s - i)) {
      Eigen::VectorXd p(m + 1);
      for (int j = 0; j <= m; ++j) p[j] = (2.0 * beta[j] + 1.0) / denom;
      pts.push_back(p);
      wts.push_back(w);
    }
  }
  rule.points.resize(m + 1, pts.size());
  rule.weights.resize(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    rule.points.col(i) = pts[i];
    rule.weights[i] = wts[i];
  }
  // GM weights integrate over the unit simplex of volume 1/m!; normalize to
  // weight sum one.
  rule.weights *= factorial(m);
  rule.degree = d;
  return rule;
}

}  // namespace

const QuadratureRule& simplex_quadrature(int m, int degree) {
  static std::map<std::pair<int, int>, QuadratureRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const int s = degree <= 1 ? 0 : degree / 2;  // 2s+1 >= degree
  auto key = std::make_pair(m, s);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_gm(m, s)).first;
  return it->second;
}

}  // namespace feec
