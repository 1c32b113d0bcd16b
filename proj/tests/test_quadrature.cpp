#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feec/quadrature.hpp"
#include "feec/polyform.hpp"
#include "helpers.hpp"

using namespace feec;

namespace {

double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// closed-form barycentric moment, normalized to a unit-volume simplex
double exact_moment(const std::vector<int>& alpha, int m) {
  double num = factorial(m);
  int total = 0;
  for (int a : alpha) {
    num *= factorial(a);
    total += a;
  }
  return num / factorial(total + m);
}

}  // namespace

TEST_CASE("rules integrate monomials to the advertised degree") {
  for (int m = 1; m <= 3; ++m)
    for (int degree : {2, 4, 7, 11}) {
      const auto& rule = simplex_quadrature(m, degree);
      CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
      for (int d = 0; d <= degree; ++d)
        for (const auto& alpha : multi_indices(m + 1, d)) {
          double quad = 0;
          for (int q = 0; q < rule.npts(); ++q) {
            double v = 1;
            for (int i = 0; i <= m; ++i)
              for (int a = 0; a < alpha[i]; ++a) v *= rule.points(i, q);
            quad += rule.weights[q] * v;
          }
          CHECK(quad == doctest::Approx(exact_moment(alpha, m)).epsilon(1e-10));
        }
    }
}

TEST_CASE("agrees with the collapsed tensor oracle on smooth data") {
  auto f = [](const Eigen::VectorXd& b) {
    return std::sin(b[0] + 2 * b[1]) * std::exp(b.tail(b.size() - 1).sum());
  };
  for (int m = 2; m <= 3; ++m) {
    const auto& rule = simplex_quadrature(m, 19);
    double gm = 0;
    for (int q = 0; q < rule.npts(); ++q) gm += rule.weights[q] * f(rule.points.col(q));
    auto oracle = feec::testing::duffy_rule(m, 24);
    double ref = 0;
    for (int q = 0; q < oracle.weights.size(); ++q)
      ref += oracle.weights[q] * f(oracle.points.col(q));
    CHECK(gm == doctest::Approx(ref).epsilon(1e-10));
  }
}
