#include "doctest.h"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "needlet/cubature.hpp"
#include "needlet/error.hpp"

using namespace needlet;

namespace {

// Surface integral of x^a y^b z^c over S^2.
double monomial_integral(int a, int b, int c) {
  if (a % 2 || b % 2 || c % 2) return 0.0;
  return 2.0 * std::tgamma((a + 1) / 2.0) * std::tgamma((b + 1) / 2.0) * std::tgamma((c + 1) / 2.0) /
         std::tgamma((a + b + c + 3) / 2.0);
}

}  // namespace

TEST_SUITE("cubature") {

TEST_CASE("Gauss-Legendre nodes and weights against Boost") {
  using Oracle = boost::math::quadrature::gauss<double, 20>;
  const GaussLegendre gl = gauss_legendre(20);
  const auto& x = Oracle::abscissa();
  const auto& w = Oracle::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    // Boost lists the nonnegative half in ascending order
    const std::size_t hi = 10 + i;
    const std::size_t lo = 9 - i;
    CHECK(std::abs(gl.nodes[hi] - x[i]) < 1e-14);
    CHECK(std::abs(gl.nodes[lo] + x[i]) < 1e-14);
    CHECK(std::abs(gl.weights[hi] - w[i]) < 1e-14);
    CHECK(std::abs(gl.weights[lo] - w[i]) < 1e-14);
  }
}

TEST_CASE("product rules integrate monomials exactly up to their degree") {
  const SphereDim dim(3);
  for (int degree : {0, 3, 8, 17, 32}) {
    const CubatureRule rule = build_rule_for_degree(degree, dim);
    for (int a = 0; a <= degree; ++a) {
      for (int b = 0; a + b <= degree; ++b) {
        for (int c = 0; a + b + c <= degree; ++c) {
          const double v = integrate(rule, [&](const UnitVector& p) {
            return std::pow(p[0], a) * std::pow(p[1], b) * std::pow(p[2], c);
          });
          CHECK(std::abs(v - monomial_integral(a, b, c)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("level rules: degree, positive weights summing to 4 pi, ordering") {
  const SphereDim dim(3);
  for (int j = 0; j <= 6; ++j) {
    const CubatureRule rule = build_rule(j, dim);
    CHECK(rule.level == j);
    CHECK(rule.degree == (4 << j));
    double total = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      total += w;
    }
    CHECK(std::abs(total - 4.0 * std::numbers::pi) < 1e-12);
    CHECK(rule.size() == rule.latitude_cos.size() * static_cast<std::size_t>(rule.longitude_count));
    CHECK(rule.nodes.front()[2] < rule.nodes.back()[2]);
  }
  CHECK_THROWS_AS(build_rule(13, dim), DomainError);
  CHECK_THROWS_AS(build_rule(2, SphereDim(4)), DomainError);
}

TEST_CASE("analytic separation equals the brute-force minimum distance") {
  const SphereDim dim(3);
  for (int j = 0; j <= 3; ++j) {
    const CubatureRule rule = build_rule(j, dim);
    double best = 10.0;
    for (std::size_t a = 0; a < rule.size(); ++a) {
      for (std::size_t b = a + 1; b < rule.size(); ++b) best = std::min(best, geodesic_distance(rule.nodes[a], rule.nodes[b]));
    }
    CHECK(rule.separation == doctest::Approx(best).epsilon(1e-12));
    const RuleDiagnostics diag = diagnostics(rule);
    CHECK(diag.separation == doctest::Approx(best * std::ldexp(1.0, j)).epsilon(1e-12));
    CHECK(diag.min_weight_ratio > 0.0);
    CHECK(diag.min_weight_ratio <= diag.max_weight_ratio);
  }
}

TEST_CASE("non-finite integrand is reported") {
  const CubatureRule rule = build_rule(0, SphereDim(3));
  CHECK_THROWS_AS(integrate(rule, [](const UnitVector&) { return std::numeric_limits<double>::quiet_NaN(); }),
                  NumericalError);
}

TEST_CASE("rule CSV export") {
  const CubatureRule rule = build_rule(0, SphereDim(3));
  std::ostringstream out;
  write_rule_csv(rule, out);
  const std::string text = out.str();
  CHECK(text.rfind("x1,x2,x3,weight\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) == rule.size() + 1);
}

}
