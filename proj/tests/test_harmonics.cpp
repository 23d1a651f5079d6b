#include "doctest.h"

#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <cmath>
#include <numbers>

#include "needlet/cubature.hpp"
#include "needlet/harmonics.hpp"
#include "needlet/random.hpp"
#include "needlet/zonal.hpp"

using namespace needlet;

namespace {

std::size_t packed(int k, int m) { return static_cast<std::size_t>(k) * (k + 1) / 2 + m; }

std::vector<double> unit_degree(int k, int L) {
  std::vector<double> w(static_cast<std::size_t>(L) + 1, 0.0);
  w[k] = 1.0;
  return w;
}

}  // namespace

TEST_SUITE("harmonics") {

TEST_CASE("real basis matches Boost spherical harmonics without the Condon-Shortley phase") {
  const double theta = 1.1;
  const double phi = 2.3;
  const UnitVector x = from_spherical(theta, phi);
  HarmonicCoefficients c(20);
  c.add_point(x, 1.0);
  for (int k = 0; k <= 20; ++k) {
    for (int m = 0; m <= k; ++m) {
      const double sign = m % 2 ? -1.0 : 1.0;
      const double scale = m == 0 ? 1.0 : std::numbers::sqrt2;
      const double re = boost::math::spherical_harmonic_r(k, m, theta, phi);
      const double im = boost::math::spherical_harmonic_i(k, m, theta, phi);
      CHECK(std::abs(c.cos_part()[packed(k, m)] - sign * scale * re) < 1e-12);
      if (m > 0) CHECK(std::abs(c.sin_part()[packed(k, m)] - sign * scale * im) < 1e-12);
    }
  }
}

TEST_CASE("addition theorem: degree-k synthesis of a point mass is Z^k") {
  const SphereDim dim(3);
  Rng rng(9);
  const int L = 64;
  for (int trial = 0; trial < 5; ++trial) {
    const UnitVector x = sample_uniform(3, rng);
    const UnitVector y = sample_uniform(3, rng);
    HarmonicCoefficients c(L);
    c.add_point(x, 1.0);
    for (int k : {0, 1, 7, 33, 64}) {
      CHECK(std::abs(c.synthesize(unit_degree(k, L), y) - zonal_profile(k, x.dot(y), dim)) < 1e-11);
    }
  }
}

TEST_CASE("orthonormality by cubature") {
  const int L = 10;
  const CubatureRule rule = build_rule_for_degree(2 * L, SphereDim(3));
  // sum_n w_n Y(x_n) Y(x_n)^T = I, tested through the Gram of packed entries
  std::vector<HarmonicCoefficients> at_nodes;
  std::vector<double> gram_cos(packed(L, L) + 1, 0.0);
  double off_diagonal = 0.0;
  for (std::size_t n = 0; n < rule.size(); ++n) {
    HarmonicCoefficients c(L);
    c.add_point(rule.nodes[n], 1.0);
    const auto cp = c.cos_part();
    const auto sp = c.sin_part();
    for (std::size_t i = 0; i < cp.size(); ++i) gram_cos[i] += rule.weights[n] * (cp[i] * cp[i]);
    off_diagonal += rule.weights[n] * cp[packed(3, 1)] * cp[packed(5, 1)] + rule.weights[n] * cp[packed(4, 2)] * sp[packed(4, 2)];
  }
  for (double g : gram_cos) CHECK(std::abs(g - 1.0) < 1e-12);
  CHECK(std::abs(off_diagonal) < 1e-12);
}

TEST_CASE("synthesis on a rule matches pointwise synthesis") {
  Rng rng(4);
  HarmonicCoefficients c(15);
  for (int s = 0; s < 6; ++s) c.add_point(sample_uniform(3, rng), rng.normal());
  std::vector<double> w(16);
  for (int k = 0; k <= 15; ++k) w[k] = k < 3 ? 0.0 : 1.0 / (1.0 + k);
  const CubatureRule rule = build_rule(2, SphereDim(3));
  const auto grid = c.synthesize_on_rule(w, rule);
  for (std::size_t n = 0; n < rule.size(); n += 7) {
    CHECK(std::abs(grid[n] - c.synthesize(w, rule.nodes[n])) < 1e-13);
  }
}

TEST_CASE("zonal coefficients equal weighted point coefficients") {
  const UnitVector pole = from_spherical(0.4, -1.2);
  const std::vector<double> mu = {1.0, 0.5, -0.25, 0.0, 2.0};
  HarmonicCoefficients zonal(6);
  zonal.add_zonal(pole, mu);
  HarmonicCoefficients point(6);
  point.add_point(pole, 1.0);
  point.scale_degrees(mu);
  for (std::size_t i = 0; i < zonal.cos_part().size(); ++i) {
    CHECK(std::abs(zonal.cos_part()[i] - point.cos_part()[i]) < 1e-15);
    CHECK(std::abs(zonal.sin_part()[i] - point.sin_part()[i]) < 1e-15);
  }
}

}
