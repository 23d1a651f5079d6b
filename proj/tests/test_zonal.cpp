#include "doctest.h"

#include <boost/math/special_functions/gegenbauer.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <numbers>

#include "needlet/cubature.hpp"
#include "needlet/error.hpp"
#include "needlet/random.hpp"
#include "needlet/zonal.hpp"

using namespace needlet;

namespace {

// P_k(s) = 2^{-k} sum_m (-1)^m C(k,m) C(2k-2m,k) s^{k-2m}
double legendre_series(int k, double s) {
  double total = 0.0;
  for (int m = 0; 2 * m <= k; ++m) {
    const double c = std::tgamma(k + 1.0) / (std::tgamma(m + 1.0) * std::tgamma(k - m + 1.0)) *
                     std::tgamma(2.0 * k - 2.0 * m + 1.0) /
                     (std::tgamma(k + 1.0) * std::tgamma(k - 2.0 * m + 1.0));
    total += (m % 2 ? -1.0 : 1.0) * c * std::pow(s, k - 2 * m);
  }
  return total / std::ldexp(1.0, k);
}

}  // namespace

TEST_SUITE("zonal") {

TEST_CASE("Legendre case against the explicit series and Boost") {
  for (int k = 0; k <= 12; ++k) {
    for (double s : {-1.0, -0.7, -0.2, 0.0, 0.31, 0.9, 1.0}) {
      CHECK(gegenbauer_eval(k, 0.5, s) == doctest::Approx(legendre_series(k, s)).epsilon(1e-12));
    }
  }
  for (int k : {50, 200, 511}) {
    for (double s : {-0.93, 0.12, 0.999}) {
      CHECK(std::abs(gegenbauer_eval(k, 0.5, s) - boost::math::legendre_p(k, s)) < 1e-12);
    }
  }
}

TEST_CASE("general Gegenbauer index against Boost") {
  std::vector<double> all(41);
  for (double lambda : {1.0, 1.5, 2.5}) {
    for (double s : {-0.8, 0.05, 0.77}) {
      gegenbauer_all(40, lambda, s, all);
      for (int k = 0; k <= 40; ++k) {
        const double oracle = boost::math::gegenbauer(static_cast<unsigned>(k), lambda, s);
        CHECK(all[k] == doctest::Approx(oracle).epsilon(1e-11));
        CHECK(gegenbauer_eval(k, lambda, s) == doctest::Approx(oracle).epsilon(1e-11));
      }
    }
  }
  CHECK_THROWS_AS(gegenbauer_eval(3, 0.5, 1.01), DomainError);
}

TEST_CASE("harmonic space dimensions") {
  for (int k = 0; k < 20; ++k) {
    CHECK(dim_harmonic(k, 3) == 2 * k + 1);
    CHECK(dim_harmonic(k, 4) == (k + 1) * (k + 1));
  }
  CHECK(dim_harmonic(3, 5) == 30);
}

TEST_CASE("Z^k(x, x) is dim H_k / omega in several dimensions") {
  for (int d : {3, 4, 5}) {
    const SphereDim dim(d);
    for (int k = 0; k <= 15; ++k) {
      CHECK(zonal_profile(k, 1.0, dim) ==
            doctest::Approx(static_cast<double>(dim_harmonic(k, d)) / dim.omega()).epsilon(1e-12));
    }
  }
}

TEST_CASE("reproducing property on S^2") {
  const SphereDim dim(3);
  const CubatureRule rule = build_rule_for_degree(24, dim);
  Rng rng(3);
  const UnitVector x = sample_uniform(3, rng);
  const UnitVector z = sample_uniform(3, rng);
  for (int k : {0, 1, 5, 12}) {
    const double v = integrate(rule, [&](const UnitVector& y) {
      return zonal_eval(k, x, y, dim) * zonal_eval(k, y, z, dim);
    });
    CHECK(std::abs(v - zonal_eval(k, x, z, dim)) < 1e-12);
  }
}

TEST_CASE("kernel frequency ranges and weights") {
  const WindowPair w;
  const SphereDim dim(3);
  const KernelLevel c(3, KernelKind::C, w, dim);
  CHECK(c.k_min() == 5);
  CHECK(c.k_max() == 15);
  CHECK(c.window_weight(8) == doctest::Approx(1.0));
  CHECK(c.window_weight(14) == doctest::Approx(std::sqrt(w.eval_b(14.0 / 8.0))));
  const KernelLevel a(3, KernelKind::A, w, dim);
  CHECK(a.k_min() == 0);
  CHECK(a.window_weight(4) == 1.0);
  CHECK(a.window_weight(8) == 0.0);
  const KernelLevel b(3, KernelKind::B, w, dim);
  CHECK(b.window_weight(6) == doctest::Approx(w.eval_b(0.75)));
}

TEST_CASE("kernel evaluation equals the explicit windowed sum") {
  const WindowPair w;
  for (int d : {3, 4}) {
    const SphereDim dim(d);
    for (int j : {0, 2, 4}) {
      const KernelLevel c(j, KernelKind::C, w, dim);
      for (double s : {-0.6, 0.2, 0.95, 1.0}) {
        double explicit_sum = 0.0;
        for (int k = 0; k < (2 << j); ++k) {
          explicit_sum += std::sqrt(w.eval_b(k / std::ldexp(1.0, j))) * zonal_profile(k, s, dim);
        }
        CHECK(c(s) == doctest::Approx(explicit_sum).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("zonal expansion evaluation and mass") {
  const SphereDim dim(3);
  ZonalExpansion f{dim, {{UnitVector{0.0, 0.0, 1.0}, {1.0, 0.0, 0.5}}}};
  CHECK(f.max_degree() == 2);
  CHECK(f.mass() == 1.0);
  const UnitVector x{1.0, 0.0, 0.0};
  CHECK(f.eval(x) == doctest::Approx(1.0 / (4.0 * std::numbers::pi) + 0.5 * zonal_profile(2, 0.0, dim)));
}

}
