#include "doctest.h"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "needlet/window.hpp"

using namespace needlet;

TEST_SUITE("window") {

TEST_CASE("plateaus and support") {
  const WindowPair w;
  for (double x : {0.0, 0.1, 0.25, 0.5}) CHECK(w.eval_a(x) == 1.0);
  for (double x : {1.0, 1.5, 7.0}) CHECK(w.eval_a(x) == 0.0);
  for (double x : {0.0, 0.2, 0.5, 2.0, 3.0}) CHECK(w.eval_b(x) == 0.0);
  CHECK(w.eval_a(0.75) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("profile matches an independent quadrature of the bump") {
  const WindowPair w;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double total = ts.integrate(bump, 0.0, 1.0);
  CHECK(total == doctest::Approx(0.007029858406609657).epsilon(1e-13));
  for (double u : {0.013, 0.1, 0.37, 0.5, 0.61, 0.9, 0.987}) {
    const double oracle = ts.integrate(bump, 0.0, u) / total;
    CHECK(std::abs(w.profile(u) - oracle) < 1e-12);
  }
}

TEST_CASE("b at 7/4 and the certified floor on [1, 7/4]") {
  const WindowPair w;
  // a(7/8) from an independent adaptive quadrature of the bump
  CHECK(std::abs(w.eval_b(1.75) - 0.031754957727645805) < 1e-12);
  CHECK(std::abs(w.floor() - 0.0317549577276458) < 1e-9);
  CHECK(w.floor() > 0.03);
  CHECK(w.certify_floor() == w.floor());
}

TEST_CASE("dyadic dilates of b telescope to one") {
  const WindowPair w;
  for (double x : {1.0, 1.3, 2.7, 5.0, 11.1, 100.0}) {
    double s = 0.0;
    for (int j = 0; j < 12; ++j) s += w.eval_b(x / std::ldexp(1.0, j));
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("a is nonincreasing") {
  const WindowPair w;
  double prev = 1.0;
  for (int i = 0; i <= 2000; ++i) {
    const double v = w.eval_a(0.5 + 0.5 * i / 2000.0);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

}
