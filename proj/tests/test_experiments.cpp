#include "doctest.h"

#include <atomic>
#include <cmath>

#include "needlet/error.hpp"
#include "needlet/experiments.hpp"

using namespace needlet;

namespace {

const NeedletFrame& shared_frame() {
  static const NeedletFrame frame(SphereDim(3), 5);
  return frame;
}

ExperimentPlan cusp_plan() {
  return {make_cusp(UnitVector{1.0, 0.0, 0.0}, 1.0, -0.3, 1.5), UnitVector{1.0, 0.0, 0.0}, {300, 1200}, 30, 21};
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("line fit recovers an exact line") {
  const std::vector<double> x = {0.5, 1.0, 2.5, 4.0, 7.0};
  std::vector<double> y;
  for (double v : x) y.push_back(-0.2 * v + 3.0);
  const LineFit f = fit_line(x, y);
  CHECK(std::abs(f.slope + 0.2) < 1e-10);
  CHECK(std::abs(f.intercept - 3.0) < 1e-10);
  CHECK(f.slope_se < 1e-10);
  CHECK_THROWS_AS(fit_line({1.0}, {2.0}), InputError);
  CHECK_THROWS_AS(fit_line({1.0, 1.0}, {2.0, 3.0}), InputError);

  // values = (n / ln n)^{-1/4}
  const std::vector<std::size_t> n = {1000, 4000, 16000};
  std::vector<double> v;
  for (auto k : n) v.push_back(std::pow(k / std::log(static_cast<double>(k)), -0.25));
  CHECK(std::abs(fit_rate(n, v).slope + 0.25) < 1e-10);
}

TEST_CASE("parallel_for visits every index once and propagates errors") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw NumericalError("boom");
                               }),
                  NumericalError);
}

TEST_CASE("plan validation") {
  ExperimentPlan p = cusp_plan();
  CHECK_NOTHROW(validate_plan(p, 30));
  CHECK_THROWS_AS(validate_plan(p, 200), InputError);
  p.n_grid = {};
  CHECK_THROWS_AS(validate_plan(p, 30), InputError);
  p.n_grid = {500, 500};
  CHECK_THROWS_AS(validate_plan(p, 30), InputError);
  p.n_grid = {1, 5};
  CHECK_THROWS_AS(validate_plan(p, 30), InputError);
  p = cusp_plan();
  p.alpha = 0.0;
  CHECK_THROWS_AS(validate_plan(p, 30), InputError);
  p = cusp_plan();
  p.n_grid = {1000, 1000000};
  CHECK(required_levels(p) == choose_J(1000000, 3));
  CHECK_THROWS_AS(run_rates(shared_frame(), p), DomainError);
}

TEST_CASE("rate runs do not depend on the worker count") {
  ExperimentPlan p = cusp_plan();
  p.estimator = EstimatorKind::Linear;
  p.workers = 1;
  const RateResult one = run_rates(shared_frame(), p);
  p.workers = 3;
  const RateResult three = run_rates(shared_frame(), p);
  REQUIRE(one.points.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(one.points[k].mean_abs_error == three.points[k].mean_abs_error);
    CHECK(one.points[k].mean_estimate == three.points[k].mean_estimate);
    CHECK(one.points[k].truth == eval_density(p.model, p.query_point));
  }
  CHECK(one.slope == three.slope);
  CHECK(one.theoretical_exponent == doctest::Approx(-0.25));
  CHECK(one.points[1].mean_abs_error < one.points[0].mean_abs_error);

  p.seed = 22;
  const RateResult other = run_rates(shared_frame(), p);
  CHECK(other.points[0].mean_abs_error != one.points[0].mean_abs_error);
}

TEST_CASE("decay of exact coefficients") {
  const DensityModel m = make_cusp(UnitVector{0.0, 0.0, 1.0}, 1.0, 0.08, 1.0);
  const DecayResult r = run_decay(shared_frame(), m, UnitVector{0.0, 0.0, 1.0}, {2, 3, 4, 5});
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    CHECK(row.near_center_max > 0.0);
    CHECK(row.sum_abs_beta_psi > 0.0);
  }
  CHECK(r.near_center_fit.slope < 0.0);
  CHECK(r.approximation_fit.slope < 0.0);
  CHECK_THROWS_AS(run_decay(shared_frame(), m, UnitVector{0.0, 0.0, 1.0}, {2}), InputError);
  CHECK_THROWS_AS(run_decay(shared_frame(), m, UnitVector{0.0, 0.0, 1.0}, {2, 9}), InputError);
}

TEST_CASE("coefficient deviations stay inside a wide band") {
  ExperimentPlan p = cusp_plan();
  p.n_grid = {2000};
  const BernsteinResult wide = run_bernstein(shared_frame(), p, 3, 10.0);
  CHECK(wide.exceedance_rate == 0.0);
  CHECK(wide.atoms == shared_frame().atom_count(3));
  CHECK(wide.bound == doctest::Approx(1e-3));
  const BernsteinResult tight = run_bernstein(shared_frame(), p, 3, 0.01);
  CHECK(tight.exceedance_rate > 0.1);
  CHECK(tight.max_mean_abs_dev == wide.max_mean_abs_dev);
}

}
