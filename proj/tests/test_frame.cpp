#include "doctest.h"

#include <cmath>

#include "needlet/error.hpp"
#include "needlet/frame.hpp"
#include "needlet/frame_check.hpp"

using namespace needlet;

namespace {

const NeedletFrame& shared_frame() {
  static const NeedletFrame frame(SphereDim(3), 5);
  return frame;
}

double max_abs_diff(const CoefficientTable& a, const CoefficientTable& b) {
  double worst = std::abs(a.constant_term() - b.constant_term());
  for (int i = 0; i < a.level_count(); ++i) {
    for (std::size_t n = 0; n < a.level(i).size(); ++n) worst = std::max(worst, std::abs(a.value(i, n) - b.value(i, n)));
  }
  return worst;
}

}  // namespace

TEST_SUITE("frame") {

TEST_CASE("spectral sample analysis agrees with direct summation") {
  const NeedletFrame& frame = shared_frame();
  Rng rng(21);
  std::vector<UnitVector> sample;
  for (int s = 0; s < 40; ++s) sample.push_back(sample_uniform(3, rng));
  const CoefficientTable fast = analyze_sample(frame, sample, 4);
  const CoefficientTable slow = analyze_sample_direct(frame, sample, 4);
  CHECK(max_abs_diff(fast, slow) < 1e-10);
  CHECK_THROWS_AS(analyze_sample(frame, std::vector<UnitVector>{}, 2), InputError);
}

TEST_CASE("spectral function analysis agrees with direct quadrature") {
  const NeedletFrame& frame = shared_frame();
  const SphereDim& dim = frame.dim();
  Rng rng(22);
  const RandomPolynomial p = random_polynomial(6, rng);
  auto f = [&](const UnitVector& x) { return p(x, dim); };
  const CoefficientTable fast = analyze_function(frame, f, 3, 6);
  const CoefficientTable slow = analyze_function_direct(frame, f, 3, build_rule_for_degree(8 + 6, dim));
  CHECK(max_abs_diff(fast, slow) < 1e-12);
}

TEST_CASE("Funk-Hecke coefficients of a zonal polynomial match quadrature") {
  const NeedletFrame& frame = shared_frame();
  const SphereDim& dim = frame.dim();
  const ZonalExpansion z{dim, {{from_spherical(0.7, 0.2), {1.0, 0.3, -0.2, 0.0, 0.1, 0.05, 0.0, -0.4, 0.2}},
                               {from_spherical(2.0, 4.0), {0.0, 0.0, 0.6, 0.1}}}};
  const CoefficientTable exact = analyze_zonal(frame, z, 5);
  const CoefficientTable quad = analyze_function(frame, [&](const UnitVector& x) { return z.eval(x); }, 5, 8);
  CHECK(max_abs_diff(exact, quad) < 1e-12);
}

TEST_CASE("Parseval identity and reconstruction") {
  const NeedletFrame& frame = shared_frame();
  const SphereDim& dim = frame.dim();
  Rng rng(23);
  for (int trial = 0; trial < 3; ++trial) {
    const RandomPolynomial p = random_polynomial(8, rng);
    auto f = [&](const UnitVector& x) { return p(x, dim); };
    const CoefficientTable beta = analyze_function(frame, f, 6, 8);
    const double norm_sq = integrate(build_rule_for_degree(16, dim), [&](const UnitVector& x) { return f(x) * f(x); });
    const double parseval = beta.constant_term() * beta.constant_term() * dim.omega() + beta.sum_of_squares();
    CHECK(std::abs(parseval - norm_sq) / norm_sq < 1e-12);
    for (int q = 0; q < 5; ++q) {
      const UnitVector x = sample_uniform(3, rng);
      CHECK(std::abs(synthesize(frame, beta, x) - f(x)) < 1e-11);
    }
  }
}

TEST_CASE("harmonic form of a coefficient table synthesizes the same function") {
  const NeedletFrame& frame = shared_frame();
  Rng rng(24);
  std::vector<UnitVector> sample;
  for (int s = 0; s < 100; ++s) sample.push_back(sample_uniform(3, rng));
  const CoefficientTable table = analyze_sample(frame, sample, 4);
  const CoefficientMask keep = [](int i, std::size_t n, double) { return (i + n) % 3 != 0; };
  const HarmonicCoefficients c = harmonics_from_table(frame, table, 4, keep);
  const std::vector<double> ones(static_cast<std::size_t>(c.max_degree()) + 1, 1.0);
  for (int q = 0; q < 5; ++q) {
    const UnitVector x = sample_uniform(3, rng);
    CHECK(std::abs(table.constant_term() + c.synthesize(ones, x) - synthesize(frame, table, x, keep)) < 1e-12);
  }
}

TEST_CASE("psi at a point matches single-atom evaluation") {
  const NeedletFrame& frame = shared_frame();
  const UnitVector x = from_spherical(1.0, 0.5);
  const auto psi = psi_at_point(frame, x, 4);
  for (int i = 0; i < 4; ++i) {
    for (std::size_t n = 0; n < psi[i].size(); n += 5) {
      CHECK(psi[i][n] == doctest::Approx(psi_eval(frame, frame.atom(i, n), x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("closed-form L2 norm equals cubature of psi squared") {
  const NeedletFrame& frame = shared_frame();
  for (int i = 0; i <= 4; ++i) {
    for (std::size_t n : {std::size_t{0}, frame.atom_count(i) / 2}) {
      const NeedletAtom a = frame.atom(i, n);
      const FrameNorms norms = frame_norms(frame, a);
      CHECK(norms.l2_norm == doctest::Approx(l2_norm_by_cubature(frame, a)).epsilon(1e-12));
      CHECK(norms.l2_norm <= 1.0);
      CHECK(norms.sup_norm >= std::sqrt(a.weight) * frame.needlet_kernel(i)(1.0) - 1e-15);
    }
  }
}

TEST_CASE("coefficient table JSON round trip") {
  const NeedletFrame& frame = shared_frame();
  Rng rng(25);
  std::vector<UnitVector> sample;
  for (int s = 0; s < 30; ++s) sample.push_back(sample_uniform(3, rng));
  const CoefficientTable table = analyze_sample(frame, sample, 3);
  CHECK(table_from_json(table_to_json(table), frame) == table);
  CHECK_THROWS_AS(table_from_json("{\"dim\": 3}", frame), InputError);
  CHECK_THROWS_AS(table_from_json("not json", frame), InputError);
  CHECK_THROWS_AS(
      table_from_json(R"({"dim":3,"levels":1,"constant_term":0,"entries":[{"i":0,"idx":9999,"value":1}]})", frame),
      InputError);
}

TEST_CASE("level range checks") {
  const NeedletFrame& frame = shared_frame();
  CHECK_THROWS_AS((void)frame.rule(6), DomainError);
  CHECK_THROWS_AS(analyze_sample(frame, std::vector<UnitVector>{UnitVector{0.0, 0.0, 1.0}}, 8), DomainError);
}

}
