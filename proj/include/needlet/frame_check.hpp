#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "needlet/frame.hpp"

namespace needlet {

/// Regression constant: psi_{i eta}(eta) >= kCenterConstant * 2^{i(d-1)/2}
/// for every atom with i >= 2.
inline constexpr double kCenterConstant = 0.034;

struct FrameCheck {
  std::string name;
  bool passed;
  double observed;
  double limit;
};

struct FrameCheckOptions {
  double tol = 1e-9;
  int poles = 50;
  int polynomials = 20;
  int polynomial_degree = 8;
  int reproduction_points = 100;
  std::uint64_t seed = 1;
};

/// Cubature exactness and total weight, Parseval identity, polynomial
/// reproduction by A_j and the needlet norm bounds, for levels <= j_max.
std::vector<FrameCheck> run_frame_checks(const NeedletFrame& frame, const FrameCheckOptions& options = {});

/// Random zonal-sum polynomial sum_s w_s sum_k r_k Z^k(x_s, .) of the given
/// degree with its harmonic coefficients.
struct RandomPolynomial {
  std::vector<UnitVector> centers;
  std::vector<double> weights;
  std::vector<double> multipliers;
  [[nodiscard]] double operator()(const UnitVector& x, const SphereDim& dim) const;
};
RandomPolynomial random_polynomial(int degree, Rng& rng);

}  // namespace needlet
