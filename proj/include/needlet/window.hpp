#pragma once

#include <vector>

namespace needlet {

/// Littlewood-Paley window pair (a, b).
///
/// a == 1 on [0, 1/2], a == 0 on [1, inf), and on (1/2, 1) it falls along
/// 1 - phi(2x - 1), where phi is the normalized integral of the C-infinity
/// bump u -> exp(-1 / (u (1 - u))). b(x) = a(x/2) - a(x) is supported on
/// [1/2, 2] and the dyadic dilates of b telescope to 1.
///
/// phi is tabulated once on a 4096-interval grid (cumulative Simpson) and
/// evaluated by cubic Hermite interpolation using the exact bump as slope.
class WindowPair {
 public:
  static constexpr int kTableIntervals = 4096;
  static constexpr int kFloorGridPoints = 10000;

  /// Builds the default bump profile and certifies the floor of b on
  /// [1, 7/4]; throws NumericalError if that floor is not positive.
  WindowPair();

  [[nodiscard]] double eval_a(double x) const;
  [[nodiscard]] double eval_b(double x) const;

  /// Normalized transition profile phi(u) on [0, 1].
  [[nodiscard]] double profile(double u) const;

  /// Minimum of b over a 10^4-point uniform grid on [1, 7/4].
  [[nodiscard]] double certify_floor() const;
  [[nodiscard]] double floor() const { return floor_; }

 private:
  std::vector<double> phi_;
  std::vector<double> slope_;
  double floor_ = 0.0;
};

/// Unnormalized bump exp(-1 / (u (1 - u))) on (0, 1), zero elsewhere.
double bump(double u);

}  // namespace needlet
