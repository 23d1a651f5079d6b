#pragma once

#include <span>
#include <vector>

#include "needlet/random.hpp"

namespace needlet {

/// Ambient dimension d of the sphere S^{d-1} together with its surface
/// measure omega_{d-1}. Only d >= 3 is supported.
class SphereDim {
 public:
  explicit SphereDim(int d);

  [[nodiscard]] int d() const { return d_; }
  [[nodiscard]] double omega() const { return omega_; }
  /// Gegenbauer index (d - 2) / 2 of the zonal kernels.
  [[nodiscard]] double lambda() const { return 0.5 * (d_ - 2); }

  friend bool operator==(const SphereDim&, const SphereDim&) = default;

 private:
  int d_;
  double omega_;
};

/// A point on S^{d-1}.
///
/// Inputs within 1e-8 of unit norm are renormalized; anything farther is
/// rejected with InputError.
class UnitVector {
 public:
  explicit UnitVector(std::vector<double> coords);
  UnitVector(std::initializer_list<double> coords);

  [[nodiscard]] int dim() const { return static_cast<int>(coords_.size()); }
  [[nodiscard]] std::span<const double> coords() const { return coords_; }
  [[nodiscard]] double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

  /// Euclidean inner product clamped to [-1, 1].
  [[nodiscard]] double dot(const UnitVector& other) const;

  friend bool operator==(const UnitVector&, const UnitVector&) = default;

 private:
  std::vector<double> coords_;
};

/// omega_{d-1} = 2 pi^{d/2} / Gamma(d/2).
double surface_measure(int d);

/// Great-circle distance in [0, pi].
double geodesic_distance(const UnitVector& x, const UnitVector& y);

/// Uniform point on S^{d-1}: normalized vector of d standard normals.
UnitVector sample_uniform(int d, Rng& rng);

/// Point with colatitude theta (from +e_d) and longitude phi; d = 3 only.
UnitVector from_spherical(double theta, double phi);

}  // namespace needlet
