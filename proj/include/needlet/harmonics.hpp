#pragma once

#include <span>
#include <vector>

#include "needlet/cubature.hpp"
#include "needlet/sphere.hpp"

namespace needlet {

/// Coefficients of a band-limited function on S^2 in the orthonormal real
/// spherical-harmonic basis, degrees 0..max_degree.
///
/// The basis satisfies sum_m Y_km(x) Y_km(y) = Z^k(x, y), which is all the
/// needlet code relies on: for c = (1/n) sum_s Y(X_s), the degree-k part of
/// the synthesis at eta equals (1/n) sum_s Z^k(X_s, eta).
class HarmonicCoefficients {
 public:
  explicit HarmonicCoefficients(int max_degree);

  [[nodiscard]] int max_degree() const { return max_degree_; }

  /// c += weight * Y(x) for all basis functions.
  void add_point(const UnitVector& x, double weight);
  /// c += sum_k mu[k] * Y_k(pole), i.e. adds the expansion of the zonal
  /// function sum_k mu[k] Z^k(pole, .).
  void add_zonal(const UnitVector& pole, std::span<const double> mu);

  /// sum_k w[k] sum_m c_km Y_km(x); degrees beyond w.size() are skipped.
  [[nodiscard]] double synthesize(std::span<const double> degree_weights, const UnitVector& x) const;

  /// The same synthesis evaluated at every node of a product rule, in the
  /// rule's node order.
  [[nodiscard]] std::vector<double> synthesize_on_rule(std::span<const double> degree_weights,
                                                       const CubatureRule& rule) const;

  [[nodiscard]] std::span<const double> cos_part() const { return cos_; }
  [[nodiscard]] std::span<const double> sin_part() const { return sin_; }

  /// c_km *= w[k]; degrees beyond w.size() are zeroed.
  void scale_degrees(std::span<const double> degree_weights);

  HarmonicCoefficients& operator+=(const HarmonicCoefficients& other);

 private:
  [[nodiscard]] static std::size_t index(int k, int m) {
    return static_cast<std::size_t>(k) * (k + 1) / 2 + m;
  }

  int max_degree_;
  std::vector<double> cos_;  // m >= 0, includes the sqrt(2) factor for m > 0
  std::vector<double> sin_;  // m >= 1
};

/// Orthonormal associated Legendre values Pbar_k^m(z) (including the
/// sqrt(2) factor for m > 0) for 0 <= m <= k <= max_degree, packed as
/// k(k+1)/2 + m.
void normalized_legendre_table(int max_degree, double z, std::span<double> out);

}  // namespace needlet
