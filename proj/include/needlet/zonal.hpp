#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "needlet/sphere.hpp"
#include "needlet/window.hpp"

namespace needlet {

/// C_k^lambda(s) by the three-term recurrence. Throws DomainError for |s| > 1.
double gegenbauer_eval(int k, double lambda, double s);

/// Fills out[0..kmax] with C_0^lambda(s) .. C_kmax^lambda(s) in one pass.
void gegenbauer_all(int kmax, double lambda, double s, std::span<double> out);

/// dim H_k(S^{d-1}) = binom(d+k-1, d-1) - binom(d+k-3, d-1).
std::int64_t dim_harmonic(int k, int d);

/// Multiplier (2k+d-2) / ((d-2) omega_{d-1}) turning C_k^{(d-2)/2} into Z^k.
double zonal_normalization(int k, const SphereDim& dim);

/// Z^k(x, y) as a function of s = x.y.
double zonal_profile(int k, double s, const SphereDim& dim);

/// Reproducing kernel of H_k(S^{d-1}).
double zonal_eval(int k, const UnitVector& x, const UnitVector& y, const SphereDim& dim);

enum class KernelKind { A, B, C };

/// One windowed kernel A_j, B_j or C_j with its frequency weights
/// precomputed. Frequencies whose window weight is <= 1e-15 are dropped.
class KernelLevel {
 public:
  KernelLevel(int j, KernelKind kind, const WindowPair& window, const SphereDim& dim);

  [[nodiscard]] int level() const { return j_; }
  [[nodiscard]] KernelKind kind() const { return kind_; }
  [[nodiscard]] const SphereDim& dim() const { return dim_; }

  /// Smallest and largest frequency carrying a nonzero weight (k_max < 0
  /// when the range is empty).
  [[nodiscard]] int k_min() const { return k_min_; }
  [[nodiscard]] int k_max() const { return k_max_; }

  /// Window weight of frequency k (a, b or sqrt(b) evaluated at k / 2^j).
  [[nodiscard]] double window_weight(int k) const;
  /// Window weights indexed by k = 0..k_max.
  [[nodiscard]] std::span<const double> window_weights() const { return window_weights_; }

  /// Kernel value as a function of the inner product s; one recurrence pass.
  [[nodiscard]] double operator()(double s) const;

 private:
  int j_;
  KernelKind kind_;
  SphereDim dim_;
  int k_min_ = 0;
  int k_max_ = -1;
  std::vector<double> window_weights_;
  std::vector<double> coefficients_;  // window weight times zonal normalization
};

double kernel_sum(const KernelLevel& level, const UnitVector& x, const UnitVector& y);

/// A finite sum of zonal components, f(y) = sum_c sum_k mu[c][k] Z^k(pole_c, y).
struct ZonalExpansion {
  struct Component {
    UnitVector pole;
    std::vector<double> mu;  // indexed by degree k
  };
  SphereDim dim;
  std::vector<Component> components;

  [[nodiscard]] int max_degree() const;
  [[nodiscard]] double eval(const UnitVector& x) const;
  /// <f, 1> = sum of the degree-0 multipliers.
  [[nodiscard]] double mass() const;
};

}  // namespace needlet
