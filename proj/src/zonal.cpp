#include "needlet/zonal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "needlet/error.hpp"

namespace needlet {
namespace {

constexpr double kWeightCutoff = 1e-15;
constexpr int kCompensatedFromLevel = 8;

void check_argument(double s) {
  if (std::isnan(s) || std::abs(s) > 1.0) {
    throw DomainError("Gegenbauer argument outside [-1, 1]: " + std::to_string(s));
  }
}

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  [[nodiscard]] double value() const { return sum + carry; }
};

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double gegenbauer_eval(int k, double lambda, double s) {
  check_argument(s);
  if (k < 0) throw DomainError("Gegenbauer degree must be nonnegative");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * lambda * s;
  for (int n = 2; n <= k; ++n) {
    const double next = (2.0 * (n + lambda - 1.0) * s * cur - (n + 2.0 * lambda - 2.0) * prev) / n;
    prev = cur;
    cur = next;
  }
  return cur;
}

void gegenbauer_all(int kmax, double lambda, double s, std::span<double> out) {
  check_argument(s);
  if (kmax < 0) return;
  out[0] = 1.0;
  if (kmax == 0) return;
  out[1] = 2.0 * lambda * s;
  for (int n = 2; n <= kmax; ++n) {
    out[n] = (2.0 * (n + lambda - 1.0) * s * out[n - 1] - (n + 2.0 * lambda - 2.0) * out[n - 2]) / n;
  }
}

std::int64_t dim_harmonic(int k, int d) {
  if (k < 0 || d < 3) throw DomainError("dim_harmonic needs k >= 0 and d >= 3");
  return binomial(d + k - 1, d - 1) - binomial(d + k - 3, d - 1);
}

double zonal_normalization(int k, const SphereDim& dim) {
  return (2.0 * k + dim.d() - 2.0) / ((dim.d() - 2.0) * dim.omega());
}

double zonal_profile(int k, double s, const SphereDim& dim) {
  return zonal_normalization(k, dim) * gegenbauer_eval(k, dim.lambda(), s);
}

double zonal_eval(int k, const UnitVector& x, const UnitVector& y, const SphereDim& dim) {
  if (x.dim() != dim.d() || y.dim() != dim.d()) throw InputError("dimension mismatch in zonal_eval");
  return zonal_profile(k, x.dot(y), dim);
}

KernelLevel::KernelLevel(int j, KernelKind kind, const WindowPair& window, const SphereDim& dim)
    : j_(j), kind_(kind), dim_(dim) {
  if (j < 0) throw DomainError("kernel level must be nonnegative");
  const double scale = std::ldexp(1.0, j);
  int hi = 0;
  int lo = 0;
  if (kind == KernelKind::A) {
    hi = static_cast<int>(scale);
  } else {
    // open range (2^{j-1}, 2^{j+1})
    lo = static_cast<int>(std::floor(0.5 * scale)) + 1;
    hi = 2 * static_cast<int>(scale) - 1;
  }
  window_weights_.assign(static_cast<std::size_t>(hi) + 1, 0.0);
  coefficients_.assign(static_cast<std::size_t>(hi) + 1, 0.0);
  k_min_ = hi + 1;
  for (int k = lo; k <= hi; ++k) {
    const double x = k / scale;
    double w = 0.0;
    switch (kind) {
      case KernelKind::A: w = window.eval_a(x); break;
      case KernelKind::B: w = window.eval_b(x); break;
      case KernelKind::C: w = std::sqrt(std::max(0.0, window.eval_b(x))); break;
    }
    if (w <= kWeightCutoff) continue;
    window_weights_[k] = w;
    coefficients_[k] = w * zonal_normalization(k, dim);
    k_min_ = std::min(k_min_, k);
    k_max_ = k;
  }
  window_weights_.resize(static_cast<std::size_t>(k_max_ + 1));
  coefficients_.resize(static_cast<std::size_t>(k_max_ + 1));
}

double KernelLevel::window_weight(int k) const {
  if (k < 0 || k > k_max_) return 0.0;
  return window_weights_[k];
}

double KernelLevel::operator()(double s) const {
  check_argument(s);
  if (k_max_ < 0) return 0.0;
  const double lambda = dim_.lambda();
  double prev = 1.0;
  double cur = 2.0 * lambda * s;
  if (j_ >= kCompensatedFromLevel) {
    CompensatedSum acc;
    acc.add(coefficients_[0] * prev);
    if (k_max_ >= 1) acc.add(coefficients_[1] * cur);
    for (int n = 2; n <= k_max_; ++n) {
      const double next = (2.0 * (n + lambda - 1.0) * s * cur - (n + 2.0 * lambda - 2.0) * prev) / n;
      prev = cur;
      cur = next;
      acc.add(coefficients_[n] * cur);
    }
    return acc.value();
  }
  double acc = coefficients_[0] * prev;
  if (k_max_ >= 1) acc += coefficients_[1] * cur;
  for (int n = 2; n <= k_max_; ++n) {
    const double next = (2.0 * (n + lambda - 1.0) * s * cur - (n + 2.0 * lambda - 2.0) * prev) / n;
    prev = cur;
    cur = next;
    acc += coefficients_[n] * cur;
  }
  return acc;
}

double kernel_sum(const KernelLevel& level, const UnitVector& x, const UnitVector& y) {
  if (x.dim() != level.dim().d() || y.dim() != level.dim().d()) {
    throw InputError("dimension mismatch in kernel_sum");
  }
  return level(x.dot(y));
}

int ZonalExpansion::max_degree() const {
  int m = -1;
  for (const auto& c : components) m = std::max(m, static_cast<int>(c.mu.size()) - 1);
  return m;
}

double ZonalExpansion::eval(const UnitVector& x) const {
  const int kmax = max_degree();
  if (kmax < 0) return 0.0;
  std::vector<double> g(static_cast<std::size_t>(kmax) + 1);
  double total = 0.0;
  for (const auto& c : components) {
    const int kc = static_cast<int>(c.mu.size()) - 1;
    gegenbauer_all(kc, dim.lambda(), c.pole.dot(x), g);
    for (int k = 0; k <= kc; ++k) total += c.mu[k] * zonal_normalization(k, dim) * g[k];
  }
  return total;
}

double ZonalExpansion::mass() const {
  double m = 0.0;
  for (const auto& c : components) {
    if (!c.mu.empty()) m += c.mu[0];
  }
  return m;
}

}  // namespace needlet
