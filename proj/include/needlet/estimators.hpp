#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "needlet/frame.hpp"
#include "needlet/sphere.hpp"

namespace needlet {

enum class SupSource { Known, PlugIn };

/// CI inflation factor applied to sigma_hat.
inline constexpr double kIntervalInflation = 1.01;

struct EstimatorConfig {
  std::size_t n = 0;
  int J = 0;
  double kappa1 = 0.0;
  double kappa_w = 0.0;
  double w = 0.0;
  double alpha = 0.05;
  double gamma_n = 0.0;
  SupSource sup_source = SupSource::Known;
  double sup_f = 0.0;
  /// Sets n^{-w} = alpha / #survivors instead of alpha / n.
  bool adaptive_w = false;

  /// 2 kappa1 sqrt(ln n / n).
  [[nodiscard]] double threshold() const;
  /// sqrt(ln n / n).
  [[nodiscard]] double noise_scale() const;
};

/// Largest J with 2^{J(d-1)} <= n / ln n. Throws InputError for n < 2.
int choose_J(std::size_t n, int d);

/// max(14 v / (3 sqrt(omega)), sup_f sqrt(omega)).
double kappa(double v, double sup_f, const SphereDim& dim);

/// Config with J = choose_J(n), w = 1 + ln(1/alpha)/ln n, gamma_n = ln n.
EstimatorConfig make_config(std::size_t n, const SphereDim& dim, double alpha, double sup_f,
                            SupSource source = SupSource::Known, bool adaptive_w = false);

/// Recomputes w and kappa_w from the survivor count (adaptive_w only).
EstimatorConfig with_survivor_count(const EstimatorConfig& config, const SphereDim& dim,
                                    std::size_t survivors);

double linear_estimate(const NeedletFrame& frame, const CoefficientTable& table, int J, const UnitVector& x);

struct Survivor {
  int level;
  std::size_t node_index;
  double beta_hat;
};

/// Entries of levels < J with |beta_hat| >= threshold, in (level, node) order.
std::vector<Survivor> survivors(const CoefficientTable& table, int J, double threshold);

double threshold_estimate(const NeedletFrame& frame, const CoefficientTable& table,
                          const EstimatorConfig& config, const UnitVector& x);

double sigma_hat(const NeedletFrame& frame, const CoefficientTable& table, const EstimatorConfig& config,
                 const UnitVector& x);

struct Interval {
  double lo;
  double hi;
  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] bool contains(double v) const { return lo <= v && v <= hi; }
};

Interval confidence_interval(const NeedletFrame& frame, const CoefficientTable& table,
                             const EstimatorConfig& config, const UnitVector& x);

/// Max of the level-J linear estimate over a grid of mesh <= 2^{-J-1},
/// refined locally around the best grid points, floored at 1/omega.
double plug_in_sup(const NeedletFrame& frame, const CoefficientTable& table, int J);
/// Same from the empirical harmonic coefficients of the sample.
double plug_in_sup(const NeedletFrame& frame, const HarmonicCoefficients& empirical, int J);

/// psi values of every atom of levels < J at a fixed query point, for
/// repeated evaluation against many tables.
class QueryPoint {
 public:
  QueryPoint(const NeedletFrame& frame, const UnitVector& x, int J);

  [[nodiscard]] const UnitVector& point() const { return x_; }
  [[nodiscard]] int J() const { return J_; }
  [[nodiscard]] const std::vector<double>& psi(int level) const { return psi_.at(static_cast<std::size_t>(level)); }

 private:
  UnitVector x_;
  int J_;
  std::vector<std::vector<double>> psi_;
};

struct PointEstimate {
  double linear;
  double estimate;
  double sigma_hat;
  Interval ci;
  std::size_t survivor_count;
  double kappa_w;
};

/// All point quantities in one pass over the table; matches the free
/// functions above to rounding.
PointEstimate evaluate(const QueryPoint& q, const CoefficientTable& table, const EstimatorConfig& config,
                       const SphereDim& dim);

/// {point, estimate, sigma_hat, ci, J, kappa1, kappa_w, survivors}.
std::string estimate_to_json(const UnitVector& x, const PointEstimate& e, const EstimatorConfig& config,
                             const std::vector<Survivor>& kept);

}  // namespace needlet
