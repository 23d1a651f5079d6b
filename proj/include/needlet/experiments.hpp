#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "needlet/density.hpp"
#include "needlet/estimators.hpp"
#include "needlet/frame.hpp"

namespace needlet {

enum class EstimatorKind { Linear, Threshold };

struct ExperimentPlan {
  DensityModel model;
  UnitVector query_point;
  std::vector<std::size_t> n_grid;
  int replications = 0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  EstimatorKind estimator = EstimatorKind::Threshold;
  SupSource sup_source = SupSource::Known;
  bool adaptive_w = false;
  /// 0 means one worker per hardware thread. Results do not depend on it.
  unsigned workers = 0;
};

/// Throws InputError unless n_grid is nonempty and strictly increasing with
/// n >= 2, and replications >= min_replications.
void validate_plan(const ExperimentPlan& plan, int min_replications);

/// Largest J over the plan's n grid; the frame must reach level max_J - 1.
int required_levels(const ExperimentPlan& plan);

struct LineFit {
  double slope;
  double intercept;
  double slope_se;
};

/// Ordinary least squares of y on x. Needs at least two distinct x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of ln(values) against ln(n / ln n).
LineFit fit_rate(const std::vector<std::size_t>& n, const std::vector<double>& values);

struct RatePoint {
  std::size_t n;
  int J;
  double mean_abs_error;
  double std_error;
  double mean_estimate;
  double truth;
};

struct RateResult {
  std::vector<RatePoint> points;
  double slope;
  double slope_se;
  double theoretical_exponent;  // -t / (2t + d - 1), NaN when t is unknown
};

RateResult run_rates(const NeedletFrame& frame, const ExperimentPlan& plan);

struct CoveragePoint {
  std::size_t n;
  int J;
  double coverage;
  double coverage_se;
  double mean_width;
  double mean_width_over_gamma;
  double mean_survivors;
  double mean_estimate;
  double truth;
};

struct CoverageResult {
  std::vector<CoveragePoint> per_n;
  /// Values at the largest n.
  double coverage;
  double mean_width;
  /// Fits against ln(n / ln n); present when the grid has two or more n.
  std::optional<LineFit> width_fit;
  std::optional<LineFit> width_over_gamma_fit;
  double theoretical_exponent;
};

CoverageResult run_coverage(const NeedletFrame& frame, const ExperimentPlan& plan);

struct DecayRow {
  int level;
  double near_center_max;
  double sum_abs_beta_psi;
  double approximation_error;
};

struct DecayResult {
  std::vector<DecayRow> rows;
  /// ln(quantity) against ln(2^i) for the three columns.
  LineFit near_center_fit;
  LineFit sum_fit;
  LineFit approximation_fit;
  double K;
};

/// Exact coefficients of the model's zonal expansion at the given levels.
/// Near-center atoms satisfy d(eta, x0) <= K 2^{-i}.
DecayResult run_decay(const NeedletFrame& frame, const DensityModel& model, const UnitVector& x0,
                      const std::vector<int>& levels, double K = 4.0);

struct BernsteinResult {
  std::size_t n;
  int level;
  int replications;
  std::size_t atoms;
  double band;                 // kappa_(1) sqrt(ln n / n), times band_scale
  double exceedance_rate;      // over all (replication, atom) pairs
  double bound;                // 2 / n
  double bound_sigma;          // sqrt(p (1 - p) / trials) at p = 2 / n
  double max_mean_abs_dev;     // max over atoms of the mean |beta_hat - beta|
  double mean_abs_dev_bound;   // sqrt(||f||_inf / n)
  double max_bias_z;           // max over atoms of |mean(beta_hat - beta)| / its standard error
};

/// Deviation of empirical coefficients at one level over replications,
/// using the first n of plan.n_grid.
BernsteinResult run_bernstein(const NeedletFrame& frame, const ExperimentPlan& plan, int level,
                              double band_scale = 1.0);

/// Runs body(r) for r in [0, count) on up to `workers` threads. Each index
/// is processed exactly once; callers store results by index.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace needlet
