#include "needlet/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "needlet/error.hpp"

namespace needlet {
namespace {

double model_smoothness(const DensityModel& model) {
  if (const auto* c = std::get_if<CuspModel>(&model.variant())) return c->t;
  if (const auto* s = std::get_if<SelfSimilarModel>(&model.variant())) return s->t;
  return std::numeric_limits<double>::quiet_NaN();
}

double model_sup(const DensityModel& model) {
  return model.known_sup() ? *model.known_sup() : sup_norm(model);
}

struct Replication {
  PointEstimate estimate;
  int J;
};

// One sample of size n analysed to level J and evaluated at the query point.
Replication replicate(const NeedletFrame& frame, const ExperimentPlan& plan, const QueryPoint& q,
                      std::size_t n, double sup_f, Rng rng) {
  const SphereDim& dim = frame.dim();
  const std::vector<UnitVector> sample = sample_density(plan.model, n, rng);
  const int J = q.J();
  const HarmonicCoefficients c = empirical_harmonics(sample, J);
  const CoefficientTable table =
      table_from_harmonics(frame, c, J, CoefficientKind::EmpiricalBeta, 1.0 / dim.omega());
  const double sup = plan.sup_source == SupSource::Known ? sup_f : plug_in_sup(frame, c, J);
  const EstimatorConfig config = make_config(n, dim, plan.alpha, sup, plan.sup_source, plan.adaptive_w);
  PointEstimate e = evaluate(q, table, config, dim);
  if (plan.estimator == EstimatorKind::Linear) e.estimate = e.linear;
  return {e, J};
}

std::vector<Replication> replicate_all(const NeedletFrame& frame, const ExperimentPlan& plan,
                                       std::size_t n_index) {
  const std::size_t n = plan.n_grid[n_index];
  const int J = choose_J(n, frame.dim().d());
  if (J - 1 > frame.j_max()) throw DomainError("frame too shallow for n = " + std::to_string(n));
  const QueryPoint q(frame, plan.query_point, J);
  const double sup_f = model_sup(plan.model);
  const Rng base = Rng(plan.seed).split(n_index);
  std::vector<std::optional<Replication>> slots(static_cast<std::size_t>(plan.replications));
  parallel_for(slots.size(), plan.workers, [&](std::size_t r) {
    slots[r] = replicate(frame, plan, q, n, sup_f, base.split(r));
    const PointEstimate& e = slots[r]->estimate;
    if (!std::isfinite(e.estimate) || !std::isfinite(e.sigma_hat)) {
      throw NumericalError("non-finite estimate in replication " + std::to_string(r) + " at n = " +
                           std::to_string(n) + " (seed " + std::to_string(plan.seed) + ", stream " +
                           std::to_string(n_index) + "/" + std::to_string(r) + ")");
    }
  });
  std::vector<Replication> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(*s);
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_error_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void validate_plan(const ExperimentPlan& plan, int min_replications) {
  if (plan.n_grid.empty()) throw InputError("n grid is empty");
  for (std::size_t i = 0; i < plan.n_grid.size(); ++i) {
    if (plan.n_grid[i] < 2) throw InputError("sample sizes must be at least 2");
    if (i > 0 && plan.n_grid[i] <= plan.n_grid[i - 1]) throw InputError("n grid must be strictly increasing");
  }
  if (plan.replications < min_replications) {
    throw InputError("at least " + std::to_string(min_replications) + " replications required");
  }
  if (plan.query_point.dim() != plan.model.dim().d()) throw InputError("query point dimension mismatch");
  if (!(plan.alpha > 0.0 && plan.alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

int required_levels(const ExperimentPlan& plan) {
  int J = 0;
  for (std::size_t n : plan.n_grid) J = std::max(J, choose_J(n, plan.model.dim().d()));
  return J;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("line fit needs two or more points");
  const double n = static_cast<double>(x.size());
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InputError("line fit needs two distinct abscissae");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - intercept - slope * x[i];
    sse += r * r;
  }
  const double se = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return {slope, intercept, se};
}

LineFit fit_rate(const std::vector<std::size_t>& n, const std::vector<double>& values) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double nn = static_cast<double>(n[i]);
    x.push_back(std::log(nn / std::log(nn)));
    y.push_back(std::log(values.at(i)));
  }
  return fit_line(x, y);
}

RateResult run_rates(const NeedletFrame& frame, const ExperimentPlan& plan) {
  validate_plan(plan, 30);
  const double truth = eval_density(plan.model, plan.query_point);
  RateResult result;
  std::vector<double> errors;
  for (std::size_t k = 0; k < plan.n_grid.size(); ++k) {
    const auto reps = replicate_all(frame, plan, k);
    std::vector<double> abs_err;
    std::vector<double> est;
    for (const auto& r : reps) {
      abs_err.push_back(std::abs(r.estimate.estimate - truth));
      est.push_back(r.estimate.estimate);
    }
    result.points.push_back(
        {plan.n_grid[k], reps.front().J, mean_of(abs_err), std_error_of(abs_err), mean_of(est), truth});
    errors.push_back(mean_of(abs_err));
  }
  const double t = model_smoothness(plan.model);
  result.theoretical_exponent = -t / (2.0 * t + plan.model.dim().d() - 1.0);
  if (plan.n_grid.size() >= 2) {
    const LineFit fit = fit_rate(plan.n_grid, errors);
    result.slope = fit.slope;
    result.slope_se = fit.slope_se;
  } else {
    result.slope = result.slope_se = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

CoverageResult run_coverage(const NeedletFrame& frame, const ExperimentPlan& plan) {
  validate_plan(plan, 200);
  const double truth = eval_density(plan.model, plan.query_point);
  CoverageResult result;
  std::vector<double> widths;
  std::vector<double> scaled;
  for (std::size_t k = 0; k < plan.n_grid.size(); ++k) {
    const std::size_t n = plan.n_grid[k];
    const auto reps = replicate_all(frame, plan, k);
    std::vector<double> hit;
    std::vector<double> width;
    std::vector<double> survivors;
    std::vector<double> est;
    for (const auto& r : reps) {
      hit.push_back(r.estimate.ci.contains(truth) ? 1.0 : 0.0);
      width.push_back(r.estimate.ci.width());
      survivors.push_back(static_cast<double>(r.estimate.survivor_count));
      est.push_back(r.estimate.estimate);
    }
    const double cov = mean_of(hit);
    const double gamma = std::log(static_cast<double>(n));
    result.per_n.push_back({n, reps.front().J, cov, std::sqrt(cov * (1.0 - cov) / static_cast<double>(hit.size())),
                            mean_of(width), mean_of(width) / gamma, mean_of(survivors), mean_of(est), truth});
    widths.push_back(mean_of(width));
    scaled.push_back(mean_of(width) / gamma);
  }
  result.coverage = result.per_n.back().coverage;
  result.mean_width = result.per_n.back().mean_width;
  const bool positive = std::all_of(widths.begin(), widths.end(), [](double w) { return w > 0.0; });
  if (plan.n_grid.size() >= 2 && positive) {
    result.width_fit = fit_rate(plan.n_grid, widths);
    result.width_over_gamma_fit = fit_rate(plan.n_grid, scaled);
  }
  const double t = model_smoothness(plan.model);
  result.theoretical_exponent = -t / (2.0 * t + plan.model.dim().d() - 1.0);
  return result;
}

DecayResult run_decay(const NeedletFrame& frame, const DensityModel& model, const UnitVector& x0,
                      const std::vector<int>& levels, double K) {
  if (levels.size() < 2) throw InputError("decay fit needs at least two levels");
  const int top = *std::max_element(levels.begin(), levels.end());
  if (*std::min_element(levels.begin(), levels.end()) < 0 || top > frame.j_max()) {
    throw InputError("decay levels outside the frame");
  }
  const SphereDim& dim = frame.dim();
  const ZonalExpansion expansion = zonal_expansion(model, (1 << (top + 1)) - 1);
  const CoefficientTable beta = analyze_zonal(frame, expansion, top + 1);
  const double f_x0 = eval_density(model, x0);

  DecayResult result;
  result.K = K;
  std::vector<double> x;
  std::vector<double> near;
  std::vector<double> sums;
  std::vector<double> approx;
  for (int i : levels) {
    const CubatureRule& r = frame.rule(i);
    const KernelLevel& kernel = frame.needlet_kernel(i);
    const double radius = K * std::ldexp(1.0, -i);
    double near_max = 0.0;
    double sum = 0.0;
    for (std::size_t n = 0; n < r.size(); ++n) {
      const double b = beta.value(i, n);
      const double s = r.nodes[n].dot(x0);
      if (std::acos(s) <= radius) near_max = std::max(near_max, std::abs(b));
      sum += std::abs(b * std::sqrt(r.weights[n]) * kernel(s));
    }
    // A_i f(x0) = sum_k a(k / 2^i) f_k(x0) by Funk-Hecke
    double a_f = 0.0;
    for (const auto& comp : expansion.components) {
      const double s = comp.pole.dot(x0);
      for (int k = 0; k <= std::min<int>(1 << i, static_cast<int>(comp.mu.size()) - 1); ++k) {
        a_f += frame.window().eval_a(std::ldexp(static_cast<double>(k), -i)) * comp.mu[k] * zonal_profile(k, s, dim);
      }
    }
    result.rows.push_back({i, near_max, sum, std::abs(a_f - f_x0)});
    x.push_back(i * std::numbers::ln2);
    near.push_back(std::log(near_max));
    sums.push_back(std::log(sum));
    approx.push_back(std::log(std::abs(a_f - f_x0)));
  }
  result.near_center_fit = fit_line(x, near);
  result.sum_fit = fit_line(x, sums);
  result.approximation_fit = fit_line(x, approx);
  return result;
}

BernsteinResult run_bernstein(const NeedletFrame& frame, const ExperimentPlan& plan, int level,
                              double band_scale) {
  validate_plan(plan, 30);
  const SphereDim& dim = frame.dim();
  const std::size_t n = plan.n_grid.front();
  if (level < 0 || level > frame.j_max()) throw InputError("Bernstein level outside the frame");
  const double sup_f = model_sup(plan.model);
  const double log_n = std::log(static_cast<double>(n));
  const double band = band_scale * kappa(1.0, sup_f, dim) * std::sqrt(log_n / static_cast<double>(n));

  const ZonalExpansion expansion = zonal_expansion(plan.model, (1 << (level + 1)) - 1);
  const CoefficientTable truth = analyze_zonal(frame, expansion, level + 1);
  const auto beta = truth.level(level);
  const std::size_t atoms = beta.size();

  const Rng base = Rng(plan.seed);
  std::vector<std::vector<double>> deviations(static_cast<std::size_t>(plan.replications));
  parallel_for(deviations.size(), plan.workers, [&](std::size_t r) {
    Rng rng = base.split(r);
    const std::vector<UnitVector> sample = sample_density(plan.model, n, rng);
    const HarmonicCoefficients c = empirical_harmonics(sample, level + 1);
    const CubatureRule& rule = frame.rule(level);
    const std::vector<double> g = c.synthesize_on_rule(frame.needlet_weights(level), rule);
    std::vector<double> dev(atoms);
    for (std::size_t a = 0; a < atoms; ++a) dev[a] = std::sqrt(rule.weights[a]) * g[a] - beta[a];
    deviations[r] = std::move(dev);
  });

  std::size_t exceed = 0;
  std::vector<double> sum_abs(atoms, 0.0);
  std::vector<double> sum(atoms, 0.0);
  std::vector<double> sum_sq(atoms, 0.0);
  for (const auto& dev : deviations) {
    for (std::size_t a = 0; a < atoms; ++a) {
      if (std::abs(dev[a]) > band) ++exceed;
      sum_abs[a] += std::abs(dev[a]);
      sum[a] += dev[a];
      sum_sq[a] += dev[a] * dev[a];
    }
  }
  const double reps = plan.replications;
  double max_mad = 0.0;
  double max_z = 0.0;
  for (std::size_t a = 0; a < atoms; ++a) {
    max_mad = std::max(max_mad, sum_abs[a] / reps);
    const double mean = sum[a] / reps;
    const double var = std::max(0.0, (sum_sq[a] - reps * mean * mean) / (reps - 1.0));
    if (var > 0.0) max_z = std::max(max_z, std::abs(mean) / std::sqrt(var / reps));
  }
  const double trials = reps * static_cast<double>(atoms);
  const double p = 2.0 / static_cast<double>(n);
  return {n,
          level,
          plan.replications,
          atoms,
          band,
          static_cast<double>(exceed) / trials,
          p,
          std::sqrt(p * (1.0 - p) / trials),
          max_mad,
          std::sqrt(sup_f / static_cast<double>(n)),
          max_z};
}

}  // namespace needlet
