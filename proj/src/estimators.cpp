#include "needlet/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "needlet/error.hpp"

namespace needlet {
namespace {

void check_levels(const CoefficientTable& table, int J) {
  if (J < 0 || table.level_count() < J) throw DomainError("coefficient table lacks levels below J");
}

double log_n(std::size_t n) { return std::log(static_cast<double>(n)); }

// Local maximization of a smooth function on S^2 by a shrinking compass search
// in the tangent plane.
template <class F>
double refine_max(F&& f, UnitVector x, double step) {
  double best = f(x);
  while (step > 1e-7) {
    bool moved = false;
    const double z = x[2];
    const double rho = std::hypot(x[0], x[1]);
    std::vector<double> e_phi = rho > 0.0 ? std::vector<double>{-x[1] / rho, x[0] / rho, 0.0}
                                          : std::vector<double>{0.0, 1.0, 0.0};
    std::vector<double> e_theta = rho > 0.0 ? std::vector<double>{z * x[0] / rho, z * x[1] / rho, -rho}
                                            : std::vector<double>{1.0, 0.0, 0.0};
    for (const auto* dir : {&e_phi, &e_theta}) {
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> y(3);
        for (int i = 0; i < 3; ++i) y[i] = x[i] + sgn * step * (*dir)[i];
        double norm = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        for (double& v : y) v /= norm;
        UnitVector cand(std::move(y));
        const double v = f(cand);
        if (v > best) {
          best = v;
          x = std::move(cand);
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

double sup_of_synthesis(const HarmonicCoefficients& c, std::span<const double> weights, double constant,
                        int J, const SphereDim& dim) {
  const double floor = 1.0 / dim.omega();
  if (J == 0) return std::max(floor, constant);
  const int degree = static_cast<int>(std::ceil(2.0 * std::numbers::pi * std::ldexp(1.0, J + 1)));
  const CubatureRule grid = build_rule_for_degree(degree, dim);
  const std::vector<double> values = c.synthesize_on_rule(weights, grid);
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t top = std::min<std::size_t>(5, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top), order.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });
  double best = constant + values[order[0]];
  auto f = [&](const UnitVector& x) { return constant + c.synthesize(weights, x); };
  for (std::size_t r = 0; r < top; ++r) {
    best = std::max(best, refine_max(f, grid.nodes[order[r]], std::ldexp(1.0, -J - 2)));
  }
  return std::max(floor, best);
}

}  // namespace

double EstimatorConfig::noise_scale() const {
  return std::sqrt(log_n(n) / static_cast<double>(n));
}

double EstimatorConfig::threshold() const { return 2.0 * kappa1 * noise_scale(); }

int choose_J(std::size_t n, int d) {
  if (n < 2) throw InputError("sample size must be at least 2");
  if (d < 3) throw DomainError("dimension must be at least 3");
  const double target = static_cast<double>(n) / log_n(n);
  int J = 0;
  while (std::ldexp(1.0, (J + 1) * (d - 1)) <= target) ++J;
  return J;
}

double kappa(double v, double sup_f, const SphereDim& dim) {
  const double root = std::sqrt(dim.omega());
  return std::max(14.0 * v / (3.0 * root), sup_f * root);
}

EstimatorConfig make_config(std::size_t n, const SphereDim& dim, double alpha, double sup_f,
                            SupSource source, bool adaptive_w) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(sup_f > 0.0)) throw InputError("sup norm must be positive");
  EstimatorConfig c;
  c.n = n;
  c.J = choose_J(n, dim.d());
  c.alpha = alpha;
  c.sup_f = sup_f;
  c.sup_source = source;
  c.adaptive_w = adaptive_w;
  c.kappa1 = kappa(1.0, sup_f, dim);
  c.w = 1.0 + std::log(1.0 / alpha) / log_n(n);
  c.kappa_w = kappa(c.w, sup_f, dim);
  c.gamma_n = log_n(n);
  return c;
}

EstimatorConfig with_survivor_count(const EstimatorConfig& config, const SphereDim& dim,
                                    std::size_t survivors) {
  if (!config.adaptive_w || survivors == 0) return config;
  EstimatorConfig c = config;
  c.w = std::log(static_cast<double>(survivors) / c.alpha) / log_n(c.n);
  c.kappa_w = kappa(c.w, c.sup_f, dim);
  return c;
}

double linear_estimate(const NeedletFrame& frame, const CoefficientTable& table, int J, const UnitVector& x) {
  check_levels(table, J);
  return synthesize(frame, table, x, [J](int i, std::size_t, double) { return i < J; });
}

std::vector<Survivor> survivors(const CoefficientTable& table, int J, double threshold) {
  check_levels(table, J);
  std::vector<Survivor> out;
  for (int i = 0; i < J; ++i) {
    const auto lvl = table.level(i);
    for (std::size_t n = 0; n < lvl.size(); ++n) {
      if (std::abs(lvl[n]) >= threshold) out.push_back({i, n, lvl[n]});
    }
  }
  return out;
}

double threshold_estimate(const NeedletFrame& frame, const CoefficientTable& table,
                          const EstimatorConfig& config, const UnitVector& x) {
  check_levels(table, config.J);
  const double t = config.threshold();
  const int J = config.J;
  return synthesize(frame, table, x,
                    [J, t](int i, std::size_t, double beta) { return i < J && std::abs(beta) >= t; });
}

double sigma_hat(const NeedletFrame& frame, const CoefficientTable& table, const EstimatorConfig& config,
                 const UnitVector& x) {
  const auto kept = survivors(table, config.J, config.threshold());
  const EstimatorConfig c = with_survivor_count(config, frame.dim(), kept.size());
  const double scale = c.kappa_w * c.gamma_n * c.noise_scale();
  double s = 0.0;
  for (const Survivor& sv : kept) {
    s += std::abs(scale * psi_eval(frame, frame.atom(sv.level, sv.node_index), x));
  }
  return s;
}

Interval confidence_interval(const NeedletFrame& frame, const CoefficientTable& table,
                             const EstimatorConfig& config, const UnitVector& x) {
  const double center = threshold_estimate(frame, table, config, x);
  const double half = kIntervalInflation * sigma_hat(frame, table, config, x);
  return {center - half, center + half};
}

double plug_in_sup(const NeedletFrame& frame, const CoefficientTable& table, int J) {
  check_levels(table, J);
  const HarmonicCoefficients c = harmonics_from_table(frame, table, J);
  const std::vector<double> ones(static_cast<std::size_t>(c.max_degree()) + 1, 1.0);
  return sup_of_synthesis(c, ones, table.constant_term(), J, frame.dim());
}

double plug_in_sup(const NeedletFrame& frame, const HarmonicCoefficients& empirical, int J) {
  // sum_{i<J} b(k/2^i) = a(k/2^J) for k >= 1, and the k = 0 term is 1/omega
  const int L = J == 0 ? 0 : (1 << J) - 1;
  if (empirical.max_degree() < L) throw DomainError("harmonic coefficients lack degrees below 2^J");
  std::vector<double> weights(static_cast<std::size_t>(L) + 1);
  for (int k = 0; k <= L; ++k) weights[k] = frame.window().eval_a(std::ldexp(static_cast<double>(k), -J));
  return sup_of_synthesis(empirical, weights, 0.0, J, frame.dim());
}

QueryPoint::QueryPoint(const NeedletFrame& frame, const UnitVector& x, int J)
    : x_(x), J_(J), psi_(psi_at_point(frame, x, J)) {}

PointEstimate evaluate(const QueryPoint& q, const CoefficientTable& table, const EstimatorConfig& config,
                       const SphereDim& dim) {
  if (q.J() != config.J) throw InputError("query point prepared for a different J");
  check_levels(table, config.J);
  const double t = config.threshold();
  double linear = table.constant_term();
  double thresholded = table.constant_term();
  double abs_psi = 0.0;
  std::size_t kept = 0;
  for (int i = 0; i < config.J; ++i) {
    const auto beta = table.level(i);
    const auto& psi = q.psi(i);
    for (std::size_t n = 0; n < beta.size(); ++n) {
      const double term = beta[n] * psi[n];
      linear += term;
      if (std::abs(beta[n]) >= t) {
        thresholded += term;
        abs_psi += std::abs(psi[n]);
        ++kept;
      }
    }
  }
  const EstimatorConfig c = with_survivor_count(config, dim, kept);
  const double sigma = c.kappa_w * c.gamma_n * c.noise_scale() * abs_psi;
  const double half = kIntervalInflation * sigma;
  return {linear, thresholded, sigma, {thresholded - half, thresholded + half}, kept, c.kappa_w};
}

std::string estimate_to_json(const UnitVector& x, const PointEstimate& e, const EstimatorConfig& config,
                             const std::vector<Survivor>& kept) {
  nlohmann::ordered_json j;
  j["point"] = std::vector<double>(x.coords().begin(), x.coords().end());
  j["estimate"] = e.estimate;
  j["sigma_hat"] = e.sigma_hat;
  j["ci"] = {e.ci.lo, e.ci.hi};
  j["J"] = config.J;
  j["kappa1"] = config.kappa1;
  j["kappa_w"] = e.kappa_w;
  auto arr = nlohmann::ordered_json::array();
  for (const Survivor& s : kept) arr.push_back({{"i", s.level}, {"idx", s.node_index}, {"beta_hat", s.beta_hat}});
  j["survivors"] = std::move(arr);
  return j.dump(2);
}

}  // namespace needlet
