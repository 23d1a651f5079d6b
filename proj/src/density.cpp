#include "needlet/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "json.hpp"
#include "needlet/cubature.hpp"
#include "needlet/error.hpp"

namespace needlet {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPanelPoints = 20;
constexpr int kCuspStretch = 4;  // theta = delta * u^4 on the singular piece

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const GaussLegendre& panel_rule() {
  static const GaussLegendre gl = gauss_legendre(kPanelPoints);
  return gl;
}

// omega_{d-2}: measure of the (d-2)-sphere of directions orthogonal to a pole.
double orthogonal_sphere_measure(int d) {
  const double m = d - 1;
  return 2.0 * std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m);
}

// Composite Gauss-Legendre nodes for int_a^b h(x) dx with `panels` panels.
template <class F>
void for_each_panel_node(double a, double b, int panels, F&& visit) {
  const auto& gl = panel_rule();
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (int q = 0; q < kPanelPoints; ++q) {
      visit(lo + 0.5 * width * (gl.nodes[q] + 1.0), 0.5 * width * gl.weights[q]);
    }
  }
}

// Accumulates mu[k] += w * C_k(cos theta) / C_k(1) for all k <= K.
class MultiplierAccumulator {
 public:
  MultiplierAccumulator(const SphereDim& dim, int max_degree)
      : dim_(dim), K_(max_degree), mu_(static_cast<std::size_t>(max_degree) + 1, 0.0),
        values_(static_cast<std::size_t>(max_degree) + 1), at_one_(static_cast<std::size_t>(max_degree) + 1) {
    gegenbauer_all(K_, dim_.lambda(), 1.0, at_one_);
  }

  void add(double theta, double w) {
    gegenbauer_all(K_, dim_.lambda(), std::clamp(std::cos(theta), -1.0, 1.0), values_);
    for (int k = 0; k <= K_; ++k) mu_[k] += w * values_[k] / at_one_[k];
  }

  std::vector<double> take(double scale) {
    for (double& m : mu_) m *= scale;
    return std::move(mu_);
  }

 private:
  SphereDim dim_;
  int K_;
  std::vector<double> mu_;
  std::vector<double> values_;
  std::vector<double> at_one_;
};

double sin_power(double theta, int d) { return std::pow(std::sin(theta), d - 2); }

std::vector<double> cusp_multipliers(const SphereDim& dim, const CuspModel& c, int K) {
  MultiplierAccumulator acc(dim, K);
  const int d = dim.d();
  const int panels_inner = 8 + static_cast<int>(std::ceil(K * kCuspStretch * c.delta / 3.0));
  for_each_panel_node(0.0, 1.0, panels_inner, [&](double u, double w) {
    const double u3 = u * u * u;
    const double theta = c.delta * u3 * u;
    const double g = std::pow(theta, c.t);
    acc.add(theta, w * g * sin_power(theta, d) * kCuspStretch * c.delta * u3);
  });
  if (c.delta < kPi) {
    const int panels_outer = 8 + static_cast<int>(std::ceil(K * (kPi - c.delta) / 3.0));
    const double g = std::pow(c.delta, c.t);
    for_each_panel_node(c.delta, kPi, panels_outer, [&](double theta, double w) {
      acc.add(theta, w * g * sin_power(theta, d));
    });
  }
  std::vector<double> mu = acc.take(c.amplitude * orthogonal_sphere_measure(d));
  mu[0] += c.base * dim.omega();
  return mu;
}

double vmf_constant(double kappa) {
  return kappa / (2.0 * kPi * (1.0 - std::exp(-2.0 * kappa)));
}

std::vector<double> vmf_multipliers(const SphereDim& dim, const VmfComponent& comp, int K) {
  MultiplierAccumulator acc(dim, K);
  const int panels = 16 + static_cast<int>(std::ceil(K / 3.0 + std::sqrt(comp.kappa)));
  const double c = comp.weight * vmf_constant(comp.kappa);
  for_each_panel_node(0.0, kPi, panels, [&](double theta, double w) {
    acc.add(theta, w * c * std::exp(comp.kappa * (std::cos(theta) - 1.0)) * std::sin(theta));
  });
  return acc.take(2.0 * kPi);
}

double self_similar_value(const SphereDim& dim, const SelfSimilarModel& m, double s) {
  double v = 1.0 / dim.omega();
  for (std::size_t q = 0; q < m.levels.size(); ++q) {
    v += m.amplitudes[q] * zonal_profile(1 << m.levels[q], s, dim);
  }
  return v;
}

// Extremum of a function of the polar angle: dense grid plus golden-section
// refinement around the best grid point.
template <class F>
std::pair<double, double> extremum_on_angle(F&& f, int grid, bool maximize) {
  const double sign = maximize ? 1.0 : -1.0;
  double best_theta = 0.0;
  double best = sign * f(0.0);
  for (int p = 1; p <= grid; ++p) {
    const double th = kPi * p / grid;
    const double v = sign * f(th);
    if (v > best) {
      best = v;
      best_theta = th;
    }
  }
  double lo = std::max(0.0, best_theta - kPi / grid);
  double hi = std::min(kPi, best_theta + kPi / grid);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - r * (hi - lo);
  double b = lo + r * (hi - lo);
  double fa = sign * f(a);
  double fb = sign * f(b);
  for (int it = 0; it < 80; ++it) {
    if (fa > fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - r * (hi - lo);
      fa = sign * f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + r * (hi - lo);
      fb = sign * f(b);
    }
  }
  const double refined = std::max(fa, fb);
  if (refined > best) {
    best = refined;
    best_theta = fa > fb ? a : b;
  }
  return {sign * best, best_theta};
}

std::vector<double> coords_of(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw InputError(std::string("model JSON lacks array ") + key);
  return j[key].get<std::vector<double>>();
}

double number_of(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw InputError(std::string("model JSON lacks number ") + key);
  return j[key].get<double>();
}

UnitVector orthogonal_unit(const UnitVector& mu) {
  // the coordinate axis least aligned with mu, then Gram-Schmidt
  int axis = 0;
  for (int i = 1; i < mu.dim(); ++i) {
    if (std::abs(mu[i]) < std::abs(mu[axis])) axis = i;
  }
  std::vector<double> e(static_cast<std::size_t>(mu.dim()), 0.0);
  e[static_cast<std::size_t>(axis)] = 1.0;
  const double proj = mu[axis];
  double sq = 0.0;
  for (int i = 0; i < mu.dim(); ++i) {
    e[i] -= proj * mu[i];
    sq += e[i] * e[i];
  }
  for (double& v : e) v /= std::sqrt(sq);
  return UnitVector(std::move(e));
}

}  // namespace

DensityModel::DensityModel(const SphereDim& dim, Variant model, std::optional<double> sup)
    : dim_(dim), model_(std::move(model)), sup_(sup) {}

std::string DensityModel::kind() const {
  return std::visit(overloaded{[](const UniformModel&) { return std::string("uniform"); },
                               [](const VmfMixtureModel&) { return std::string("vmf"); },
                               [](const CuspModel&) { return std::string("cusp"); },
                               [](const SelfSimilarModel&) { return std::string("self_similar"); }},
                    model_);
}

std::optional<UnitVector> DensityModel::center() const {
  return std::visit(
      overloaded{[](const UniformModel&) -> std::optional<UnitVector> { return std::nullopt; },
                 [](const VmfMixtureModel& m) -> std::optional<UnitVector> { return m.components.front().mean; },
                 [](const CuspModel& m) -> std::optional<UnitVector> { return m.x0; },
                 [](const SelfSimilarModel& m) -> std::optional<UnitVector> { return m.eta; }},
      model_);
}

double zonal_integral(const SphereDim& dim, const std::function<double(double)>& g, double from,
                      double to) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const int d = dim.d();
  const double value = integrator.integrate(
      [&](double theta) { return g(theta) * std::pow(std::sin(theta), d - 2); }, from, to);
  return orthogonal_sphere_measure(d) * value;
}

DensityModel make_uniform(const SphereDim& dim) {
  return DensityModel(dim, UniformModel{}, 1.0 / dim.omega());
}

DensityModel make_vmf_mixture(std::vector<VmfComponent> components) {
  if (components.empty()) throw InputError("vMF mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    if (c.mean.dim() != 3) throw DomainError("vMF mixtures are implemented for d = 3 only");
    if (!(c.kappa > 0.0) || !(c.weight > 0.0)) throw InputError("vMF kappa and weight must be positive");
    total += c.weight;
  }
  for (auto& c : components) c.weight /= total;
  DensityModel model(SphereDim(3), VmfMixtureModel{std::move(components)});
  return DensityModel(model.dim(), model.variant(), sup_norm(model));
}

DensityModel make_cusp(const UnitVector& x0, double t, double amplitude, double delta) {
  if (!(t > 0.0)) throw InputError("cusp exponent t must be positive");
  if (!std::isfinite(amplitude)) throw InputError("cusp amplitude must be finite");
  if (!(delta > 0.0) || delta > kPi) throw InputError("cusp radius delta must lie in (0, pi]");
  const SphereDim dim(x0.dim());
  double profile = zonal_integral(dim, [t](double th) { return std::pow(th, t); }, 0.0, delta);
  if (delta < kPi) {
    profile += zonal_integral(dim, [t, delta](double) { return std::pow(delta, t); }, delta, kPi);
  }
  const double base = (1.0 - amplitude * profile) / dim.omega();
  // f ranges over [base, base + amplitude delta^t]; both ends must be >= 0
  const double rim = base + amplitude * std::pow(delta, t);
  if (base < 0.0 || rim < 0.0) {
    const double lo = -1.0 / (std::pow(delta, t) * dim.omega() - profile);
    throw InputError("cusp amplitude outside the nonnegative range [" + std::to_string(lo) + ", " +
                     std::to_string(1.0 / profile) + "]");
  }
  CuspModel cusp{x0, t, amplitude, delta, base};
  return DensityModel(dim, cusp, std::max(base, rim));
}

namespace {

struct SelfSimilarShape {
  std::vector<double> unit_amplitudes;  // a_j for B = 1
  std::vector<std::size_t> nearest;
  std::vector<double> targets_per_unit_b;
};

SelfSimilarShape self_similar_shape(const NeedletFrame& frame, const UnitVector& eta, double t,
                                    const std::vector<int>& levels) {
  const SphereDim& dim = frame.dim();
  SelfSimilarShape shape;
  for (int j : levels) {
    if (j < 0 || j > frame.j_max()) throw InputError("self-similar level outside the frame");
    const CubatureRule& rule = frame.rule(j);
    std::size_t best = 0;
    double best_dot = -2.0;
    for (std::size_t n = 0; n < rule.size(); ++n) {
      const double s = rule.nodes[n].dot(eta);
      if (s > best_dot) {
        best_dot = s;
        best = n;
      }
    }
    const int k = 1 << j;
    const double unit = std::sqrt(rule.weights[best]) * frame.needlet_kernel(j).window_weight(k) *
                        zonal_profile(k, best_dot, dim);
    const double target = std::pow(2.0, -j * (2.0 * t + dim.d() - 1.0) / 2.0);
    shape.unit_amplitudes.push_back(target / unit);
    shape.nearest.push_back(best);
    shape.targets_per_unit_b.push_back(target);
  }
  return shape;
}

double self_similar_min_per_unit_b(const SphereDim& dim, const std::vector<int>& levels,
                                   const std::vector<double>& unit_amplitudes) {
  if (levels.empty()) return 0.0;
  SelfSimilarModel probe{UnitVector({0.0, 0.0, 1.0}), 0.0, 1.0, levels, unit_amplitudes};
  const int kmax = 1 << *std::max_element(levels.begin(), levels.end());
  auto g = [&](double th) { return self_similar_value(dim, probe, std::cos(th)) - 1.0 / dim.omega(); };
  return extremum_on_angle(g, std::max(2000, 200 * kmax), false).first;
}

}  // namespace

double max_feasible_self_similar_B(const NeedletFrame& frame, const UnitVector& eta, double t,
                                   const std::vector<int>& levels) {
  const SelfSimilarShape shape = self_similar_shape(frame, eta, t, levels);
  const double gmin = self_similar_min_per_unit_b(frame.dim(), levels, shape.unit_amplitudes);
  if (gmin >= 0.0) return std::numeric_limits<double>::infinity();
  return (1.0 / frame.dim().omega()) / -gmin;
}

SelfSimilarBuild make_self_similar(const NeedletFrame& frame, const UnitVector& eta, double t,
                                   double B, const std::vector<int>& levels) {
  if (!(B > 0.0) || !(t > 0.0)) throw InputError("self-similar model needs B > 0 and t > 0");
  const SphereDim& dim = frame.dim();
  if (levels.empty()) {
    SelfSimilarReport report{B, {}, {}, {}, {}, {}, 1.0 / dim.omega()};
    return {make_uniform(dim), report};
  }
  const SelfSimilarShape shape = self_similar_shape(frame, eta, t, levels);
  const double gmin = self_similar_min_per_unit_b(dim, levels, shape.unit_amplitudes);
  const double min_density = 1.0 / dim.omega() + B * gmin;
  if (!(min_density > 0.0)) {
    const double bmax = (1.0 / dim.omega()) / -gmin;
    throw NumericalError("self-similar density not positive at B=" + std::to_string(B) +
                         "; maximal feasible B is " + std::to_string(bmax));
  }
  SelfSimilarModel m{eta, t, B, levels, {}};
  for (double a : shape.unit_amplitudes) m.amplitudes.push_back(B * a);

  DensityModel provisional(dim, m);
  const double sup = sup_norm(provisional);
  DensityModel model(dim, m, sup);

  const int up_to = *std::max_element(levels.begin(), levels.end()) + 1;
  const CoefficientTable beta = analyze_zonal(frame, zonal_expansion(model, (1 << up_to) - 1), up_to);
  SelfSimilarReport report{B, levels, m.amplitudes, shape.nearest, {}, {}, min_density};
  for (std::size_t q = 0; q < levels.size(); ++q) {
    report.target_magnitudes.push_back(B * shape.targets_per_unit_b[q]);
    report.achieved_magnitudes.push_back(std::abs(beta.value(levels[q], shape.nearest[q])));
  }
  return {std::move(model), std::move(report)};
}

double eval_density(const DensityModel& model, const UnitVector& x) {
  const SphereDim& dim = model.dim();
  return std::visit(
      overloaded{[&](const UniformModel&) { return 1.0 / dim.omega(); },
                 [&](const VmfMixtureModel& m) {
                   double v = 0.0;
                   for (const auto& c : m.components) {
                     v += c.weight * vmf_constant(c.kappa) * std::exp(c.kappa * (c.mean.dot(x) - 1.0));
                   }
                   return v;
                 },
                 [&](const CuspModel& m) {
                   return m.base + m.amplitude * std::pow(std::min(geodesic_distance(m.x0, x), m.delta), m.t);
                 },
                 [&](const SelfSimilarModel& m) { return self_similar_value(dim, m, m.eta.dot(x)); }},
      model.variant());
}

double sup_norm(const DensityModel& model) {
  const SphereDim& dim = model.dim();
  return std::visit(
      overloaded{[&](const UniformModel&) { return 1.0 / dim.omega(); },
                 [&](const VmfMixtureModel& m) {
                   // fixed-point ascent from every mean
                   double best = 0.0;
                   for (const auto& start : m.components) {
                     UnitVector x = start.mean;
                     for (int it = 0; it < 200; ++it) {
                       std::vector<double> g(3, 0.0);
                       for (const auto& c : m.components) {
                         const double w = c.weight * vmf_constant(c.kappa) * c.kappa *
                                          std::exp(c.kappa * (c.mean.dot(x) - 1.0));
                         for (int i = 0; i < 3; ++i) g[i] += w * c.mean[i];
                       }
                       const double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
                       if (norm == 0.0) break;
                       for (double& v : g) v /= norm;
                       x = UnitVector(std::move(g));
                     }
                     best = std::max({best, eval_density(model, x), eval_density(model, start.mean)});
                   }
                   return best;
                 },
                 [&](const CuspModel& m) { return std::max(m.base, m.base + m.amplitude * std::pow(m.delta, m.t)); },
                 [&](const SelfSimilarModel& m) {
                   if (m.levels.empty()) return 1.0 / dim.omega();
                   const int kmax = 1 << *std::max_element(m.levels.begin(), m.levels.end());
                   auto f = [&](double th) { return self_similar_value(dim, m, std::cos(th)); };
                   return extremum_on_angle(f, std::max(2000, 200 * kmax), true).first;
                 }},
      model.variant());
}

SampleStats sample_density_with_stats(const DensityModel& model, std::size_t n, Rng& rng) {
  const int d = model.dim().d();
  SampleStats out{{}, 0};
  out.points.reserve(n);
  if (std::holds_alternative<UniformModel>(model.variant())) {
    for (std::size_t i = 0; i < n; ++i) out.points.push_back(sample_uniform(d, rng));
    out.proposals = n;
    return out;
  }
  if (const auto* vmf = std::get_if<VmfMixtureModel>(&model.variant())) {
    for (std::size_t i = 0; i < n; ++i) {
      const double pick = rng.uniform();
      std::size_t c = 0;
      double acc = vmf->components[0].weight;
      while (pick >= acc && c + 1 < vmf->components.size()) acc += vmf->components[++c].weight;
      const VmfComponent& comp = vmf->components[c];
      const double u = rng.uniform();
      const double w = 1.0 + std::log(u + (1.0 - u) * std::exp(-2.0 * comp.kappa)) / comp.kappa;
      const double phi = 2.0 * kPi * rng.uniform();
      const UnitVector e1 = orthogonal_unit(comp.mean);
      const double cross[3] = {comp.mean[1] * e1[2] - comp.mean[2] * e1[1],
                               comp.mean[2] * e1[0] - comp.mean[0] * e1[2],
                               comp.mean[0] * e1[1] - comp.mean[1] * e1[0]};
      const double r = std::sqrt(std::max(0.0, 1.0 - w * w));
      std::vector<double> x(3);
      for (int k = 0; k < 3; ++k) {
        x[k] = w * comp.mean[k] + r * (std::cos(phi) * e1[k] + std::sin(phi) * cross[k]);
      }
      out.points.emplace_back(std::move(x));
    }
    out.proposals = n;
    return out;
  }
  if (!model.known_sup()) throw InputError("rejection sampling needs the density's sup norm");
  const double envelope = *model.known_sup();
  while (out.points.size() < n) {
    UnitVector x = sample_uniform(d, rng);
    ++out.proposals;
    if (rng.uniform() * envelope < eval_density(model, x)) out.points.push_back(std::move(x));
  }
  return out;
}

std::vector<UnitVector> sample_density(const DensityModel& model, std::size_t n, Rng& rng) {
  return sample_density_with_stats(model, n, rng).points;
}

ZonalExpansion zonal_expansion(const DensityModel& model, int max_degree) {
  if (max_degree < 0) throw DomainError("zonal expansion degree must be nonnegative");
  const SphereDim& dim = model.dim();
  ZonalExpansion out{dim, {}};
  const UnitVector north = [&] {
    std::vector<double> v(static_cast<std::size_t>(dim.d()), 0.0);
    v.back() = 1.0;
    return UnitVector(std::move(v));
  }();
  std::visit(overloaded{[&](const UniformModel&) { out.components.push_back({north, {1.0}}); },
                        [&](const VmfMixtureModel& m) {
                          for (const auto& c : m.components) {
                            out.components.push_back({c.mean, vmf_multipliers(dim, c, max_degree)});
                          }
                        },
                        [&](const CuspModel& m) {
                          out.components.push_back({m.x0, cusp_multipliers(dim, m, max_degree)});
                        },
                        [&](const SelfSimilarModel& m) {
                          std::vector<double> mu(static_cast<std::size_t>(max_degree) + 1, 0.0);
                          mu[0] = 1.0;
                          for (std::size_t q = 0; q < m.levels.size(); ++q) {
                            const int k = 1 << m.levels[q];
                            if (k <= max_degree) mu[k] += m.amplitudes[q];
                          }
                          out.components.push_back({m.eta, std::move(mu)});
                        }},
             model.variant());
  return out;
}

HolderParams holder_params(const CuspModel& cusp) {
  const double base = cusp.base;
  return {cusp.t, std::max(std::abs(cusp.amplitude), base), cusp.delta, cusp.x0,
          [base](const UnitVector&) { return base; }};
}

DensityModel model_from_json(const std::string& text, const NeedletFrame* frame) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
  if (!j.contains("kind") || !j["kind"].is_string()) throw InputError("model JSON lacks string field kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "uniform") return make_uniform(SphereDim(j.value("dim", 3)));
  if (kind == "vmf") {
    if (!j.contains("components") || !j["components"].is_array()) {
      throw InputError("vmf model JSON lacks components");
    }
    std::vector<VmfComponent> comps;
    for (const auto& c : j["components"]) {
      comps.push_back({UnitVector(coords_of(c, "mean")), number_of(c, "kappa"), c.value("weight", 1.0)});
    }
    return make_vmf_mixture(std::move(comps));
  }
  if (kind == "cusp") {
    return make_cusp(UnitVector(coords_of(j, "x0")), number_of(j, "t"), number_of(j, "amplitude"),
                     j.value("delta", kPi));
  }
  if (kind == "self_similar") {
    const UnitVector eta(coords_of(j, "eta"));
    const double t = number_of(j, "t");
    const double B = number_of(j, "B");
    const auto levels = j.value("levels", std::vector<int>{});
    if (j.contains("amplitudes")) {
      const auto amps = j["amplitudes"].get<std::vector<double>>();
      if (amps.size() != levels.size()) throw InputError("self_similar amplitudes and levels differ in length");
      SelfSimilarModel m{eta, t, B, levels, amps};
      DensityModel provisional(SphereDim(eta.dim()), m);
      return DensityModel(provisional.dim(), m, sup_norm(provisional));
    }
    if (frame == nullptr) throw InputError("self_similar model needs a needlet frame to size amplitudes");
    return make_self_similar(*frame, eta, t, B, levels).model;
  }
  throw InputError("unknown model kind: " + kind);
}

std::string model_to_json(const DensityModel& model) {
  nlohmann::ordered_json j;
  j["kind"] = model.kind();
  j["dim"] = model.dim().d();
  auto coords = [](const UnitVector& v) { return std::vector<double>(v.coords().begin(), v.coords().end()); };
  std::visit(overloaded{[&](const UniformModel&) {},
                        [&](const VmfMixtureModel& m) {
                          auto arr = nlohmann::ordered_json::array();
                          for (const auto& c : m.components) {
                            arr.push_back({{"mean", coords(c.mean)}, {"kappa", c.kappa}, {"weight", c.weight}});
                          }
                          j["components"] = arr;
                        },
                        [&](const CuspModel& m) {
                          j["x0"] = coords(m.x0);
                          j["t"] = m.t;
                          j["amplitude"] = m.amplitude;
                          j["delta"] = m.delta;
                          j["base"] = m.base;
                        },
                        [&](const SelfSimilarModel& m) {
                          j["eta"] = coords(m.eta);
                          j["t"] = m.t;
                          j["B"] = m.B;
                          j["levels"] = m.levels;
                          j["amplitudes"] = m.amplitudes;
                        }},
             model.variant());
  return j.dump();
}

}  // namespace needlet
