#include "needlet/frame.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "json.hpp"

#include "needlet/error.hpp"

namespace needlet {

struct NeedletFrame::SupCache {
  std::mutex mutex;
  std::vector<std::optional<ProfileSup>> values;
};

NeedletFrame::NeedletFrame(const SphereDim& dim, int j_max)
    : dim_(dim), j_max_(j_max), sup_cache_(std::make_unique<SupCache>()) {
  if (j_max < 0) throw DomainError("frame needs j_max >= 0");
  rules_.reserve(static_cast<std::size_t>(j_max) + 1);
  for (int i = 0; i <= j_max; ++i) {
    rules_.push_back(build_rule(i, dim));
    kernels_.emplace_back(i, KernelKind::C, window_, dim);
    const auto w = kernels_.back().window_weights();
    std::vector<double> padded(static_cast<std::size_t>(1) << (i + 1), 0.0);
    std::copy(w.begin(), w.end(), padded.begin());
    degree_weights_.push_back(std::move(padded));
  }
  sup_cache_->values.resize(rules_.size());
}

NeedletFrame::~NeedletFrame() = default;
NeedletFrame::NeedletFrame(NeedletFrame&&) noexcept = default;
NeedletFrame& NeedletFrame::operator=(NeedletFrame&&) noexcept = default;

void NeedletFrame::check_level(int level) const {
  if (level < 0 || level > j_max_) {
    throw DomainError("level " + std::to_string(level) + " outside frame range 0.." +
                      std::to_string(j_max_));
  }
}

const CubatureRule& NeedletFrame::rule(int level) const {
  check_level(level);
  return rules_[static_cast<std::size_t>(level)];
}

const KernelLevel& NeedletFrame::needlet_kernel(int level) const {
  check_level(level);
  return kernels_[static_cast<std::size_t>(level)];
}

std::span<const double> NeedletFrame::needlet_weights(int level) const {
  check_level(level);
  return degree_weights_[static_cast<std::size_t>(level)];
}

NeedletAtom NeedletFrame::atom(int level, std::size_t node_index) const {
  const CubatureRule& r = rule(level);
  if (node_index >= r.size()) throw DomainError("atom index out of range");
  return {level, node_index, r.nodes[node_index], r.weights[node_index]};
}

NeedletFrame::ProfileSup NeedletFrame::level_profile_sup(int level) const {
  check_level(level);
  std::lock_guard lock(sup_cache_->mutex);
  auto& slot = sup_cache_->values[static_cast<std::size_t>(level)];
  if (!slot) {
    const KernelLevel& kernel = needlet_kernel(level);
    const long points = std::min(10000L << level, 1000000L);
    ProfileSup best{0.0, 0.0};
    for (long p = 0; p < points; ++p) {
      const double r = std::numbers::pi * static_cast<double>(p) / static_cast<double>(points - 1);
      const double v = std::abs(kernel(std::cos(r)));
      if (v > best.value) best = {v, r};
    }
    slot = best;
  }
  return *slot;
}

double psi_eval(const NeedletFrame& frame, const NeedletAtom& atom, const UnitVector& x) {
  return std::sqrt(atom.weight) * kernel_sum(frame.needlet_kernel(atom.level), x, atom.center);
}

std::vector<std::vector<double>> psi_at_point(const NeedletFrame& frame, const UnitVector& x,
                                              int up_to_level) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < up_to_level; ++i) {
    const CubatureRule& r = frame.rule(i);
    const KernelLevel& kernel = frame.needlet_kernel(i);
    std::vector<double> values(r.size());
    for (std::size_t n = 0; n < r.size(); ++n) {
      values[n] = std::sqrt(r.weights[n]) * kernel(r.nodes[n].dot(x));
    }
    out.push_back(std::move(values));
  }
  return out;
}

CoefficientTable::CoefficientTable(const NeedletFrame& frame, int level_count, CoefficientKind kind)
    : d_(frame.dim().d()), kind_(kind) {
  if (level_count < 0 || level_count > frame.j_max() + 1) {
    throw DomainError("coefficient table levels exceed the frame range");
  }
  for (int i = 0; i < level_count; ++i) levels_.emplace_back(frame.atom_count(i), 0.0);
}

CoefficientTable::CoefficientTable(int d, std::vector<std::size_t> level_sizes, CoefficientKind kind)
    : d_(d), kind_(kind) {
  for (std::size_t s : level_sizes) levels_.emplace_back(s, 0.0);
}

void CoefficientTable::set(int i, std::size_t idx, double v) {
  if (!std::isfinite(v)) throw NumericalError("non-finite needlet coefficient");
  level(i)[idx] = v;
}

double CoefficientTable::sum_of_squares() const {
  double s = 0.0;
  for (const auto& lvl : levels_) {
    for (double v : lvl) s += v * v;
  }
  return s;
}

namespace {

void check_up_to(const NeedletFrame& frame, int up_to_level) {
  if (up_to_level < 0 || up_to_level > frame.j_max() + 1) {
    throw DomainError("requested levels exceed the frame range");
  }
}

int harmonic_degree(int up_to_level) { return up_to_level == 0 ? 0 : (1 << up_to_level) - 1; }

}  // namespace

CoefficientTable table_from_harmonics(const NeedletFrame& frame, const HarmonicCoefficients& c,
                                      int up_to_level, CoefficientKind kind, double constant_term) {
  check_up_to(frame, up_to_level);
  CoefficientTable table(frame, up_to_level, kind);
  table.set_constant_term(constant_term);
  for (int i = 0; i < up_to_level; ++i) {
    const CubatureRule& r = frame.rule(i);
    const std::vector<double> g = c.synthesize_on_rule(frame.needlet_weights(i), r);
    auto out = table.level(i);
    for (std::size_t n = 0; n < r.size(); ++n) {
      const double v = std::sqrt(r.weights[n]) * g[n];
      if (!std::isfinite(v)) throw NumericalError("non-finite needlet coefficient");
      out[n] = v;
    }
  }
  return table;
}

CoefficientTable analyze_function(const NeedletFrame& frame,
                                  const std::function<double(const UnitVector&)>& f,
                                  int up_to_level, std::optional<int> bandwidth) {
  check_up_to(frame, up_to_level);
  const CubatureRule quadrature =
      bandwidth ? build_rule_for_degree((1 << up_to_level) + *bandwidth, frame.dim())
                : build_rule(up_to_level + 2, frame.dim());
  HarmonicCoefficients c(harmonic_degree(up_to_level));
  double mass = 0.0;
  for (std::size_t n = 0; n < quadrature.size(); ++n) {
    const double v = f(quadrature.nodes[n]);
    if (!std::isfinite(v)) {
      throw NumericalError("non-finite integrand at quadrature node " + std::to_string(n));
    }
    mass += quadrature.weights[n] * v;
    c.add_point(quadrature.nodes[n], quadrature.weights[n] * v);
  }
  return table_from_harmonics(frame, c, up_to_level, CoefficientKind::TrueBeta,
                              mass / frame.dim().omega());
}

CoefficientTable analyze_function_direct(const NeedletFrame& frame,
                                         const std::function<double(const UnitVector&)>& f,
                                         int up_to_level, const CubatureRule& quadrature) {
  check_up_to(frame, up_to_level);
  std::vector<double> values(quadrature.size());
  double mass = 0.0;
  for (std::size_t n = 0; n < quadrature.size(); ++n) {
    values[n] = f(quadrature.nodes[n]);
    if (!std::isfinite(values[n])) {
      throw NumericalError("non-finite integrand at quadrature node " + std::to_string(n));
    }
    mass += quadrature.weights[n] * values[n];
  }
  CoefficientTable table(frame, up_to_level, CoefficientKind::TrueBeta);
  table.set_constant_term(mass / frame.dim().omega());
  for (int i = 0; i < up_to_level; ++i) {
    for (std::size_t idx = 0; idx < frame.atom_count(i); ++idx) {
      const NeedletAtom a = frame.atom(i, idx);
      double s = 0.0;
      for (std::size_t n = 0; n < quadrature.size(); ++n) {
        s += quadrature.weights[n] * values[n] * psi_eval(frame, a, quadrature.nodes[n]);
      }
      table.set(i, idx, s);
    }
  }
  return table;
}

CoefficientTable analyze_zonal(const NeedletFrame& frame, const ZonalExpansion& f, int up_to_level) {
  check_up_to(frame, up_to_level);
  HarmonicCoefficients c(harmonic_degree(up_to_level));
  for (const auto& comp : f.components) {
    const std::size_t used = std::min(comp.mu.size(), static_cast<std::size_t>(c.max_degree()) + 1);
    c.add_zonal(comp.pole, std::span<const double>(comp.mu.data(), used));
  }
  return table_from_harmonics(frame, c, up_to_level, CoefficientKind::TrueBeta,
                              f.mass() / frame.dim().omega());
}

HarmonicCoefficients empirical_harmonics(std::span<const UnitVector> sample, int up_to_level) {
  if (sample.empty()) throw InputError("empty sample");
  HarmonicCoefficients c(harmonic_degree(up_to_level));
  const double w = 1.0 / static_cast<double>(sample.size());
  for (const UnitVector& x : sample) c.add_point(x, w);
  return c;
}

CoefficientTable analyze_sample(const NeedletFrame& frame, std::span<const UnitVector> sample,
                                int up_to_level) {
  check_up_to(frame, up_to_level);
  const HarmonicCoefficients c = empirical_harmonics(sample, up_to_level);
  return table_from_harmonics(frame, c, up_to_level, CoefficientKind::EmpiricalBeta,
                              1.0 / frame.dim().omega());
}

CoefficientTable analyze_sample_direct(const NeedletFrame& frame,
                                       std::span<const UnitVector> sample, int up_to_level) {
  check_up_to(frame, up_to_level);
  if (sample.empty()) throw InputError("empty sample");
  CoefficientTable table(frame, up_to_level, CoefficientKind::EmpiricalBeta);
  table.set_constant_term(1.0 / frame.dim().omega());
  const double inv_n = 1.0 / static_cast<double>(sample.size());
  for (int i = 0; i < up_to_level; ++i) {
    for (std::size_t idx = 0; idx < frame.atom_count(i); ++idx) {
      const NeedletAtom a = frame.atom(i, idx);
      double s = 0.0;
      for (const UnitVector& x : sample) s += psi_eval(frame, a, x);
      table.set(i, idx, s * inv_n);
    }
  }
  return table;
}

HarmonicCoefficients harmonics_from_table(const NeedletFrame& frame, const CoefficientTable& table,
                                          int up_to_level, const CoefficientMask& keep) {
  if (up_to_level > table.level_count()) throw DomainError("coefficient table lacks requested levels");
  HarmonicCoefficients total(harmonic_degree(up_to_level));
  for (int i = 0; i < up_to_level; ++i) {
    // sum_eta beta psi_eta = sum_k sqrt(b_k) sum_m [sum_eta sqrt(lambda) beta Y_km(eta)] Y_km
    HarmonicCoefficients level(total.max_degree());
    const CubatureRule& r = frame.rule(i);
    const auto coeffs = table.level(i);
    bool any = false;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
      if (coeffs[n] == 0.0 || (keep && !keep(i, n, coeffs[n]))) continue;
      level.add_point(r.nodes[n], std::sqrt(r.weights[n]) * coeffs[n]);
      any = true;
    }
    if (!any) continue;
    level.scale_degrees(frame.needlet_weights(i));
    total += level;
  }
  return total;
}

double synthesize(const NeedletFrame& frame, const CoefficientTable& table, const UnitVector& x,
                  const CoefficientMask& keep) {
  double total = table.constant_term();
  for (int i = 0; i < table.level_count(); ++i) {
    const auto coeffs = table.level(i);
    const CubatureRule& r = frame.rule(i);
    const KernelLevel& kernel = frame.needlet_kernel(i);
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
      const double beta = coeffs[n];
      if (beta == 0.0) continue;
      if (keep && !keep(i, n, beta)) continue;
      total += beta * std::sqrt(r.weights[n]) * kernel(r.nodes[n].dot(x));
    }
  }
  return total;
}

FrameNorms frame_norms(const NeedletFrame& frame, const NeedletAtom& atom) {
  // ||psi||^2 = lambda sum_k b(k/2^i) Z^k(eta, eta)
  const KernelLevel& kernel = frame.needlet_kernel(atom.level);
  double sq = 0.0;
  for (int k = kernel.k_min(); k <= kernel.k_max(); ++k) {
    const double w = kernel.window_weight(k);
    sq += w * w * zonal_profile(k, 1.0, frame.dim());
  }
  const double scale = std::sqrt(atom.weight);
  return {scale * std::sqrt(sq), scale * frame.level_profile_sup(atom.level).value};
}

double l2_norm_by_cubature(const NeedletFrame& frame, const NeedletAtom& atom) {
  const CubatureRule finer = atom.level + 1 <= frame.j_max() ? frame.rule(atom.level + 1)
                                                             : build_rule(atom.level + 1, frame.dim());
  const double sq = integrate(finer, [&](const UnitVector& x) {
    const double v = psi_eval(frame, atom, x);
    return v * v;
  });
  return std::sqrt(sq);
}

std::string table_to_json(const CoefficientTable& table) {
  nlohmann::ordered_json j;
  j["dim"] = table.dim();
  j["levels"] = table.level_count();
  j["kind"] = table.kind() == CoefficientKind::TrueBeta ? "true_beta" : "empirical_beta";
  j["constant_term"] = table.constant_term();
  auto entries = nlohmann::ordered_json::array();
  for (int i = 0; i < table.level_count(); ++i) {
    const auto lvl = table.level(i);
    for (std::size_t n = 0; n < lvl.size(); ++n) {
      entries.push_back({{"i", i}, {"idx", n}, {"value", lvl[n]}});
    }
  }
  j["entries"] = std::move(entries);
  return j.dump();
}

CoefficientTable table_from_json(const std::string& text, const NeedletFrame& frame) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("coefficient table JSON: ") + e.what());
  }
  for (const char* key : {"dim", "levels", "constant_term", "entries"}) {
    if (!j.contains(key)) throw InputError(std::string("coefficient table JSON lacks field ") + key);
  }
  if (j["dim"].get<int>() != frame.dim().d()) throw InputError("coefficient table dimension mismatch");
  const auto kind = j.value("kind", std::string("empirical_beta")) == "true_beta"
                        ? CoefficientKind::TrueBeta
                        : CoefficientKind::EmpiricalBeta;
  const int levels = j["levels"].get<int>();
  if (levels < 0 || levels > frame.j_max() + 1) throw InputError("coefficient table levels out of range");
  CoefficientTable table(frame, levels, kind);
  table.set_constant_term(j["constant_term"].get<double>());
  for (const auto& e : j["entries"]) {
    const int i = e.at("i").get<int>();
    const auto idx = e.at("idx").get<std::size_t>();
    if (i < 0 || i >= levels || idx >= frame.atom_count(i)) {
      throw InputError("coefficient table entry outside the frame");
    }
    table.set(i, idx, e.at("value").get<double>());
  }
  return table;
}

}  // namespace needlet
