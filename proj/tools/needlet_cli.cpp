#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "needlet/density.hpp"
#include "needlet/error.hpp"
#include "needlet/estimators.hpp"
#include "needlet/experiments.hpp"
#include "needlet/frame.hpp"
#include "needlet/frame_check.hpp"
#include "needlet/persist.hpp"

namespace {

using namespace needlet;

constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InputError("not a number: " + cell);
    }
  }
  if (out.empty()) throw InputError("empty list");
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_reals(text)) {
    if (!(v >= 2.0) || v != std::floor(v) || v > 1e9) throw InputError("sample sizes must be integers >= 2");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

// "2..7" or "2,3,5"
std::vector<int> parse_levels(const std::string& text) {
  const auto dots = text.find("..");
  std::vector<int> out;
  if (dots != std::string::npos) {
    const int lo = std::stoi(text.substr(0, dots));
    const int hi = std::stoi(text.substr(dots + 2));
    if (hi < lo) throw InputError("empty level range " + text);
    for (int i = lo; i <= hi; ++i) out.push_back(i);
    return out;
  }
  for (double v : parse_reals(text)) {
    if (v != std::floor(v) || v < 0) throw InputError("levels must be nonnegative integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// Self-similar specs without amplitudes need a frame reaching their levels.
int model_levels_needed(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("kind", std::string()) != "self_similar" || !j.contains("levels")) return 0;
    int top = 0;
    for (int l : j["levels"].get<std::vector<int>>()) top = std::max(top, l);
    return top;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::string sidecar_path(const std::string& out) {
  if (out.empty() || out == "-") return {};
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? out.substr(0, dot) : out) + ".summary.json";
}

struct SimulateArgs {
  std::string model_path;
  std::string point;
  std::string n = "4096";
  int reps = 200;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  std::string out;
  std::string estimator = "threshold";
  std::string sup = "known";
  bool adaptive_w = false;
  unsigned workers = 0;
  std::string levels = "2..7";
  double K = 4.0;
  int level = 3;
  double band_scale = 1.0;
};

struct Loaded {
  std::string model_text;
  int model_levels;
};

Loaded load_model(const SimulateArgs& a) {
  if (a.model_path.empty()) throw InputError("--model is required");
  Loaded l{read_text_file(a.model_path), 0};
  l.model_levels = model_levels_needed(l.model_text);
  return l;
}

UnitVector query_point(const SimulateArgs& a, const DensityModel& model, bool required = true) {
  if (!a.point.empty()) return UnitVector(parse_reals(a.point));
  if (auto c = model.center()) return *c;
  if (!required) {
    std::vector<double> pole(static_cast<std::size_t>(model.dim().d()), 0.0);
    pole.back() = 1.0;
    return UnitVector(std::move(pole));
  }
  throw InputError("--point is required for this model");
}

// Bernstein runs never evaluate at the query point.
ExperimentPlan make_plan(const SimulateArgs& a, const DensityModel& model, bool point_required) {
  ExperimentPlan plan{model, query_point(a, model, point_required), parse_sizes(a.n), a.reps, a.seed, a.alpha};
  if (a.estimator == "linear") {
    plan.estimator = EstimatorKind::Linear;
  } else if (a.estimator != "threshold") {
    throw InputError("--estimator must be linear or threshold");
  }
  if (a.sup == "plug-in") {
    plan.sup_source = SupSource::PlugIn;
  } else if (a.sup != "known") {
    throw InputError("--sup must be known or plug-in");
  }
  plan.adaptive_w = a.adaptive_w;
  plan.workers = a.workers;
  return plan;
}

int run_simulate(const std::string& which, const SimulateArgs& a) {
  const Loaded loaded = load_model(a);
  if (which == "decay") {
    const std::vector<int> levels = parse_levels(a.levels);
    const int top = std::max(*std::max_element(levels.begin(), levels.end()), loaded.model_levels);
    const NeedletFrame frame(SphereDim(3), top);
    const DensityModel model = model_from_json(loaded.model_text, &frame);
    const UnitVector x0 = query_point(a, model);
    const DecayResult result = run_decay(frame, model, x0, levels, a.K);
    emit(a.out, decay_to_csv(result));
    const std::string side = sidecar_path(a.out);
    if (!side.empty()) write_text_file(side, decay_summary_json(model, x0, result));
    return 0;
  }

  // The plan (and so the frame depth) depends on the model only through n.
  const std::vector<std::size_t> sizes = parse_sizes(a.n);
  int levels = 0;
  for (std::size_t n : sizes) levels = std::max(levels, choose_J(n, 3));
  if (which == "bernstein") levels = std::max(levels, a.level + 1);
  const NeedletFrame frame(SphereDim(3), std::max({levels - 1, loaded.model_levels, 0}));
  const DensityModel model = model_from_json(loaded.model_text, &frame);
  const ExperimentPlan plan = make_plan(a, model, which != "bernstein");

  if (which == "rates") {
    const RateResult result = run_rates(frame, plan);
    emit(a.out, rates_to_csv(result));
    const std::string side = sidecar_path(a.out);
    if (!side.empty()) write_text_file(side, rates_summary_json(plan, result));
  } else if (which == "coverage") {
    emit(a.out, coverage_to_json(plan, run_coverage(frame, plan)));
  } else if (which == "bernstein") {
    emit(a.out, bernstein_to_json(plan, run_bernstein(frame, plan, a.level, a.band_scale)));
  } else {
    throw InputError("unknown simulation " + which);
  }
  return 0;
}

int run_frame_check(int d, int jmax, double tol, std::uint64_t seed) {
  const NeedletFrame frame{SphereDim(d), jmax};
  FrameCheckOptions options;
  options.tol = tol;
  options.seed = seed;
  bool ok = true;
  for (const FrameCheck& c : run_frame_checks(frame, options)) {
    std::printf("%-40s %s  observed %.3e  limit %.3e\n", c.name.c_str(), c.passed ? "ok  " : "FAIL", c.observed,
                c.limit);
    ok = ok && c.passed;
  }
  return ok ? 0 : kExitFailure;
}

int run_estimate(const std::string& input, int d, const std::string& point, double alpha, const std::string& sup,
                 bool adaptive_w, const std::string& out) {
  const SphereDim dim(d);
  const std::vector<UnitVector> sample = parse_samples_csv(read_text_file(input), d);
  const UnitVector x(parse_reals(point));
  if (x.dim() != d) throw InputError("--point dimension differs from --dim");
  const std::size_t n = sample.size();
  const int J = choose_J(n, d);
  const NeedletFrame frame(dim, std::max(J - 1, 0));
  const HarmonicCoefficients c = empirical_harmonics(sample, J);
  const CoefficientTable table = table_from_harmonics(frame, c, J, CoefficientKind::EmpiricalBeta, 1.0 / dim.omega());

  double sup_f = 0.0;
  SupSource source = SupSource::PlugIn;
  if (sup == "plug-in") {
    sup_f = plug_in_sup(frame, c, J);
  } else {
    const auto v = parse_reals(sup);
    if (v.size() != 1 || !(v[0] > 0.0)) throw InputError("--sup must be plug-in or a positive number");
    sup_f = v[0];
    source = SupSource::Known;
  }
  const EstimatorConfig config = make_config(n, dim, alpha, sup_f, source, adaptive_w);
  const QueryPoint q(frame, x, J);
  const PointEstimate e = evaluate(q, table, config, dim);
  emit(out, estimate_to_json(x, e, config, survivors(table, J, config.threshold())) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spherical needlet density estimation"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);

  auto* frame_cmd = app.add_subcommand("frame", "Needlet frame utilities");
  frame_cmd->require_subcommand(1);
  auto* check = frame_cmd->add_subcommand("check", "Run the frame invariant suite");
  int check_dim = 3;
  int check_jmax = 6;
  double check_tol = 1e-9;
  std::uint64_t check_seed = 1;
  check->add_option("--dim", check_dim, "Ambient dimension d")->capture_default_str();
  check->add_option("--jmax", check_jmax, "Deepest level")->check(CLI::Range(0, 10))->capture_default_str();
  check->add_option("--tol", check_tol, "Exactness tolerance")->capture_default_str();
  check->add_option("--seed", check_seed, "Seed for random poles and polynomials")->capture_default_str();

  auto* est = app.add_subcommand("estimate", "Threshold estimate and confidence interval at a point");
  std::string est_input;
  int est_dim = 3;
  std::string est_point;
  double est_alpha = 0.05;
  std::string est_sup = "plug-in";
  bool est_adaptive = false;
  std::string est_out;
  est->add_option("--input", est_input, "CSV of unit vectors")->required();
  est->add_option("--dim", est_dim, "Ambient dimension d")->capture_default_str();
  est->add_option("--point", est_point, "Query point, comma separated")->required();
  est->add_option("--alpha", est_alpha, "Confidence level")->capture_default_str();
  est->add_option("--sup", est_sup, "plug-in or a known sup norm")->capture_default_str();
  est->add_flag("--adaptive-w", est_adaptive, "Set n^{-w} = alpha / #survivors");
  est->add_option("--out", est_out, "Output JSON (stdout if omitted)");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo experiments");
  sim->require_subcommand(1);
  SimulateArgs args;
  auto common = [&](CLI::App* c) {
    c->add_option("--model", args.model_path, "Model JSON file")->required();
    c->add_option("--point", args.point, "Query point (defaults to the model center)");
    c->add_option("--seed", args.seed, "Root seed")->capture_default_str();
    c->add_option("--out", args.out, "Output file (stdout if omitted)");
    c->add_option("--workers", args.workers, "Worker threads, 0 for all cores")->capture_default_str();
  };
  auto monte_carlo = [&](CLI::App* c) {
    c->add_option("--n", args.n, "Sample sizes, comma separated")->capture_default_str();
    c->add_option("--reps", args.reps, "Replications per sample size")->capture_default_str();
    c->add_option("--alpha", args.alpha, "Confidence level")->capture_default_str();
    c->add_option("--estimator", args.estimator, "threshold or linear")->capture_default_str();
    c->add_option("--sup", args.sup, "known or plug-in")->capture_default_str();
    c->add_flag("--adaptive-w", args.adaptive_w, "Set n^{-w} = alpha / #survivors");
  };
  auto* rates = sim->add_subcommand("rates", "Pointwise risk against n");
  common(rates);
  monte_carlo(rates);
  auto* coverage = sim->add_subcommand("coverage", "Confidence interval coverage and width");
  common(coverage);
  monte_carlo(coverage);
  auto* decay = sim->add_subcommand("decay", "Coefficient decay across levels");
  common(decay);
  decay->add_option("--levels", args.levels, "Levels, a..b or comma separated")->capture_default_str();
  decay->add_option("--K", args.K, "Near-center radius in units of 2^{-i}")->capture_default_str();
  auto* bern = sim->add_subcommand("bernstein", "Deviation of empirical coefficients");
  common(bern);
  monte_carlo(bern);
  bern->add_option("--level", args.level, "Level examined")->capture_default_str();
  bern->add_option("--band-scale", args.band_scale, "Multiplier on the deviation band")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadInput;
  }

  try {
    if (check->parsed()) return run_frame_check(check_dim, check_jmax, check_tol, check_seed);
    if (est->parsed()) {
      return run_estimate(est_input, est_dim, est_point, est_alpha, est_sup, est_adaptive, est_out);
    }
    for (auto* c : {rates, coverage, decay, bern}) {
      if (c->parsed()) return run_simulate(c->get_name(), args);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitBadInput;
}
