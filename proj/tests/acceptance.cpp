// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Arguments select a subset, e.g. "4 6".

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "needlet/density.hpp"
#include "needlet/experiments.hpp"
#include "needlet/frame.hpp"
#include "needlet/frame_check.hpp"
#include "needlet/persist.hpp"

using namespace needlet;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string model_path(const std::string& name) { return std::string(NEEDLET_MODELS_DIR) + "/" + name; }

DensityModel load_model(const std::string& name, const NeedletFrame* frame = nullptr) {
  return model_from_json(read_text_file(model_path(name)), frame);
}

const NeedletFrame& frame7() {
  static const NeedletFrame frame(SphereDim(3), 7);
  return frame;
}

const FrameCheck& find(const std::vector<FrameCheck>& checks, const std::string& name) {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("missing frame check " + name);
}

const std::vector<FrameCheck>& frame_checks() {
  static const std::vector<FrameCheck> checks = [] {
    FrameCheckOptions options;
    options.tol = 1e-9;
    return run_frame_checks(frame7(), options);
  }();
  return checks;
}

std::string describe(const FrameCheck& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %.2e (limit %.2e)", c.name.c_str(), c.observed, c.limit);
  return buf;
}

Verdict frame_exactness() {
  const auto& checks = frame_checks();
  const FrameCheck& parseval = find(checks, "Parseval identity");
  const FrameCheck& repro = find(checks, "polynomial reproduction");
  return {parseval.passed && repro.passed, describe(parseval) + "; " + describe(repro)};
}

Verdict cubature() {
  const auto& checks = frame_checks();
  const FrameCheck& exact = find(checks, "cubature exactness");
  const FrameCheck& mass = find(checks, "cubature total weight");
  return {exact.passed && mass.passed, describe(exact) + "; " + describe(mass)};
}

Verdict norm_bounds() {
  const auto& checks = frame_checks();
  const FrameCheck& l2 = find(checks, "needlet L2 norm");
  const FrameCheck& sup = find(checks, "needlet sup norm / bound");
  const FrameCheck& center = find(checks, "needlet center value / 2^{i(d-1)/2}");
  return {l2.passed && sup.passed && center.passed, describe(l2) + "; " + describe(sup) + "; " + describe(center)};
}

Verdict decay() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"cusp_t05.json", "cusp_t1.json"}) {
    const DensityModel model = load_model(name);
    const auto& cusp = std::get<CuspModel>(model.variant());
    const double t = cusp.t;
    const DecayResult r = run_decay(frame7(), model, cusp.x0, {2, 3, 4, 5, 6, 7});
    const double near_target = -(2.0 * t + 2.0) / 2.0;
    const bool ok = std::abs(r.near_center_fit.slope - near_target) <= 0.3 &&
                    std::abs(r.sum_fit.slope + t) <= 0.3 && std::abs(r.approximation_fit.slope + t) <= 0.3;
    pass = pass && ok;
    char buf[200];
    std::snprintf(buf, sizeof buf, "t=%.2g slopes %.3f/%.3f/%.3f (targets %.2f/%.2f/%.2f); ", t, r.near_center_fit.slope,
                  r.sum_fit.slope, r.approximation_fit.slope, near_target, -t, -t);
    detail += buf;
  }
  return {pass, detail};
}

Verdict bernstein() {
  ExperimentPlan plan{load_model("uniform.json"), UnitVector{0.0, 0.0, 1.0}, {4096}, 2000, 2024};
  const BernsteinResult r = run_bernstein(frame7(), plan, 3);
  const bool exceed_ok = r.exceedance_rate <= r.bound + 3.0 * r.bound_sigma;
  const bool mad_ok = r.max_mean_abs_dev <= 1.1 * r.mean_abs_dev_bound;
  char buf[240];
  std::snprintf(buf, sizeof buf, "exceedance %.3e <= %.3e; max E|dev| %.4e <= 1.1 * %.4e; %zu atoms, bias z %.2f",
                r.exceedance_rate, r.bound + 3.0 * r.bound_sigma, r.max_mean_abs_dev, r.mean_abs_dev_bound, r.atoms,
                r.max_bias_z);
  return {exceed_ok && mad_ok, buf};
}

Verdict rates() {
  const DensityModel model = load_model("cusp_peak_t1.json");
  std::vector<std::size_t> grid;
  for (int e = 9; e <= 16; ++e) grid.push_back(std::size_t{1} << e);
  ExperimentPlan plan{model, *model.center(), grid, 200, 11};
  const RateResult r = run_rates(frame7(), plan);
  std::string detail = fmt("slope %.4f", r.slope) + fmt(" +- %.4f", r.slope_se) +
                       fmt(" (target %.3f +- 0.15); errors", r.theoretical_exponent);
  for (const auto& p : r.points) detail += fmt(" %.4g", p.mean_abs_error);
  return {std::abs(r.slope - r.theoretical_exponent) <= 0.15, detail};
}

Verdict coverage() {
  const DensityModel model = load_model("self_similar_t1.json", &frame7());
  const auto& ss = std::get<SelfSimilarModel>(model.variant());
  ExperimentPlan plan{model, ss.eta, {10000, 20000, 40000}, 300, 7};
  const CoverageResult r = run_coverage(frame7(), plan);
  const CoveragePoint& at_1e4 = r.per_n.front();
  const double target = -ss.t / (2.0 * ss.t + 2.0);
  const bool cov_ok = at_1e4.coverage >= 0.93;
  const bool width_ok = r.width_fit && r.width_fit->slope <= -0.05;
  const bool scaled_ok = r.width_over_gamma_fit && std::abs(r.width_over_gamma_fit->slope - target) <= 0.2;
  std::string detail = fmt("coverage at 1e4 %.3f", at_1e4.coverage);
  detail += r.width_fit ? fmt("; width slope %.3f (<= -0.05)", r.width_fit->slope) : "; width slope undefined";
  detail += r.width_over_gamma_fit ? fmt("; width/gamma slope %.3f", r.width_over_gamma_fit->slope) : "";
  detail += fmt(" (target %.3f +- 0.2); per n:", target);
  for (const auto& p : r.per_n) {
    char buf[120];
    std::snprintf(buf, sizeof buf, " [n=%zu cov %.3f width %.4f survivors %.1f]", p.n, p.coverage, p.mean_width,
                  p.mean_survivors);
    detail += buf;
  }
  return {cov_ok && width_ok && scaled_ok, detail};
}

// Runs every simulate subcommand twice (1 and 2 workers) and compares bytes.
Verdict determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "needlet_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cli = NEEDLET_CLI_PATH;
  struct Run {
    std::string name;
    std::string args;
    std::vector<std::string> outputs;
  };
  const std::vector<Run> runs = {
      {"rates", "simulate rates --model " + model_path("cusp_peak_t1.json") + " --n 512,1024 --reps 30 --seed 5",
       {"rates.csv", "rates.summary.json"}},
      {"coverage",
       "simulate coverage --model " + model_path("self_similar_t1.json") + " --n 500,1000 --reps 200 --seed 5",
       {"coverage.json"}},
      {"bernstein", "simulate bernstein --model " + model_path("uniform.json") + " --n 1024 --reps 50 --seed 5",
       {"bernstein.json"}},
      {"decay", "simulate decay --model " + model_path("cusp_t1.json") + " --levels 2..5",
       {"decay.csv", "decay.summary.json"}},
  };
  std::string detail;
  bool pass = true;
  for (const Run& run : runs) {
    std::vector<std::string> texts[2];
    for (int pass_index = 0; pass_index < 2; ++pass_index) {
      const fs::path out = dir / (run.outputs.front());
      for (const auto& o : run.outputs) fs::remove(dir / o);
      const std::string cmd = "\"" + cli + "\" " + run.args + " --workers " + std::to_string(pass_index + 1) +
                              " --out \"" + out.string() + "\" > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) {
        pass = false;
        detail += run.name + " exited nonzero; ";
        break;
      }
      for (const auto& o : run.outputs) texts[pass_index].push_back(read_text_file((dir / o).string()));
    }
    const bool same = texts[0].size() == run.outputs.size() && texts[0] == texts[1];
    pass = pass && same;
    detail += run.name + (same ? " identical; " : " DIFFERS; ");
  }
  fs::remove_all(dir);
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::tuple<int, const char*, double, std::function<Verdict()>>> criteria = {
      {1, "frame exactness", 60.0, frame_exactness},
      {2, "cubature exactness", 0.0, cubature},
      {3, "needlet norm bounds", 0.0, norm_bounds},
      {4, "coefficient decay slopes", 300.0, decay},
      {5, "coefficient deviation bounds", 120.0, bernstein},
      {6, "pointwise risk rate", 600.0, rates},
      {7, "confidence interval coverage and width", 600.0, coverage},
      {8, "simulate determinism", 0.0, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all = true;
  for (const auto& [id, name, budget, run] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = budget <= 0.0 || seconds <= budget;
    if (!in_time) v.detail += fmt(" over the %.0f s budget", budget);
    const bool pass = v.pass && in_time;
    all = all && pass;
    std::printf("criterion %d %s: %s | %s | %.1f s\n", id, pass ? "PASS" : "FAIL", name, v.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
