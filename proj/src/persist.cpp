#include "needlet/persist.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "needlet/error.hpp"

#ifndef NEEDLET_VERSION
#define NEEDLET_VERSION "0.1.0"
#endif

namespace needlet {
namespace {

using ordered = nlohmann::ordered_json;

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

// Non-finite values have no JSON literal; they are written as null.
ordered number(double v) { return std::isfinite(v) ? ordered(v) : ordered(nullptr); }

ordered fit_json(const LineFit& f) {
  return {{"slope", number(f.slope)}, {"intercept", number(f.intercept)}, {"slope_se", number(f.slope_se)}};
}

ordered plan_json(const ExperimentPlan& plan) {
  ordered j;
  j["model"] = ordered::parse(model_to_json(plan.model));
  j["point"] = std::vector<double>(plan.query_point.coords().begin(), plan.query_point.coords().end());
  j["n"] = plan.n_grid;
  j["reps"] = plan.replications;
  j["seed"] = plan.seed;
  j["alpha"] = plan.alpha;
  j["estimator"] = plan.estimator == EstimatorKind::Linear ? "linear" : "threshold";
  j["sup"] = plan.sup_source == SupSource::Known ? "known" : "plug-in";
  j["adaptive_w"] = plan.adaptive_w;
  return j;
}

ordered envelope(const char* kind, const ExperimentPlan& plan) {
  ordered j;
  j["experiment"] = kind;
  j["version"] = version_string();
  j["seed"] = plan.seed;
  j["plan"] = plan_json(plan);
  return j;
}

}  // namespace

const char* version_string() { return NEEDLET_VERSION; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path + ": " + std::strerror(errno));
  out << text;
  out.flush();
  if (!out) throw InputError("cannot write " + path + ": " + std::strerror(errno));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path + ": " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw InputError("CSV lacks column " + name);
}

CsvTable parse_csv(const std::string& text, const std::vector<std::string>& required_columns) {
  std::istringstream in(text);
  std::string line;
  CsvTable table;
  while (std::getline(in, line) && blank(line)) {}
  if (blank(line)) throw InputError("CSV is empty");
  table.columns = split_line(line);
  for (const auto& name : required_columns) (void)table.column(name);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split_line(line);
    if (cells.size() != table.columns.size()) {
      throw InputError("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(table.columns.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], row[c])) {
        throw InputError("CSV line " + std::to_string(line_no) + ": not a number: " + cells[c]);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<UnitVector> parse_samples_csv(const std::string& text, int d) {
  std::istringstream in(text);
  std::string line;
  std::vector<UnitVector> out;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = split_line(line);
    std::vector<double> v(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) numeric = numeric && parse_number(cells[c], v[c]);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw InputError("samples line " + std::to_string(line_no) + " is not numeric");
    }
    first = false;
    if (static_cast<int>(v.size()) != d) {
      throw InputError("samples line " + std::to_string(line_no) + " has " + std::to_string(v.size()) +
                       " coordinates, expected " + std::to_string(d));
    }
    try {
      out.emplace_back(std::move(v));
    } catch (const InputError& e) {
      throw InputError("samples line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.empty()) throw InputError("samples file has no rows");
  return out;
}

std::string rates_to_csv(const RateResult& result) {
  std::string s = "n,J,mean_abs_error,std_error,mean_estimate,truth\n";
  for (const auto& p : result.points) {
    s += std::to_string(p.n) + "," + std::to_string(p.J) + "," + format_double(p.mean_abs_error) + "," +
         format_double(p.std_error) + "," + format_double(p.mean_estimate) + "," + format_double(p.truth) + "\n";
  }
  return s;
}

std::string decay_to_csv(const DecayResult& result) {
  std::string s = "level,near_center_max,sum_abs_beta_psi,approximation_error\n";
  for (const auto& r : result.rows) {
    s += std::to_string(r.level) + "," + format_double(r.near_center_max) + "," +
         format_double(r.sum_abs_beta_psi) + "," + format_double(r.approximation_error) + "\n";
  }
  return s;
}

std::string rates_summary_json(const ExperimentPlan& plan, const RateResult& result) {
  ordered j = envelope("rates", plan);
  j["slope"] = number(result.slope);
  j["slope_se"] = number(result.slope_se);
  j["theoretical_exponent"] = number(result.theoretical_exponent);
  auto rows = ordered::array();
  for (const auto& p : result.points) {
    rows.push_back({{"n", p.n}, {"J", p.J}, {"mean_abs_error", p.mean_abs_error}, {"std_error", p.std_error},
                    {"mean_estimate", p.mean_estimate}, {"truth", p.truth}});
  }
  j["per_n"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string coverage_to_json(const ExperimentPlan& plan, const CoverageResult& result) {
  ordered j = envelope("coverage", plan);
  j["coverage"] = result.coverage;
  j["mean_width"] = result.mean_width;
  j["width_fit"] = result.width_fit ? fit_json(*result.width_fit) : ordered(nullptr);
  j["width_over_gamma_fit"] = result.width_over_gamma_fit ? fit_json(*result.width_over_gamma_fit) : ordered(nullptr);
  j["theoretical_exponent"] = number(result.theoretical_exponent);
  auto rows = ordered::array();
  for (const auto& p : result.per_n) {
    rows.push_back({{"n", p.n},
                    {"J", p.J},
                    {"coverage", p.coverage},
                    {"coverage_se", p.coverage_se},
                    {"mean_width", p.mean_width},
                    {"mean_width_over_gamma", p.mean_width_over_gamma},
                    {"mean_survivors", p.mean_survivors},
                    {"mean_estimate", p.mean_estimate},
                    {"truth", p.truth},
                    {"asserted", p.n >= 1000}});
  }
  j["per_n"] = std::move(rows);
  return j.dump(2) + "\n";
}

std::string decay_summary_json(const DensityModel& model, const UnitVector& x0, const DecayResult& result) {
  ordered j;
  j["experiment"] = "decay";
  j["version"] = version_string();
  j["model"] = ordered::parse(model_to_json(model));
  j["point"] = std::vector<double>(x0.coords().begin(), x0.coords().end());
  j["K"] = result.K;
  j["near_center_fit"] = fit_json(result.near_center_fit);
  j["sum_fit"] = fit_json(result.sum_fit);
  j["approximation_fit"] = fit_json(result.approximation_fit);
  return j.dump(2) + "\n";
}

std::string bernstein_to_json(const ExperimentPlan& plan, const BernsteinResult& r) {
  ordered j = envelope("bernstein", plan);
  j["n"] = r.n;
  j["level"] = r.level;
  j["atoms"] = r.atoms;
  j["band"] = r.band;
  j["exceedance_rate"] = r.exceedance_rate;
  j["bound"] = r.bound;
  j["bound_sigma"] = r.bound_sigma;
  j["max_mean_abs_dev"] = r.max_mean_abs_dev;
  j["mean_abs_dev_bound"] = r.mean_abs_dev_bound;
  j["max_bias_z"] = r.max_bias_z;
  return j.dump(2) + "\n";
}

}  // namespace needlet
