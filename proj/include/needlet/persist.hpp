#pragma once

#include <string>
#include <vector>

#include "needlet/experiments.hpp"

namespace needlet {

/// git-describe-style version of the build.
const char* version_string();

/// %.17g, the CSV number format.
std::string format_double(double v);

/// Throws InputError carrying the OS message on failure.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::size_t column(const std::string& name) const;
};

/// Parses a headed numeric CSV; throws InputError if a required column is
/// absent or a cell is not a number.
CsvTable parse_csv(const std::string& text, const std::vector<std::string>& required_columns);

/// Rows of d comma-separated reals, optional non-numeric header line,
/// blank lines ignored.
std::vector<UnitVector> parse_samples_csv(const std::string& text, int d);

std::string rates_to_csv(const RateResult& result);
std::string decay_to_csv(const DecayResult& result);

/// Summaries with plan echo, seed and version.
std::string rates_summary_json(const ExperimentPlan& plan, const RateResult& result);
std::string coverage_to_json(const ExperimentPlan& plan, const CoverageResult& result);
std::string decay_summary_json(const DensityModel& model, const UnitVector& x0, const DecayResult& result);
std::string bernstein_to_json(const ExperimentPlan& plan, const BernsteinResult& result);

}  // namespace needlet
