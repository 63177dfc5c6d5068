#pragma once

#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace dnilab::cli {

/// Named output files plus any invariant violations seen during the run.
struct RunOutput {
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> violations;
};

RunOutput run_coherence(const SweepConfig& config);
RunOutput run_invasiveness(const SweepConfig& config);
RunOutput run_lgi(const SweepConfig& config);
RunOutput run_p3_dump(const SweepConfig& config);
RunOutput run_checks(const SweepConfig& config);

struct ThresholdScan {
  std::string status;  ///< "found", "violated_at_lo" or "not_violated_at_hi"
  double estimate = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool monotone = false;  ///< violation flag is a step function on a uniform probe grid
  std::size_t n = 0;
};

/// max over t in (0, t_max] of d(t) + d(t) - d(2t), from the closed form.
double max_equal_time_k(const models::ModelSpec& model, double t_max);

/// Smallest value of scan.param with max_t K(t, t) > 1 + 1e-13, by bisection.
ThresholdScan threshold_scan(const ModelConfig& model, const ScanConfig& scan, double t_max);

/// Line plot of columns of a CSV file as SVG.
std::string csv_to_svg(const std::string& csv_text, const std::string& x_column,
                       const std::vector<std::string>& y_columns);

}  // namespace dnilab::cli
