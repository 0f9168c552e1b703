#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rpp/bench_harness.hpp"

namespace rpp {

nlohmann::json metrics_to_json(const MetricBundle& metrics);

/// Full machine-readable report including restart traces. Wall times are
/// left out unless requested so that restart-budget runs serialize
/// identically.
nlohmann::json report_to_json(const BenchReport& report, bool include_timing = false);

/// One row per case: case_id,n,m,kappa_fro,kappa_2,c_inf,accuracy,gain_fro,best_objective,restarts,runtime_s
std::string report_to_csv(const BenchReport& report);

/// Per-case kappa_fro / |F|_F table plus geometric means and, when present,
/// improvement indices in percent.
std::string report_to_markdown(const BenchReport& report);

/// Metric rows against one column per alpha (indices when baselines are attached).
std::string sweep_to_markdown(const std::vector<BenchReport>& reports);
nlohmann::json sweep_to_json(const std::vector<BenchReport>& reports, bool include_timing = false);

nlohmann::json uncontrollable_to_json(const UncontrollableStats& stats, bool include_timing = false);
std::string uncontrollable_to_csv(const UncontrollableStats& stats);
std::string uncontrollable_to_markdown(const UncontrollableStats& stats);

/// Geometric mean of positive values (NaN when any value is not positive).
double geometric_mean(const std::vector<double>& values);

/// Geometric means over successful cases: kappa_fro, c_inf, accuracy, gain_fro.
struct ReportSummary {
  int cases = 0;
  int solved = 0;
  double kappa_fro = 0.0;
  double c_inf = 0.0;
  double accuracy = 0.0;
  double gain_fro = 0.0;
};
ReportSummary summarize(const BenchReport& report);

}  // namespace rpp
