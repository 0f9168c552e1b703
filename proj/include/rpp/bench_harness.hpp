#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpp/conditioning.hpp"
#include "rpp/optimizer.hpp"
#include "rpp/system_model.hpp"

namespace rpp {

enum class CaseSource { ByersNashFile, RandomSurvey2, RandomUncontrollable };

std::string to_string(CaseSource source);

struct BenchCase {
  std::string id;
  LtiSystem system;
  SpectrumSpec spectrum;
  CaseSource source = CaseSource::ByersNashFile;
};

inline constexpr int kByersNashCaseCount = 11;

/// Reads bn01.json .. bn11.json from `dir`, verifying each file's checksum.
/// Throws MissingCase or MalformedFile.
std::vector<BenchCase> load_byers_nash(const std::filesystem::path& dir);

/// Random pairs with entries uniform on [-2, 2] and distinct target spectra
/// made of ceil(n/4) conjugate pairs plus real values, all parts uniform on
/// [-2, 2]. Pure function of the arguments.
std::vector<BenchCase> gen_survey2(int count, int n, int m, std::uint64_t seed);

/// ind with (1 - ind)^N = prod(ours_j / baseline_j). Throws NonPositiveValue,
/// DimensionMismatch or InvalidArgument (empty input).
double improvement_indices(std::span<const double> ours, std::span<const double> baseline);

struct BaselineRow {
  double kappa_fro = 0.0;
  double c_inf = 0.0;
  double accuracy = 0.0;
  double gain_fro = 0.0;
};
using Baseline = std::map<std::string, BaselineRow>;

/// CSV with header case_id,kappa_fro,c_inf,accuracy,gain_fro. Throws MalformedFile.
Baseline read_baseline_csv(const std::filesystem::path& path);

struct CaseResult {
  std::string id;
  int n = 0;
  int m = 0;
  bool ok = false;
  std::string error;  // set when the solver threw
  MetricBundle metrics;
  Eigen::MatrixXd gain;
  double best_objective = 0.0;
  double residual = 0.0;
  int restarts_used = 0;
  int failures = 0;
  double runtime_seconds = 0.0;
  std::vector<RestartTrace> trace;
};

/// Index per metric; empty when some ratio is undefined (e.g. a zero accuracy).
struct ImprovementIndices {
  std::optional<double> kappa_fro;
  std::optional<double> c_inf;
  std::optional<double> accuracy;
  std::optional<double> gain_fro;
};

struct BenchReport {
  std::string suite;
  ObjectiveSpec objective;
  SearchConfig config;
  std::vector<CaseResult> per_case;
  std::optional<Baseline> baseline;
  std::optional<ImprovementIndices> indices;  // only when the baseline covers every case
};

BenchReport run_suite(const std::string& suite, const std::vector<BenchCase>& cases, const ObjectiveSpec& objective,
                      const SearchConfig& config);

/// Stores the baseline and computes indices when it covers all successful cases.
void attach_baseline(BenchReport& report, const Baseline& baseline);

/// One f3 report per alpha, all on the same cases and seeds.
std::vector<BenchReport> run_mgrepp_sweep(const std::vector<BenchCase>& cases, const std::vector<double>& alphas,
                                          const SearchConfig& config);

/// Failure criteria for a gain: closed-loop pole more than 5% away from its
/// target, or |F|_F undefined or above 1e10.
struct GainAudit {
  MetricBundle metrics;
  double max_relative_deviation = 0.0;
  bool deviation_flag = false;
  bool gain_flag = false;
  bool failed() const { return deviation_flag || gain_flag; }
};

inline constexpr double kDeviationLimit = 0.05;
inline constexpr double kGainLimit = 1e10;

GainAudit audit_gain(const LtiSystem& sys, const Eigen::MatrixXd& gain, const SpectrumSpec& spec);

struct UncontrollableCase {
  BenchCase bench_case;
  Complex uncontrollable_mode;
};

/// n = 3, m = 2 systems with exactly one uncontrollable mode, built in
/// decoupled coordinates and moved by a similarity with condition <= 10.
/// Entries are dyadic so the transformed pair stays exactly uncontrollable.
std::vector<UncontrollableCase> gen_uncontrollable(int count, std::uint64_t seed);

struct UncontrollableRecord {
  std::string id;
  Complex uncontrollable_mode;
  int nullspace_dim = 0;
  bool feasible = false;
  bool failed = false;
  std::string reason;
  double max_relative_deviation = 0.0;
  double gain_fro = 0.0;
  bool mode_retained = false;  // the uncontrollable mode is an eigenvalue of A + B F
  MetricBundle metrics;
  double runtime_seconds = 0.0;
};

struct UncontrollableStats {
  int failures = 0;
  std::vector<UncontrollableRecord> records;
};

UncontrollableStats run_uncontrollable_suite(int count, std::uint64_t seed, const SearchConfig& config);

}  // namespace rpp
