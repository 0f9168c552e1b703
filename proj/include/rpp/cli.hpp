#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rpp/optimizer.hpp"

namespace rpp::cli {

enum class Command { Place, BenchBn, BenchRandom, BenchUncontrollable, MgreppSweep, Check };
enum class OutputFormat { Json, Csv, Markdown };

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInfeasible = 2;
inline constexpr int kExitMalformed = 3;
inline constexpr int kExitBudget = 4;

struct CliConfig {
  Command command = Command::Place;
  std::string input;
  std::string poles;  // inline alternative to the file's pole list
  ObjectiveKind objective = ObjectiveKind::KappaFro;
  std::optional<double> alpha;
  std::vector<double> alphas = {0.0001, 0.001, 0.1, 1.0};
  double budget_seconds = 0.0;
  std::optional<int> budget_restarts;
  std::uint64_t seed = 0;
  SeedStrategy seeds = SeedStrategy::Mixed;
  GradientMode grad = GradientMode::Analytic;
  OutputFormat format = OutputFormat::Json;
  std::string baseline;
  std::string out;
  int count = 0;  // 0: command default
  int n = 20;
  int m = 2;
  bool timing = false;
};

/// Search settings implied by the budget flags.
SearchConfig search_config(const CliConfig& config);

int cmd_place(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_check(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench_bn(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench_random(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_bench_uncontrollable(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_mgrepp_sweep(const CliConfig& config, std::ostream& out, std::ostream& err);

int run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Usage errors return CLI11's exit code.
int main(int argc, char** argv);

}  // namespace rpp::cli
