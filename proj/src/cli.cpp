#include "rpp/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "rpp/bench_harness.hpp"
#include "rpp/conditioning.hpp"
#include "rpp/error.hpp"
#include "rpp/report.hpp"
#include "rpp/system_io.hpp"

namespace rpp::cli {

using nlohmann::json;

namespace {

struct Problem {
  LtiSystem system;
  SpectrumSpec spectrum;
  std::optional<Eigen::MatrixXd> gain;
};

Problem load_problem(const CliConfig& config) {
  if (config.input.empty()) throw Error(ErrorCode::MalformedFile, "--input is required");
  SystemFile file = read_system_file(config.input);
  if (!config.poles.empty()) {
    file.poles = parse_pole_list(config.poles);
    file.multiplicities.assign(file.poles.size(), 1);
  }
  LtiSystem sys = validate_system(file.a, file.b);
  SpectrumSpec spec = canonicalize_spectrum(file.poles, file.multiplicities, sys.n());
  return Problem{std::move(sys), std::move(spec), file.gain};
}

ObjectiveSpec objective_of(const CliConfig& config) {
  switch (config.objective) {
    case ObjectiveKind::KappaFro: return ObjectiveSpec::kappa_fro();
    case ObjectiveKind::SumSquares: return ObjectiveSpec::sum_squares();
    case ObjectiveKind::Weighted: return [&] {
      if (!config.alpha) throw Error(ErrorCode::InvalidArgument, "f3 needs --alpha");
      return ObjectiveSpec::weighted(*config.alpha);
    }();
  }
  return ObjectiveSpec::kappa_fro();
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Infeasible: return kExitInfeasible;
    case ErrorCode::BudgetExhaustedNoCandidate: return kExitBudget;
    default: return kExitMalformed;
  }
}

void emit(const CliConfig& config, const std::string& text, std::ostream& out) {
  if (config.out.empty()) {
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    return;
  }
  std::ofstream file(config.out);
  if (!file) throw Error(ErrorCode::MalformedFile, "cannot write " + config.out);
  file << text;
  if (!text.empty() && text.back() != '\n') file << '\n';
}

void print_metrics(const MetricBundle& m, std::ostream& out) {
  out << std::setprecision(8) << "kappa_fro = " << m.kappa_fro << "\nc_inf = " << m.c_inf
      << "\naccuracy = " << m.accuracy << "\ngain_fro = " << m.gain_fro << "\n";
}

std::string render(const BenchReport& report, const CliConfig& config) {
  switch (config.format) {
    case OutputFormat::Csv: return report_to_csv(report);
    case OutputFormat::Markdown: return report_to_markdown(report);
    case OutputFormat::Json: break;
  }
  return report_to_json(report, config.timing).dump(2);
}

void maybe_attach_baseline(BenchReport& report, const CliConfig& config) {
  if (!config.baseline.empty()) attach_baseline(report, read_baseline_csv(config.baseline));
}

}  // namespace

SearchConfig search_config(const CliConfig& config) {
  SearchConfig sc;
  sc.time_budget_seconds = config.budget_seconds;
  if (config.budget_restarts) {
    sc.max_restarts = *config.budget_restarts;
  } else if (config.budget_seconds > 0.0) {
    sc.max_restarts = std::numeric_limits<int>::max();
  }
  sc.rng_seed = config.seed;
  sc.seed_strategy = config.seeds;
  sc.gradient_mode = config.grad;
  return sc;
}

int cmd_place(const CliConfig& config, std::ostream& out, std::ostream& err) {
  std::optional<Problem> problem;
  try {
    problem = load_problem(config);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitMalformed;
  }
  const FeasibilityReport feas = assess_feasibility(problem->system, problem->spectrum);
  if (!feas.feasible) {
    for (const std::string& reason : feas.reasons) err << "infeasible: " << reason << "\n";
    return kExitInfeasible;
  }
  try {
    const ObjectiveSpec objective = objective_of(config);
    const SearchOutcome outcome = solve(problem->system, problem->spectrum, objective, search_config(config));
    const MetricBundle metrics = bundle_metrics(problem->system, outcome.best, problem->spectrum);
    print_metrics(metrics, out);

    json result = {{"A", matrix_to_json(problem->system.a())},
                   {"B", matrix_to_json(problem->system.b())},
                   {"poles", poles_to_json(problem->spectrum)},
                   {"F", matrix_to_json(outcome.best.gain)},
                   {"metrics", metrics_to_json(metrics)},
                   {"objective", {{"kind", to_string(objective.kind)}, {"alpha", objective.alpha}}},
                   {"best_objective", outcome.best_objective},
                   {"residual", outcome.best_residual},
                   {"trace",
                    {{"restarts_used", outcome.restarts_used},
                     {"rank_deficient_seeds", outcome.failures},
                     {"accepted", std::count_if(outcome.trace.begin(), outcome.trace.end(),
                                                [](const RestartTrace& t) { return t.accepted; })}}}};
    if (config.out.empty()) return kExitOk;
    switch (config.format) {
      case OutputFormat::Json:
        emit(config, result.dump(2), out);
        break;
      case OutputFormat::Csv: {
        std::ostringstream os;
        os << std::setprecision(17) << "kappa_fro,kappa_2,c_inf,accuracy,gain_fro\n"
           << metrics.kappa_fro << ',' << metrics.kappa_2 << ',' << metrics.c_inf << ',' << metrics.accuracy << ','
           << metrics.gain_fro << '\n';
        emit(config, os.str(), out);
        break;
      }
      case OutputFormat::Markdown: {
        std::ostringstream os;
        os << std::setprecision(6) << "| kappa_fro | kappa_2 | c_inf | accuracy | \\|F\\|_fro |\n|---|---|---|---|---|\n| "
           << metrics.kappa_fro << " | " << metrics.kappa_2 << " | " << metrics.c_inf << " | " << metrics.accuracy
           << " | " << metrics.gain_fro << " |\n";
        emit(config, os.str(), out);
        break;
      }
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

int cmd_check(const CliConfig& config, std::ostream& out, std::ostream& err) {
  std::optional<Problem> problem;
  try {
    problem = load_problem(config);
    if (!problem->gain) throw Error(ErrorCode::MalformedFile, "check needs a gain matrix \"F\"");
    if (problem->gain->rows() != problem->system.m() || problem->gain->cols() != problem->system.n()) {
      throw Error(ErrorCode::MalformedFile, "F must be m x n");
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitMalformed;
  }
  const GainAudit audit = audit_gain(problem->system, *problem->gain, problem->spectrum);
  print_metrics(audit.metrics, out);
  out << "max_relative_deviation = " << audit.max_relative_deviation << "\n";
  if (audit.deviation_flag) out << "FAIL: a closed-loop pole differs by more than 5% from its target\n";
  if (audit.gain_flag) out << "FAIL: gain undefined or above 1e10\n";
  if (!audit.failed()) out << "PASS\n";
  if (!config.out.empty()) {
    const json report = {{"metrics", metrics_to_json(audit.metrics)},
                         {"max_relative_deviation", audit.max_relative_deviation},
                         {"deviation_flag", audit.deviation_flag},
                         {"gain_flag", audit.gain_flag},
                         {"failed", audit.failed()}};
    emit(config, report.dump(2), out);
  }
  return audit.failed() ? kExitCheckFailed : kExitOk;
}

int cmd_bench_bn(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const std::string dir = config.input.empty() ? std::string(RPP_DATA_DIR) + "/byers_nash" : config.input;
    const std::vector<BenchCase> cases = load_byers_nash(dir);
    BenchReport report = run_suite("byers-nash", cases, objective_of(config), search_config(config));
    maybe_attach_baseline(report, config);
    emit(config, render(report, config), out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitMalformed;
  }
  return kExitOk;
}

int cmd_bench_random(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const int count = config.count > 0 ? config.count : 500;
    const std::vector<BenchCase> cases = gen_survey2(count, config.n, config.m, config.seed);
    BenchReport report = run_suite("survey2-n" + std::to_string(config.n) + "-m" + std::to_string(config.m), cases,
                                   objective_of(config), search_config(config));
    maybe_attach_baseline(report, config);
    emit(config, render(report, config), out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitMalformed;
  }
  return kExitOk;
}

int cmd_bench_uncontrollable(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const int count = config.count > 0 ? config.count : 100;
    const UncontrollableStats stats = run_uncontrollable_suite(count, config.seed, search_config(config));
    std::string text;
    switch (config.format) {
      case OutputFormat::Json: text = uncontrollable_to_json(stats, config.timing).dump(2); break;
      case OutputFormat::Csv: text = uncontrollable_to_csv(stats); break;
      case OutputFormat::Markdown: text = uncontrollable_to_markdown(stats); break;
    }
    emit(config, text, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitMalformed;
  }
  return kExitOk;
}

int cmd_mgrepp_sweep(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const int count = config.count > 0 ? config.count : 500;
    const std::vector<BenchCase> cases = gen_survey2(count, config.n, config.m, config.seed);
    std::vector<BenchReport> reports = run_mgrepp_sweep(cases, config.alphas, search_config(config));
    for (BenchReport& r : reports) maybe_attach_baseline(r, config);
    std::string text;
    switch (config.format) {
      case OutputFormat::Json: text = sweep_to_json(reports, config.timing).dump(2); break;
      case OutputFormat::Csv:
        for (const BenchReport& r : reports) text += "# " + r.suite + "\n" + report_to_csv(r);
        break;
      case OutputFormat::Markdown: text = sweep_to_markdown(reports); break;
    }
    emit(config, text, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitMalformed;
  }
  return kExitOk;
}

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.command) {
    case Command::Place: return cmd_place(config, out, err);
    case Command::Check: return cmd_check(config, out, err);
    case Command::BenchBn: return cmd_bench_bn(config, out, err);
    case Command::BenchRandom: return cmd_bench_random(config, out, err);
    case Command::BenchUncontrollable: return cmd_bench_uncontrollable(config, out, err);
    case Command::MgreppSweep: return cmd_mgrepp_sweep(config, out, err);
  }
  return kExitMalformed;
}

int main(int argc, char** argv) {
  CLI::App app{"Robust pole placement by state feedback"};
  app.require_subcommand(1, 1);
  CliConfig config;

  const std::map<std::string, ObjectiveKind> objectives{
      {"f1", ObjectiveKind::KappaFro}, {"f2", ObjectiveKind::SumSquares}, {"f3", ObjectiveKind::Weighted}};
  const std::map<std::string, GradientMode> grads{{"fd", GradientMode::FiniteDifference},
                                                  {"analytic", GradientMode::Analytic}};
  const std::map<std::string, OutputFormat> formats{
      {"json", OutputFormat::Json}, {"csv", OutputFormat::Csv}, {"markdown", OutputFormat::Markdown}};
  const std::map<std::string, SeedStrategy> seeds{{"canonical", SeedStrategy::CanonicalVectors},
                                                  {"gaussian", SeedStrategy::RandomGaussian},
                                                  {"mixed", SeedStrategy::Mixed}};
  double alpha = 0.0;

  auto add_search = [&](CLI::App* sub) {
    sub->add_option("--objective", config.objective, "f1 = kappa_fro, f2 = sum of squares, f3 = weighted")
        ->transform(CLI::CheckedTransformer(objectives));
    sub->add_option("--alpha", alpha, "weight of kappa_fro in f3")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--budget-seconds", config.budget_seconds, "wall-clock budget per problem");
    sub->add_option("--budget-restarts", config.budget_restarts, "restart budget per problem");
    sub->add_option("--seed", config.seed, "random seed");
    sub->add_option("--seeds", config.seeds, "seed schedule: canonical, gaussian or mixed")
        ->transform(CLI::CheckedTransformer(seeds));
    sub->add_option("--grad", config.grad, "gradient mode: fd or analytic")
        ->transform(CLI::CheckedTransformer(grads));
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", config.format, "json, csv or markdown")->transform(CLI::CheckedTransformer(formats));
    sub->add_option("--out", config.out, "output file (default: standard output)");
    sub->add_flag("--timing", config.timing, "include wall times in JSON reports");
  };

  CLI::App* place = app.add_subcommand("place", "compute a robust pole-placing gain");
  place->add_option("--input", config.input, "system file")->required();
  place->add_option("--poles", config.poles, "comma-separated poles, e.g. -1,-2+1i,-2-1i");
  add_search(place);
  add_output(place);

  CLI::App* check = app.add_subcommand("check", "audit a gain matrix stored in a system file");
  check->add_option("--input", config.input, "system file with \"F\"")->required();
  check->add_option("--poles", config.poles, "comma-separated poles overriding the file");
  add_output(check);

  CLI::App* bench_bn = app.add_subcommand("bench-bn", "run the Byers-Nash benchmark collection");
  bench_bn->add_option("--input", config.input, "directory with bn01.json .. bn11.json");
  bench_bn->add_option("--baseline", config.baseline, "CSV of external results for improvement indices");
  add_search(bench_bn);
  add_output(bench_bn);

  CLI::App* bench_random = app.add_subcommand("bench-random", "run a random high-dimensional suite");
  bench_random->add_option("--count", config.count, "number of systems (default 500)");
  bench_random->add_option("--n", config.n, "state dimension");
  bench_random->add_option("--m", config.m, "input dimension");
  bench_random->add_option("--baseline", config.baseline, "CSV of external results for improvement indices");
  add_search(bench_random);
  add_output(bench_random);

  CLI::App* bench_unc = app.add_subcommand("bench-uncontrollable", "run the uncontrollable-mode reliability suite");
  bench_unc->add_option("--count", config.count, "number of systems (default 100)");
  add_search(bench_unc);
  add_output(bench_unc);

  CLI::App* sweep = app.add_subcommand("mgrepp-sweep", "weighted objective over several alphas");
  sweep->add_option("--alphas", config.alphas, "weights to run")->delimiter(',');
  sweep->add_option("--count", config.count, "number of systems (default 500)");
  sweep->add_option("--n", config.n, "state dimension");
  sweep->add_option("--m", config.m, "input dimension");
  sweep->add_option("--baseline", config.baseline, "CSV of external results for improvement indices");
  add_search(sweep);
  add_output(sweep);

  try {
    app.parse(argc, argv);
    for (CLI::App* sub : {place, bench_bn, bench_random, bench_unc, sweep}) {
      if (sub->parsed() && sub->count("--alpha") > 0) {
        if (config.objective != ObjectiveKind::Weighted) throw CLI::ValidationError("--alpha", "only valid with --objective f3");
        config.alpha = alpha;
      }
      if (sub->parsed() && config.objective == ObjectiveKind::Weighted && sub != sweep && !config.alpha) {
        throw CLI::ValidationError("--objective", "f3 requires --alpha");
      }
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (place->parsed()) config.command = Command::Place;
  if (check->parsed()) config.command = Command::Check;
  if (bench_bn->parsed()) config.command = Command::BenchBn;
  if (bench_random->parsed()) config.command = Command::BenchRandom;
  if (bench_unc->parsed()) config.command = Command::BenchUncontrollable;
  if (sweep->parsed()) config.command = Command::MgreppSweep;
  return run(config, std::cout, std::cerr);
}

}  // namespace rpp::cli
