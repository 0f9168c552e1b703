#include "rpp/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rpp/system_io.hpp"

namespace rpp {

using nlohmann::json;

namespace {

std::string fmt(double x, const char* spec = "%.5g") {
  if (std::isnan(x)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string percent(const std::optional<double>& x) { return x ? fmt(100.0 * *x, "%.3f") : "n/a"; }

json index_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json config_to_json(const SearchConfig& c) {
  return {{"time_budget_seconds", c.time_budget_seconds}, {"max_restarts", c.max_restarts},
          {"seed_strategy", to_string(c.seed_strategy)},  {"rng_seed", c.rng_seed},
          {"gradient_mode", to_string(c.gradient_mode)},  {"max_iterations", c.max_iterations},
          {"quasi_newton", c.quasi_newton}};
}

json summary_to_json(const ReportSummary& s) {
  return {{"cases", s.cases},         {"solved", s.solved},     {"geomean_kappa_fro", s.kappa_fro},
          {"geomean_c_inf", s.c_inf}, {"geomean_accuracy", s.accuracy}, {"geomean_gain_fro", s.gain_fro}};
}

}  // namespace

double geometric_mean(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double log_sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
    log_sum += std::log(v);
  }
  return std::exp(log_sum / static_cast<double>(values.size()));
}

ReportSummary summarize(const BenchReport& report) {
  ReportSummary s;
  std::vector<double> k, c, a, g;
  for (const CaseResult& r : report.per_case) {
    ++s.cases;
    if (!r.ok) continue;
    ++s.solved;
    k.push_back(r.metrics.kappa_fro);
    c.push_back(r.metrics.c_inf);
    a.push_back(r.metrics.accuracy);
    g.push_back(r.metrics.gain_fro);
  }
  s.kappa_fro = geometric_mean(k);
  s.c_inf = geometric_mean(c);
  s.accuracy = geometric_mean(a);
  s.gain_fro = geometric_mean(g);
  return s;
}

json metrics_to_json(const MetricBundle& m) {
  return {{"kappa_fro", m.kappa_fro},
          {"kappa_2", m.kappa_2},
          {"c_inf", m.c_inf},
          {"c_per_eig", m.c_per_eig},
          {"accuracy", m.accuracy},
          {"gain_fro", m.gain_fro},
          {"singular_x", m.singular_x},
          {"defective", m.defective},
          {"repeated_eigenvalues", m.repeated_eigenvalues}};
}

json report_to_json(const BenchReport& report, bool include_timing) {
  json cases = json::array();
  for (const CaseResult& r : report.per_case) {
    json jc = {{"id", r.id}, {"n", r.n}, {"m", r.m}, {"ok", r.ok}};
    if (!r.ok) {
      jc["error"] = r.error;
    } else {
      jc["metrics"] = metrics_to_json(r.metrics);
      jc["F"] = matrix_to_json(r.gain);
      jc["best_objective"] = r.best_objective;
      jc["residual"] = r.residual;
      jc["restarts_used"] = r.restarts_used;
      jc["rank_deficient_seeds"] = r.failures;
      json trace = json::array();
      for (const RestartTrace& t : r.trace) {
        trace.push_back({{"restart", t.restart},
                         {"seed", t.seed_id},
                         {"initial_objective", t.initial_objective},
                         {"final_objective", t.final_objective},
                         {"iterations", t.iterations},
                         {"rank_deficient", t.rank_deficient},
                         {"accepted", t.accepted}});
      }
      jc["trace"] = std::move(trace);
    }
    if (include_timing) jc["runtime_seconds"] = r.runtime_seconds;
    cases.push_back(std::move(jc));
  }
  json out = {{"suite", report.suite},
              {"objective", {{"kind", to_string(report.objective.kind)}, {"alpha", report.objective.alpha}}},
              {"config", config_to_json(report.config)},
              {"cases", std::move(cases)},
              {"summary", summary_to_json(summarize(report))}};
  if (report.indices) {
    out["indices"] = {{"kappa_fro", index_json(report.indices->kappa_fro)},
                      {"c_inf", index_json(report.indices->c_inf)},
                      {"accuracy", index_json(report.indices->accuracy)},
                      {"gain_fro", index_json(report.indices->gain_fro)}};
  }
  return out;
}

std::string report_to_csv(const BenchReport& report) {
  std::ostringstream os;
  os << "case_id,n,m,kappa_fro,kappa_2,c_inf,accuracy,gain_fro,best_objective,restarts,runtime_s\n";
  for (const CaseResult& r : report.per_case) {
    os << r.id << ',' << r.n << ',' << r.m << ',';
    if (r.ok) {
      os << fmt(r.metrics.kappa_fro, "%.17g") << ',' << fmt(r.metrics.kappa_2, "%.17g") << ','
         << fmt(r.metrics.c_inf, "%.17g") << ',' << fmt(r.metrics.accuracy, "%.17g") << ','
         << fmt(r.metrics.gain_fro, "%.17g") << ',' << fmt(r.best_objective, "%.17g") << ',' << r.restarts_used;
    } else {
      os << ",,,,,," << r.restarts_used;
    }
    os << ',' << fmt(r.runtime_seconds, "%.3f") << '\n';
  }
  return os.str();
}

std::string report_to_markdown(const BenchReport& report) {
  std::ostringstream os;
  os << "## " << report.suite << " (" << to_string(report.objective.kind);
  if (report.objective.kind == ObjectiveKind::Weighted) os << ", alpha = " << fmt(report.objective.alpha);
  os << ")\n\n";
  os << "| Case | n | m | kappa_fro(X) | c_inf | accuracy | \\|F\\|_fro |\n";
  os << "|---|---|---|---|---|---|---|\n";
  for (const CaseResult& r : report.per_case) {
    os << "| " << r.id << " | " << r.n << " | " << r.m << " | ";
    if (r.ok) {
      os << fmt(r.metrics.kappa_fro) << " | " << fmt(r.metrics.c_inf) << " | " << fmt(r.metrics.accuracy, "%.3e")
         << " | " << fmt(r.metrics.gain_fro) << " |\n";
    } else {
      os << "failed | | | |\n";
    }
  }
  const ReportSummary s = summarize(report);
  os << "\nGeometric means over " << s.solved << "/" << s.cases << " solved cases: kappa_fro " << fmt(s.kappa_fro)
     << ", c_inf " << fmt(s.c_inf) << ", accuracy " << fmt(s.accuracy, "%.3e") << ", |F|_fro " << fmt(s.gain_fro)
     << "\n";
  if (report.indices) {
    os << "\n| Metric | Improvement index (%) |\n|---|---|\n";
    os << "| kappa_fro(X) | " << percent(report.indices->kappa_fro) << " |\n";
    os << "| c_inf | " << percent(report.indices->c_inf) << " |\n";
    os << "| \\|F\\|_fro | " << percent(report.indices->gain_fro) << " |\n";
    os << "| Accuracy | " << percent(report.indices->accuracy) << " |\n";
  }
  return os.str();
}

std::string sweep_to_markdown(const std::vector<BenchReport>& reports) {
  std::ostringstream os;
  const bool indexed = !reports.empty() && std::all_of(reports.begin(), reports.end(),
                                                       [](const BenchReport& r) { return r.indices.has_value(); });
  os << "| Metric |";
  for (const BenchReport& r : reports) os << " alpha = " << fmt(r.objective.alpha) << " |";
  os << "\n|---|";
  for (std::size_t k = 0; k < reports.size(); ++k) os << "---|";
  os << "\n";
  const char* names[4] = {"kappa_fro(X)", "c_inf", "\\|F\\|_fro", "Accuracy"};
  for (int row = 0; row < 4; ++row) {
    os << "| " << names[row] << (indexed ? " (%)" : " (geomean)") << " |";
    for (const BenchReport& r : reports) {
      if (indexed) {
        const std::optional<double> v[4] = {r.indices->kappa_fro, r.indices->c_inf, r.indices->gain_fro,
                                            r.indices->accuracy};
        os << ' ' << percent(v[row]) << " |";
      } else {
        const ReportSummary s = summarize(r);
        const double v[4] = {s.kappa_fro, s.c_inf, s.gain_fro, s.accuracy};
        os << ' ' << fmt(v[row]) << " |";
      }
    }
    os << "\n";
  }
  return os.str();
}

json sweep_to_json(const std::vector<BenchReport>& reports, bool include_timing) {
  json runs = json::array();
  for (const BenchReport& r : reports) runs.push_back(report_to_json(r, include_timing));
  return {{"suite", "mgrepp-sweep"}, {"runs", std::move(runs)}};
}

json uncontrollable_to_json(const UncontrollableStats& stats, bool include_timing) {
  json records = json::array();
  for (const UncontrollableRecord& r : stats.records) {
    json jr = {{"id", r.id},
               {"uncontrollable_mode", r.uncontrollable_mode.real()},
               {"nullspace_dim", r.nullspace_dim},
               {"feasible", r.feasible},
               {"failed", r.failed},
               {"reason", r.reason},
               {"max_relative_deviation", r.max_relative_deviation},
               {"gain_fro", r.gain_fro},
               {"mode_retained", r.mode_retained},
               {"metrics", metrics_to_json(r.metrics)}};
    if (include_timing) jr["runtime_seconds"] = r.runtime_seconds;
    records.push_back(std::move(jr));
  }
  return {{"suite", "uncontrollable"}, {"failures", stats.failures}, {"records", std::move(records)}};
}

std::string uncontrollable_to_csv(const UncontrollableStats& stats) {
  std::ostringstream os;
  os << "case_id,uncontrollable_mode,nullspace_dim,failed,max_relative_deviation,gain_fro,mode_retained,reason\n";
  for (const UncontrollableRecord& r : stats.records) {
    os << r.id << ',' << fmt(r.uncontrollable_mode.real(), "%.17g") << ',' << r.nullspace_dim << ','
       << (r.failed ? 1 : 0) << ',' << fmt(r.max_relative_deviation, "%.17g") << ',' << fmt(r.gain_fro, "%.17g")
       << ',' << (r.mode_retained ? 1 : 0) << ',' << r.reason << '\n';
  }
  return os.str();
}

std::string uncontrollable_to_markdown(const UncontrollableStats& stats) {
  std::ostringstream os;
  os << "## Uncontrollable-mode suite\n\n" << stats.records.size() << " systems, " << stats.failures
     << " failures (pole deviation > 5%, gain > 1e10, or solver error).\n";
  if (stats.failures > 0) {
    os << "\n| Case | Reason |\n|---|---|\n";
    for (const UncontrollableRecord& r : stats.records) {
      if (r.failed) os << "| " << r.id << " | " << r.reason << " |\n";
    }
  }
  return os.str();
}

}  // namespace rpp
