#include "rpp/bench_harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "rpp/error.hpp"
#include "rpp/moore_parametric.hpp"
#include "rpp/system_io.hpp"

namespace rpp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string numbered(const std::string& prefix, int k, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*d", width, k);
  return prefix + buf;
}

Eigen::MatrixXd uniform_matrix(int rows, int cols, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
  }
  return m;
}

double dyadic(double x, double denominator) { return std::round(x * denominator) / denominator; }

}  // namespace

std::string to_string(CaseSource source) {
  switch (source) {
    case CaseSource::ByersNashFile: return "byers-nash";
    case CaseSource::RandomSurvey2: return "random-survey2";
    case CaseSource::RandomUncontrollable: return "random-uncontrollable";
  }
  return "?";
}

std::vector<BenchCase> load_byers_nash(const std::filesystem::path& dir) {
  std::vector<BenchCase> cases;
  for (int k = 1; k <= kByersNashCaseCount; ++k) {
    const std::string id = numbered("bn", k, 2);
    const std::filesystem::path path = dir / (id + ".json");
    if (!std::filesystem::exists(path)) throw Error(ErrorCode::MissingCase, path.string() + " not found");
    const SystemFile file = read_system_file(path);
    if (file.checksum.empty()) throw Error(ErrorCode::MalformedFile, path.string() + " has no checksum");
    if (file.checksum != content_checksum(file)) {
      throw Error(ErrorCode::MalformedFile, path.string() + " does not match its checksum");
    }
    try {
      LtiSystem sys = validate_system(file.a, file.b);
      SpectrumSpec spec = canonicalize_spectrum(file.poles, file.multiplicities, sys.n());
      cases.push_back(BenchCase{id, std::move(sys), std::move(spec), CaseSource::ByersNashFile});
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
    }
  }
  return cases;
}

std::vector<BenchCase> gen_survey2(int count, int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1 || m > n) throw Error(ErrorCode::InvalidArgument, "need 1 <= m <= n");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int pairs = std::min((n + 3) / 4, n / 2);
  const double min_gap = 1e-3;

  std::vector<BenchCase> cases;
  cases.reserve(count);
  for (int c = 0; c < count; ++c) {
    const Eigen::MatrixXd a = uniform_matrix(n, n, -2.0, 2.0, rng);
    Eigen::MatrixXd b = uniform_matrix(n, m, -2.0, 2.0, rng);

    std::vector<Complex> poles;
    auto distinct = [&](Complex z) {
      for (Complex p : poles) {
        if (std::abs(p - z) < min_gap) return false;
      }
      return true;
    };
    while (static_cast<int>(poles.size()) < 2 * pairs) {
      const double re = u(rng);
      const double im = std::abs(u(rng));
      if (im < min_gap) continue;
      const Complex z(re, im);
      if (!distinct(z) || !distinct(std::conj(z))) continue;
      poles.push_back(z);
      poles.push_back(std::conj(z));
    }
    while (static_cast<int>(poles.size()) < n) {
      const Complex z(u(rng), 0.0);
      if (distinct(z)) poles.push_back(z);
    }
    LtiSystem sys = validate_system(a, b);
    SpectrumSpec spec = canonicalize_spectrum(poles, {}, n);
    cases.push_back(BenchCase{numbered("s2-n" + std::to_string(n) + "-m" + std::to_string(m) + "-", c + 1, 3),
                              std::move(sys), std::move(spec), CaseSource::RandomSurvey2});
  }
  return cases;
}

double improvement_indices(std::span<const double> ours, std::span<const double> baseline) {
  if (ours.size() != baseline.size()) throw Error(ErrorCode::DimensionMismatch, "value lists differ in length");
  if (ours.empty()) throw Error(ErrorCode::InvalidArgument, "no values");
  double log_sum = 0.0;
  for (std::size_t j = 0; j < ours.size(); ++j) {
    if (!(ours[j] > 0.0) || !(baseline[j] > 0.0) || !std::isfinite(ours[j]) || !std::isfinite(baseline[j])) {
      throw Error(ErrorCode::NonPositiveValue, "index needs finite positive values (entry " + std::to_string(j) + ")");
    }
    log_sum += std::log(ours[j]) - std::log(baseline[j]);
  }
  return 1.0 - std::exp(log_sum / static_cast<double>(ours.size()));
}

Baseline read_baseline_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedFile, "empty baseline file");
  if (line.rfind("case_id,kappa_fro,c_inf,accuracy,gain_fro", 0) != 0) {
    throw Error(ErrorCode::MalformedFile, "baseline header must be case_id,kappa_fro,c_inf,accuracy,gain_fro");
  }
  Baseline out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> fields;
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 5) {
      throw Error(ErrorCode::MalformedFile, "baseline line " + std::to_string(line_no) + " needs 5 fields");
    }
    try {
      out[fields[0]] = BaselineRow{std::stod(fields[1]), std::stod(fields[2]), std::stod(fields[3]),
                                   std::stod(fields[4])};
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::MalformedFile, "baseline line " + std::to_string(line_no) + " is not numeric");
    }
  }
  return out;
}

BenchReport run_suite(const std::string& suite, const std::vector<BenchCase>& cases, const ObjectiveSpec& objective,
                      const SearchConfig& config) {
  BenchReport report;
  report.suite = suite;
  report.objective = objective;
  report.config = config;
  for (const BenchCase& bc : cases) {
    CaseResult r;
    r.id = bc.id;
    r.n = bc.system.n();
    r.m = bc.system.m();
    const auto start = Clock::now();
    try {
      SearchOutcome outcome = solve(bc.system, bc.spectrum, objective, config);
      r.metrics = bundle_metrics(bc.system, outcome.best, bc.spectrum);
      r.gain = outcome.best.gain;
      r.best_objective = outcome.best_objective;
      r.residual = outcome.best_residual;
      r.restarts_used = outcome.restarts_used;
      r.failures = outcome.failures;
      r.trace = std::move(outcome.trace);
      r.ok = true;
    } catch (const Error& e) {
      r.error = e.what();
    }
    r.runtime_seconds = seconds_since(start);
    report.per_case.push_back(std::move(r));
  }
  return report;
}

void attach_baseline(BenchReport& report, const Baseline& baseline) {
  report.baseline = baseline;
  report.indices.reset();
  std::vector<double> ours[4], theirs[4];
  for (const CaseResult& r : report.per_case) {
    if (!r.ok) return;
    const auto it = baseline.find(r.id);
    if (it == baseline.end()) return;
    const double mine[4] = {r.metrics.kappa_fro, r.metrics.c_inf, r.metrics.accuracy, r.metrics.gain_fro};
    const double other[4] = {it->second.kappa_fro, it->second.c_inf, it->second.accuracy, it->second.gain_fro};
    for (int k = 0; k < 4; ++k) {
      ours[k].push_back(mine[k]);
      theirs[k].push_back(other[k]);
    }
  }
  if (report.per_case.empty()) return;
  auto index = [&](int k) -> std::optional<double> {
    try {
      return improvement_indices(ours[k], theirs[k]);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  report.indices = ImprovementIndices{index(0), index(1), index(2), index(3)};
}

std::vector<BenchReport> run_mgrepp_sweep(const std::vector<BenchCase>& cases, const std::vector<double>& alphas,
                                          const SearchConfig& config) {
  std::vector<BenchReport> out;
  for (double alpha : alphas) {
    char name[64];
    std::snprintf(name, sizeof name, "mgrepp-alpha-%g", alpha);
    out.push_back(run_suite(name, cases, ObjectiveSpec::weighted(alpha), config));
  }
  return out;
}

GainAudit audit_gain(const LtiSystem& sys, const Eigen::MatrixXd& gain, const SpectrumSpec& spec) {
  GainAudit audit;
  audit.metrics = audit_metrics(sys, gain, spec);
  audit.gain_flag = !std::isfinite(audit.metrics.gain_fro) || audit.metrics.gain_fro > kGainLimit;
  if (!gain.allFinite()) {
    audit.gain_flag = true;
    audit.deviation_flag = true;
    audit.max_relative_deviation = std::numeric_limits<double>::infinity();
    return audit;
  }
  const Eigen::VectorXcd target = spec.expanded();
  const Eigen::VectorXcd matched = matched_closed_loop_eigenvalues(sys, gain, spec);
  for (Eigen::Index j = 0; j < target.size(); ++j) {
    const double scale = std::abs(target(j)) > 0.0 ? std::abs(target(j)) : 1.0;
    audit.max_relative_deviation = std::max(audit.max_relative_deviation, std::abs(matched(j) - target(j)) / scale);
  }
  audit.deviation_flag = !(audit.max_relative_deviation <= kDeviationLimit);
  return audit;
}

std::vector<UncontrollableCase> gen_uncontrollable(int count, std::uint64_t seed) {
  constexpr int n = 3;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<UncontrollableCase> out;
  out.reserve(count);
  for (int c = 0; c < count; ++c) {
    Eigen::Matrix2d ac, b1;
    double lambda_u = 0.0;
    while (true) {
      for (int k = 0; k < 4; ++k) ac.data()[k] = dyadic(u(rng), 16.0);
      for (int k = 0; k < 4; ++k) b1.data()[k] = dyadic(u(rng), 16.0);
      lambda_u = dyadic(u(rng), 16.0);
      const double shifted_det = (ac - lambda_u * Eigen::Matrix2d::Identity()).determinant();
      if (std::abs(b1.determinant()) >= 0.25 && std::abs(lambda_u) >= 0.25 && std::abs(shifted_det) >= 0.1) break;
    }
    Eigen::Matrix3d a_dec = Eigen::Matrix3d::Zero();
    a_dec.topLeftCorner<2, 2>() = ac;
    a_dec(2, 2) = lambda_u;
    Eigen::Matrix<double, 3, 2> b_dec = Eigen::Matrix<double, 3, 2>::Zero();
    b_dec.topRows<2>() = b1;

    // Unit-triangular factors with dyadic entries invert exactly.
    Eigen::Matrix3d lower, upper, sim, sim_inv;
    while (true) {
      lower.setIdentity();
      upper.setIdentity();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
          lower(i, j) = dyadic(unit(rng), 4.0);
          upper(j, i) = dyadic(unit(rng), 4.0);
        }
      }
      sim = lower * upper;
      Eigen::JacobiSVD<Eigen::Matrix3d> svd(sim);
      const auto sv = svd.singularValues();
      if (sv(0) / sv(2) <= 10.0) break;
    }
    sim_inv = upper.triangularView<Eigen::UnitUpper>().solve(
        lower.triangularView<Eigen::UnitLower>().solve(Eigen::Matrix3d::Identity()));

    const Eigen::MatrixXd a = sim * a_dec * sim_inv;
    const Eigen::MatrixXd b = sim * b_dec;

    Complex pair(0.0, 0.0);
    while (true) {
      pair = Complex(u(rng), std::abs(u(rng)));
      if (pair.imag() >= 0.1 && std::abs(pair - lambda_u) > 1e-3) break;
    }
    LtiSystem sys = validate_system(a, b);
    SpectrumSpec spec = canonicalize_spectrum({pair, std::conj(pair), Complex(lambda_u, 0.0)}, {}, n);
    out.push_back(UncontrollableCase{
        BenchCase{numbered("unc-", c + 1, 3), std::move(sys), std::move(spec), CaseSource::RandomUncontrollable},
        Complex(lambda_u, 0.0)});
  }
  return out;
}

UncontrollableStats run_uncontrollable_suite(int count, std::uint64_t seed, const SearchConfig& config) {
  UncontrollableStats stats;
  for (const UncontrollableCase& uc : gen_uncontrollable(count, seed)) {
    const BenchCase& bc = uc.bench_case;
    UncontrollableRecord rec;
    rec.id = bc.id;
    rec.uncontrollable_mode = uc.uncontrollable_mode;
    rec.nullspace_dim = nullspace_basis(bc.system, uc.uncontrollable_mode).dim;
    const auto start = Clock::now();
    const FeasibilityReport feas = assess_feasibility(bc.system, bc.spectrum);
    rec.feasible = feas.feasible;
    if (!feas.feasible) {
      rec.failed = true;
      rec.reason = "infeasible";
    } else {
      try {
        const SearchOutcome outcome = solve(bc.system, bc.spectrum, ObjectiveSpec::kappa_fro(), config);
        const GainAudit audit = audit_gain(bc.system, outcome.best.gain, bc.spectrum);
        rec.metrics = bundle_metrics(bc.system, outcome.best, bc.spectrum);
        rec.max_relative_deviation = audit.max_relative_deviation;
        rec.gain_fro = audit.metrics.gain_fro;
        Eigen::EigenSolver<Eigen::MatrixXd> eig(bc.system.a() + bc.system.b() * outcome.best.gain, false);
        const Eigen::VectorXcd mu = eig.eigenvalues();
        for (Eigen::Index k = 0; k < mu.size(); ++k) {
          if (std::abs(mu(k) - uc.uncontrollable_mode) <= 1e-6 * std::max(1.0, std::abs(uc.uncontrollable_mode))) {
            rec.mode_retained = true;
          }
        }
        if (audit.deviation_flag) {
          rec.failed = true;
          rec.reason = "pole deviation above 5%";
        } else if (audit.gain_flag) {
          rec.failed = true;
          rec.reason = "gain undefined or above 1e10";
        }
      } catch (const Error& e) {
        rec.failed = true;
        rec.reason = e.what();
      }
    }
    rec.runtime_seconds = seconds_since(start);
    if (rec.failed) ++stats.failures;
    stats.records.push_back(std::move(rec));
  }
  return stats;
}

}  // namespace rpp
