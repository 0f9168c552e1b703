#include "rpp/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "rpp/conditioning.hpp"
#include "rpp/error.hpp"

namespace rpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Clock = std::chrono::steady_clock;

// Value (and optionally gradient) of f1/f2/f3 as a function of the flat
// parameter vector. Both come from one LU of the normalized X and, for f3,
// one LU of V.
class PlacementObjective {
 public:
  PlacementObjective(const NullspaceFamily& family, const ParameterLayout& layout, ObjectiveSpec objective)
      : family_(family), layout_(layout), objective_(objective) {}

  double operator()(const Eigen::VectorXd& k, Eigen::VectorXd* grad) const;

 private:
  bool needs_gain() const { return objective_.kind == ObjectiveKind::Weighted && objective_.alpha < 1.0; }
  bool needs_kappa() const { return objective_.kind != ObjectiveKind::Weighted || objective_.alpha > 0.0; }

  const NullspaceFamily& family_;
  const ParameterLayout& layout_;
  ObjectiveSpec objective_;
};

Eigen::MatrixXcd slot_block(const ParameterLayout::Slot& slot, const Eigen::VectorXd& k) {
  const int count = slot.rows * slot.cols;
  Eigen::MatrixXcd block(slot.rows, slot.cols);
  const Eigen::Map<const Eigen::MatrixXd> re(k.data() + slot.offset, slot.rows, slot.cols);
  if (slot.complex) {
    const Eigen::Map<const Eigen::MatrixXd> im(k.data() + slot.offset + count, slot.rows, slot.cols);
    block.real() = re;
    block.imag() = im;
  } else {
    block.real() = re;
    block.imag().setZero();
  }
  return block;
}

double PlacementObjective::operator()(const Eigen::VectorXd& k, Eigen::VectorXd* grad) const {
  const SpectrumSpec& spec = family_.spectrum();
  const int n = family_.n();
  const int m = family_.m();
  const int rows = n + m;

  Eigen::MatrixXcd mk(rows, n);
  for (const auto& slot : layout_.slots()) {
    const int i = slot.spectrum_index;
    const Eigen::MatrixXcd mi = family_.bases()[i] * slot_block(slot, k);
    mk.middleCols(spec.column_offset(i), slot.cols) = mi;
    if (slot.complex) mk.middleCols(spec.column_offset(i + 1), slot.cols) = mi.conjugate();
  }

  const Eigen::VectorXd norms = mk.topRows(n).colwise().norm().transpose();
  if (!(norms.minCoeff() > 0.0) || !norms.allFinite()) return kInf;
  const Eigen::MatrixXcd xh = mk.topRows(n) * norms.cwiseInverse().asDiagonal();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(xh);
  if (!(lu.rcond() > n * std::numeric_limits<double>::epsilon())) return kInf;
  const Eigen::MatrixXcd z = lu.inverse();
  const double g = z.squaredNorm();
  const double kappa = std::sqrt(n * g);

  Eigen::MatrixXd vinv, gain;
  double gain_norm = 0.0;
  if (needs_gain()) {
    Eigen::MatrixXd re(rows, n);
    for (const auto& slot : layout_.slots()) {
      const int c0 = spec.column_offset(slot.spectrum_index);
      if (slot.complex) {
        const int c1 = spec.column_offset(slot.spectrum_index + 1);
        re.middleCols(c0, slot.cols) = mk.middleCols(c0, slot.cols).real();
        re.middleCols(c1, slot.cols) = mk.middleCols(c0, slot.cols).imag();
      } else {
        re.middleCols(c0, slot.cols) = mk.middleCols(c0, slot.cols).real();
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lv(re.topRows(n));
    if (!(lv.rcond() > n * std::numeric_limits<double>::epsilon())) return kInf;
    vinv = lv.inverse();
    gain = re.bottomRows(m) * vinv;
    gain_norm = gain.norm();
  }

  double value = 0.0;
  double dg_weight = 0.0;  // d value / d g, g = |X^-1|_F^2
  double dh_weight = 0.0;  // d value / d |F|_F
  switch (objective_.kind) {
    case ObjectiveKind::KappaFro:
      value = kappa;
      dg_weight = n / (2.0 * kappa);
      break;
    case ObjectiveKind::SumSquares:
      value = n + g;
      dg_weight = 1.0;
      break;
    case ObjectiveKind::Weighted: {
      const double a = objective_.alpha;
      if (a == 1.0) {
        value = kappa;
        dg_weight = n / (2.0 * kappa);
      } else if (a == 0.0) {
        value = gain_norm;
        dh_weight = 1.0;
      } else {
        value = a * kappa + (1.0 - a) * gain_norm;
        dg_weight = a * n / (2.0 * kappa);
        dh_weight = 1.0 - a;
      }
      break;
    }
  }
  if (!std::isfinite(value)) return kInf;
  if (grad == nullptr) return value;

  // d g = Re <G, d Xh> with G = -2 Z^H Z Z^H; then undo the column scaling.
  Eigen::MatrixXcd gx = Eigen::MatrixXcd::Zero(n, n);
  if (dg_weight != 0.0) {
    const Eigen::MatrixXcd zh = z.adjoint();
    const Eigen::MatrixXcd gxh = (-2.0 * dg_weight) * (zh * (z * zh));
    for (int j = 0; j < n; ++j) {
      const Complex proj = xh.col(j).dot(gxh.col(j));
      gx.col(j) = (gxh.col(j) - proj.real() * xh.col(j)) / norms(j);
    }
  }
  // d|F| = <H, dW> - <F^T H, dV> over |F|, H = F V^-T.
  Eigen::MatrixXd gy;
  const bool gain_term = dh_weight != 0.0 && gain_norm > 0.0;
  if (gain_term) {
    const Eigen::MatrixXd h = gain * vinv.transpose();
    gy.resize(rows, n);
    gy.topRows(n) = -(dh_weight / gain_norm) * (gain.transpose() * h);
    gy.bottomRows(m) = (dh_weight / gain_norm) * h;
  }

  grad->resize(layout_.size());
  const Complex j_unit(0.0, 1.0);
  for (const auto& slot : layout_.slots()) {
    const int i = slot.spectrum_index;
    const int c0 = spec.column_offset(i);
    Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Zero(rows, slot.cols);
    gamma.topRows(n) += gx.middleCols(c0, slot.cols);
    if (slot.complex) {
      const int c1 = spec.column_offset(i + 1);
      gamma.topRows(n) += gx.middleCols(c1, slot.cols).conjugate();
      if (gain_term) {
        gamma += gy.middleCols(c0, slot.cols).cast<Complex>();
        gamma += j_unit * gy.middleCols(c1, slot.cols).cast<Complex>();
      }
    } else if (gain_term) {
      gamma += gy.middleCols(c0, slot.cols).cast<Complex>();
    }
    const Eigen::MatrixXcd q = family_.bases()[i].adjoint() * gamma;
    const int count = slot.rows * slot.cols;
    Eigen::Map<Eigen::MatrixXd>(grad->data() + slot.offset, slot.rows, slot.cols) = q.real();
    if (slot.complex) {
      Eigen::Map<Eigen::MatrixXd>(grad->data() + slot.offset + count, slot.rows, slot.cols) = q.imag();
    }
  }
  return value;
}

Eigen::VectorXd central_difference(const PlacementObjective& f, const Eigen::VectorXd& k) {
  Eigen::VectorXd grad(k.size());
  Eigen::VectorXd probe = k;
  for (Eigen::Index j = 0; j < k.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(k(j)));
    probe(j) = k(j) + h;
    const double up = f(probe, nullptr);
    probe(j) = k(j) - h;
    const double down = f(probe, nullptr);
    probe(j) = k(j);
    grad(j) = (up - down) / (2.0 * h);
  }
  return grad;
}

double value_and_gradient(const PlacementObjective& f, const Eigen::VectorXd& k, GradientMode mode,
                          Eigen::VectorXd& grad) {
  if (mode == GradientMode::Analytic) return f(k, &grad);
  const double value = f(k, nullptr);
  if (std::isfinite(value)) grad = central_difference(f, k);
  return value;
}

struct DescentResult {
  Eigen::VectorXd k;
  double value = kInf;
  int iterations = 0;
  std::vector<double> history;
};

DescentResult descend(const PlacementObjective& f, Eigen::VectorXd k, const SearchConfig& config,
                      std::optional<Clock::time_point> deadline) {
  DescentResult out;
  const Eigen::Index p = k.size();
  Eigen::VectorXd g;
  double value = value_and_gradient(f, k, config.gradient_mode, g);
  out.history.push_back(value);
  if (!std::isfinite(value) || p == 0) {
    out.k = std::move(k);
    out.value = value;
    return out;
  }

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(p, p);
  bool fresh = true;
  int stalls = 0;
  int it = 0;
  while (it < config.max_iterations) {
    if (deadline && Clock::now() > *deadline) break;
    const double gnorm = g.norm();
    if (!(gnorm > config.gradient_tolerance * (1.0 + std::abs(value)))) break;

    Eigen::VectorXd d = config.quasi_newton ? Eigen::VectorXd(-(hinv * g)) : Eigen::VectorXd(-g);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      fresh = true;
      d = -g;
      slope = -gnorm * gnorm;
    }
    double t = 1.0;
    if (fresh) {
      const double cap = 0.1 * std::max(1.0, k.norm());
      if (d.norm() > cap) t = cap / d.norm();
    }

    Eigen::VectorXd k_next;
    Eigen::VectorXd g_next;
    double v_next = kInf;
    bool accepted = false;
    while (t * d.norm() > 1e-16 * (1.0 + k.norm())) {
      k_next = k + t * d;
      if (config.gradient_mode == GradientMode::Analytic) {
        v_next = f(k_next, &g_next);
      } else {
        v_next = f(k_next, nullptr);
      }
      if (std::isfinite(v_next) && v_next <= value + config.armijo_c * t * slope) {
        accepted = true;
        break;
      }
      t *= config.backtrack_shrink;
    }
    if (!accepted) {
      if (fresh || !config.quasi_newton) break;
      hinv.setIdentity();
      fresh = true;
      continue;
    }
    if (config.gradient_mode == GradientMode::FiniteDifference) g_next = central_difference(f, k_next);

    const Eigen::VectorXd s = k_next - k;
    const Eigen::VectorXd y = g_next - g;
    const double sy = s.dot(y);
    if (config.quasi_newton && sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) hinv = (sy / y.squaredNorm()) * Eigen::MatrixXd::Identity(p, p);
      const Eigen::VectorXd hy = hinv * y;
      const double yhy = y.dot(hy);
      // H += c s s^T - (h s^T + s h^T) / sy, written as two rank-one updates
      const Eigen::VectorXd u = ((sy + yhy) / (sy * sy)) * s - hy / sy;
      hinv.noalias() += s * u.transpose();
      hinv.noalias() -= (hy / sy) * s.transpose();
      fresh = false;
    }
    const double decrease = value - v_next;
    k = std::move(k_next);
    g = std::move(g_next);
    value = v_next;
    ++it;
    out.history.push_back(value);
    stalls = decrease <= 1e-10 * std::max(1.0, std::abs(value)) ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }
  out.k = std::move(k);
  out.value = value;
  out.iterations = it;
  return out;
}

long long canonical_period(const ParameterLayout& layout) {
  long long period = 1;
  for (const auto& slot : layout.slots()) {
    period = std::lcm(period, static_cast<long long>(slot.rows));
    if (period > 1'000'000) return 1'000'000;
  }
  return period;
}

Eigen::VectorXd canonical_seed(const ParameterLayout& layout, int shift) {
  Eigen::VectorXd k = Eigen::VectorXd::Zero(layout.size());
  for (const auto& slot : layout.slots()) {
    for (int j = 0; j < slot.cols; ++j) {
      const int row = (shift + j) % slot.rows;
      k(slot.offset + j * slot.rows + row) = 1.0;
    }
  }
  return k;
}

Eigen::VectorXd gaussian_seed(const ParameterLayout& layout, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd k(layout.size());
  for (Eigen::Index j = 0; j < k.size(); ++j) k(j) = normal(rng);
  return k;
}

}  // namespace

ObjectiveSpec ObjectiveSpec::weighted(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  return {ObjectiveKind::Weighted, alpha};
}

std::string to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::KappaFro: return "f1";
    case ObjectiveKind::SumSquares: return "f2";
    case ObjectiveKind::Weighted: return "f3";
  }
  return "?";
}

std::string to_string(SeedStrategy s) {
  switch (s) {
    case SeedStrategy::CanonicalVectors: return "canonical";
    case SeedStrategy::RandomGaussian: return "gaussian";
    case SeedStrategy::Mixed: return "mixed";
  }
  return "?";
}

std::string to_string(GradientMode g) { return g == GradientMode::Analytic ? "analytic" : "fd"; }

ParameterLayout::ParameterLayout(const SpectrumSpec& spec, const std::vector<int>& dims) {
  if (static_cast<int>(dims.size()) != spec.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one nullspace dimension per eigenvalue expected");
  }
  for (int b = 0; b < independent_block_count(spec); ++b) {
    Slot slot;
    slot.spectrum_index = spectrum_index_of_block(spec, b);
    slot.rows = dims[slot.spectrum_index];
    slot.cols = spec.multiplicities()[slot.spectrum_index];
    slot.complex = spec.is_complex(slot.spectrum_index);
    slot.offset = size_;
    size_ += slot.rows * slot.cols * (slot.complex ? 2 : 1);
    slots_.push_back(slot);
  }
}

ParameterMatrix ParameterLayout::to_matrix(const NullspaceFamily& family, const Eigen::VectorXd& k) const {
  if (k.size() != size_) throw Error(ErrorCode::DimensionMismatch, "parameter vector has the wrong length");
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(slots_.size());
  for (const auto& slot : slots_) blocks.push_back(slot_block(slot, k));
  return ParameterMatrix(family, std::move(blocks));
}

Eigen::VectorXd ParameterLayout::to_vector(const ParameterMatrix& k) const {
  Eigen::VectorXd out(size_);
  for (std::size_t b = 0; b < slots_.size(); ++b) {
    const Slot& slot = slots_[b];
    const Eigen::MatrixXcd& block = k.independent_blocks()[b];
    const int count = slot.rows * slot.cols;
    Eigen::Map<Eigen::MatrixXd>(out.data() + slot.offset, slot.rows, slot.cols) = block.real();
    if (slot.complex) Eigen::Map<Eigen::MatrixXd>(out.data() + slot.offset + count, slot.rows, slot.cols) = block.imag();
  }
  return out;
}

ParameterLayout free_parameters(const SpectrumSpec& spec, const std::vector<int>& dims) {
  return ParameterLayout(spec, dims);
}

double evaluate(const ObjectiveSpec& objective, const RealizedCandidate& cand) {
  const Eigen::MatrixXcd& x = cand.eigenvectors;
  double kappa = 0.0;
  double sum_squares = 0.0;
  try {
    kappa = condition_fro(x);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(x);
    sum_squares = x.squaredNorm() + lu.inverse().squaredNorm();
  } catch (const Error&) {
    return kInf;
  }
  switch (objective.kind) {
    case ObjectiveKind::KappaFro: return kappa;
    case ObjectiveKind::SumSquares: return sum_squares;
    case ObjectiveKind::Weighted:
      if (objective.alpha == 1.0) return kappa;
      if (objective.alpha == 0.0) return cand.gain.norm();
      return objective.alpha * kappa + (1.0 - objective.alpha) * cand.gain.norm();
  }
  return kInf;
}

double objective_value(const ObjectiveSpec& objective, const NullspaceFamily& family, const Eigen::VectorXd& k) {
  const ParameterLayout layout(family.spectrum(), family.dims());
  return PlacementObjective(family, layout, objective)(k, nullptr);
}

Eigen::VectorXd gradient(const ObjectiveSpec& objective, const NullspaceFamily& family, const Eigen::VectorXd& k,
                         GradientMode mode) {
  const ParameterLayout layout(family.spectrum(), family.dims());
  if (k.size() != layout.size()) throw Error(ErrorCode::DimensionMismatch, "parameter vector has the wrong length");
  const PlacementObjective f(family, layout, objective);
  Eigen::VectorXd grad;
  const double value = value_and_gradient(f, k, mode, grad);
  if (!std::isfinite(value)) throw Error(ErrorCode::RankDeficientX, "X(K) is singular at the evaluation point");
  return grad;
}

Eigen::VectorXd seed_parameters(const ParameterLayout& layout, SeedStrategy strategy, int restart,
                                std::mt19937_64& rng, std::string* seed_id) {
  auto canonical = [&](int shift) {
    if (seed_id) *seed_id = "canonical:" + std::to_string(shift);
    return canonical_seed(layout, shift);
  };
  auto gaussian = [&]() {
    if (seed_id) *seed_id = "gaussian";
    return gaussian_seed(layout, rng);
  };
  switch (strategy) {
    case SeedStrategy::CanonicalVectors:
      return canonical(restart);
    case SeedStrategy::RandomGaussian:
      return gaussian();
    case SeedStrategy::Mixed:
      if (restart % 2 == 0 && restart / 2 < canonical_period(layout)) return canonical(restart / 2);
      return gaussian();
  }
  return gaussian();
}

SearchOutcome solve(const LtiSystem& sys, const SpectrumSpec& spec, const ObjectiveSpec& objective,
                    const SearchConfig& config) {
  const auto start = Clock::now();
  std::optional<Clock::time_point> deadline;
  if (config.time_budget_seconds > 0.0) {
    deadline = start + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(config.time_budget_seconds));
  }

  const NullspaceFamily family = NullspaceFamily::build(sys, spec);
  const ParameterLayout layout(spec, family.dims());
  const PlacementObjective f(family, layout, objective);
  const double spectral_scale = std::max(1.0, spec.expanded().cwiseAbs().maxCoeff());

  std::mt19937_64 rng(config.rng_seed);
  SearchOutcome outcome;
  bool have_best = false;
  bool out_of_time = false;
  for (int r = 0; r < config.max_restarts; ++r) {
    if (deadline && Clock::now() > *deadline) {
      out_of_time = true;
      break;
    }
    RestartTrace trace;
    trace.restart = r;
    const Eigen::VectorXd seed = seed_parameters(layout, config.seed_strategy, r, rng, &trace.seed_id);
    ++outcome.restarts_used;

    DescentResult run = descend(f, seed, config, deadline);
    trace.initial_objective = run.history.front();
    trace.final_objective = run.value;
    trace.iterations = run.iterations;
    trace.history = std::move(run.history);
    if (!std::isfinite(trace.initial_objective)) {
      trace.rank_deficient = true;
      ++outcome.failures;
      outcome.trace.push_back(std::move(trace));
      continue;
    }
    try {
      RealizedCandidate cand = assemble_candidate(family, layout.to_matrix(family, run.k));
      const double res = residual(sys, cand);
      const double delta = accuracy(sys, cand.gain, spec);
      trace.accepted = res <= config.placement_tolerance && delta <= 1e-6 * spectral_scale;
      if (trace.accepted && (!have_best || run.value < outcome.best_objective)) {
        outcome.best = std::move(cand);
        outcome.best_parameters = run.k;
        outcome.best_objective = run.value;
        outcome.best_residual = res;
        have_best = true;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficientX && e.code() != ErrorCode::ConjugacyViolation) throw;
    }
    outcome.trace.push_back(std::move(trace));
  }

  if (!have_best) {
    if (out_of_time || (deadline && Clock::now() > *deadline)) {
      throw Error(ErrorCode::BudgetExhaustedNoCandidate,
                  "no acceptable candidate within " + std::to_string(config.time_budget_seconds) + " s");
    }
    throw Error(ErrorCode::Infeasible, "no seed out of " + std::to_string(outcome.restarts_used) +
                                           " produced an acceptable candidate (" +
                                           std::to_string(outcome.failures) + " rank-deficient)");
  }
  return outcome;
}

}  // namespace rpp
