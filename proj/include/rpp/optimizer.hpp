#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpp/moore_parametric.hpp"
#include "rpp/system_model.hpp"

namespace rpp {

enum class ObjectiveKind {
  KappaFro,     // f1 = kappa_fro(X)
  SumSquares,   // f2 = |X|_F^2 + |X^-1|_F^2
  Weighted,     // f3 = alpha kappa_fro(X) + (1 - alpha) |F|_F
};

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::KappaFro;
  double alpha = 1.0;  // read only for Weighted

  static ObjectiveSpec kappa_fro() { return {ObjectiveKind::KappaFro, 1.0}; }
  static ObjectiveSpec sum_squares() { return {ObjectiveKind::SumSquares, 1.0}; }
  /// Throws InvalidArgument unless 0 <= alpha <= 1.
  static ObjectiveSpec weighted(double alpha);
};

std::string to_string(ObjectiveKind kind);

enum class SeedStrategy { CanonicalVectors, RandomGaussian, Mixed };
enum class GradientMode { FiniteDifference, Analytic };

std::string to_string(SeedStrategy s);
std::string to_string(GradientMode g);

struct SearchConfig {
  /// Wall-clock budget; 0 disables it and max_restarts alone bounds the
  /// search, which makes the result deterministic.
  double time_budget_seconds = 0.0;
  int max_restarts = 50;
  SeedStrategy seed_strategy = SeedStrategy::Mixed;
  std::uint64_t rng_seed = 0;
  double armijo_c = 1e-4;
  double backtrack_shrink = 0.5;
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;
  GradientMode gradient_mode = GradientMode::Analytic;
  /// Quasi-Newton directions; plain steepest descent when false.
  bool quasi_newton = true;
  /// Largest accepted |(A+BF)X - X Lambda|_F / |X|_F for a returned candidate.
  double placement_tolerance = 1e-8;
};

/// Flat real coordinates for the independent blocks of K. A conjugate-pair
/// block contributes its real parts then its imaginary parts (column-major);
/// a real block contributes its entries.
class ParameterLayout {
 public:
  struct Slot {
    int spectrum_index = 0;
    int rows = 0;  // s_i
    int cols = 0;  // m_i
    bool complex = false;
    int offset = 0;
  };

  ParameterLayout(const SpectrumSpec& spec, const std::vector<int>& dims);

  int size() const { return size_; }
  const std::vector<Slot>& slots() const { return slots_; }

  ParameterMatrix to_matrix(const NullspaceFamily& family, const Eigen::VectorXd& k) const;
  Eigen::VectorXd to_vector(const ParameterMatrix& k) const;

 private:
  std::vector<Slot> slots_;
  int size_ = 0;
};

ParameterLayout free_parameters(const SpectrumSpec& spec, const std::vector<int>& dims);

/// Objective value of a candidate; +inf when X is singular.
double evaluate(const ObjectiveSpec& objective, const RealizedCandidate& cand);

/// Gradient of evaluate(assemble_candidate(family, K(k))) with respect to the
/// flat parameters. Throws RankDeficientX at singular points.
Eigen::VectorXd gradient(const ObjectiveSpec& objective, const NullspaceFamily& family, const Eigen::VectorXd& k,
                         GradientMode mode);

/// Objective value through the same path the search uses (+inf when singular).
double objective_value(const ObjectiveSpec& objective, const NullspaceFamily& family, const Eigen::VectorXd& k);

struct RestartTrace {
  int restart = 0;
  std::string seed_id;  // "canonical:<shift>" or "gaussian"
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  bool rank_deficient = false;  // seed skipped
  bool accepted = false;        // passed the placement checks
  std::vector<double> history;  // objective after each accepted step, starting with the seed
};

struct SearchOutcome {
  RealizedCandidate best;
  Eigen::VectorXd best_parameters;
  double best_objective = 0.0;
  double best_residual = 0.0;
  int restarts_used = 0;
  std::vector<RestartTrace> trace;
  int failures = 0;  // rank-deficient seeds
};

/// Initial parameters for restart r (exposed for tests and reproducibility).
/// `rng` is advanced only by Gaussian draws.
Eigen::VectorXd seed_parameters(const ParameterLayout& layout, SeedStrategy strategy, int restart,
                                std::mt19937_64& rng, std::string* seed_id = nullptr);

/// Multi-start descent on the chosen objective. Throws Infeasible when no
/// seed yields a full-rank X, BudgetExhaustedNoCandidate when time runs out
/// first, InvalidArgument when the spectrum is not assignable.
SearchOutcome solve(const LtiSystem& sys, const SpectrumSpec& spec, const ObjectiveSpec& objective,
                    const SearchConfig& config);

}  // namespace rpp
