#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rpp {

using Complex = std::complex<double>;

/// Continuous-time pair (A, B) with B of full column rank. Only
/// validate_system() constructs one.
class LtiSystem {
 public:
  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::MatrixXd& b() const { return b_; }
  int n() const { return static_cast<int>(a_.rows()); }
  int m() const { return static_cast<int>(b_.cols()); }

 private:
  friend LtiSystem validate_system(const Eigen::MatrixXd&, const Eigen::MatrixXd&);
  LtiSystem(Eigen::MatrixXd a, Eigen::MatrixXd b) : a_(std::move(a)), b_(std::move(b)) {}

  Eigen::MatrixXd a_;
  Eigen::MatrixXd b_;
};

/// Self-conjugate target spectrum in canonical order: conjugate pairs first
/// (positive imaginary member leading), then real values. Entries are
/// distinct; repeated eigenvalues live in multiplicities().
class SpectrumSpec {
 public:
  const std::vector<Complex>& values() const { return values_; }
  const std::vector<int>& multiplicities() const { return mult_; }
  /// Number of conjugate pairs; entries [0, 2*pair_count()) are complex.
  int pair_count() const { return pairs_; }
  int size() const { return static_cast<int>(values_.size()); }
  int total_multiplicity() const;
  bool is_complex(int i) const { return i < 2 * pairs_; }
  /// Index of the first column belonging to eigenvalue i in X = [X_1 ... X_nu].
  int column_offset(int i) const;
  /// Diagonal of Lambda: every value repeated by its multiplicity.
  Eigen::VectorXcd expanded() const;

  bool operator==(const SpectrumSpec&) const = default;

 private:
  friend SpectrumSpec canonicalize_spectrum(const std::vector<Complex>&, const std::vector<int>&, int);
  std::vector<Complex> values_;
  std::vector<int> mult_;
  int pairs_ = 0;
};

struct ModeReport {
  Complex lambda;
  int multiplicity = 0;
  int nullspace_dim = 0;
  bool controllable = true;
};

struct FeasibilityReport {
  std::vector<ModeReport> modes;                // one per spectrum entry
  std::vector<Complex> open_loop_uncontrollable;  // uncontrollable eigenvalues of A
  bool feasible = true;
  std::vector<std::string> reasons;
};

/// Relative tolerance used to decide conjugacy and duplicate entries.
inline constexpr double kConjugacyTolerance = 1e-9;

/// Numerical rank of a matrix from its singular values using
/// max(rows, cols) * eps * sigma_max.
double rank_threshold(const Eigen::VectorXd& singular_values, Eigen::Index rows, Eigen::Index cols);
int numerical_rank(const Eigen::VectorXd& singular_values, Eigen::Index rows, Eigen::Index cols);

/// Throws DimensionMismatch or RankDeficientB.
LtiSystem validate_system(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// `multiplicities` may be empty (all ones) or match `values` in length.
/// Duplicate entries are merged. Throws NotSelfConjugate, MultiplicityOverflow
/// or InvalidArgument (non-positive multiplicity).
SpectrumSpec canonicalize_spectrum(const std::vector<Complex>& values, const std::vector<int>& multiplicities,
                                   int n);

FeasibilityReport assess_feasibility(const LtiSystem& sys, const SpectrumSpec& spec);

}  // namespace rpp
