#include "rpp/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rpp/error.hpp"
#include "rpp/moore_parametric.hpp"

namespace rpp {

namespace {

// Open-loop eigenvalues come out of an eigensolver with rounding, so the
// uncontrollability scan uses a looser relative rank cut than the exact
// threshold, and a matching tolerance against the target list.
constexpr double kScanRankTolerance = 1e-8;
constexpr double kScanMatchTolerance = 1e-6;

bool close(Complex x, Complex y) {
  return std::abs(x - y) <= kConjugacyTolerance * std::max(1.0, std::abs(x));
}

bool ordered_before(Complex x, Complex y) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (ax != ay) return ax < ay;
  if (x.real() != y.real()) return x.real() < y.real();
  return std::abs(x.imag()) < std::abs(y.imag());
}

std::string format_complex(Complex z) {
  std::ostringstream os;
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

double rank_threshold(const Eigen::VectorXd& singular_values, Eigen::Index rows, Eigen::Index cols) {
  const double sigma_max = singular_values.size() > 0 ? singular_values.maxCoeff() : 0.0;
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sigma_max;
}

int numerical_rank(const Eigen::VectorXd& singular_values, Eigen::Index rows, Eigen::Index cols) {
  const double tau = rank_threshold(singular_values, rows, cols);
  int rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > tau) ++rank;
  }
  return rank;
}

int SpectrumSpec::total_multiplicity() const { return std::accumulate(mult_.begin(), mult_.end(), 0); }

int SpectrumSpec::column_offset(int i) const {
  return std::accumulate(mult_.begin(), mult_.begin() + i, 0);
}

Eigen::VectorXcd SpectrumSpec::expanded() const {
  Eigen::VectorXcd out(total_multiplicity());
  int k = 0;
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < mult_[i]; ++j) out(k++) = values_[i];
  }
  return out;
}

LtiSystem validate_system(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "A must be square");
  }
  if (a.rows() == 0) throw Error(ErrorCode::DimensionMismatch, "empty system");
  if (b.rows() != a.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "A and B must have the same number of rows");
  }
  if (b.cols() < 1 || b.cols() > b.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "B must have between 1 and n columns");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw Error(ErrorCode::DimensionMismatch, "non-finite entries in A or B");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  const int rank = numerical_rank(svd.singularValues(), b.rows(), b.cols());
  if (rank < b.cols()) {
    throw Error(ErrorCode::RankDeficientB,
                "B has column rank " + std::to_string(rank) + " < " + std::to_string(b.cols()));
  }
  return LtiSystem(a, b);
}

SpectrumSpec canonicalize_spectrum(const std::vector<Complex>& values, const std::vector<int>& multiplicities,
                                   int n) {
  if (!multiplicities.empty() && multiplicities.size() != values.size()) {
    throw Error(ErrorCode::InvalidArgument, "multiplicity list length differs from value list length");
  }
  struct Entry {
    Complex value;
    int mult;
  };
  std::vector<Entry> merged;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const int mult = multiplicities.empty() ? 1 : multiplicities[k];
    if (mult <= 0) throw Error(ErrorCode::InvalidArgument, "multiplicities must be positive");
    Complex z = values[k];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw Error(ErrorCode::InvalidArgument, "non-finite eigenvalue");
    }
    if (std::abs(z.imag()) <= kConjugacyTolerance * std::max(1.0, std::abs(z))) z = Complex(z.real(), 0.0);
    auto hit = std::find_if(merged.begin(), merged.end(), [&](const Entry& e) { return close(e.value, z); });
    if (hit != merged.end()) {
      hit->mult += mult;
    } else {
      merged.push_back({z, mult});
    }
  }

  std::vector<Entry> reals, upper, lower;
  for (const Entry& e : merged) {
    if (e.value.imag() == 0.0) {
      reals.push_back(e);
    } else if (e.value.imag() > 0.0) {
      upper.push_back(e);
    } else {
      lower.push_back(e);
    }
  }
  std::vector<bool> used(lower.size(), false);
  for (const Entry& e : upper) {
    bool found = false;
    for (std::size_t k = 0; k < lower.size(); ++k) {
      if (!used[k] && close(e.value, std::conj(lower[k].value))) {
        if (lower[k].mult != e.mult) {
          throw Error(ErrorCode::NotSelfConjugate,
                      "conjugate of " + format_complex(e.value) + " has a different multiplicity");
        }
        used[k] = true;
        found = true;
        break;
      }
    }
    if (!found) {
      throw Error(ErrorCode::NotSelfConjugate, format_complex(e.value) + " lacks its conjugate partner");
    }
  }
  for (std::size_t k = 0; k < lower.size(); ++k) {
    if (!used[k]) {
      throw Error(ErrorCode::NotSelfConjugate, format_complex(lower[k].value) + " lacks its conjugate partner");
    }
  }

  int total = 0;
  for (const Entry& e : merged) total += e.mult;
  if (total != n) {
    throw Error(ErrorCode::MultiplicityOverflow,
                "multiplicities sum to " + std::to_string(total) + ", expected " + std::to_string(n));
  }

  auto by_order = [](const Entry& x, const Entry& y) { return ordered_before(x.value, y.value); };
  std::sort(upper.begin(), upper.end(), by_order);
  std::sort(reals.begin(), reals.end(), by_order);

  SpectrumSpec spec;
  for (const Entry& e : upper) {
    spec.values_.push_back(e.value);
    spec.values_.push_back(std::conj(e.value));
    spec.mult_.push_back(e.mult);
    spec.mult_.push_back(e.mult);
  }
  for (const Entry& e : reals) {
    spec.values_.push_back(e.value);
    spec.mult_.push_back(e.mult);
  }
  spec.pairs_ = static_cast<int>(upper.size());
  return spec;
}

FeasibilityReport assess_feasibility(const LtiSystem& sys, const SpectrumSpec& spec) {
  FeasibilityReport report;
  const int n = sys.n();
  const int m = sys.m();
  if (spec.total_multiplicity() != n) {
    report.feasible = false;
    report.reasons.push_back("spectrum multiplicities do not sum to n");
  }
  for (int i = 0; i < spec.size(); ++i) {
    ModeReport mode;
    mode.lambda = spec.values()[i];
    mode.multiplicity = spec.multiplicities()[i];
    mode.nullspace_dim = nullspace_basis(sys, mode.lambda).dim;
    mode.controllable = mode.nullspace_dim <= m;
    if (mode.multiplicity > mode.nullspace_dim) {
      report.feasible = false;
      report.reasons.push_back("multiplicity " + std::to_string(mode.multiplicity) + " of " +
                               format_complex(mode.lambda) + " exceeds nullspace dimension " +
                               std::to_string(mode.nullspace_dim));
    }
    report.modes.push_back(mode);
  }

  Eigen::EigenSolver<Eigen::MatrixXd> eig(sys.a(), false);
  const Eigen::VectorXcd open_loop = eig.eigenvalues();
  for (Eigen::Index k = 0; k < open_loop.size(); ++k) {
    const Complex mu = open_loop(k);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(system_matrix(sys, mu));
    const Eigen::VectorXd sv = svd.singularValues();
    if (sv(sv.size() - 1) > kScanRankTolerance * std::max(1.0, sv(0))) continue;
    bool duplicate = false;
    for (Complex seen : report.open_loop_uncontrollable) {
      if (std::abs(seen - mu) <= kScanMatchTolerance * std::max(1.0, std::abs(mu))) duplicate = true;
    }
    if (duplicate) continue;
    report.open_loop_uncontrollable.push_back(mu);
    const bool listed = std::any_of(spec.values().begin(), spec.values().end(), [&](Complex lambda) {
      return std::abs(lambda - mu) <= kScanMatchTolerance * std::max(1.0, std::abs(mu));
    });
    if (!listed) {
      report.feasible = false;
      report.reasons.push_back("uncontrollable mode " + format_complex(mu) + " is not in the target spectrum");
    }
  }
  return report;
}

}  // namespace rpp
