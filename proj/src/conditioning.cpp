#include "rpp/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpp/error.hpp"

namespace rpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRepeatTolerance = 1e-8;

bool has_repeats(const Eigen::VectorXcd& ev) {
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
      if (std::abs(ev(i) - ev(j)) <= kRepeatTolerance * std::max(1.0, std::abs(ev(i)))) return true;
    }
  }
  return false;
}

Eigen::VectorXd checked_singular_values(const Eigen::MatrixXcd& x) {
  if (x.rows() != x.cols() || x.rows() == 0) throw Error(ErrorCode::SingularX, "X must be square and non-empty");
  if (!x.allFinite()) throw Error(ErrorCode::SingularX, "X has non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(x);
  Eigen::VectorXd sv = svd.singularValues();
  if (numerical_rank(sv, x.rows(), x.cols()) < x.rows()) {
    throw Error(ErrorCode::SingularX, "X is numerically singular");
  }
  return sv;
}

}  // namespace

EigenConditioning eig_condition_numbers_from_vectors(const Eigen::MatrixXcd& x,
                                                     const Eigen::VectorXcd& eigenvalues) {
  const Eigen::Index n = x.cols();
  EigenConditioning out;
  out.repeated = has_repeats(eigenvalues);
  out.values.assign(n, kInf);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(x);
  if (!lu.isInvertible()) {
    out.defective = true;
    return out;
  }
  // Rows of X^-1 are left eigenvectors scaled so that y_i^H x_i = 1.
  const Eigen::MatrixXcd y = lu.inverse();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xn = x.col(i).norm();
    const double yn = y.row(i).norm();
    const double overlap = std::abs((y.row(i) * x.col(i)).value());
    const double cosine = overlap / (xn * yn);
    if (!std::isfinite(cosine) || cosine < kDefectiveThreshold) {
      out.defective = true;
      continue;
    }
    out.values[i] = 1.0 / cosine;
  }
  return out;
}

EigenConditioning eig_condition_numbers(const Eigen::MatrixXd& a_closed) {
  Eigen::EigenSolver<Eigen::MatrixXd> eig(a_closed, true);
  return eig_condition_numbers_from_vectors(eig.eigenvectors(), eig.eigenvalues());
}

double condition_fro(const Eigen::MatrixXcd& x) {
  const Eigen::VectorXd sv = checked_singular_values(x);
  return std::sqrt(sv.squaredNorm()) * std::sqrt(sv.cwiseInverse().squaredNorm());
}

double condition_2(const Eigen::MatrixXcd& x) {
  const Eigen::VectorXd sv = checked_singular_values(x);
  return sv.maxCoeff() / sv.minCoeff();
}

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
  // Shortest augmenting path with row/column potentials, 1-based sentinels.
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw Error(ErrorCode::DimensionMismatch, "assignment cost matrix must be square");
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const int r = match[col0];
      double delta = kInf;
      int col1 = 0;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r - 1, c - 1) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

Eigen::VectorXcd matched_closed_loop_eigenvalues(const LtiSystem& sys, const Eigen::MatrixXd& gain,
                                                 const SpectrumSpec& spec) {
  if (gain.rows() != sys.m() || gain.cols() != sys.n()) {
    throw Error(ErrorCode::DimensionMismatch, "F must be m x n");
  }
  const Eigen::VectorXcd target = spec.expanded();
  if (target.size() != sys.n()) throw Error(ErrorCode::DimensionMismatch, "spectrum size differs from n");
  Eigen::EigenSolver<Eigen::MatrixXd> eig(sys.a() + sys.b() * gain, false);
  const Eigen::VectorXcd mu = eig.eigenvalues();
  const Eigen::Index n = target.size();
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::abs(mu(i) - target(j));
  }
  if (!cost.allFinite()) return Eigen::VectorXcd::Constant(n, Complex(kInf, 0.0));
  const std::vector<int> assignment = min_cost_assignment(cost);
  Eigen::VectorXcd matched(n);
  for (Eigen::Index i = 0; i < n; ++i) matched(assignment[i]) = mu(i);
  return matched;
}

double accuracy(const LtiSystem& sys, const Eigen::MatrixXd& gain, const SpectrumSpec& spec) {
  const Eigen::VectorXcd matched = matched_closed_loop_eigenvalues(sys, gain, spec);
  return (matched - spec.expanded()).cwiseAbs().maxCoeff();
}

namespace {

void fill_from_vectors(MetricBundle& out, const Eigen::MatrixXcd& x, const Eigen::VectorXcd& eigenvalues) {
  try {
    out.kappa_fro = condition_fro(x);
    out.kappa_2 = condition_2(x);
  } catch (const Error&) {
    out.singular_x = true;
    out.kappa_fro = kInf;
    out.kappa_2 = kInf;
  }
  const EigenConditioning ec = eig_condition_numbers_from_vectors(x, eigenvalues);
  out.c_per_eig = ec.values;
  out.defective = ec.defective;
  out.repeated_eigenvalues = out.repeated_eigenvalues || ec.repeated;
  out.c_inf = out.c_per_eig.empty() ? 0.0 : *std::max_element(out.c_per_eig.begin(), out.c_per_eig.end());
}

}  // namespace

MetricBundle bundle_metrics(const LtiSystem& sys, const RealizedCandidate& cand, const SpectrumSpec& spec) {
  MetricBundle out;
  out.repeated_eigenvalues = std::any_of(spec.multiplicities().begin(), spec.multiplicities().end(),
                                         [](int k) { return k > 1; });
  fill_from_vectors(out, cand.eigenvectors, cand.lambda);
  out.accuracy = accuracy(sys, cand.gain, spec);
  out.gain_fro = cand.gain.norm();
  return out;
}

MetricBundle audit_metrics(const LtiSystem& sys, const Eigen::MatrixXd& gain, const SpectrumSpec& spec) {
  MetricBundle out;
  out.accuracy = accuracy(sys, gain, spec);
  out.gain_fro = gain.norm();
  Eigen::EigenSolver<Eigen::MatrixXd> eig(sys.a() + sys.b() * gain, true);
  if (eig.info() != Eigen::Success) {
    out.singular_x = true;
    out.kappa_fro = out.kappa_2 = out.c_inf = kInf;
    return out;
  }
  Eigen::MatrixXcd x = eig.eigenvectors();
  x = x * x.colwise().norm().cwiseInverse().asDiagonal();
  fill_from_vectors(out, x, eig.eigenvalues());
  return out;
}

bool chain_holds(const MetricBundle& b, int n, double rel_tol) {
  if (b.singular_x) return false;
  const double slack = 1.0 + rel_tol;
  return b.c_inf <= b.kappa_2 * slack && b.kappa_2 <= b.kappa_fro * slack && n <= b.kappa_fro * slack;
}

}  // namespace rpp
