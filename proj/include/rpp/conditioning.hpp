#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rpp/moore_parametric.hpp"
#include "rpp/system_model.hpp"

namespace rpp {

/// Per-eigenvalue condition numbers c_i = |y_i| |x_i| / |y_i^H x_i|.
struct EigenConditioning {
  std::vector<double> values;  // +inf marks a (near-)defective eigenvalue
  bool defective = false;
  bool repeated = false;  // some eigenvalue is repeated; c_i then refers to the chosen eigenbasis
};

/// Below this value of |y^H x| / (|y| |x|) an eigenvalue is treated as defective.
inline constexpr double kDefectiveThreshold = 1e-12;

/// Conditioning of the eigenvalues of a real matrix; left eigenvectors are the
/// rows of the inverse of the right eigenvector matrix.
EigenConditioning eig_condition_numbers(const Eigen::MatrixXd& a_closed);

/// Same, for a given right eigenvector matrix of a diagonalizable matrix.
EigenConditioning eig_condition_numbers_from_vectors(const Eigen::MatrixXcd& x,
                                                     const Eigen::VectorXcd& eigenvalues);

/// |X|_F |X^-1|_F from the singular values. Throws SingularX.
double condition_fro(const Eigen::MatrixXcd& x);

/// |X|_2 |X^-1|_2. Throws SingularX.
double condition_2(const Eigen::MatrixXcd& x);

/// Minimum-sum assignment on a square cost matrix (Hungarian method).
/// Returns assignment[row] = column.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

/// Largest distance between eig(A + B F) and the target spectrum under the
/// minimum-sum matching with multiplicities expanded.
double accuracy(const LtiSystem& sys, const Eigen::MatrixXd& gain, const SpectrumSpec& spec);

/// Eigenvalues of A + B F matched to the expanded target list:
/// result(j) is the closed-loop eigenvalue assigned to target j.
Eigen::VectorXcd matched_closed_loop_eigenvalues(const LtiSystem& sys, const Eigen::MatrixXd& gain,
                                                 const SpectrumSpec& spec);

struct MetricBundle {
  double kappa_fro = 0.0;
  double kappa_2 = 0.0;
  double c_inf = 0.0;
  std::vector<double> c_per_eig;
  double accuracy = 0.0;
  double gain_fro = 0.0;
  bool singular_x = false;
  bool defective = false;
  bool repeated_eigenvalues = false;
};

/// Metrics for a candidate, using its unit-column eigenvector matrix.
MetricBundle bundle_metrics(const LtiSystem& sys, const RealizedCandidate& cand, const SpectrumSpec& spec);

/// Metrics for an externally supplied gain, using the eigenvectors of A + B F.
MetricBundle audit_metrics(const LtiSystem& sys, const Eigen::MatrixXd& gain, const SpectrumSpec& spec);

/// c_inf <= kappa_2 <= kappa_fro and kappa_fro >= n, relative tolerance `rel_tol`.
bool chain_holds(const MetricBundle& bundle, int n, double rel_tol = 1e-9);

}  // namespace rpp
