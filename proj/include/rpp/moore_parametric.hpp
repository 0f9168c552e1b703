#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rpp/system_model.hpp"

namespace rpp {

/// Orthonormal basis of ker [A - lambda*I, B].
struct NullspaceBasis {
  Eigen::MatrixXcd basis;  // (n+m) x dim
  int dim = 0;
  /// Some singular value lies within a factor of 10 of the rank threshold.
  bool rank_ambiguous = false;
};

/// [A - lambda*I_n, B], an n x (n+m) matrix.
Eigen::MatrixXcd system_matrix(const LtiSystem& sys, Complex lambda);

/// Kernel from the SVD of the system matrix. Real lambda yields a real basis.
NullspaceBasis nullspace_basis(const LtiSystem& sys, Complex lambda);

/// Default tolerance for kernel residuals and leftover imaginary parts:
/// 1e-8 * max(1, |A|_F + |B|_F).
double default_placement_tolerance(const LtiSystem& sys);

/// Kernel bases T_1..T_nu for a canonical spectrum. The basis of the second
/// member of each conjugate pair is the conjugate of the first, so the
/// realification below is exact.
class NullspaceFamily {
 public:
  /// Throws InvalidArgument when some multiplicity exceeds its kernel dimension.
  static NullspaceFamily build(const LtiSystem& sys, const SpectrumSpec& spec);

  const std::vector<Eigen::MatrixXcd>& bases() const { return bases_; }
  const std::vector<int>& dims() const { return dims_; }
  const SpectrumSpec& spectrum() const { return spec_; }
  int n() const { return n_; }
  int m() const { return m_; }
  bool rank_ambiguous() const { return rank_ambiguous_; }
  double imag_tolerance() const { return imag_tol_; }

 private:
  NullspaceFamily() = default;

  std::vector<Eigen::MatrixXcd> bases_;
  std::vector<int> dims_;
  SpectrumSpec spec_;
  int n_ = 0;
  int m_ = 0;
  bool rank_ambiguous_ = false;
  double imag_tol_ = 0.0;
};

/// Number of blocks that are stored: one per conjugate pair plus one per real value.
int independent_block_count(const SpectrumSpec& spec);

/// Spectrum index of the k-th independent block.
int spectrum_index_of_block(const SpectrumSpec& spec, int k);

/// Block-diagonal parameter K = diag(K_1, ..., K_nu). Only the independent
/// blocks are supplied; the partner of each pair block is its conjugate.
class ParameterMatrix {
 public:
  /// Block k is s_i x m_i for i = spectrum_index_of_block(spec, k). Blocks of
  /// real eigenvalues must be real.
  ParameterMatrix(const NullspaceFamily& family, std::vector<Eigen::MatrixXcd> independent);

  const Eigen::MatrixXcd& block(int i) const { return blocks_[i]; }
  int size() const { return static_cast<int>(blocks_.size()); }
  const std::vector<Eigen::MatrixXcd>& independent_blocks() const { return independent_; }

  ParameterMatrix scaled(double c) const;

 private:
  ParameterMatrix() = default;
  std::vector<Eigen::MatrixXcd> independent_;
  std::vector<Eigen::MatrixXcd> blocks_;
};

/// M(K) = T K, an (n+m) x n complex matrix.
Eigen::MatrixXcd parameter_product(const NullspaceFamily& family, const ParameterMatrix& k);

/// Re(M): each conjugate block pair (M_i, M_i+1) becomes ((M_i + M_i+1)/2,
/// (M_i - M_i+1)/2j). Throws ConjugacyViolation when the result keeps an
/// imaginary part above `imag_tolerance`.
Eigen::MatrixXd realify(const Eigen::MatrixXcd& m, const SpectrumSpec& spec, double imag_tolerance);

struct RealizedCandidate {
  Eigen::MatrixXcd eigenvectors;  // X with unit-norm columns
  Eigen::VectorXd column_norms;   // norms of the raw columns of X
  Eigen::MatrixXd v;              // top n rows of Re(M(K))
  Eigen::MatrixXd w;              // bottom m rows of Re(M(K))
  Eigen::MatrixXd gain;           // F, with F V = W
  Eigen::VectorXcd lambda;        // diagonal of Lambda
};

/// Throws RankDeficientX when X(K) has numerical rank below n.
RealizedCandidate assemble_candidate(const NullspaceFamily& family, const ParameterMatrix& k);

/// |(A + B F) X - X Lambda|_F / max(1, |X|_F).
double residual(const LtiSystem& sys, const RealizedCandidate& cand);

}  // namespace rpp
