#include "rpp/moore_parametric.hpp"

#include <algorithm>
#include <cmath>

#include "rpp/error.hpp"

namespace rpp {

namespace {

template <typename Svd>
NullspaceBasis kernel_from_svd(const Svd& svd, Eigen::Index rows, Eigen::Index cols) {
  const Eigen::VectorXd sv = svd.singularValues();
  const double tau = rank_threshold(sv, rows, cols);
  const int rank = numerical_rank(sv, rows, cols);
  NullspaceBasis out;
  out.dim = static_cast<int>(cols) - rank;
  out.basis = svd.matrixV().rightCols(out.dim).template cast<Complex>();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tau / 10.0 && sv(i) < tau * 10.0) out.rank_ambiguous = true;
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd system_matrix(const LtiSystem& sys, Complex lambda) {
  const int n = sys.n();
  Eigen::MatrixXcd s(n, n + sys.m());
  s.leftCols(n) = sys.a().cast<Complex>();
  s.leftCols(n).diagonal().array() -= lambda;
  s.rightCols(sys.m()) = sys.b().cast<Complex>();
  return s;
}

NullspaceBasis nullspace_basis(const LtiSystem& sys, Complex lambda) {
  const int n = sys.n();
  const int cols = n + sys.m();
  if (lambda.imag() == 0.0) {
    Eigen::MatrixXd s(n, cols);
    s.leftCols(n) = sys.a() - lambda.real() * Eigen::MatrixXd::Identity(n, n);
    s.rightCols(sys.m()) = sys.b();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeFullV);
    return kernel_from_svd(svd, n, cols);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(system_matrix(sys, lambda), Eigen::ComputeFullV);
  return kernel_from_svd(svd, n, cols);
}

double default_placement_tolerance(const LtiSystem& sys) {
  return 1e-8 * std::max(1.0, sys.a().norm() + sys.b().norm());
}

NullspaceFamily NullspaceFamily::build(const LtiSystem& sys, const SpectrumSpec& spec) {
  if (spec.total_multiplicity() != sys.n()) {
    throw Error(ErrorCode::InvalidArgument, "spectrum size does not match the state dimension");
  }
  NullspaceFamily family;
  family.spec_ = spec;
  family.n_ = sys.n();
  family.m_ = sys.m();
  family.imag_tol_ = default_placement_tolerance(sys);
  for (int i = 0; i < spec.size(); ++i) {
    if (spec.is_complex(i) && i % 2 == 1) {
      family.bases_.push_back(family.bases_.back().conjugate());
      family.dims_.push_back(family.dims_.back());
      continue;
    }
    NullspaceBasis nb = nullspace_basis(sys, spec.values()[i]);
    if (spec.multiplicities()[i] > nb.dim) {
      throw Error(ErrorCode::InvalidArgument, "multiplicity exceeds nullspace dimension for eigenvalue " +
                                                  std::to_string(i));
    }
    family.rank_ambiguous_ = family.rank_ambiguous_ || nb.rank_ambiguous;
    family.bases_.push_back(std::move(nb.basis));
    family.dims_.push_back(nb.dim);
  }
  return family;
}

int independent_block_count(const SpectrumSpec& spec) { return spec.size() - spec.pair_count(); }

int spectrum_index_of_block(const SpectrumSpec& spec, int k) {
  return k < spec.pair_count() ? 2 * k : k + spec.pair_count();
}

ParameterMatrix::ParameterMatrix(const NullspaceFamily& family, std::vector<Eigen::MatrixXcd> independent)
    : independent_(std::move(independent)) {
  const SpectrumSpec& spec = family.spectrum();
  if (static_cast<int>(independent_.size()) != independent_block_count(spec)) {
    throw Error(ErrorCode::InvalidArgument, "wrong number of parameter blocks");
  }
  blocks_.resize(spec.size());
  for (int k = 0; k < static_cast<int>(independent_.size()); ++k) {
    const int i = spectrum_index_of_block(spec, k);
    Eigen::MatrixXcd& block = independent_[k];
    if (block.rows() != family.dims()[i] || block.cols() != spec.multiplicities()[i]) {
      throw Error(ErrorCode::InvalidArgument, "parameter block " + std::to_string(k) + " has the wrong shape");
    }
    if (spec.is_complex(i)) {
      blocks_[i] = block;
      blocks_[i + 1] = block.conjugate();
    } else {
      if (block.imag().cwiseAbs().maxCoeff() != 0.0) {
        throw Error(ErrorCode::InvalidArgument, "parameter block of a real eigenvalue must be real");
      }
      blocks_[i] = block;
    }
  }
}

ParameterMatrix ParameterMatrix::scaled(double c) const {
  ParameterMatrix out = *this;
  for (auto& b : out.independent_) b *= c;
  for (auto& b : out.blocks_) b *= c;
  return out;
}

Eigen::MatrixXcd parameter_product(const NullspaceFamily& family, const ParameterMatrix& k) {
  const SpectrumSpec& spec = family.spectrum();
  Eigen::MatrixXcd m(family.n() + family.m(), family.n());
  for (int i = 0; i < spec.size(); ++i) {
    m.middleCols(spec.column_offset(i), spec.multiplicities()[i]) = family.bases()[i] * k.block(i);
  }
  return m;
}

Eigen::MatrixXd realify(const Eigen::MatrixXcd& m, const SpectrumSpec& spec, double imag_tolerance) {
  if (m.cols() != spec.total_multiplicity()) {
    throw Error(ErrorCode::DimensionMismatch, "block structure does not match the spectrum");
  }
  Eigen::MatrixXcd out = m;
  const Complex two_j(0.0, 2.0);
  for (int i = 0; i < 2 * spec.pair_count(); i += 2) {
    const int c0 = spec.column_offset(i);
    const int c1 = spec.column_offset(i + 1);
    const int width = spec.multiplicities()[i];
    out.middleCols(c0, width) = (m.middleCols(c0, width) + m.middleCols(c1, width)) / 2.0;
    out.middleCols(c1, width) = (m.middleCols(c0, width) - m.middleCols(c1, width)) / two_j;
  }
  const double residue = out.size() > 0 ? out.imag().cwiseAbs().maxCoeff() : 0.0;
  if (residue > imag_tolerance) {
    throw Error(ErrorCode::ConjugacyViolation, "imaginary residue " + std::to_string(residue) +
                                                   " exceeds tolerance after realification");
  }
  return out.real();
}

RealizedCandidate assemble_candidate(const NullspaceFamily& family, const ParameterMatrix& k) {
  const int n = family.n();
  const int m = family.m();
  const Eigen::MatrixXcd mk = parameter_product(family, k);
  const Eigen::MatrixXd re = realify(mk, family.spectrum(), family.imag_tolerance());

  RealizedCandidate cand;
  cand.lambda = family.spectrum().expanded();
  cand.column_norms = mk.topRows(n).colwise().norm().transpose();
  if (cand.column_norms.minCoeff() == 0.0) {
    throw Error(ErrorCode::RankDeficientX, "X(K) has a zero column");
  }
  cand.eigenvectors = mk.topRows(n) * cand.column_norms.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(cand.eigenvectors);
  const int rank = numerical_rank(svd.singularValues(), n, n);
  if (rank < n) {
    throw Error(ErrorCode::RankDeficientX, "X(K) has rank " + std::to_string(rank) + " < " + std::to_string(n));
  }
  cand.v = re.topRows(n);
  cand.w = re.bottomRows(m);
  // F V = W  <=>  V^T F^T = W^T
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cand.v.transpose());
  cand.gain = qr.solve(cand.w.transpose()).transpose();
  if (!cand.gain.allFinite()) {
    throw Error(ErrorCode::RankDeficientX, "V(K) is numerically singular");
  }
  return cand;
}

double residual(const LtiSystem& sys, const RealizedCandidate& cand) {
  const Eigen::MatrixXcd closed = (sys.a() + sys.b() * cand.gain).cast<Complex>();
  const Eigen::MatrixXcd& x = cand.eigenvectors;
  const double defect = (closed * x - x * cand.lambda.asDiagonal()).norm();
  return defect / std::max(1.0, x.norm());
}

}  // namespace rpp
