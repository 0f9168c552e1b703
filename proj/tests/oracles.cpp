#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace oracle {

Eigen::RowVectorXd ackermann(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const std::vector<std::complex<double>>& roots) {
  const int n = static_cast<int>(a.rows());
  // monic coefficients, highest degree first
  std::vector<std::complex<double>> c{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k] += c[k];
      next[k + 1] -= r * c[k];
    }
    c = next;
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < c.size(); ++k) p = p * a + c[k].real() * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd ctrb(n, n);
  Eigen::VectorXd col = b;
  for (int k = 0; k < n; ++k) {
    ctrb.col(k) = col;
    col = a * col;
  }
  Eigen::RowVectorXd en = Eigen::RowVectorXd::Zero(n);
  en(n - 1) = 1.0;
  return -en * ctrb.inverse() * p;
}

int lu_rank(const Eigen::MatrixXcd& m, double rel_threshold) {
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  lu.setThreshold(rel_threshold);
  return static_cast<int>(lu.rank());
}

namespace {

template <typename Reduce>
double brute(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b, Reduce reduce) {
  std::vector<int> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc = reduce(acc, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, acc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

double brute_force_match(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b) {
  return brute(a, b, [](double x, double y) { return std::max(x, y); });
}

double brute_force_min_sum(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b) {
  return brute(a, b, [](double x, double y) { return x + y; });
}

Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

int controllability_rank(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  Eigen::MatrixXd ctrb(n, n * m);
  Eigen::MatrixXd blk = b;
  for (int k = 0; k < n; ++k) {
    ctrb.middleCols(k * m, m) = blk;
    blk = a * blk;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctrb);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-9 * s(0)) ++r;
  return r;
}

double kappa_fro_by_inverse(const Eigen::MatrixXcd& x) { return x.norm() * x.inverse().norm(); }

std::vector<double> eig_cond_by_left_right(const Eigen::MatrixXd& a_closed) {
  Eigen::EigenSolver<Eigen::MatrixXd> right(a_closed);
  Eigen::EigenSolver<Eigen::MatrixXd> left(a_closed.transpose());
  const Eigen::VectorXcd lr = right.eigenvalues();
  const Eigen::VectorXcd ll = left.eigenvalues();
  const Eigen::MatrixXcd xr = right.eigenvectors();
  const Eigen::MatrixXcd yl = left.eigenvectors();
  std::vector<double> out;
  for (int i = 0; i < lr.size(); ++i) {
    int best = 0;
    for (int j = 1; j < ll.size(); ++j)
      if (std::abs(ll(j) - lr(i)) < std::abs(ll(best) - lr(i))) best = j;
    // left eigenvector y satisfies y^T A = lambda y^T, so pair with the transpose (not adjoint)
    const Eigen::VectorXcd x = xr.col(i);
    const Eigen::VectorXcd y = yl.col(best);
    const std::complex<double> overlap = (y.transpose() * x).value();
    out.push_back(x.norm() * y.norm() / std::abs(overlap));
  }
  return out;
}

}  // namespace oracle
