#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rpp/error.hpp"
#include "rpp/moore_parametric.hpp"

using rpp::Complex;

namespace {

rpp::LtiSystem toy() { return rpp::validate_system(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)); }

// K_i chosen so that the top rows of T_i K_i equal e_i.
rpp::ParameterMatrix identity_parameters(const rpp::NullspaceFamily& family) {
  std::vector<Eigen::MatrixXcd> blocks;
  for (int i = 0; i < 2; ++i) {
    const Eigen::MatrixXcd top = family.bases()[i].topRows(2);
    blocks.push_back(top.fullPivLu().solve(Eigen::VectorXcd::Unit(2, i)));
  }
  return rpp::ParameterMatrix(family, blocks);
}

std::vector<Eigen::MatrixXcd> random_blocks(const rpp::NullspaceFamily& family, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const auto& spec = family.spectrum();
  std::vector<Eigen::MatrixXcd> blocks;
  for (int k = 0; k < rpp::independent_block_count(spec); ++k) {
    const int i = rpp::spectrum_index_of_block(spec, k);
    Eigen::MatrixXcd blk(family.dims()[i], spec.multiplicities()[i]);
    for (Eigen::Index c = 0; c < blk.size(); ++c) {
      blk(c) = spec.is_complex(i) ? Complex(normal(rng), normal(rng)) : Complex(normal(rng), 0.0);
    }
    blocks.push_back(blk);
  }
  return blocks;
}

}  // namespace

TEST_CASE("system_matrix by direct substitution") {
  const Eigen::MatrixXcd s = rpp::system_matrix(toy(), -1.0);
  Eigen::MatrixXcd expect(2, 4);
  expect << 1, 0, 1, 0, 0, 1, 0, 1;
  CHECK((s - expect).norm() == 0.0);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a.diagonal() << 1.0, 2.0;
  const auto sys = rpp::validate_system(a, Eigen::Vector2d(1.0, 0.0));
  Eigen::MatrixXcd expect2(2, 3);
  expect2 << -1, 0, 1, 0, 0, 0;
  CHECK((rpp::system_matrix(sys, 2.0) - expect2).norm() == 0.0);
}

TEST_CASE("nullspace_basis spans the kernel") {
  const auto nb = rpp::nullspace_basis(toy(), -1.0);
  CHECK(nb.dim == 2);
  CHECK((rpp::system_matrix(toy(), -1.0) * nb.basis).norm() < 1e-14);
  CHECK(oracle::lu_rank(nb.basis) == 2);
  CHECK((nb.basis.adjoint() * nb.basis - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
  // kernel of [I I] is {[v; -v]}
  CHECK((nb.basis.topRows(2) + nb.basis.bottomRows(2)).norm() < 1e-14);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a.diagonal() << 1.0, 2.0;
  const auto sys = rpp::validate_system(a, Eigen::Vector2d(1.0, 0.0));
  const auto nb2 = rpp::nullspace_basis(sys, 2.0);
  CHECK(nb2.dim == 3 - oracle::lu_rank(rpp::system_matrix(sys, 2.0)));
  CHECK(nb2.dim == 2);
  CHECK((rpp::system_matrix(sys, 2.0) * nb2.basis).norm() < 1e-14);
}

TEST_CASE("nullspace dimension is m for random controllable pairs") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = rpp::validate_system(oracle::random_matrix(6, 6, rng), oracle::random_matrix(6, 3, rng));
    const Complex lambda(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng));
    const auto nb = rpp::nullspace_basis(sys, lambda);
    CHECK(nb.dim == 3);
    CHECK((rpp::system_matrix(sys, lambda) * nb.basis).norm() < 1e-12);
    CHECK(oracle::lu_rank(nb.basis) == 3);
  }
}

TEST_CASE("realify is the identity on real spectra") {
  std::mt19937_64 rng(5);
  const auto spec = rpp::canonicalize_spectrum({-1.0, -2.0, -3.0}, {}, 3);
  const Eigen::MatrixXd m = oracle::random_matrix(5, 3, rng);
  CHECK((rpp::realify(m.cast<Complex>(), spec, 1e-12) - m).norm() == 0.0);
}

TEST_CASE("realify of one conjugate pair") {
  const auto spec = rpp::canonicalize_spectrum({{-1.0, 1.0}, {-1.0, -1.0}}, {}, 2);
  Eigen::MatrixXcd m(3, 2);
  const Eigen::Vector3d a(1.0, 2.0, 3.0);
  const Eigen::Vector3d b(-4.0, 0.5, 6.0);
  m.col(0) = a.cast<Complex>() + Complex(0, 1) * b.cast<Complex>();
  m.col(1) = m.col(0).conjugate();
  const Eigen::MatrixXd r = rpp::realify(m, spec, 1e-12);
  CHECK((r.col(0) - a).norm() < 1e-15);
  CHECK((r.col(1) - b).norm() < 1e-15);
}

TEST_CASE("realify inverts the pair transform R") {
  std::mt19937_64 rng(9);
  const auto sys = rpp::validate_system(oracle::random_matrix(5, 5, rng), oracle::random_matrix(5, 2, rng));
  const auto spec = rpp::canonicalize_spectrum({{-1.0, 2.0}, {-1.0, -2.0}, {-0.5, 1.0}, {-0.5, -1.0}, -3.0}, {}, 5);
  const auto family = rpp::NullspaceFamily::build(sys, spec);
  const rpp::ParameterMatrix k(family, random_blocks(family, rng));
  const Eigen::MatrixXcd m = rpp::parameter_product(family, k);
  const Eigen::MatrixXd r = rpp::realify(m, spec, 1e-10);
  // [V'_i V'_i+1] R_i = [V_i V_i+1] with R_i = [[1, 1], [j, -j]] for each pair
  Eigen::Matrix2cd ri;
  ri << 1.0, 1.0, Complex(0, 1), Complex(0, -1);
  for (int p = 0; p < spec.pair_count(); ++p) {
    Eigen::MatrixXcd realpair(7, 2);
    realpair.col(0) = r.col(2 * p).cast<Complex>();
    realpair.col(1) = r.col(2 * p + 1).cast<Complex>();
    CHECK((realpair * ri - m.middleCols(2 * p, 2)).norm() < 1e-13);
  }
  CHECK((r.col(4) - m.col(4).real()).norm() == 0.0);
}

TEST_CASE("assemble_candidate on the toy system gives F = diag(-1, -2)") {
  const auto sys = toy();
  const auto spec = rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2);
  const auto family = rpp::NullspaceFamily::build(sys, spec);
  const auto cand = rpp::assemble_candidate(family, identity_parameters(family));
  CHECK((cand.eigenvectors - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(2, 2);
  expect.diagonal() << -1.0, -2.0;
  CHECK((cand.gain - expect).norm() < 1e-12);
  CHECK(rpp::residual(sys, cand) <= 1e-12);
  Eigen::EigenSolver<Eigen::MatrixXd> es(sys.a() + sys.b() * cand.gain);
  std::vector<Complex> got(es.eigenvalues().data(), es.eigenvalues().data() + 2);
  CHECK(oracle::brute_force_match(got, {-1.0, -2.0}) < 1e-12);
}

TEST_CASE("SISO gain is unique and equals Ackermann") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 0, 0;
  const Eigen::Vector2d b(0.0, 1.0);
  const auto sys = rpp::validate_system(a, b);
  const auto spec = rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2);
  const auto family = rpp::NullspaceFamily::build(sys, spec);
  const Eigen::RowVectorXd ack = oracle::ackermann(a, b, {-1.0, -2.0});
  CHECK(ack(0) == doctest::Approx(-2.0));
  CHECK(ack(1) == doctest::Approx(-3.0));
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const rpp::ParameterMatrix k(family, random_blocks(family, rng));
    const auto cand = rpp::assemble_candidate(family, k);
    CHECK((cand.gain - ack).norm() < 1e-10);
  }
}

TEST_CASE("zero parameters are rank deficient") {
  const auto family = rpp::NullspaceFamily::build(toy(), rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2));
  const rpp::ParameterMatrix zero(family, {Eigen::MatrixXcd::Zero(2, 1), Eigen::MatrixXcd::Zero(2, 1)});
  CHECK_THROWS_AS(rpp::assemble_candidate(family, zero), rpp::Error);
  try {
    rpp::assemble_candidate(family, zero);
  } catch (const rpp::Error& e) {
    CHECK(e.code() == rpp::ErrorCode::RankDeficientX);
  }
}

TEST_CASE("residual is positive for a wrong gain") {
  const auto sys = toy();
  const auto family = rpp::NullspaceFamily::build(sys, rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2));
  auto cand = rpp::assemble_candidate(family, identity_parameters(family));
  cand.gain(0, 0) += 0.1;
  CHECK(rpp::residual(sys, cand) > 0.0);
}

TEST_CASE("random complex spectra place exactly with real gains") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = rpp::validate_system(oracle::random_matrix(6, 6, rng), oracle::random_matrix(6, 2, rng));
    const std::vector<Complex> poles{{-1.0, 1.0}, {-1.0, -1.0}, {-2.0, 0.5}, {-2.0, -0.5}, -0.3, -4.0};
    const auto spec = rpp::canonicalize_spectrum(poles, {}, 6);
    const auto family = rpp::NullspaceFamily::build(sys, spec);
    const auto cand = rpp::assemble_candidate(family, rpp::ParameterMatrix(family, random_blocks(family, rng)));
    CHECK(rpp::residual(sys, cand) < 1e-8);
    Eigen::EigenSolver<Eigen::MatrixXd> es(sys.a() + sys.b() * cand.gain);
    std::vector<Complex> got(es.eigenvalues().data(), es.eigenvalues().data() + 6);
    CHECK(oracle::brute_force_match(got, poles) < 1e-6);
  }
}

TEST_CASE("multiplicity above the kernel dimension is rejected") {
  const auto sys = rpp::validate_system(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(0.0, 1.0));
  const auto spec = rpp::canonicalize_spectrum({-1.0}, {2}, 2);
  CHECK_THROWS_AS(rpp::NullspaceFamily::build(sys, spec), rpp::Error);
}

TEST_CASE("gain is invariant under scaling of K") {
  std::mt19937_64 rng(4);
  const auto sys = rpp::validate_system(oracle::random_matrix(4, 4, rng), oracle::random_matrix(4, 2, rng));
  const auto spec = rpp::canonicalize_spectrum({{-1.0, 1.0}, {-1.0, -1.0}, -2.0, -3.0}, {}, 4);
  const auto family = rpp::NullspaceFamily::build(sys, spec);
  const rpp::ParameterMatrix k(family, random_blocks(family, rng));
  const auto base = rpp::assemble_candidate(family, k);
  for (double c : {-3.0, 0.5, 7.0}) {
    const auto scaled = rpp::assemble_candidate(family, k.scaled(c));
    CHECK((scaled.gain - base.gain).cwiseAbs().maxCoeff() < 1e-10);
  }
}
