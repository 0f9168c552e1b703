#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rpp/conditioning.hpp"
#include "rpp/error.hpp"

using rpp::Complex;

TEST_CASE("symmetric matrices have unit eigenvalue conditioning") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd r = oracle::random_matrix(5, 5, rng);
    const auto cond = rpp::eig_condition_numbers(r + r.transpose());
    CHECK_FALSE(cond.defective);
    for (double c : cond.values) CHECK(c == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("upper triangular 2x2 against a hand oracle") {
  Eigen::Matrix2d a;
  a << 1, 1000, 0, 2;
  // x1 = e1, x2 = (1000, 1)/|.|; y1 = (1, -1000)/|.|, y2 = e2
  const double hand = std::sqrt(1.0 + 1000.0 * 1000.0);
  const auto cond = rpp::eig_condition_numbers(a);
  REQUIRE(cond.values.size() == 2);
  for (double c : cond.values) CHECK(c == doctest::Approx(hand).epsilon(1e-9));
  const auto lr = oracle::eig_cond_by_left_right(a);
  for (double c : lr) CHECK(c == doctest::Approx(hand).epsilon(1e-9));
}

TEST_CASE("near-Jordan block is reported defective") {
  Eigen::Matrix2d a;
  a << 0, 1, 0, 1e-14;
  CHECK(rpp::eig_condition_numbers(a).defective);
}

TEST_CASE("condition numbers of simple matrices") {
  CHECK(rpp::condition_fro(Eigen::MatrixXcd::Identity(4, 4)) == doctest::Approx(4.0));
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  CHECK(rpp::condition_fro(d) == doctest::Approx(2.5));
  CHECK(rpp::condition_2(d) == doctest::Approx(2.0));
  CHECK_THROWS_AS(rpp::condition_fro(Eigen::MatrixXcd::Zero(2, 2)), rpp::Error);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXcd x = oracle::random_matrix(6, 6, rng).cast<Complex>();
    CHECK(rpp::condition_fro(x) == doctest::Approx(oracle::kappa_fro_by_inverse(x)).epsilon(1e-9));
  }
}

TEST_CASE("Hungarian assignment agrees with brute force") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Complex> a, b;
    for (int i = 0; i < 6; ++i) {
      a.emplace_back(u(rng), u(rng));
      b.emplace_back(u(rng), u(rng));
    }
    Eigen::MatrixXd cost(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) cost(i, j) = std::abs(a[i] - b[j]);
    const auto asg = rpp::min_cost_assignment(cost);
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) sum += cost(i, asg[i]);
    CHECK(sum == doctest::Approx(oracle::brute_force_min_sum(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("accuracy is tiny for exact placement and continuous under perturbation") {
  const auto sys = rpp::validate_system(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
  const auto spec = rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 2);
  f.diagonal() << -1.0, -2.0;
  CHECK(rpp::accuracy(sys, f, spec) <= 1e-10);
  double prev = 0.0;
  for (double eps : {1e-6, 1e-5, 1e-4, 1e-3}) {
    Eigen::MatrixXd g = f;
    g(0, 0) += eps;
    const double d = rpp::accuracy(sys, g, spec);
    CHECK(d > prev);
    CHECK(d <= 2.0 * eps);
    prev = d;
  }
}

TEST_CASE("bundle metrics on the toy optimum") {
  const auto sys = rpp::validate_system(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2));
  const auto spec = rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2);
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2, 2);
  f.diagonal() << -1.0, -2.0;
  const auto m = rpp::audit_metrics(sys, f, spec);
  CHECK(m.kappa_fro == doctest::Approx(2.0));
  CHECK(m.c_inf == doctest::Approx(1.0));
  CHECK(m.gain_fro == doctest::Approx(std::sqrt(5.0)));
  CHECK(rpp::chain_holds(m, 2));
}

TEST_CASE("conditioning chain on random closed loops") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = rpp::validate_system(oracle::random_matrix(5, 5, rng), oracle::random_matrix(5, 2, rng));
    const Eigen::MatrixXd f = oracle::random_matrix(2, 5, rng);
    Eigen::EigenSolver<Eigen::MatrixXd> es(sys.a() + sys.b() * f, false);
    std::vector<Complex> poles(es.eigenvalues().data(), es.eigenvalues().data() + 5);
    for (Complex& z : poles)
      if (std::abs(z.imag()) < 1e-12) z = z.real();
    const auto spec = rpp::canonicalize_spectrum(poles, {}, 5);
    const auto m = rpp::audit_metrics(sys, f, spec);
    CHECK(rpp::chain_holds(m, 5));
    CHECK(m.accuracy < 1e-8);
  }
}
