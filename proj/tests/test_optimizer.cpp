#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rpp/conditioning.hpp"
#include "rpp/error.hpp"
#include "rpp/optimizer.hpp"

using rpp::Complex;

namespace {

rpp::LtiSystem toy() { return rpp::validate_system(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Identity(2, 2)); }

rpp::RealizedCandidate toy_identity_candidate() {
  const auto family = rpp::NullspaceFamily::build(toy(), rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2));
  std::vector<Eigen::MatrixXcd> blocks;
  for (int i = 0; i < 2; ++i) {
    const Eigen::MatrixXcd top = family.bases()[i].topRows(2);
    blocks.push_back(top.fullPivLu().solve(Eigen::VectorXcd::Unit(2, i)));
  }
  return rpp::assemble_candidate(family, rpp::ParameterMatrix(family, blocks));
}

double rel_err(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).norm() / std::max(1e-12, std::max(a.norm(), b.norm()));
}

}  // namespace

TEST_CASE("free parameter counts") {
  CHECK(rpp::free_parameters(rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2), {2, 2}).size() == 4);
  CHECK(rpp::free_parameters(rpp::canonicalize_spectrum({{-1.0, 1.0}, {-1.0, -1.0}}, {}, 2), {1, 1}).size() == 2);
  CHECK(rpp::free_parameters(rpp::canonicalize_spectrum({{-1.0, 1.0}, {-1.0, -1.0}, -2.0}, {}, 3), {2, 2, 2})
            .size() == 6);
}

TEST_CASE("objective values at the toy optimum") {
  const auto cand = toy_identity_candidate();
  CHECK(rpp::evaluate(rpp::ObjectiveSpec::kappa_fro(), cand) == doctest::Approx(2.0));
  CHECK(rpp::evaluate(rpp::ObjectiveSpec::sum_squares(), cand) == doctest::Approx(4.0));
  CHECK(rpp::evaluate(rpp::ObjectiveSpec::weighted(0.5), cand) ==
        doctest::Approx(0.5 * 2.0 + 0.5 * std::sqrt(5.0)));
  CHECK_THROWS_AS(rpp::ObjectiveSpec::weighted(1.5), rpp::Error);
}

TEST_CASE("analytic and central-difference gradients agree") {
  std::mt19937_64 rng(31);
  const std::vector<rpp::ObjectiveSpec> objectives{rpp::ObjectiveSpec::kappa_fro(), rpp::ObjectiveSpec::sum_squares(),
                                                   rpp::ObjectiveSpec::weighted(0.3)};
  for (int trial = 0; trial < 10; ++trial) {
    const auto sys = rpp::validate_system(oracle::random_matrix(5, 5, rng), oracle::random_matrix(5, 2, rng));
    const auto spec = rpp::canonicalize_spectrum({{-1.0, 1.0}, {-1.0, -1.0}, -2.0, -3.0, -0.5}, {}, 5);
    const auto family = rpp::NullspaceFamily::build(sys, spec);
    const auto layout = rpp::free_parameters(spec, family.dims());
    std::string id;
    const Eigen::VectorXd k = rpp::seed_parameters(layout, rpp::SeedStrategy::RandomGaussian, 0, rng, &id);
    for (const auto& obj : objectives) {
      const auto ga = rpp::gradient(obj, family, k, rpp::GradientMode::Analytic);
      const auto gf = rpp::gradient(obj, family, k, rpp::GradientMode::FiniteDifference);
      CHECK(rel_err(ga, gf) <= 1e-5);
    }
  }
}

TEST_CASE("f2 gradient vanishes at an orthogonal X") {
  const auto sys = toy();
  const auto spec = rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2);
  const auto family = rpp::NullspaceFamily::build(sys, spec);
  const auto layout = rpp::free_parameters(spec, family.dims());
  std::vector<Eigen::MatrixXcd> blocks;
  for (int i = 0; i < 2; ++i) {
    const Eigen::MatrixXcd top = family.bases()[i].topRows(2);
    blocks.push_back(top.fullPivLu().solve(Eigen::VectorXcd::Unit(2, i)));
  }
  const Eigen::VectorXd k = layout.to_vector(rpp::ParameterMatrix(family, blocks));
  const auto g = rpp::gradient(rpp::ObjectiveSpec::sum_squares(), family, k, rpp::GradientMode::Analytic);
  CHECK(g.norm() < 1e-12);
}

TEST_CASE("solve reaches kappa_fro = n on the toy system") {
  const auto out =
      rpp::solve(toy(), rpp::canonicalize_spectrum({-1.0, -2.0}, {}, 2), rpp::ObjectiveSpec::kappa_fro(), {});
  CHECK(out.best_objective == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(out.best_residual <= 1e-8);
}

TEST_CASE("SISO gain does not depend on the seed schedule") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd a = oracle::random_matrix(4, 4, rng);
    const Eigen::VectorXd b = oracle::random_matrix(4, 1, rng);
    const std::vector<Complex> poles{-1.0, -2.0, {-1.5, 0.5}, {-1.5, -0.5}};
    const auto sys = rpp::validate_system(a, b);
    const auto spec = rpp::canonicalize_spectrum(poles, {}, 4);
    const Eigen::RowVectorXd ack = oracle::ackermann(a, b, poles);
    for (auto strategy :
         {rpp::SeedStrategy::CanonicalVectors, rpp::SeedStrategy::RandomGaussian, rpp::SeedStrategy::Mixed}) {
      rpp::SearchConfig cfg;
      cfg.max_restarts = 3;
      cfg.seed_strategy = strategy;
      const auto out = rpp::solve(sys, spec, rpp::ObjectiveSpec::kappa_fro(), cfg);
      CHECK((out.best.gain - ack).norm() <= 1e-6 * std::max(1.0, ack.norm()));
    }
  }
}

TEST_CASE("seed schedule is deterministic") {
  const auto spec = rpp::canonicalize_spectrum({{-1.0, 1.0}, {-1.0, -1.0}, -2.0}, {}, 3);
  const auto layout = rpp::free_parameters(spec, {2, 2, 2});
  std::mt19937_64 r1(5), r2(5);
  for (int r = 0; r < 6; ++r) {
    std::string i1, i2;
    const auto k1 = rpp::seed_parameters(layout, rpp::SeedStrategy::Mixed, r, r1, &i1);
    const auto k2 = rpp::seed_parameters(layout, rpp::SeedStrategy::Mixed, r, r2, &i2);
    CHECK(k1 == k2);
    CHECK(i1 == i2);
  }
  std::mt19937_64 r3(0);
  const auto c0 = rpp::seed_parameters(layout, rpp::SeedStrategy::CanonicalVectors, 0, r3);
  CHECK(c0.cwiseAbs().sum() == doctest::Approx(2.0));  // one unit entry per independent block
}

TEST_CASE("search is repeatable and the optimum is first-order stationary") {
  std::mt19937_64 rng(51);
  const auto sys = rpp::validate_system(oracle::random_matrix(5, 5, rng), oracle::random_matrix(5, 2, rng));
  const auto spec = rpp::canonicalize_spectrum({{-1.0, 1.0}, {-1.0, -1.0}, -2.0, -3.0, -0.5}, {}, 5);
  rpp::SearchConfig cfg;
  cfg.max_restarts = 5;
  const auto a = rpp::solve(sys, spec, rpp::ObjectiveSpec::kappa_fro(), cfg);
  const auto b = rpp::solve(sys, spec, rpp::ObjectiveSpec::kappa_fro(), cfg);
  CHECK(a.best_objective == b.best_objective);
  CHECK(a.best.gain == b.best.gain);
  const auto family = rpp::NullspaceFamily::build(sys, spec);
  const auto g = rpp::gradient(rpp::ObjectiveSpec::kappa_fro(), family, a.best_parameters, rpp::GradientMode::Analytic);
  CHECK(g.norm() <= 1e-5 * (1.0 + a.best_objective) * std::max(1.0, a.best_parameters.norm()));
  const auto m = rpp::bundle_metrics(sys, a.best, spec);
  CHECK(rpp::chain_holds(m, 5));
  CHECK(m.kappa_fro == doctest::Approx(a.best_objective).epsilon(1e-9));
}

TEST_CASE("f3 with alpha = 1 reproduces f1") {
  std::mt19937_64 rng(61);
  const auto sys = rpp::validate_system(oracle::random_matrix(4, 4, rng), oracle::random_matrix(4, 2, rng));
  const auto spec = rpp::canonicalize_spectrum({-1.0, -2.0, -3.0, -4.0}, {}, 4);
  rpp::SearchConfig cfg;
  cfg.max_restarts = 4;
  const auto a = rpp::solve(sys, spec, rpp::ObjectiveSpec::kappa_fro(), cfg);
  const auto b = rpp::solve(sys, spec, rpp::ObjectiveSpec::weighted(1.0), cfg);
  CHECK(a.best_objective == b.best_objective);
  CHECK(a.best.gain == b.best.gain);
}
