#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mrspec/likelihood.hpp"
#include "support.hpp"

using namespace mrspec;

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

std::vector<Observation> even_dataset(support::Gen& g, int n) {
  std::vector<Observation> obs;
  for (int k = 0; k < n; ++k) obs.push_back({2L * k, g.normal()});
  return obs;
}

}  // namespace

TEST_CASE("white-noise likelihood examples") {
  const SpectralModel wn;
  const std::vector<Observation> one{{0, 0.7}};
  CHECK(exact_loglik(wn, one) == doctest::Approx(-0.5 * kLog2Pi - 0.49 / 2).epsilon(1e-13));

  support::Gen g(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Observation> obs;
    long idx = g.integer(0, 3);
    double expected = 0.0;
    for (int i = 0, n = g.integer(1, 12); i < n; ++i) {
      const double x = g.normal();
      obs.push_back({idx, x});
      expected += -0.5 * kLog2Pi - 0.5 * x * x;
      idx += g.integer(1, 5);
    }
    CHECK(exact_loglik(wn, obs) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("mixed-pattern likelihood matches a dense normal density") {
  const auto model = ar2_model(1.0 / 12.0, 0.9);
  const std::vector<long> idx{0, 2, 4, 6, 7, 8};
  const auto gamma = support::yule_walker_autocov(model.ar, 1.0, 8);
  Eigen::MatrixXd cov(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) cov(i, j) = gamma[static_cast<std::size_t>(std::abs(idx[i] - idx[j]))];
  support::Gen g(32);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x(6);
    std::vector<Observation> obs;
    for (int i = 0; i < 6; ++i) {
      x[i] = 2.0 * g.normal();
      obs.push_back({idx[static_cast<std::size_t>(i)], x[i]});
    }
    CHECK(std::abs(exact_loglik(model, obs) - support::mvn_logpdf(cov, x)) < 1e-9);
  }
}

TEST_CASE("likelihood input validation") {
  const SpectralModel wn;
  CHECK_THROWS_AS(exact_loglik(wn, std::vector<Observation>{}), std::invalid_argument);
  CHECK_THROWS_AS(exact_loglik(wn, std::vector<Observation>{{1, 0.0}, {1, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(exact_loglik(wn, std::vector<Observation>{{-1, 0.0}}), std::invalid_argument);
}

TEST_CASE("property: even-index likelihood is symmetric about a quarter") {
  support::Gen g(33);
  for (int trial = 0; trial < 10; ++trial) {
    const auto obs = even_dataset(g, g.integer(1, 40));
    for (int k = 0; k < 10; ++k) {
      const double w = g.uniform(0.01, 0.49);
      const double a = exact_loglik(ar2_model(w, 0.9), obs);
      const double b = exact_loglik(ar2_model(0.5 - w, 0.9), obs);
      CHECK(std::abs(a - b) < 1e-8);
    }
  }
}

TEST_CASE("surface examples") {
  support::Gen g(34);
  const auto obs = even_dataset(g, 64);
  const auto grid = default_omega_grid(201);
  CHECK(grid.size() == 201);
  CHECK(grid.front() == doctest::Approx(0.5 / 201));
  CHECK(grid.back() == doctest::Approx(0.5 * 200 / 201));
  const auto s = omega_surface(obs, grid, 0.9);
  CHECK_FALSE(s.aligned);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(s.loglik[i] - s.loglik[grid.size() - 1 - i]) < 1e-8);

  const std::vector<double> single{0.2};
  const auto one = omega_surface(obs, single, 0.9);
  REQUIRE(one.loglik.size() == 1);
  CHECK(one.loglik[0] == exact_loglik(ar2_model(0.2, 0.9), obs));

  CHECK_THROWS_AS(omega_surface(obs, std::vector<double>{}, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(omega_surface(obs, std::vector<double>{0.3, 0.2}, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(omega_surface(std::vector<Observation>{}, single, 0.9), std::invalid_argument);
}

TEST_CASE("alignment") {
  LikelihoodSurface s;
  s.omegas = {0.1, 0.2, 0.3};
  s.loglik = {-5.0, -2.0, -3.5};
  s.valid = {true, true, true};
  const auto a = align(s);
  CHECK(a.aligned);
  CHECK(a.loglik == std::vector<double>{-3.0, 0.0, -1.5});
  const auto b = align(a);
  CHECK(b.loglik == a.loglik);
}

TEST_CASE("design indices abut without a gap") {
  ExperimentDesign d;
  d.n_low = 4;
  d.n_high = 3;
  d.delta_low = 2;
  CHECK(design_indices(d) == std::vector<long>{0, 2, 4, 6, 8, 9, 10});
  d.n_low = 0;
  CHECK(design_indices(d) == std::vector<long>{0, 1, 2});
  d.n_high = 0;
  CHECK_THROWS_AS(validate(d), std::invalid_argument);
  d.n_low = 3;
  d.replicates = 0;
  CHECK_THROWS_AS(validate(d), std::invalid_argument);
}

TEST_CASE("single replicate reproduces the surface of that dataset") {
  ExperimentDesign d;
  d.n_low = 30;
  d.n_high = 5;
  d.replicates = 1;
  d.seed = 77;
  d.grid = default_omega_grid(41);
  const auto avg = mc_average_surface(d);
  const auto direct = align(omega_surface(simulate_design(d, 0), d.grid, d.modulus));
  CHECK(avg.aligned);
  for (std::size_t i = 0; i < d.grid.size(); ++i) CHECK(avg.loglik[i] == doctest::Approx(direct.loglik[i]).epsilon(1e-12));
  double best = -1e300;
  for (double v : avg.loglik) best = std::max(best, v);
  CHECK(best == 0.0);
}

TEST_CASE("averaged surfaces are deterministic") {
  ExperimentDesign d;
  d.n_low = 20;
  d.n_high = 4;
  d.replicates = 5;
  d.seed = 3;
  d.grid = default_omega_grid(21);
  const auto a = mc_average_surface(d);
  const auto b = mc_average_surface(d);
  CHECK(a.loglik == b.loglik);
  CHECK(a.stderr_aligned == b.stderr_aligned);
}

TEST_CASE("stride-2-only averaged surface is symmetric within Monte Carlo error") {
  ExperimentDesign d;
  d.n_low = 64;
  d.n_high = 0;
  d.replicates = 40;
  d.seed = 5;
  d.grid = default_omega_grid(51);
  const auto s = mc_average_surface(d);
  // Each replicate surface is exactly symmetric, so paired differences vanish.
  for (std::size_t i = 0; i < d.grid.size(); ++i) {
    const double diff = s.loglik[i] - s.loglik[d.grid.size() - 1 - i];
    const double se = std::max(s.stderr_aligned[i], s.stderr_aligned[d.grid.size() - 1 - i]);
    CHECK(std::abs(diff) <= 3.0 * se + 1e-8);
  }
}
