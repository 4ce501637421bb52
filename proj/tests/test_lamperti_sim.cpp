#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "pssmp/lamperti_sim.hpp"
#include "pssmp/levy_model.hpp"
#include "pssmp/rng.hpp"
#include "pssmp/threshold_solver.hpp"
#include "pssmp/value_functions.hpp"

using namespace pssmp;

namespace {

const PredictionProblem kBmMax{LevyModel::brownian(1.0, 1.0), 1.0,
                               Direction::Max};

XiPath linear_path(double t_end, double slope, int n) {
  XiPath p;
  p.kill_time = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    p.t.push_back(t_end * i / n);
    p.x.push_back(slope * t_end * i / n);
  }
  return p;
}

}  // namespace

TEST_CASE("simulate_xi drift statistics") {
  const LevyModel bm = LevyModel::brownian(1.0, 1.0);
  PathConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  double sum = 0, sumsq = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const XiPath p = simulate_xi(bm, cfg, i);
    CHECK(std::isinf(p.kill_time));
    const double v = p.x.back() / p.t.back();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sumsq / n - mean * mean) / n);
  CHECK(std::fabs(mean - (-bm.mu)) < 3.0 * se);

  const LevyModel cl = LevyModel::cramer_lundberg(2.0, 1.0, 1.0);
  sum = sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const XiPath p = simulate_xi(cl, cfg, i);
    const double v = p.x.back() / p.t.back();
    sum += v;
    sumsq += v * v;
  }
  const double meanc = sum / n;
  const double sec = std::sqrt((sumsq / n - meanc * meanc) / n);
  // psi'(0) = d - lambda/rho
  CHECK(std::fabs(meanc - exponent_derivative(cl, 0.0)) < 3.0 * sec);
}

TEST_CASE("killing time is exponential and marks the path") {
  const LevyModel bmq = LevyModel::brownian(1.0, 1.0, 2.0);
  PathConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 50.0;
  double sum = 0;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const XiPath p = simulate_xi(bmq, cfg, i);
    CHECK(p.killed);
    CHECK(p.t.back() <= p.kill_time + 1e-12);
    sum += p.kill_time;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("lamperti identity clock on the zero path") {
  const XiPath flat = linear_path(2.0, 0.0, 100);
  const LampertiPath lp = lamperti_build(flat, 1.5, 1.0);
  for (size_t j = 0; j < lp.u.size(); ++j) {
    CHECK(lp.u[j] == doctest::Approx(flat.t[j]).epsilon(1e-12));
    CHECK(lp.X[j] == doctest::Approx(1.0));
  }
}

TEST_CASE("lamperti clock of a constant-drift path") {
  const double mu = 0.7, alpha = 1.3, t_end = 3.0;
  const XiPath p = linear_path(t_end, -mu, 300);
  const LampertiPath lp = lamperti_build(p, alpha, 1.0);
  const double exact = (1.0 - std::exp(-alpha * mu * t_end)) / (alpha * mu);
  CHECK(lp.u.back() == doctest::Approx(exact).epsilon(1e-6));
  CHECK(path_clock(p, alpha, 1.7) ==
        doctest::Approx((1.0 - std::exp(-alpha * mu * 1.7)) / (alpha * mu))
            .epsilon(1e-10));
}

TEST_CASE("pathwise scaling in x0") {
  PathConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 2.0;
  const XiPath p = simulate_xi(LevyModel::brownian(1.0, 1.0), cfg, 7);
  const double alpha = 1.5, c = 2.0;
  const LampertiPath a = lamperti_build(p, alpha, 1.0);
  const LampertiPath b = lamperti_build(p, alpha, c);
  REQUIRE(a.u.size() == b.u.size());
  for (size_t j = 0; j < a.u.size(); ++j) {
    CHECK(b.u[j] == doctest::Approx(std::pow(c, alpha) * a.u[j]).epsilon(1e-12));
    CHECK(b.X[j] == doctest::Approx(c * a.X[j]).epsilon(1e-12));
  }
}

TEST_CASE("locate_theta on synthetic paths") {
  {
    const XiPath down = linear_path(2.0, -1.0, 50);
    const ThetaInfo info = locate_theta(down, 1.0, 1.0, 1.0);
    CHECK(info.G == 0.0);
    CHECK(info.theta == 0.0);
  }
  {
    // up to the jump epoch, then down
    XiPath p;
    p.kill_time = std::numeric_limits<double>::infinity();
    p.t = {0.0, 1.0, 1.0, 3.0};
    p.x = {0.0, 0.5, 0.5, -2.0};
    const ThetaInfo info = locate_theta(p, 1.0, 1.0, 1.0);
    CHECK(info.G == doctest::Approx(1.0));
    CHECK(info.theta ==
          doctest::Approx(path_clock(p, 1.0, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("E[Theta] stable under horizon doubling") {
  PathConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 20000;
  cfg.seed = 5;
  cfg.stop_margin = -1.0;  // no drawdown cutoff, the horizon is the variable
  double mean[2], se[2];
  int idx = 0;
  for (double horizon : {15.0, 30.0}) {
    cfg.horizon = horizon;
    double sum = 0, sumsq = 0;
    for (long i = 0; i < cfg.n_paths; ++i) {
      const PathOutcome o =
          simulate_prediction_path(kBmMax.model, kBmMax.alpha, {}, cfg, i);
      sum += o.theta;
      sumsq += o.theta * o.theta;
    }
    mean[idx] = sum / cfg.n_paths;
    se[idx] = std::sqrt((sumsq / cfg.n_paths - mean[idx] * mean[idx]) /
                        cfg.n_paths);
    ++idx;
  }
  CHECK(std::fabs(mean[0] - mean[1]) <
        2.0 * std::sqrt(se[0] * se[0] + se[1] * se[1]));
}

TEST_CASE("sweep determinism and serial/parallel equality") {
  PathConfig cfg;
  cfg.dt = 2e-3;
  cfg.n_paths = 2000;
  cfg.seed = 77;
  cfg.stop_margin = 4.0;
  const std::vector<double> grid = {0.4, 0.47, 0.55};

  const SimulationReport a = sweep_K(kBmMax, grid, cfg);
  const SimulationReport b = sweep_K(kBmMax, grid, cfg);
  cfg.parallel = false;
  const SimulationReport c = sweep_K(kBmMax, grid, cfg);
  for (size_t j = 0; j < grid.size(); ++j) {
    CHECK(std::memcmp(&a.rows[j].mean, &b.rows[j].mean, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.rows[j].mean, &c.rows[j].mean, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.rows[j].stderr_, &c.rows[j].stderr_,
                      sizeof(double)) == 0);
    CHECK(a.rows[j].stderr_ > 0.0);
  }
  CHECK(a.truncation_rate < 0.01);
  CHECK(a.truncation_bias_bound > 0.0);

  // singleton grid equals objective_estimate
  auto [m1, s1] = objective_estimate(kBmMax, 0.47, cfg);
  cfg.parallel = true;
  const SimulationReport single = sweep_K(kBmMax, {0.47}, cfg);
  CHECK(m1 == single.rows[0].mean);
  CHECK(s1 == single.rows[0].stderr_);
}

TEST_CASE("objective vanishes as K approaches one") {
  PathConfig cfg;
  cfg.dt = 2e-3;
  cfg.n_paths = 2000;
  cfg.seed = 3;
  cfg.stop_margin = 4.0;
  auto [m, se] = objective_estimate(kBmMax, 0.999, cfg);
  CHECK(std::fabs(m) < std::max(3.0 * se, 1e-2));
}

TEST_CASE("input validation and truncation failure") {
  PathConfig cfg;
  cfg.dt = 2e-3;
  cfg.n_paths = 500;
  CHECK_THROWS_AS(sweep_K(kBmMax, {1.5}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(
      sweep_K({LevyModel::brownian(1.0, 0.5), 2.0, Direction::Min}, {0.5},
              cfg),
      std::invalid_argument);
  cfg.n_paths = 50;
  CHECK_THROWS_AS(sweep_K(kBmMax, {0.5}, cfg), std::invalid_argument);
  cfg.n_paths = 500;
  cfg.horizon = 0.05;  // far too short for the rule to fire
  CHECK_THROWS_AS(sweep_K(kBmMax, {0.2}, cfg), std::runtime_error);
}

TEST_CASE("mc_vk basics") {
  const ThresholdSolution sol = solve_kstar(kBmMax);
  PathConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 4000;
  cfg.seed = 9;
  auto [z, zse] = mc_vk(kBmMax, sol.k_star, sol.k_star + 0.1, cfg);
  CHECK(z == 0.0);
  CHECK(zse == 0.0);

  auto [m, se] = mc_vk(kBmMax, sol.k_star, 0.0, cfg);
  CHECK(se > 0.0);
  CHECK(std::fabs(m - v_star_1d(kBmMax, sol.k_star, 0.0)) < 4.0 * se);

  // V_{k0}(0) >= V*(0): the Monte Carlo value at the suboptimal threshold
  auto [m0, se0] = mc_vk(kBmMax, sol.k0, 0.0, cfg);
  CHECK(std::fabs(m0 - v_k_1d(kBmMax, sol.k0, 0.0)) < 4.0 * se0);
  CHECK(m0 > m - 3.0 * std::sqrt(se * se + se0 * se0));
}

TEST_CASE("mc_vk cramer-lundberg event kernel") {
  const PredictionProblem cl{LevyModel::cramer_lundberg(2.0, 1.0, 1.0, 2.0),
                             1.0, Direction::Max};
  const ThresholdSolution sol = solve_kstar(cl);
  PathConfig cfg;
  cfg.n_paths = 20000;
  cfg.seed = 12;
  auto [m, se] = mc_vk(cl, sol.k_star, 0.0, cfg);
  CHECK(std::fabs(m - v_star_1d(cl, sol.k_star, 0.0)) < 4.0 * se);
}

TEST_CASE("mc_vk discount consistency under horizon doubling") {
  const ThresholdSolution sol = solve_kstar(kBmMax);
  PathConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_paths = 4000;
  cfg.seed = 10;
  cfg.horizon = 30.0;
  auto [m1, se1] = mc_vk(kBmMax, sol.k_star, 0.0, cfg);
  cfg.horizon = 60.0;
  auto [m2, se2] = mc_vk(kBmMax, sol.k_star, 0.0, cfg);
  CHECK(std::fabs(m1 - m2) < std::sqrt(se1 * se1 + se2 * se2));
}

TEST_CASE("discounted occupation bound with constant payoff") {
  // with q > phi(beta), E[int_0^{tau_k} e^{(phi(beta)-q)t} dt] <= 1/(q-phi)
  const LevyModel m = LevyModel::brownian(1.0, 1.0, 1.0);
  const double rate = 1.0 - laplace_exponent_unkilled(m, 1.0);  // q - phi(1)
  REQUIRE(rate > 0.0);
  Rng rng(44, 0);
  const double dt = 1e-3, k = 0.6;
  double sum = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    double xi = 0, ximax = 0, t = 0, acc = 0;
    while (t < 50.0) {
      xi += -m.mu * dt + m.sigma * std::sqrt(dt) * rng.normal();
      t += dt;
      ximax = std::max(ximax, xi);
      if (ximax - xi >= k) break;
      acc += std::exp(-rate * t) * dt;
    }
    sum += acc;
  }
  CHECK(sum / n <= 1.0 / rate);
}
