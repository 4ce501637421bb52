#include "pssmp/lamperti_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pssmp/rng.hpp"

namespace pssmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exact integral of e^{beta (x0 + a s)} over s in [0, len]
double exp_segment_integral(double beta_x0, double beta_a, double len) {
  if (std::fabs(beta_a * len) < 1e-12) {
    return std::exp(beta_x0) * len * (1.0 + 0.5 * beta_a * len);
  }
  return std::exp(beta_x0) * std::expm1(beta_a * len) / beta_a;
}

double drift_at_zero(const LevyModel& m) { return exponent_derivative(m, 0.0); }

}  // namespace

double default_horizon(const LevyModel& m, const PathConfig& cfg) {
  if (cfg.horizon > 0) return cfg.horizon;
  const double drift = std::fabs(drift_at_zero(m));
  return 40.0 / std::max(drift, 0.025);  // cap at 1600 for near-zero drift
}

double default_stop_margin(const LevyModel& m, const PathConfig& cfg) {
  if (cfg.stop_margin > 0) return cfg.stop_margin;
  return 10.0 / right_inverse_phi(m, m.q);
}

XiPath simulate_xi(const LevyModel& m, const PathConfig& cfg,
                   uint64_t path_index) {
  Rng rng(cfg.seed, path_index);
  XiPath path;
  const double horizon = default_horizon(m, cfg);
  const double e_life = m.q > 0 ? rng.exponential(m.q) : kInf;
  path.kill_time = e_life;
  path.killed = e_life < horizon;
  const double T = std::min(horizon, e_life);

  if (m.family == Family::BrownianDrift) {
    const long n = static_cast<long>(std::ceil(T / cfg.dt));
    path.t.reserve(n + 1);
    path.x.reserve(n + 1);
    double t = 0, xi = 0;
    path.t.push_back(0);
    path.x.push_back(0);
    while (t < T) {
      const double h = std::min(cfg.dt, T - t);
      xi += -m.mu * h + m.sigma * std::sqrt(h) * rng.normal();
      t += h;
      path.t.push_back(t);
      path.x.push_back(xi);
    }
  } else {
    double t = 0, xi = 0;
    path.t.push_back(0);
    path.x.push_back(0);
    while (t < T) {
      const double gap =
          m.jump_rate > 0 ? rng.exponential(m.jump_rate) : kInf;
      const double seg_end = std::min(t + gap, T);
      xi += m.d * (seg_end - t);
      t = seg_end;
      path.t.push_back(t);
      path.x.push_back(xi);
      if (t >= T) break;
      xi -= rng.exponential(m.jump_mean_inv);
      path.t.push_back(t);  // duplicate knot marks the jump
      path.x.push_back(xi);
    }
  }
  return path;
}

LampertiPath lamperti_build(const XiPath& path, double alpha, double x0) {
  LampertiPath out;
  const size_t n = path.t.size();
  out.u.resize(n);
  out.X.resize(n);
  const double scale = std::pow(x0, alpha);
  double I = 0;
  for (size_t j = 0; j < n; ++j) {
    if (j > 0) {
      const double len = path.t[j] - path.t[j - 1];
      if (len > 0) {
        const double a = (path.x[j] - path.x[j - 1]) / len;
        if (alpha * std::max(path.x[j], path.x[j - 1]) > 700.0) {
          out.overflowed = true;
          out.u.resize(j);
          out.X.resize(j);
          break;
        }
        I += exp_segment_integral(alpha * path.x[j - 1], alpha * a, len);
      }
    }
    out.u[j] = scale * I;
    out.X[j] = x0 * std::exp(path.x[j]);
  }
  // zeta: the clock value at killing, or the end-of-path estimate of the
  // I_infinity limit for paths drifting to -infinity; infinity otherwise.
  if (path.killed) {
    out.zeta = scale * path_clock(path, alpha, path.kill_time);
  } else if (!out.u.empty() && path.x.back() < 0) {
    out.zeta = out.u.back();
  } else {
    out.zeta = kInf;
  }
  return out;
}

double path_clock(const XiPath& path, double beta, double t) {
  double I = 0;
  for (size_t j = 1; j < path.t.size(); ++j) {
    const double len = path.t[j] - path.t[j - 1];
    if (len <= 0) continue;
    const double end = std::min(path.t[j], t);
    if (end <= path.t[j - 1]) break;
    const double a = (path.x[j] - path.x[j - 1]) / len;
    I += exp_segment_integral(beta * path.x[j - 1], beta * a,
                              end - path.t[j - 1]);
    if (path.t[j] >= t) break;
  }
  return I;
}

ThetaInfo locate_theta(const XiPath& path, double beta, double alpha,
                       double x0) {
  ThetaInfo info;
  double best = -kInf;
  double G = 0;
  for (size_t j = 0; j < path.t.size(); ++j) {
    if (path.x[j] >= best) {  // last-visit convention
      best = path.x[j];
      G = path.t[j];
    }
  }
  info.G = G;
  info.theta = std::pow(x0, alpha) * path_clock(path, beta, G);
  const double t_end = path.t.empty() ? 0 : path.t.back();
  info.truncated = !path.killed && G > 0.95 * t_end;
  return info;
}

PathOutcome simulate_prediction_path(const LevyModel& m, double beta,
                                     const std::vector<double>& ks,
                                     const PathConfig& cfg,
                                     uint64_t path_index) {
  Rng rng(cfg.seed, path_index);
  const size_t nk = ks.size();
  PathOutcome out;
  out.tau.assign(nk, 0);
  out.capped.assign(nk, 0);

  const double horizon = default_horizon(m, cfg);
  const double e_life = m.q > 0 ? rng.exponential(m.q) : kInf;
  const double T = std::min(horizon, e_life);
  const double stop_dd =
      cfg.stop_margin < 0
          ? kInf
          : (nk ? ks.back() : 0.0) + default_stop_margin(m, cfg);
  const double x0a = std::pow(cfg.x0, std::fabs(beta));

  double t = 0, xi = 0, ximax = 0;
  double w = 1.0;  // e^{beta xi}
  double I = 0, I_G = 0, G = 0;
  size_t ntrig = 0;
  bool overflow = false;

  if (m.family == Family::BrownianDrift) {
    const double drift = -m.mu * cfg.dt;
    const double sd = m.sigma * std::sqrt(cfg.dt);
    // Broadie-Glasserman-Kou continuity correction for monitoring the
    // drawdown on a grid: the discrete running max sits about
    // 0.5826 sigma sqrt(dt) below the continuous one and the excursion
    // minimum is missed by the same amount, so the crossing barrier is
    // lowered by twice that. Removes the O(sqrt(dt)) first-passage bias.
    const double cc2 = 2.0 * 0.5826 * m.sigma * std::sqrt(cfg.dt);
    while (t < T) {
      double h = cfg.dt, dxi;
      if (T - t < cfg.dt) {
        h = T - t;
        dxi = -m.mu * h + m.sigma * std::sqrt(h) * rng.normal();
      } else {
        dxi = drift + sd * rng.normal();
      }
      xi += dxi;
      t += h;
      if (std::fabs(beta * xi) > 700.0) {
        overflow = true;
        break;
      }
      const double w_new = std::exp(beta * xi);
      I += 0.5 * (w + w_new) * h;
      w = w_new;
      if (xi >= ximax) {
        ximax = xi;
        G = t;
        I_G = I;
      }
      const double Y = ximax - xi;
      while (ntrig < nk && Y >= ks[ntrig] - cc2) {
        out.tau[ntrig] = x0a * I;
        ++ntrig;
      }
      if (ntrig == nk && Y >= stop_dd) break;
    }
  } else {
    while (t < T) {
      const double gap =
          m.jump_rate > 0 ? rng.exponential(m.jump_rate) : kInf;
      const double seg_end = std::min(t + gap, T);
      const double len = seg_end - t;
      I += exp_segment_integral(beta * xi, beta * m.d, len);
      xi += m.d * len;
      t = seg_end;
      if (std::fabs(beta * xi) > 700.0) {
        overflow = true;
        break;
      }
      if (xi >= ximax) {
        ximax = xi;
        G = t;
        I_G = I;
      }
      if (t >= T) break;
      xi -= rng.exponential(m.jump_mean_inv);
      const double Y = ximax - xi;
      while (ntrig < nk && Y >= ks[ntrig]) {
        out.tau[ntrig] = x0a * I;
        ++ntrig;
      }
      if (ntrig == nk && Y >= stop_dd) break;
    }
  }

  out.theta = x0a * I_G;
  const bool ended_by_kill = e_life <= t + 1e-300 && m.q > 0 && t >= T;
  if (ntrig < nk) {
    if (ended_by_kill) {
      // the pssMp jumps onto 0 at zeta; the rule fires there at the latest
      const double zeta = x0a * I;
      for (size_t j = ntrig; j < nk; ++j) {
        out.tau[j] = zeta;
        out.capped[j] = 1;
      }
    } else {
      out.flagged = true;
      const double cap = x0a * I;
      for (size_t j = ntrig; j < nk; ++j) {
        out.tau[j] = cap;
        out.capped[j] = 1;
      }
    }
  }
  if (overflow) out.flagged = true;
  if (!ended_by_kill && t >= horizon && G > 0.95 * t) out.flagged = true;
  return out;
}

namespace {

struct LossTable {
  // losses[j * n + i] for threshold j, path i; thetas[i]; flags[i]
  std::vector<double> losses;
  std::vector<double> thetas;
  std::vector<unsigned char> flags;
};

LossTable run_prediction_paths(const LevyModel& m, double beta,
                               const std::vector<double>& ks,
                               const PathConfig& cfg) {
  const long n = cfg.n_paths;
  const size_t nk = ks.size();
  LossTable tab;
  tab.losses.resize(nk * static_cast<size_t>(n));
  tab.thetas.resize(n);
  tab.flags.resize(n);

#pragma omp parallel for schedule(dynamic, 64) if (cfg.parallel)
  for (long i = 0; i < n; ++i) {
    const PathOutcome o = simulate_prediction_path(m, beta, ks, cfg, i);
    tab.thetas[i] = o.theta;
    tab.flags[i] = o.flagged;
    for (size_t j = 0; j < nk; ++j) {
      tab.losses[j * n + i] = std::fabs(o.theta - o.tau[j]) - o.theta;
    }
  }
  return tab;
}

std::pair<double, double> mean_stderr(const double* v, long n) {
  double mean = 0;
  for (long i = 0; i < n; ++i) mean += v[i];
  mean /= n;
  double ss = 0;
  for (long i = 0; i < n; ++i) {
    const double d = v[i] - mean;
    ss += d * d;
  }
  const double var = n > 1 ? ss / (n - 1) : 0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace

SimulationReport sweep_K(const PredictionProblem& p,
                         const std::vector<double>& K_grid,
                         const PathConfig& cfg) {
  require_admissible(p);
  if (cfg.n_paths < 100) {
    throw std::invalid_argument("n_paths must be >= 100 for a reported CI");
  }
  const bool is_max = p.direction == Direction::Max;
  std::vector<double> ks;
  ks.reserve(K_grid.size());
  for (double K : K_grid) {
    if (is_max) {
      if (!(K > 0 && K < 1))
        throw std::invalid_argument("Max thresholds require K in (0,1)");
      ks.push_back(-std::log(K));
    } else {
      if (!(K > 1)) throw std::invalid_argument("Min thresholds require K > 1");
      ks.push_back(std::log(K));
    }
  }
  // kernel wants ascending thresholds; remember the original order
  std::vector<size_t> order(ks.size());
  for (size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return ks[a] < ks[b]; });
  std::vector<double> ks_sorted(ks.size());
  for (size_t j = 0; j < order.size(); ++j) ks_sorted[j] = ks[order[j]];

  const LossTable tab =
      run_prediction_paths(p.model, p.beta(), ks_sorted, cfg);

  SimulationReport rep;
  rep.n_paths = cfg.n_paths;
  long flagged = 0;
  for (auto f : tab.flags) flagged += f;
  rep.truncation_rate = static_cast<double>(flagged) / cfg.n_paths;
  if (rep.truncation_rate > 0.01) {
    throw std::runtime_error(
        "truncation rate " + std::to_string(rep.truncation_rate) +
        " exceeds 1%; increase the horizon");
  }
  auto [tm, ts] = mean_stderr(tab.thetas.data(), cfg.n_paths);
  rep.theta_mean = tm;
  rep.theta_stderr = ts;
  rep.truncation_bias_bound =
      std::exp(-right_inverse_phi(p.model, p.model.q) *
               default_stop_margin(p.model, cfg));
  rep.rows.resize(K_grid.size());
  for (size_t j = 0; j < order.size(); ++j) {
    auto [m, s] = mean_stderr(tab.losses.data() + j * cfg.n_paths, cfg.n_paths);
    SweepRow& row = rep.rows[order[j]];
    row.K = K_grid[order[j]];
    row.mean = m;
    row.stderr_ = s;
    row.n = cfg.n_paths;
  }
  return rep;
}

std::pair<double, double> objective_estimate(const PredictionProblem& p,
                                             double K, const PathConfig& cfg) {
  const SimulationReport rep = sweep_K(p, {K}, cfg);
  return {rep.rows[0].mean, rep.rows[0].stderr_};
}

namespace {

// closed-form integral of e^{c(t0+s)} (1 - 2 e^{-g (Y0 - a s)}) over s in
// [0, len] (linear drawdown segment with slope -a of the reflected process)
double discounted_payoff_segment(double c, double g, double t0, double Y0,
                                 double a, double len) {
  const double e0 = std::exp(c * t0);
  const double p1 = std::fabs(c) > 1e-12 ? std::expm1(c * len) / c : len;
  const double r = c + g * a;
  const double p2 = std::fabs(r) > 1e-12 ? std::expm1(r * len) / r : len;
  return e0 * (p1 - 2.0 * std::exp(-g * Y0) * p2);
}

}  // namespace

std::pair<double, double> mc_vk(const PredictionProblem& p, double k, double y,
                                const PathConfig& cfg) {
  require_admissible(p);
  if (y >= k) return {0.0, 0.0};
  const double beta = p.beta();
  const LevyModel tilted = esscher_tilt(p.model, beta);
  const double c = laplace_exponent_unkilled(p.model, beta) - p.model.q;
  const double phi_q = right_inverse_phi(p.model, p.model.q);
  const long n = cfg.n_paths;
  double horizon = cfg.horizon;
  if (horizon <= 0) {
    horizon = std::max(default_horizon(tilted, cfg),
                       40.0 * std::max(1.0, k * k));
    if (c < 0) horizon = std::max(horizon, 30.0 / -c);
  }
  // with a strict discount the tail beyond the horizon is bounded by
  // e^{c horizon}/(-c) per path; such cut paths are not truncation failures
  const bool tail_matters =
      !(c < 0) || std::exp(c * horizon) / (-c) > 1e-9;

  std::vector<double> vals(n);
  std::vector<unsigned char> flags(n);

#pragma omp parallel for schedule(dynamic, 64) if (cfg.parallel)
  for (long i = 0; i < n; ++i) {
    Rng rng(cfg.seed, i);
    double t = 0, xi = 0, ximax = 0;
    double acc = 0;
    bool done = false;
    if (tilted.family == Family::BrownianDrift) {
      const double drift = -tilted.mu * cfg.dt;
      const double sd = tilted.sigma * std::sqrt(cfg.dt);
      // continuity correction as in the prediction kernel: the reflected
      // level is raised by 0.5826 sigma sqrt(dt) and the crossing barrier
      // lowered by the same amount
      const double cc = 0.5826 * tilted.sigma * std::sqrt(cfg.dt);
      const double barrier = k - cc;
      double Y = y;
      double g_prev = std::exp(c * t) * (1.0 - 2.0 * std::exp(-phi_q * Y));
      while (t < horizon) {
        xi += drift + sd * rng.normal();
        t += cfg.dt;
        ximax = std::max(ximax, xi);
        const double Y_new = std::max(y, ximax + cc) - xi;
        if (Y_new >= barrier) {
          const double frac =
              Y_new > Y ? std::min(1.0, std::max(0.0, (barrier - Y) /
                                                          (Y_new - Y)))
                        : 1.0;
          const double g_cross = std::exp(c * (t - cfg.dt + frac * cfg.dt)) *
                                 (1.0 - 2.0 * std::exp(-phi_q * k));
          acc += 0.5 * (g_prev + g_cross) * frac * cfg.dt;
          done = true;
          break;
        }
        const double g =
            std::exp(c * t) * (1.0 - 2.0 * std::exp(-phi_q * Y_new));
        acc += 0.5 * (g_prev + g) * cfg.dt;
        g_prev = g;
        Y = Y_new;
      }
    } else {
      while (t < horizon) {
        const double gap = tilted.jump_rate > 0
                               ? rng.exponential(tilted.jump_rate)
                               : kInf;
        const double seg_end = std::min(t + gap, horizon);
        double len = seg_end - t;
        // climbing segment: drawdown shrinks at rate d until it hits 0
        double Y0 = std::max(y, ximax) - xi;
        const double t_flat = Y0 / tilted.d;
        const double len1 = std::min(len, t_flat);
        if (len1 > 0) {
          acc += discounted_payoff_segment(c, phi_q, t, Y0, tilted.d, len1);
        }
        if (len > len1) {  // at the running maximum, Y = 0, f = -1
          const double t0 = t + len1;
          const double rest = len - len1;
          acc -= std::exp(c * t0) *
                 (std::fabs(c) > 1e-12 ? std::expm1(c * rest) / c : rest);
        }
        xi += tilted.d * len;
        ximax = std::max(ximax, xi);
        t = seg_end;
        if (t >= horizon) break;
        xi -= rng.exponential(tilted.jump_mean_inv);
        if (std::max(y, ximax) - xi >= k) {
          done = true;
          break;
        }
      }
    }
    vals[i] = acc;
    flags[i] = static_cast<unsigned char>(!done && tail_matters);
  }

  long flagged = 0;
  for (auto f : flags) flagged += f;
  if (static_cast<double>(flagged) / n > 0.01) {
    throw std::runtime_error("mc_vk: more than 1% of paths truncated before "
                             "the rule fired; increase the horizon");
  }
  auto [m, s] = mean_stderr(vals.data(), n);
  return {m, s};
}

}  // namespace pssmp
