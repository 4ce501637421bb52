#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pssmp/levy_model.hpp"

namespace pssmp {

struct PathConfig {
  double dt = 1e-4;      // Euler step for the Brownian component (xi-time)
  double horizon = 0;    // xi-time cap; 0 selects 40/|psi'(0+)|
  long n_paths = 100000;
  uint64_t seed = 1;
  double x0 = 1.0;       // pssMp start
  // Drawdown margin beyond the largest requested threshold at which a q = 0
  // path is cut off once every rule has fired; 0 selects 10/Phi(q). The
  // chance that the running maximum is ever exceeded again from drawdown L
  // is e^{-Phi(q) L}, so the induced bias is negligible against Monte Carlo
  // noise at the default. Negative disables the early stop entirely.
  double stop_margin = 0;
  bool parallel = true;  // OpenMP over paths; serial path is the reference
};

double default_horizon(const LevyModel& m, const PathConfig& cfg);
double default_stop_margin(const LevyModel& m, const PathConfig& cfg);

// A simulated xi path as piecewise-linear knots (duplicate t at jumps).
// BrownianDrift paths are sampled exactly in law on the dt grid;
// CramerLundberg paths are exact (knots at jump epochs).
struct XiPath {
  std::vector<double> t;
  std::vector<double> x;
  double kill_time = 0;  // infinity when q = 0
  bool killed = false;   // kill_time < horizon
};

XiPath simulate_xi(const LevyModel& m, const PathConfig& cfg,
                   uint64_t path_index = 0);

// Lamperti time change of a xi path: u = x0^alpha * I_t with
// I_t = int_0^t e^{alpha xi_s} ds, X = x0 e^{xi}. Segment integrals of the
// exponential of a linear function are taken in closed form.
struct LampertiPath {
  std::vector<double> u;  // pssMp times at the xi knots
  std::vector<double> X;
  double zeta = 0;        // hitting time of 0 (infinity if never)
  bool overflowed = false;
};

LampertiPath lamperti_build(const XiPath& path, double alpha, double x0);

// Exact integral of e^{beta xi} over the piecewise-linear path up to xi-time t.
double path_clock(const XiPath& path, double beta, double t);

// Location of the ultimate maximum of the piecewise-linear xi path
// (last-visit convention) and the corresponding pssMp time
// Theta = x0^alpha I_G with clock exponent beta (alpha for Max, -alpha for
// the dual representation of Min).
struct ThetaInfo {
  double G = 0;          // xi-time of the ultimate maximum
  double theta = 0;      // pssMp time
  bool truncated = false;  // extremum in the final 5% of the simulated span
};

ThetaInfo locate_theta(const XiPath& path, double beta, double alpha,
                       double x0);

// ---- streaming prediction kernel ------------------------------------------

// Outcome of one path for a set of log-scale thresholds ks: the rule for
// threshold k fires when the reflected process  max(xi) - xi  reaches k.
struct PathOutcome {
  double theta = 0;               // pssMp time of the extremum
  std::vector<double> tau;        // pssMp trigger times, one per threshold
  std::vector<unsigned char> capped;  // tau capped at zeta (killed paths)
  bool flagged = false;           // truncation / overflow flag
};

// ks must be sorted ascending.
PathOutcome simulate_prediction_path(const LevyModel& m, double beta,
                                     const std::vector<double>& ks,
                                     const PathConfig& cfg,
                                     uint64_t path_index);

struct SweepRow {
  double K = 0;
  double mean = 0;
  double stderr_ = 0;
  long n = 0;
};

struct SimulationReport {
  std::vector<SweepRow> rows;
  double theta_mean = 0;
  double theta_stderr = 0;
  double truncation_rate = 0;
  // per-path bound e^{-Phi(q) margin} on the chance that the extremum is
  // revisited after the early-stop cutoff
  double truncation_bias_bound = 0;
  long n_paths = 0;
};

// Loss |Theta - tau_K| - Theta per path, estimated over n_paths with common
// random numbers across the K grid. Throws when the truncation rate exceeds
// 1%.
SimulationReport sweep_K(const PredictionProblem& p,
                         const std::vector<double>& K_grid,
                         const PathConfig& cfg);

std::pair<double, double> objective_estimate(const PredictionProblem& p,
                                             double K, const PathConfig& cfg);

// Monte Carlo estimate of the 1-d discounted objective
//   E[int_0^{tau_k} e^{(phi(beta)-q) u} f(Y_u) du],  Y reflected at the
// running maximum seeded at y, under the beta-tilted measure. Oracle for
// v_k_1d / v_star_1d.
std::pair<double, double> mc_vk(const PredictionProblem& p, double k, double y,
                                const PathConfig& cfg);

}  // namespace pssmp
