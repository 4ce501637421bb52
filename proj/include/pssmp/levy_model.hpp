#pragma once

#include <complex>
#include <string>

namespace pssmp {

enum class Family { BrownianDrift, CramerLundberg };
enum class Direction { Max, Min };

// A spectrally negative Levy process xi from one of two concrete families,
// killed at rate q:
//   BrownianDrift:  xi_t = sigma W_t - mu t
//   CramerLundberg: unit drift d minus a compound Poisson process with
//                   intensity jump_rate and Exp(jump_mean_inv) downward jumps
// Immutable after construction; all operations on it are pure.
struct LevyModel {
  Family family = Family::BrownianDrift;
  double sigma = 0;          // Gaussian coefficient (BrownianDrift only)
  double mu = 0;             // drift of -xi for BrownianDrift
  double d = 0;              // unit drift (CramerLundberg only)
  double jump_rate = 0;      // lambda
  double jump_mean_inv = 0;  // rho
  double q = 0;              // killing rate

  static LevyModel brownian(double sigma, double mu, double q = 0);
  static LevyModel cramer_lundberg(double d, double lambda, double rho,
                                   double q = 0);

  // lower edge of the analytic domain of the Laplace exponent
  double domain_lower() const;
};

// Laplace exponent psi of the killed process.
double laplace_exponent(const LevyModel& m, double theta);

// phi = q + psi, the exponent of the process without killing.
double laplace_exponent_unkilled(const LevyModel& m, double theta);
std::complex<double> laplace_exponent_unkilled(const LevyModel& m,
                                               std::complex<double> theta);

// phi'(theta)
double exponent_derivative(const LevyModel& m, double theta);

// Phi(lambda) = sup{theta >= 0 : phi(theta) = lambda}, lambda >= 0.
double right_inverse_phi(const LevyModel& m, double lambda);

// Exponential change of measure: same family, exponent psi(v+.) - psi(v),
// killing removed.
LevyModel esscher_tilt(const LevyModel& m, double v);

// A prediction problem. For direction Max the model is the Lamperti
// representation of the process itself; for direction Min the model is the
// spectrally negative dual of the Lamperti representation.
struct PredictionProblem {
  LevyModel model;
  double alpha = 1;
  Direction direction = Direction::Max;

  // tilt parameter: alpha for Max, -alpha for Min
  double beta() const {
    return direction == Direction::Max ? alpha : -alpha;
  }
};

struct ClassReport {
  bool accepted = false;          // problem admissible for the solver
  bool member = false;            // class membership gate
  bool admissible_pair = false;   // (q, beta) admissible
  bool mean_finite = false;       // E[Theta] finite
  bool mean_finite_sufficient_only = false;  // Min with q > 0
  double psi_alpha = 0;           // psi evaluated at +alpha (finite-mean test)
  double psi_beta = 0;            // psi evaluated at beta (membership gate)
  std::string reason;             // empty when accepted
};

ClassReport classify(const PredictionProblem& p);

// Throws std::invalid_argument with the classification reason on rejection.
void require_admissible(const PredictionProblem& p);

}  // namespace pssmp
