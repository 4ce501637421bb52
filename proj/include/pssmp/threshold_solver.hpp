#pragma once

#include <string>

#include "pssmp/levy_model.hpp"
#include "pssmp/scale_functions.hpp"

namespace pssmp {

struct ThresholdSolution {
  double k_star = 0;    // log-scale threshold
  double K_star = 0;    // e^{-k*} for Max, e^{k*} for Min
  double k0 = 0;        // log(2)/Phi(q), the zero of the payoff f
  double phi_q = 0;     // Phi(q) of the (dual) model
  double residual = 0;  // |h(k*)| after normalization
  double bracket_lo = 0, bracket_hi = 0;
  int iterations = 0;
  std::string method;   // "quadrature" or "closed_form"
};

// Payoff f(z) = 1 - 2 e^{-Phi(q) z} on the log scale, z >= 0.
double payoff_f(const PredictionProblem& p, double z);

// Ratio-scale payoff F(y) = 1 - 2 y^{-Phi(q)}, y >= 1.
double payoff_F(const PredictionProblem& p, double y);

// h(k) = int_0^k f(z) e^{-beta z} (W^(q)'(z) - beta W^(q)(z)) dz - W^(q)(0).
// The optimal threshold is the unique zero of h on (k0, infinity).
double h_function(const PredictionProblem& p, double k);

// Same, reusing a prebuilt base scale function (eta = q).
double h_function(const PredictionProblem& p, const ScaleFunction& sf,
                  double phi_q, double k);

// Bracketed Newton solve of h(k*) = 0.
ThresholdSolution solve_kstar(const PredictionProblem& p);

// Closed-form scalar equations for BrownianDrift with q = 0:
// a polynomial in K for Max (alpha < Phi(0)) and Min (alpha != Phi(0)),
// and the logarithmic equation when alpha = Phi(0) for Min.
ThresholdSolution kstar_closed_form_bm(const PredictionProblem& p);

}  // namespace pssmp
