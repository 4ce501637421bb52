#pragma once

#include "pssmp/levy_model.hpp"
#include "pssmp/threshold_solver.hpp"

namespace pssmp {

// Value functions of the prediction problem. The 1-d forms live on the
// reflected log coordinate y (= log(s/x) for Max, log(x/i) for Min); the 2-d
// forms are the pssMp-space values v(x,s) and v-hat(x,i).

// V*(y) = -int_y^{k*} f(z) e^{-beta(z-y)} W^(q)(z-y) dz, zero for y >= k*.
double v_star_1d(const PredictionProblem& p, double k_star, double y);

// V_k(y) for an arbitrary threshold k (not necessarily optimal); reduces to
// V* at k = k*.
double v_k_1d(const PredictionProblem& p, double k, double y);

// v(x,s) = -int_{K*s}^x z^{alpha-1} (1 - 2 (z/s)^{Phi(q)}) W^(q)(log(x/z)) dz
double v_max(const PredictionProblem& p, double k_star, double x, double s);

// v-hat(x,i) = -int_x^{K^i} z^{alpha-1} (1 - 2 (i/z)^{Phi(q)}) W^(q)(log(z/x)) dz
double v_min(const PredictionProblem& p, double k_star, double x, double i);

// Dispatch on direction; s_or_i is the running max (Max) or min (Min).
double v_2d(const PredictionProblem& p, double k_star, double x, double s_or_i);

// Closed forms for BrownianDrift with q = 0 (Max needs alpha < Phi(0); Min
// switches to the logarithmic branch at alpha = Phi(0)). K_star is on the
// ratio scale, matching ThresholdSolution::K_star.
double v_bm_closed_form(const PredictionProblem& p, double K_star, double x,
                        double s_or_i);

}  // namespace pssmp
