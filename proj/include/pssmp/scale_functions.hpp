#pragma once

#include <complex>
#include <functional>

#include "pssmp/levy_model.hpp"

namespace pssmp {

// Evaluator for the eta-scale function W^(eta) of the model without killing
// (the killing rate on the model is ignored; eta is carried explicitly).
// Closed forms: for both families 1/(phi(theta) - eta) has two real poles
// theta_plus >= theta_minus for eta >= 0, giving a two-exponential W.
class ScaleFunction {
public:
  ScaleFunction(const LevyModel& model, double eta);

  double w(double x) const;        // W^(eta)(x), identically 0 for x < 0
  double w_prime(double x) const;  // derivative on (0, infinity)
  double w0() const { return w0_; }              // W^(eta)(0+)
  double w_prime0() const { return w_prime0_; }  // right-derivative at 0+
  double phi_inverse() const { return theta_plus_; }  // Phi(eta)

  const LevyModel& model() const { return model_; }
  double eta() const { return eta_; }

private:
  LevyModel model_;
  double eta_;
  double theta_plus_ = 0, theta_minus_ = 0;  // roots of phi(theta) = eta
  double coef_plus_ = 0, coef_minus_ = 0;    // W = c+ e^{t+ x} + c- e^{t- x}
  bool degenerate_ = false;                  // coinciding roots
  double w0_ = 0, w_prime0_ = 0;
};

// Tilted scale function W_v^(eta - phi(v)) evaluated through the tilt
// relation W^(eta)(x) = e^{vx} W_v^(eta-phi(v))(x), so negative tilted
// superscripts never require complex roots.
double scale_w_tilted(const ScaleFunction& base, double v, double x);
double scale_w_tilted_prime(const ScaleFunction& base, double v, double x);

struct InversionResult {
  double value = 0;        // fine-resolution estimate
  double coarse = 0;       // half the node count
  double rel_diff = 0;     // convergence diagnostic
  bool converged = false;  // rel_diff < 1e-7
};

// Numeric Bromwich inversion of theta -> 1/(phi(theta) - eta) at x > 0 on a
// Talbot contour, used as an independent oracle for the closed forms.
// shift_c must lie strictly right of Phi(eta).
InversionResult invert_laplace_numeric(
    const std::function<std::complex<double>(std::complex<double>)>& phi,
    double eta, double x, double shift_c);

// Convenience overload for a model.
InversionResult invert_laplace_numeric(const LevyModel& model, double eta,
                                       double x);

}  // namespace pssmp
