#include "pssmp/value_functions.hpp"

#include <cmath>
#include <stdexcept>

#include "pssmp/quadrature.hpp"
#include "pssmp/scale_functions.hpp"

namespace pssmp {

double v_star_1d(const PredictionProblem& p, double k_star, double y) {
  if (!(y >= 0)) throw std::domain_error("v_star_1d requires y >= 0");
  if (y >= k_star) return 0.0;
  const ScaleFunction sf(p.model, p.model.q);
  const double phi_q = right_inverse_phi(p.model, p.model.q);
  const double beta = p.beta();
  const auto integrand = [&](double u) {
    const double f = 1.0 - 2.0 * std::exp(-phi_q * (u + y));
    return f * std::exp(-beta * u) * sf.w(u);
  };
  return -integrate(integrand, 0.0, k_star - y);
}

double v_k_1d(const PredictionProblem& p, double k, double y) {
  if (!(k > 0)) throw std::domain_error("v_k_1d requires k > 0");
  if (!(y >= 0)) throw std::domain_error("v_k_1d requires y >= 0");
  if (y >= k) return 0.0;
  const ScaleFunction sf(p.model, p.model.q);
  const double phi_q = right_inverse_phi(p.model, p.model.q);
  const double beta = p.beta();
  const auto integrand = [&](double u) {
    const double f = 1.0 - 2.0 * std::exp(-phi_q * (u + y));
    return f * std::exp(-beta * u) * sf.w(u);
  };
  const double body = -integrate(integrand, 0.0, k - y);
  const double hk = h_function(p, sf, phi_q, k);
  const double num = scale_w_tilted(sf, beta, k - y);
  const double den = scale_w_tilted_prime(sf, beta, k);
  return body + num / den * hk;
}

double v_max(const PredictionProblem& p, double k_star, double x, double s) {
  if (p.direction != Direction::Max) {
    throw std::invalid_argument("v_max requires direction Max");
  }
  if (!(x > 0) || !(s >= x)) {
    throw std::domain_error("v_max requires 0 < x <= s");
  }
  const double K_star = std::exp(-k_star);
  const double lo = K_star * s;
  if (x <= lo) return 0.0;  // stopping region
  const ScaleFunction sf(p.model, p.model.q);
  const double phi_q = right_inverse_phi(p.model, p.model.q);
  const double a = p.alpha;
  const auto integrand = [&](double z) {
    return std::pow(z, a - 1.0) * (1.0 - 2.0 * std::pow(z / s, phi_q)) *
           sf.w(std::log(x / z));
  };
  return -integrate(integrand, lo, x);
}

double v_min(const PredictionProblem& p, double k_star, double x, double i) {
  if (p.direction != Direction::Min) {
    throw std::invalid_argument("v_min requires direction Min");
  }
  if (!(i > 0) || !(x >= i)) {
    throw std::domain_error("v_min requires 0 < i <= x");
  }
  const double K_star = std::exp(k_star);
  const double hi = K_star * i;
  if (x >= hi) return 0.0;  // stopping region
  const ScaleFunction sf(p.model, p.model.q);
  const double phi_q = right_inverse_phi(p.model, p.model.q);
  const double a = p.alpha;
  const auto integrand = [&](double z) {
    return std::pow(z, a - 1.0) * (1.0 - 2.0 * std::pow(i / z, phi_q)) *
           sf.w(std::log(z / x));
  };
  return -integrate(integrand, x, hi);
}

double v_2d(const PredictionProblem& p, double k_star, double x,
            double s_or_i) {
  return p.direction == Direction::Max ? v_max(p, k_star, x, s_or_i)
                                       : v_min(p, k_star, x, s_or_i);
}

double v_bm_closed_form(const PredictionProblem& p, double K_star, double x,
                        double s_or_i) {
  if (p.model.family != Family::BrownianDrift || p.model.q != 0) {
    throw std::invalid_argument(
        "closed form requires BrownianDrift with q = 0");
  }
  const double a = p.alpha;
  const double mu = p.model.mu;
  const double phi0 = 2.0 * mu / (p.model.sigma * p.model.sigma);

  if (p.direction == Direction::Max) {
    if (!(a < phi0)) {
      throw std::invalid_argument("Max closed form requires alpha < Phi(0)");
    }
    const double s = s_or_i;
    const double K = K_star;
    const double ratio = K * s / x;  // in (0, 1] outside the stopping region
    if (x <= K * s) return 0.0;
    const double t1 = std::pow(x, a) * (1.0 - std::pow(ratio, a)) *
                      (1.0 / a + 2.0 / a * std::pow(x / s, phi0));
    const double t2 = std::pow(x, a) / (a - phi0) *
                      (1.0 - std::pow(ratio, a - phi0));
    const double t3 = 2.0 * std::pow(s, a) * std::pow(K, a + phi0) /
                      (a + phi0) * (1.0 - std::pow(ratio, -phi0 - a));
    return (t1 - t2 + t3) / mu;
  }

  const double i = s_or_i;
  const double K = K_star;
  const double ratio = K * i / x;  // >= 1 outside the stopping region
  if (x >= K * i) return 0.0;
  if (std::fabs(a - phi0) < 1e-9) {
    const double t1 = std::pow(x, a) *
                      (1.0 / a + 2.0 / a * std::pow(i / x, a)) *
                      (std::pow(ratio, a) - 1.0);
    const double t2 = std::pow(x, a) / (2.0 * a) *
                      (std::pow(ratio, 2.0 * a) - 1.0);
    const double t3 = 2.0 * std::pow(i, a) * std::log(ratio);
    return (t1 - t2 - t3) / mu;
  }
  const double t1 = std::pow(x, a) * (std::pow(ratio, a) - 1.0) *
                    (1.0 / a + 2.0 / a * std::pow(i / x, phi0));
  const double t2 = std::pow(x, a) / (a + phi0) *
                    (std::pow(ratio, a + phi0) - 1.0);
  const double t3 = 2.0 * std::pow(i, a) * std::pow(K, a - phi0) /
                    (phi0 - a) * (std::pow(ratio, phi0 - a) - 1.0);
  return (t1 - t2 - t3) / mu;
}

}  // namespace pssmp
