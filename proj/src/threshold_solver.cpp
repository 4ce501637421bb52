#include "pssmp/threshold_solver.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "pssmp/quadrature.hpp"

namespace pssmp {

double payoff_f(const PredictionProblem& p, double z) {
  if (!(z >= 0)) throw std::domain_error("payoff_f requires z >= 0");
  const double phi_q = right_inverse_phi(p.model, p.model.q);
  return 1.0 - 2.0 * std::exp(-phi_q * z);
}

double payoff_F(const PredictionProblem& p, double y) {
  if (!(y >= 1)) throw std::domain_error("payoff_F requires y >= 1");
  const double phi_q = right_inverse_phi(p.model, p.model.q);
  return 1.0 - 2.0 * std::pow(y, -phi_q);
}

double h_function(const PredictionProblem& p, const ScaleFunction& sf,
                  double phi_q, double k) {
  if (!(k > 0)) throw std::domain_error("h_function requires k > 0");
  const double beta = p.beta();
  const auto integrand = [&](double z) {
    const double f = 1.0 - 2.0 * std::exp(-phi_q * z);
    return f * scale_w_tilted_prime(sf, beta, z);
  };
  return integrate(integrand, 0.0, k) - sf.w0();
}

double h_function(const PredictionProblem& p, double k) {
  const ScaleFunction sf(p.model, p.model.q);
  return h_function(p, sf, right_inverse_phi(p.model, p.model.q), k);
}

namespace {

ThresholdSolution finish(const PredictionProblem& p, double k_star,
                         ThresholdSolution sol) {
  sol.k_star = k_star;
  sol.K_star = p.direction == Direction::Max ? std::exp(-k_star)
                                             : std::exp(k_star);
  return sol;
}

}  // namespace

ThresholdSolution solve_kstar(const PredictionProblem& p) {
  require_admissible(p);
  const ScaleFunction sf(p.model, p.model.q);
  const double phi_q = right_inverse_phi(p.model, p.model.q);
  const double beta = p.beta();
  const auto integrand = [&](double z) {
    const double f = 1.0 - 2.0 * std::exp(-phi_q * z);
    return f * scale_w_tilted_prime(sf, beta, z);
  };
  // h is tracked incrementally: moving the evaluation point only integrates
  // over the gap instead of restarting from zero.
  double k_ref = 0.0;
  double h_ref = -sf.w0();
  const auto h = [&](double k) {
    if (k >= k_ref)
      h_ref += integrate(integrand, k_ref, k);
    else
      h_ref -= integrate(integrand, k, k_ref);
    k_ref = k;
    return h_ref;
  };

  ThresholdSolution sol;
  sol.method = "quadrature";
  sol.phi_q = phi_q;
  sol.k0 = std::log(2.0) / phi_q;

  // h < 0 at k0 and h is increasing on (k0, infinity) with h -> +infinity.
  double lo = sol.k0;
  double hi = 2.0 * sol.k0;
  while (h(hi) <= 0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("solve_kstar: bracket search failed");
  }
  sol.bracket_lo = lo;
  sol.bracket_hi = hi;

  // Newton with the bracket as a safety net; h' is the integrand itself.
  int it = 0;
  double k = 0.5 * (lo + hi);
  for (; it < 100; ++it) {
    const double hv = h(k);
    if (hv > 0)
      hi = k;
    else
      lo = k;
    const double d = integrand(k);
    double next = d > 0 ? k - hv / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::fabs(next - k) <= 1e-14 * std::max(1.0, k) ||
                      hi - lo <= 1e-14 * std::max(1.0, hi);
    k = next;
    if (done) break;
  }
  const double k_star = k;
  sol.iterations = it;
  // Fresh full integrals for the reported residual, free of incremental drift.
  const double h1 = integrate(integrand, 0.0, k_star) - sf.w0();
  const double h2 = h1 + integrate(integrand, k_star, 2.0 * k_star);
  sol.residual = std::fabs(h1) / std::max(1.0, std::fabs(h2));
  return finish(p, k_star, sol);
}

ThresholdSolution kstar_closed_form_bm(const PredictionProblem& p) {
  if (p.model.family != Family::BrownianDrift || p.model.q != 0) {
    throw std::invalid_argument(
        "closed form requires BrownianDrift with q = 0");
  }
  require_admissible(p);
  const double a = p.alpha;
  const double phi0 = 2.0 * p.model.mu / (p.model.sigma * p.model.sigma);

  ThresholdSolution sol;
  sol.method = "closed_form";
  sol.phi_q = phi0;
  sol.k0 = std::log(2.0) / phi0;

  double lo, hi;
  std::function<double(double)> g;
  if (p.direction == Direction::Max) {
    if (!(a < phi0)) {
      throw std::invalid_argument("Max closed form requires alpha < 2 mu / sigma^2");
    }
    g = [=](double K) {
      return std::pow(K, a - phi0) + (2.0 * phi0 - 3.0 * a) / a * std::pow(K, a) +
             2.0 * a / (a + phi0) * std::pow(K, a + phi0) -
             2.0 * phi0 * phi0 / (a * (a + phi0));
    };
    // K = 1 is a spurious root; the optimal threshold lies strictly inside (0,1)
    lo = 1e-12;
    hi = 1.0 - 1e-9;
  } else if (std::fabs(a - phi0) < 1e-9) {
    g = [=](double K) {
      return std::pow(K, 2.0 * a) - 5.0 * std::pow(K, a) + 2.0 * a * std::log(K) +
             4.0;
    };
    lo = 1.0 + 1e-9;
    hi = 2.0;
    while (g(hi) <= 0) hi *= 2.0;
  } else {
    g = [=](double K) {
      return std::pow(K, phi0 + a) - (3.0 * a + 2.0 * phi0) / a * std::pow(K, a) +
             2.0 * a / (a - phi0) * std::pow(K, a - phi0) -
             2.0 * phi0 * phi0 / (a * (a - phi0));
    };
    lo = 1.0 + 1e-9;
    hi = 2.0;
    while (g(hi) <= 0) hi *= 2.0;
  }
  sol.bracket_lo = lo;
  sol.bracket_hi = hi;
  if (!(g(lo) > 0) == !(g(hi) > 0)) {
    throw std::runtime_error("closed form: bracket does not straddle the root");
  }
  const bool rising = g(hi) > 0;
  int it = 0;
  while (hi - lo > 1e-13 * std::max(1.0, hi) && it < 200) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid) > 0) == rising)
      hi = mid;
    else
      lo = mid;
    ++it;
  }
  const double K = 0.5 * (lo + hi);
  sol.iterations = it;
  sol.residual = std::fabs(g(K));
  sol.K_star = K;
  sol.k_star = p.direction == Direction::Max ? -std::log(K) : std::log(K);
  return sol;
}

}  // namespace pssmp
