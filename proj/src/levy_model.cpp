#include "pssmp/levy_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pssmp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LevyModel LevyModel::brownian(double sigma, double mu, double q) {
  if (!(sigma > 0)) throw std::invalid_argument("BrownianDrift requires sigma > 0");
  if (!(q >= 0)) throw std::invalid_argument("killing rate q must be >= 0");
  LevyModel m;
  m.family = Family::BrownianDrift;
  m.sigma = sigma;
  m.mu = mu;
  m.q = q;
  return m;
}

LevyModel LevyModel::cramer_lundberg(double d, double lambda, double rho,
                                     double q) {
  if (!(d > 0)) throw std::invalid_argument("CramerLundberg requires d > 0");
  if (!(lambda >= 0)) throw std::invalid_argument("jump rate must be >= 0");
  if (!(rho > 0)) throw std::invalid_argument("jump size rate rho must be > 0");
  if (!(q >= 0)) throw std::invalid_argument("killing rate q must be >= 0");
  LevyModel m;
  m.family = Family::CramerLundberg;
  m.d = d;
  m.jump_rate = lambda;
  m.jump_mean_inv = rho;
  m.q = q;
  return m;
}

double LevyModel::domain_lower() const {
  return family == Family::BrownianDrift ? -kInf : -jump_mean_inv;
}

double laplace_exponent_unkilled(const LevyModel& m, double theta) {
  if (m.family == Family::BrownianDrift) {
    return 0.5 * m.sigma * m.sigma * theta * theta - m.mu * theta;
  }
  if (!(theta > -m.jump_mean_inv)) {
    throw std::domain_error("CramerLundberg exponent requires theta > -rho");
  }
  return m.d * theta - m.jump_rate * theta / (m.jump_mean_inv + theta);
}

std::complex<double> laplace_exponent_unkilled(const LevyModel& m,
                                               std::complex<double> theta) {
  if (m.family == Family::BrownianDrift) {
    return 0.5 * m.sigma * m.sigma * theta * theta - m.mu * theta;
  }
  return m.d * theta - m.jump_rate * theta / (m.jump_mean_inv + theta);
}

double laplace_exponent(const LevyModel& m, double theta) {
  return laplace_exponent_unkilled(m, theta) - m.q;
}

double exponent_derivative(const LevyModel& m, double theta) {
  if (m.family == Family::BrownianDrift) {
    return m.sigma * m.sigma * theta - m.mu;
  }
  const double rt = m.jump_mean_inv + theta;
  return m.d - m.jump_rate * m.jump_mean_inv / (rt * rt);
}

double right_inverse_phi(const LevyModel& m, double lambda) {
  if (!(lambda >= 0)) throw std::invalid_argument("Phi requires lambda >= 0");
  // Last stationary point of phi; phi is increasing to the right of it.
  double theta0;
  if (m.family == Family::BrownianDrift) {
    theta0 = m.mu / (m.sigma * m.sigma);
  } else {
    theta0 = (m.jump_rate > 0)
                 ? std::sqrt(m.jump_rate * m.jump_mean_inv / m.d) - m.jump_mean_inv
                 : -m.jump_mean_inv;
  }
  double lo = std::max(0.0, theta0);
  double hi = std::max(1.0, 2.0 * lo);
  while (laplace_exponent_unkilled(m, hi) <= lambda) hi *= 2.0;
  // phi(lo) <= lambda on the increasing branch, bisect to 1e-13 absolute
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (laplace_exponent_unkilled(m, mid) > lambda)
      hi = mid;
    else
      lo = mid;
  }
  double theta = 0.5 * (lo + hi);
  // Newton polish (phi convex and increasing here)
  for (int it = 0; it < 3; ++it) {
    const double dphi = exponent_derivative(m, theta);
    if (dphi <= 0) break;
    const double step = (laplace_exponent_unkilled(m, theta) - lambda) / dphi;
    const double next = theta - step;
    if (next >= lo && next <= hi) theta = next;
  }
  return std::max(theta, 0.0);
}

LevyModel esscher_tilt(const LevyModel& m, double v) {
  if (m.family == Family::BrownianDrift) {
    // exponent phi(v+t) - phi(v) = sigma^2 t^2/2 - (mu - sigma^2 v) t
    return LevyModel::brownian(m.sigma, m.mu - m.sigma * m.sigma * v, 0.0);
  }
  if (!(v > -m.jump_mean_inv)) {
    throw std::domain_error("esscher_tilt requires v > -rho");
  }
  const double rho_v = m.jump_mean_inv + v;
  const double lambda_v = m.jump_rate * m.jump_mean_inv / rho_v;
  return LevyModel::cramer_lundberg(m.d, lambda_v, rho_v, 0.0);
}

ClassReport classify(const PredictionProblem& p) {
  ClassReport r;
  const LevyModel& m = p.model;
  if (!(p.alpha > 0)) {
    r.reason = "self-similarity index alpha must be > 0";
    return r;
  }
  const double beta = p.beta();

  if (p.direction == Direction::Max) {
    r.psi_alpha = laplace_exponent(m, p.alpha);
    r.psi_beta = r.psi_alpha;
    if (!(r.psi_alpha < 0)) {
      r.reason = "class gate failed: psi(alpha) = " +
                 std::to_string(r.psi_alpha) + " is not < 0";
      if (m.family == Family::BrownianDrift && m.q == 0) {
        r.reason += " (requires alpha < 2 mu / sigma^2)";
      }
      return r;
    }
    if (m.q == 0 && !(exponent_derivative(m, 0.0) < 0)) {
      r.reason = "with q = 0 the process must drift to -infinity (psi'(0+) < 0)";
      return r;
    }
    r.member = true;
    // q > phi(alpha) is the same condition as psi(alpha) < 0
    r.admissible_pair = true;
    r.mean_finite = true;
    r.accepted = true;
    return r;
  }

  // Min: the model is the spectrally negative dual
  if (!(-p.alpha > m.domain_lower())) {
    r.reason = "dual exponent does not exist at -alpha (requires alpha < rho)";
    return r;
  }
  r.psi_beta = laplace_exponent(m, -p.alpha);
  r.psi_alpha = laplace_exponent(m, p.alpha);
  if (m.q > 0 && !(r.psi_beta < 0)) {
    r.reason = "class gate failed: q > 0 requires psi-hat(-alpha) < 0, got " +
               std::to_string(r.psi_beta);
    return r;
  }
  if (m.q == 0 && !(exponent_derivative(m, 0.0) < 0)) {
    r.reason = "with q = 0 the dual must drift to -infinity (psi-hat'(0+) < 0)";
    return r;
  }
  r.member = true;
  // (q, beta): q = 0 with beta < 0, or q > phi-hat(-alpha)
  r.admissible_pair = true;
  r.mean_finite = r.psi_alpha < 0;
  r.mean_finite_sufficient_only = m.q > 0;
  r.accepted = true;
  return r;
}

void require_admissible(const PredictionProblem& p) {
  const ClassReport r = classify(p);
  if (!r.accepted) throw std::invalid_argument(r.reason);
}

}  // namespace pssmp
