#pragma once

#include <cmath>
#include <stdexcept>

namespace pssmp {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-13;      // per panel, relative to the panel value
  double min_interval = 1e-9;  // relative to the initial interval length
  int max_depth = 60;
};

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, double rel,
                            double min_len, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  const double cut = std::max(tol, rel * std::fabs(left + right));
  if (depth <= 0 || h < min_len || std::fabs(delta) <= 15.0 * cut) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, rel,
                              min_len, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, rel,
                              min_len, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature on [a, b] with absolute tolerance.
template <class F>
double integrate(const F& f, double a, double b,
                 const QuadratureOptions& opt = {}) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
    throw std::runtime_error("integrate: non-finite integrand value");
  }
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, opt.abs_tol,
                                      opt.rel_tol, opt.min_interval * (b - a),
                                      opt.max_depth);
}

}  // namespace pssmp
