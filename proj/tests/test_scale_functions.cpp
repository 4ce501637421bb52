#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pssmp/levy_model.hpp"
#include "pssmp/quadrature.hpp"
#include "pssmp/rng.hpp"
#include "pssmp/scale_functions.hpp"

using namespace pssmp;

TEST_CASE("brownian closed form") {
  const LevyModel bm = LevyModel::brownian(1.0, 1.0);
  const ScaleFunction sf(bm, 0.0);
  // W^(0)(x) = (e^{Phi(0) x} - 1)/mu with Phi(0) = 2
  CHECK(sf.w(1.0) ==
        doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-12));
  CHECK(sf.w(-0.5) == 0.0);
  CHECK(sf.w0() == 0.0);
  CHECK(sf.w_prime0() == doctest::Approx(2.0));
  CHECK(sf.w_prime(1.0) ==
        doctest::Approx(2.0 * std::exp(2.0)).epsilon(1e-12));
  CHECK(sf.phi_inverse() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("origin values per variation type") {
  const ScaleFunction bm(LevyModel::brownian(2.0, 0.3), 0.5);
  CHECK(bm.w0() == 0.0);
  CHECK(bm.w_prime0() == doctest::Approx(2.0 / 4.0));

  const ScaleFunction cl(LevyModel::cramer_lundberg(2.0, 1.0, 1.0), 0.0);
  CHECK(cl.w0() == doctest::Approx(0.5));
  CHECK(cl.w_prime0() == doctest::Approx((0.0 + 1.0) / 4.0));
  const ScaleFunction cl2(LevyModel::cramer_lundberg(2.0, 1.0, 1.0), 0.7);
  CHECK(cl2.w_prime0() == doctest::Approx((0.7 + 1.0) / 4.0));
}

TEST_CASE("derivative matches finite differences") {
  Rng rng(3, 0);
  for (int i = 0; i < 20; ++i) {
    const LevyModel m =
        i % 2 ? LevyModel::cramer_lundberg(0.5 + 2.0 * rng.uniform(),
                                           0.2 + rng.uniform(),
                                           0.3 + rng.uniform())
              : LevyModel::brownian(0.4 + rng.uniform(),
                                    -0.5 + 2.0 * rng.uniform());
    const ScaleFunction sf(m, rng.uniform());
    const double x = 0.2 + 2.0 * rng.uniform();
    const double h = 1e-6;
    const double fd = (sf.w(x + h) - sf.w(x - h)) / (2.0 * h);
    CHECK(sf.w_prime(x) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK_THROWS_AS(ScaleFunction(LevyModel::brownian(1.0, 1.0), 0.0).w_prime(0.0),
                  std::domain_error);
}

TEST_CASE("laplace transform identity") {
  for (int fam = 0; fam < 2; ++fam) {
    const LevyModel m = fam ? LevyModel::cramer_lundberg(2.0, 1.0, 1.0)
                            : LevyModel::brownian(1.0, 1.0);
    for (double eta : {0.0, 0.3, 1.0}) {
      const ScaleFunction sf(m, eta);
      const double phi_eta = sf.phi_inverse();
      for (double off : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double theta = phi_eta + off;
        const auto integrand = [&](double x) {
          return std::exp(-theta * x) * sf.w(x);
        };
        // upper limit chosen so the e^{-(theta - Phi(eta)) x} tail is below
        // the comparison tolerance
        const double lhs = integrate(integrand, 0.0, 60.0 / off);
        const double rhs = 1.0 / (laplace_exponent_unkilled(m, theta) - eta);
        CHECK(std::fabs(lhs - rhs) <= 1e-6 * std::fabs(rhs));
      }
    }
  }
}

TEST_CASE("monotone nonnegative nondecreasing") {
  for (int fam = 0; fam < 2; ++fam) {
    const LevyModel m = fam ? LevyModel::cramer_lundberg(1.5, 1.0, 2.0)
                            : LevyModel::brownian(1.0, 0.5);
    const ScaleFunction sf(m, 0.3);
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double w = sf.w(0.1 * i);
      CHECK(w >= prev);
      prev = w;
    }
  }
}

TEST_CASE("log-derivative bound W'/W > Phi(q)") {
  for (int fam = 0; fam < 2; ++fam) {
    const LevyModel m = fam ? LevyModel::cramer_lundberg(2.0, 1.0, 1.0, 0.5)
                            : LevyModel::brownian(1.0, 1.0, 0.5);
    const ScaleFunction sf(m, m.q);
    const double phi_q = right_inverse_phi(m, m.q);
    for (int i = 1; i <= 50; ++i) {
      const double z = 0.2 * i;
      CHECK(sf.w_prime(z) / sf.w(z) > phi_q);
    }
  }
}

TEST_CASE("tilt relation") {
  const LevyModel bm = LevyModel::brownian(1.0, 1.0);
  const ScaleFunction sf(bm, 0.0);
  CHECK(scale_w_tilted(sf, 0.0, 1.0) == doctest::Approx(sf.w(1.0)));
  CHECK(scale_w_tilted(sf, 1.0, 1.0) ==
        doctest::Approx(std::exp(-1.0) * (std::exp(2.0) - 1.0)).epsilon(1e-12));

  // cross-check against the tilted model's own closed form where the shifted
  // superscript stays nonnegative
  Rng rng(17, 0);
  for (int i = 0; i < 20; ++i) {
    const LevyModel m =
        i % 2 ? LevyModel::cramer_lundberg(1.0 + rng.uniform(),
                                           0.5 + rng.uniform(),
                                           0.5 + rng.uniform())
              : LevyModel::brownian(0.5 + rng.uniform(),
                                    rng.uniform());
    const double v = 0.2 + rng.uniform();
    const double eta =
        laplace_exponent_unkilled(m, v) + 0.1 + rng.uniform();
    if (eta < 0) continue;
    const ScaleFunction base(m, eta);
    const ScaleFunction tilted(esscher_tilt(m, v),
                               eta - laplace_exponent_unkilled(m, v));
    for (double x : {0.4, 1.1, 2.3}) {
      CHECK(scale_w_tilted(base, v, x) ==
            doctest::Approx(tilted.w(x)).epsilon(1e-10));
      CHECK(scale_w_tilted_prime(base, v, x) ==
            doctest::Approx(tilted.w_prime(x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("tilted derivative is the product rule") {
  const ScaleFunction sf(LevyModel::cramer_lundberg(2.0, 1.0, 1.0), 0.4);
  for (double v : {-0.7, 0.5, 2.0}) {
    for (double x : {0.3, 1.0, 2.5}) {
      const double h = 1e-6;
      const double fd =
          (scale_w_tilted(sf, v, x + h) - scale_w_tilted(sf, v, x - h)) /
          (2.0 * h);
      CHECK(scale_w_tilted_prime(sf, v, x) ==
            doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("numeric inversion oracle") {
  const LevyModel bm = LevyModel::brownian(1.0, 1.0);
  const InversionResult r0 = invert_laplace_numeric(bm, 0.0, 1.0);
  CHECK(r0.converged);
  CHECK(r0.value ==
        doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-8));

  const LevyModel cl = LevyModel::cramer_lundberg(2.0, 1.0, 1.0);
  const ScaleFunction sfc(cl, 0.0);
  const InversionResult r1 = invert_laplace_numeric(cl, 0.0, 1.0);
  CHECK(r1.converged);
  CHECK(r1.value == doctest::Approx(sfc.w(1.0)).epsilon(1e-8));

  // origin limits through the inversion
  CHECK(std::fabs(invert_laplace_numeric(bm, 0.0, 1e-7).value) < 1e-6);
  CHECK(invert_laplace_numeric(cl, 0.0, 2e-6).value ==
        doctest::Approx(0.5).epsilon(2e-6));
}
