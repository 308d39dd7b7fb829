#include <cmath>

#include "doctest.h"
#include "eep/jump_hermite.hpp"
#include "eep/oracles.hpp"

using namespace eep;

namespace {

const double kX40 = std::log(40.0);

JumpModel merton(double lambda = 0.1) {
  MertonParams p;
  p.lambda = lambda;
  return build_merton_model(p);
}

}  // namespace

TEST_CASE("leading coefficients in log price") {
  JumpDensityExpansion je(merton(), kX40, 2);
  CHECK(je.c_minus1(kX40, kX40) == 0.0);
  const double w = std::log(1.1) / 0.2;
  CHECK(je.c_minus1(kX40, std::log(44.0)) == doctest::Approx(0.5 * w * w).epsilon(1e-10));
  CHECK(je.c_minus1(kX40, std::log(44.0)) == doctest::Approx(0.11356).epsilon(1e-4));
  CHECK(je.c0(kX40, kX40) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI * 0.04)).epsilon(1e-12));
  CHECK(std::isfinite(je.ck_next(0, kX40, kX40)));
  CHECK(std::isfinite(je.ck_next(1, kX40, kX40 + 0.05)));
}

TEST_CASE("c0 matches the diffusion prefactor") {
  JumpModel m = merton(0.0);
  JumpDensityExpansion je(m, kX40, 1);
  DensityExpansion dx(make_transform(m.log_diffusion, kX40), 0);
  for (double dx_to : {-0.1, -0.02, 0.03, 0.15}) {
    const double x1 = kX40 + dx_to;
    const double w = je.w_B(x1, kX40);
    const double lead = std::exp(-0.5 * w * w);
    // The m = 0 diffusion kernel at dt = 1 is C0 times the Gaussian factor.
    CHECK(je.c0(kX40, x1) * lead == doctest::Approx(dx.density(x1, kX40, 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("jump terms") {
  JumpDensityExpansion je(merton(), kX40, 2);
  CHECK(je.d1(kX40, kX40) == doctest::Approx(0.1 / std::sqrt(2.0 * M_PI * 0.04)).epsilon(1e-12));
  CHECK(je.d1(kX40, kX40) == doctest::Approx(0.19947).epsilon(1e-4));
  JumpDensityExpansion jk(build_kou_model({}), kX40, 2);
  CHECK(jk.d1(kX40, kX40 + 0.5) == doctest::Approx(0.1 * 0.04 * 3.7 * std::exp(-1.85)).epsilon(1e-12));
  CHECK(jk.d1(kX40, kX40 + 0.5) == doctest::Approx(0.002327).epsilon(1e-3));
  CHECK(std::isfinite(je.dk_next(1, kX40, std::log(41.0))));
  CHECK(std::isfinite(jk.dk_next(1, kX40, kX40 + 0.3)));

  JumpDensityExpansion j0(merton(0.0), kX40, 2);
  for (double z : {-0.3, 0.0, 0.2}) {
    CHECK(j0.d1(kX40, kX40 + z) == 0.0);
    CHECK(j0.dk_next(1, kX40, kX40 + z) == 0.0);
  }
}

TEST_CASE("gaussian even moments") {
  CHECK(JumpDensityExpansion::gaussian_moment(0) == 1.0);
  CHECK(JumpDensityExpansion::gaussian_moment(1) == 1.0);
  CHECK(JumpDensityExpansion::gaussian_moment(2) == 3.0);
  CHECK(JumpDensityExpansion::gaussian_moment(3) == 15.0);
  CHECK(JumpDensityExpansion::gaussian_moment(4) == 105.0);
}

TEST_CASE("w_B is antisymmetric") {
  JumpDensityExpansion je(build_kou_model({}), kX40, 1);
  for (double a : {3.2, 3.6, 3.9})
    for (double b : {3.5, 3.7, 4.1}) CHECK(std::abs(je.w_B(a, b) + je.w_B(b, a)) < 1e-12);
}

TEST_CASE("zero intensity reduces to the diffusion expansion") {
  JumpModel m = merton(0.0);
  for (int order : {1, 2}) {
    JumpDensityExpansion je(m, kX40, order);
    DensityExpansion dx(make_transform(m.log_diffusion, kX40), order);
    for (double S = 36.0; S <= 44.0; S += 0.5) {
      const double x = std::log(S);
      CHECK(je.jump_density(x, kX40, 0.01) == doctest::Approx(dx.density(x, kX40, 0.01)).epsilon(1e-6));
    }
  }
}

TEST_CASE("merton expansion against the poisson mixture") {
  const MertonParams mp;
  JumpDensityExpansion je(build_merton_model(mp), kX40, 2);
  const double dt = 0.01;
  JumpSourceKernel k = je.kernel(kX40, dt);
  double sup = 0.0;
  for (int i = -50; i <= 50; ++i) {
    const double x = kX40 + 0.001 * i;
    const double exact = merton_mixture_density(mp, x, kX40, dt);
    sup = std::max(sup, std::abs(k.density(x, dt) / exact - 1.0));
    CHECK(k.density(x, dt) == doctest::Approx(je.jump_density(x, kX40, dt)).epsilon(1e-8));
  }
  CHECK(sup <= 5e-3);

  long clamps = 0;
  const double mass = integrate([&](double x) { return k.density(x, dt, &clamps); }, kX40 - 1.8, kX40 + 1.8, {64, 72});
  CHECK(std::abs(mass - 1.0) <= 5e-3);
  CHECK(clamps == 0);
}

TEST_CASE("kou expansion stays normalized") {
  JumpDensityExpansion je(build_kou_model({}), kX40, 2);
  const double dt = 0.01;
  JumpSourceKernel k = je.kernel(kX40, dt);
  const Interval sup = je.model().jumps.support;
  const double mass = integrate([&](double x) { return k.density(x, dt); }, kX40 + sup.lo - 0.6, kX40 + sup.hi + 0.6, {64, 400});
  CHECK(std::abs(mass - 1.0) <= 5e-3);
  CHECK(k.density(kX40 + 0.5, dt) >= 0.0);
}

TEST_CASE("jump density rejects bad steps") {
  JumpDensityExpansion je(merton(), kX40, 2);
  CHECK_THROWS_AS(je.jump_density(kX40, kX40, 0.0), ParameterError);
  CHECK_THROWS_AS(JumpDensityExpansion(merton(), kX40, 3), ParameterError);
}
