#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "eep/hermite.hpp"
#include "eep/oracles.hpp"

using namespace eep;

namespace {

DiffusionSpec unit_diffusion() { return build_log_diffusion(0.5, 0.0, 1.0, 0.0, 0.0); }

double sup_rel_vs_lognormal(const DensityExpansion& ex, const GbmParams& g, double dt) {
  double worst = 0.0;
  for (int i = 0; i <= 460; ++i) {
    const double S = 30.0 + 0.05 * i;
    const double exact = lognormal_density(g, S, 40.0, dt);
    worst = std::max(worst, std::abs(ex.density(S, 40.0, dt) / exact - 1.0));
  }
  return worst;
}

}  // namespace

TEST_CASE("c_0 is one and zero drift gives zero corrections") {
  DensityExpansion gbm(make_transform(build_gbm({}), 40.0), 2);
  CHECK(gbm.coeff_c(0, 0.3, -1.2) == 1.0);
  DensityExpansion flat(make_transform(unit_diffusion(), 0.0), 3);
  for (double y : {-2.0, 0.1, 1.5}) {
    CHECK(std::abs(flat.coeff_c(1, 0.0, y)) < 1e-15);
    CHECK(std::abs(flat.coeff_c(2, 0.0, y)) < 1e-12);
  }
}

TEST_CASE("gbm c_1 equals the constant potential") {
  DensityExpansion ex(make_transform(build_gbm({0.0488, 0.0, 0.2}), 40.0), 3);
  for (double y : {-1.0, 0.0, 0.5, 2.0}) {
    CHECK(ex.coeff_c(1, 0.2, y) == doctest::Approx(-0.010368).epsilon(1e-9));
    CHECK(ex.coeff_c(2, 0.2, y) == doctest::Approx(0.010368 * 0.010368).epsilon(1e-6));
  }
}

TEST_CASE("unit diffusion collapses to the brownian kernel") {
  for (int m = 0; m <= 3; ++m) {
    DensityExpansion ex(make_transform(unit_diffusion(), 0.0), m);
    for (double x : {-1.0, -0.2, 0.0, 0.4, 1.3}) {
      const double dt = 0.25;
      const double exact = norm_pdf((x - 0.1) / std::sqrt(dt)) / std::sqrt(dt);
      CHECK(std::abs(ex.density(x, 0.1, dt) - exact) < 1e-12);
      const double log_exact = -0.5 * std::log(2.0 * M_PI * dt) - 0.5 * (x - 0.1) * (x - 0.1) / dt;
      CHECK(std::abs(ex.log_density(x, 0.1, dt) - log_exact) < 1e-12);
    }
  }
}

TEST_CASE("gbm density against the lognormal") {
  const GbmParams g{0.0488, 0.0, 0.2};
  const double dt = 0.0833;
  DensityExpansion m2(make_transform(build_gbm(g), 40.0), 2);
  CHECK(sup_rel_vs_lognormal(m2, g, dt) <= 1e-3);

  const double sd = 0.2 * std::sqrt(dt);
  const double lo = 40.0 * std::exp(-10.0 * sd), hi = 40.0 * std::exp(10.0 * sd);
  const double mass = integrate([&](double S) { return m2.density(S, 40.0, dt); }, lo, hi, {64, 16});
  CHECK(std::abs(mass - 1.0) <= 1e-3);

  double prev = 1e300;
  for (int m = 0; m <= 2; ++m) {
    DensityExpansion ex(make_transform(build_gbm(g), 40.0), m);
    const double err = sup_rel_vs_lognormal(ex, g, dt);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("normalization across models at order 2") {
  const double dt = 0.0833;
  for (const DiffusionSpec& s : {build_gbm({}), build_cev({}), build_nmr({})}) {
    DensityExpansion ex(make_transform(s, 40.0), 2);
    const LampertiTransform& t = ex.transform();
    const double y0 = t.gamma(40.0);
    const double a = std::max(y0 - 10.0 * std::sqrt(dt), t.y_range().lo);
    const double b = std::min({y0 + 10.0 * std::sqrt(dt), t.y_range().hi, t.gamma(4000.0)});
    SourceKernel k = ex.kernel(40.0, a, b);
    const double mass = integrate([&](double y) { return k.density_y(y, dt); }, a, b, {64, 16});
    CHECK(std::abs(mass - 1.0) <= 1e-3);
  }
}

TEST_CASE("short-time concentration") {
  auto window_mass = [](const DiffusionSpec& s, double dt) {
    DensityExpansion ex(make_transform(s, 40.0), 2);
    const double w = 5.0 * s.sigma(40.0) * std::sqrt(dt);
    return integrate([&](double S) { return ex.density(S, 40.0, dt); }, 40.0 - w, 40.0 + w, {64, 8});
  };
  for (double dt : {0.01, 0.005, 0.001}) {
    CHECK(window_mass(build_gbm({}), dt) > 0.9999);
    CHECK(window_mass(build_cev({}), dt) > 0.9999);
  }
  // sigma(S) grows like S^1.5, so the symmetric S window is lopsided in y until dt is smaller.
  for (double dt : {0.005, 0.0025, 0.001}) CHECK(window_mass(build_nmr({}), dt) > 0.9999);
}

TEST_CASE("log density round trip and far tail") {
  DensityExpansion ex(make_transform(build_gbm({}), 40.0), 2);
  for (double S : {30.0, 38.0, 40.0, 47.0}) {
    CHECK(std::exp(ex.log_density(S, 40.0, 0.0833)) == doctest::Approx(ex.density(S, 40.0, 0.0833)).epsilon(1e-12));
  }
  CHECK(ex.density(200.0, 40.0, 0.01) == 0.0);
  const double ld = ex.log_density(200.0, 40.0, 0.01);
  CHECK(std::isfinite(ld));
  CHECK(ld < -700.0);
}

TEST_CASE("tabulated kernel matches the reference recursion") {
  for (const DiffusionSpec& s : {build_cev({}), build_nmr({})}) {
    for (int m = 1; m <= 3; ++m) {
      DensityExpansion ex(make_transform(s, 40.0), m);
      const double y0 = ex.transform().gamma(38.0);
      SourceKernel k = ex.kernel(38.0, y0 - 1.0, y0 + 1.0);
      for (double d : {-0.8, -0.3, 0.05, 0.6}) {
        const double y = y0 + d;
        const double S = ex.transform().gamma_inv(y);
        const double ref = ex.density(S, 38.0, 0.05) * s.sigma(S);
        CHECK(k.density_y(y, 0.05) == doctest::Approx(ref).epsilon(m < 3 ? 1e-7 : 1e-5));
      }
    }
  }
}

TEST_CASE("expansion rejects bad input") {
  CHECK_THROWS_AS(DensityExpansion(make_transform(build_gbm({}), 40.0), 4), ParameterError);
  DensityExpansion ex(make_transform(build_gbm({}), 40.0), 2);
  CHECK_THROWS_AS(ex.density(41.0, 40.0, 0.0), ParameterError);
  CHECK_THROWS_AS(ex.density(-1.0, 40.0, 0.1), DomainError);
}
