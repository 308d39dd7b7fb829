#include <cmath>

#include "doctest.h"
#include "eep/lamperti.hpp"

using namespace eep;

TEST_CASE("gbm transform closed forms") {
  LampertiTransform t(build_gbm({0.0488, 0.0, 0.2}), 1.0);
  CHECK(t.gamma(40.0) == doctest::Approx(std::log(40.0) / 0.2).epsilon(1e-14));
  CHECK(t.gamma(40.0) == doctest::Approx(18.4444).epsilon(1e-5));
  CHECK(std::abs(t.gamma(1.0)) < 1e-15);
  CHECK(t.gamma_inv(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(t.gamma_inv(18.4444) - 40.0) < 1e-3);
  CHECK(std::abs(t.gamma_inv(std::log(40.0) / 0.2) - 40.0) < 1e-6);
  for (double y : {-5.0, 0.0, 3.0, 18.0}) {
    CHECK(t.mu_Y(y) == doctest::Approx(0.144).epsilon(1e-12));
    CHECK(t.lambda_Y(y) == doctest::Approx(-0.010368).epsilon(1e-10));
  }
  LampertiTransform flat(build_gbm({0.03, 0.03, 0.2}), 40.0);
  CHECK(flat.mu_Y(1.0) == doctest::Approx(-0.1).epsilon(1e-14));
}

TEST_CASE("cev transform against quadrature") {
  CevParams p{0.06, 0.03, 0.632456, 1.9};
  DiffusionSpec s = build_cev(p);
  LampertiTransform t(s, 40.0);
  for (double S : {5.0, 25.0, 40.0, 61.0, 150.0}) {
    const double closed = (std::pow(S, 0.05) - std::pow(40.0, 0.05)) / (0.05 * p.sigma);
    const double quad = S > 40.0 ? integrate([&](double u) { return 1.0 / s.sigma(u); }, 40.0, S, {64, 8})
                                 : -integrate([&](double u) { return 1.0 / s.sigma(u); }, S, 40.0, {64, 8});
    CHECK(std::abs(t.gamma(S) - closed) < 1e-8);
    CHECK(std::abs(t.gamma(S) - quad) < 1e-8);
  }
  for (double y : {-1.5, -0.2, 0.4, 2.0}) {
    const double h = 1e-5 * std::max(1.0, std::abs(y));
    const double fd = (t.mu_Y(y + h) - t.mu_Y(y - h)) / (2.0 * h);
    CHECK(std::abs(t.dmu_Y(y) - fd) <= 1e-5 * std::abs(fd));
  }
}

TEST_CASE("generic transform round trip and monotonicity") {
  for (const DiffusionSpec& s : {build_nmr({}), build_cev({}), build_gbm({})}) {
    LampertiTransform t(s, 40.0);
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200; ++i) {
      const double S = 1.0 * std::pow(400.0, i / 199.0);
      const double y = t.gamma(S);
      CHECK(y > prev);
      prev = y;
      CHECK(std::abs(t.gamma_inv(y) - S) <= 1e-9 * S);
    }
    CHECK(std::abs(t.gamma(40.0)) < 1e-12);
  }
}

TEST_CASE("nmr drift of the transformed process") {
  LampertiTransform t(build_nmr({}), 40.0);
  const double y = t.gamma(20.0);
  const double expected = 11.0 / (0.2 * std::pow(20.0, 1.5)) - 0.5 * 0.2 * 1.5 * std::sqrt(20.0);
  CHECK(expected == doctest::Approx(-0.0559017).epsilon(1e-5));
  CHECK(t.mu_Y(y) == doctest::Approx(expected).epsilon(1e-8));
  CHECK(t.mu_Y_state(20.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero drift gives zero potential") {
  LampertiTransform t(build_log_diffusion(0.5, 0.0, 1.0, 0.0, 0.0), 0.0);
  for (double y : {-3.0, 0.0, 2.5}) {
    CHECK(std::abs(t.mu_Y(y)) < 1e-15);
    CHECK(std::abs(t.lambda_Y(y)) < 1e-15);
    CHECK(t.gamma_inv(y) == doctest::Approx(y));
  }
}

TEST_CASE("domain errors") {
  LampertiTransform t(build_gbm({}), 40.0);
  CHECK_THROWS_AS(t.gamma(-1.0), DomainError);
  CHECK_THROWS_AS(LampertiTransform(build_gbm({}), -2.0), DomainError);
  LampertiTransform nmr(build_nmr({}), 40.0);
  CHECK_THROWS_AS(nmr.gamma_inv(nmr.y_range().hi + 1.0), RangeError);
}
