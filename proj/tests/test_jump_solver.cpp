#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "eep/jump_solver.hpp"
#include "eep/oracles.hpp"

using namespace eep;

namespace {

JumpSolverConfig steps(int n) {
  JumpSolverConfig jc;
  jc.base.steps = n;
  return jc;
}

}  // namespace

TEST_CASE("zero intensity matches the diffusion solver") {
  MertonParams mp;
  mp.lambda = 0.0;
  const PutContract c{40.0, 0.25, 40.0};
  const JumpPricingResult j = price_jump(make_jump_expansion(build_merton_model(mp), 40.0, 2), c, 20, steps(20));
  const PricingResult d = price(make_expansion(build_gbm({0.0488, 0.0, 0.2}), 40.0, 2), c, 20);
  CHECK(std::abs(j.price - d.price) <= 1e-5);
  CHECK(j.rebalance == 0.0);
  CHECK(j.fixed_point_iters == 1);
  for (int n = 0; n <= 18; ++n) CHECK(j.boundary.values[n] == doctest::Approx(d.boundary.values[n]).epsilon(1e-4));
}

TEST_CASE("merton decomposition") {
  const MertonParams mp;
  const PutContract c{40.0, 0.25, 40.0};
  JumpDensityExpansion je = make_jump_expansion(build_merton_model(mp), 40.0, 2);
  const JumpPricingResult r = price_jump(je, c, 20, steps(20));
  CHECK(std::abs(r.european - merton_series_put(mp, c)) <= 1e-3);
  CHECK(r.price == doctest::Approx(r.european + r.premium - r.rebalance).epsilon(1e-14));
  CHECK(r.rebalance >= 0.0);
  CHECK(r.price >= r.european);
  CHECK(r.price >= 0.0);
  CHECK(r.fixed_point_iters >= 2);
  CHECK(r.fixed_point_iters <= 20);
  CHECK(r.boundary.values.back() == 40.0);
  for (std::size_t n = 0; n < r.boundary.values.size(); ++n) {
    CHECK(r.boundary.values[n] > 0.0);
    CHECK(r.boundary.values[n] <= 40.0);
    if (n) CHECK(r.boundary.values[n] >= r.boundary.values[n - 1]);
  }

  const double eta = rebalancing_eta(je, c, r.value_grid, 0.01, 35.0, r.boundary, 1);
  CHECK(std::isfinite(eta));
  CHECK(std::abs(eta) <= mp.lambda * 40.0 * std::exp(-0.0488 * 0.01));
}

TEST_CASE("value grid is at least intrinsic") {
  const PutContract c{40.0, 0.25, 40.0};
  const JumpPricingResult r = price_jump(make_jump_expansion(build_merton_model({}), 40.0, 2), c, 20, steps(20));
  const ValueGrid& g = r.value_grid;
  for (std::size_t n = 0; n < g.time_knots.size(); ++n) {
    for (std::size_t i = 0; i < g.space_knots.size(); ++i) {
      CHECK(g.at(static_cast<int>(n), static_cast<int>(i)) >= std::max(40.0 - g.space_knots[i], 0.0) - 1e-8);
    }
  }
}

TEST_CASE("european lattice") {
  const MertonParams mp;
  const PutContract c{40.0, 0.25, 40.0};
  JumpDensityExpansion je = make_jump_expansion(build_merton_model(mp), 40.0, 2);
  EuropeanLattice serial(je, c, 20, 0.01, false);
  EuropeanLattice parallel(je, c, 20, 0.01, true);
  CHECK(serial.value(20, 35.0) == 5.0);
  CHECK(serial.value(20, 45.0) == 0.0);
  for (double S : {30.0, 38.0, 40.0, 44.0}) CHECK(serial.value(0, S) == parallel.value(0, S));
  PutContract c_half = c;
  c_half.maturity = 0.125;
  CHECK(serial.value(10, 40.0) == doctest::Approx(merton_series_put(mp, c_half)).epsilon(1e-3));
}

TEST_CASE("kou short contract") {
  const PutContract c{40.0, 0.1, 40.0};
  JumpDensityExpansion je = make_jump_expansion(build_kou_model({}), 40.0, 2);
  const JumpPricingResult r = price_jump(je, c, 10, steps(10));
  CHECK(std::isfinite(r.price));
  CHECK(r.price >= r.european);
  CHECK(r.rebalance >= 0.0);
  CHECK(r.boundary.values.back() == 40.0);
  for (double b : r.boundary.values) {
    CHECK(b > 0.0);
    CHECK(b <= 40.0);
  }
}
