#include <cmath>

#include "doctest.h"
#include "eep/commands.hpp"
#include "eep/eep_solver.hpp"
#include "eep/oracles.hpp"

using namespace eep;

TEST_CASE("binomial benchmark") {
  const GbmParams g2{0.0488, 0.0, 0.2};
  CHECK(std::abs(crr_binomial_put(g2, {40.0, 0.3333, 40.0}, 10000) - 1.5798) <= 5e-5);
  CHECK(std::abs(crr_binomial_put({0.0488, 0.0, 0.4}, {45.0, 0.5833, 40.0}, 10000) - 7.3830) <= 5e-5);
  CHECK(crr_binomial_put({0.0, 0.0, 1e-6}, {45.0, 0.5, 40.0}, 500) == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(crr_binomial_put({0.0, 0.0, 1e-6}, {35.0, 0.5, 40.0}, 500) < 1e-12);
}

TEST_CASE("binomial step refinement is stable on the benchmark grid") {
  for (const Table1Case& tc : table1_cases()) {
    const GbmParams g{0.0488, 0.0, tc.sigma};
    const PutContract c{tc.K, tc.T, 40.0};
    CHECK(std::abs(crr_binomial_put(g, c, 10000) - crr_binomial_put(g, c, 5000)) <= 5e-4);
  }
}

TEST_CASE("serial and parallel trees agree") {
  const GbmParams g{0.0488, 0.0, 0.3};
  for (double K : {35.0, 40.0, 45.0}) {
    const PutContract c{K, 0.5833, 40.0};
    CHECK(crr_binomial_put(g, c, 4000) == crr_binomial_put_parallel(g, c, 4000));
  }
}

TEST_CASE("black-scholes limits") {
  const GbmParams g{0.0488, 0.0, 0.2};
  CHECK(black_scholes_put(g, {1e-12, 0.5, 40.0}) < 1e-15);
  CHECK(black_scholes_put({0.0, 0.0, 1e-8}, {45.0, 0.5, 40.0}) == doctest::Approx(5.0).epsilon(1e-12));
  const double eu = black_scholes_put(g, {40.0, 0.3333, 40.0});
  CHECK(eu < 1.5798);
  CHECK(eu > 1.5);
}

TEST_CASE("lognormal density") {
  const GbmParams g{0.0488, 0.0, 0.2};
  const double dt = 0.0833;
  const double sd = 0.2 * std::sqrt(dt);
  const double m = std::log(40.0) + (0.0488 - 0.02) * dt;
  const double mass = integrate([&](double S) { return lognormal_density(g, S, 40.0, dt); },
                                std::exp(m - 12.0 * sd), std::exp(m + 12.0 * sd), {64, 32});
  CHECK(std::abs(mass - 1.0) <= 1e-12);
  const double mean = integrate([&](double S) { return S * lognormal_density(g, S, 40.0, dt); },
                                std::exp(m - 12.0 * sd), std::exp(m + 12.0 * sd), {64, 32});
  const double mode = std::exp(m - 0.04 * dt);
  CHECK(mode < mean);
  CHECK(lognormal_density(g, mode, 40.0, dt) > lognormal_density(g, mode * 1.001, 40.0, dt));
  CHECK(lognormal_density(g, mode, 40.0, dt) > lognormal_density(g, mode * 0.999, 40.0, dt));
}

TEST_CASE("merton series") {
  MertonParams mp;
  const PutContract c{40.0, 0.5, 40.0};
  mp.lambda = 0.0;
  CHECK(merton_series_put(mp, c) == black_scholes_put({0.0488, 0.0, 0.2}, c));
  mp.lambda = 0.1;
  const double series = merton_series_put(mp, c);
  CHECK(series == doctest::Approx(1.858865).epsilon(1e-6));
  OracleConfig oc;
  oc.mc_paths = 2000000;
  const McResult mc = mc_european_put(build_merton_model(mp), c, oc);
  CHECK(std::abs(mc.price - series) <= 3.0 * mc.std_err);
}

TEST_CASE("monte carlo") {
  const GbmParams g{0.0488, 0.0, 0.2};
  const PutContract c{40.0, 0.3333, 40.0};
  OracleConfig oc;
  oc.mc_paths = 200000;
  oc.mc_time_steps = 200;
  const McResult a = mc_european_put(build_gbm(g), c, oc);
  CHECK(std::abs(a.price - black_scholes_put(g, c)) <= 3.0 * a.std_err);
  CHECK(a.paths == 200000);
  CHECK(a.explosive == 0);

  const McResult b = mc_european_put(build_gbm(g), c, oc);
  CHECK(a.price == b.price);
  CHECK(a.std_err == b.std_err);
  oc.parallel = false;
  const McResult s = mc_european_put(build_gbm(g), c, oc);
  CHECK(a.price == s.price);

  OracleConfig flat;
  flat.mc_paths = 1000;
  flat.mc_time_steps = 10;
  const McResult d = mc_european_put(build_gbm({0.0488, 0.0, 1e-12}), {45.0, 0.5, 40.0}, flat);
  // Ten Euler steps compound the drift discretely.
  const double ST = 40.0 * std::pow(1.0 + 0.0488 * 0.05, 10);
  CHECK(d.price == doctest::Approx((45.0 - ST) * std::exp(-0.0488 * 0.5)).epsilon(1e-9));
}

TEST_CASE("monte carlo coverage over seeds") {
  MertonParams mp;
  mp.lambda = 0.0;
  const PutContract c{40.0, 0.5, 40.0};
  const double exact = black_scholes_put({0.0488, 0.0, 0.2}, c);
  OracleConfig oc;
  oc.mc_paths = 100000;
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    oc.mc_seed = seed;
    const McResult r = mc_european_put(build_merton_model(mp), c, oc);
    inside += std::abs(r.price - exact) <= 3.0 * r.std_err ? 1 : 0;
  }
  CHECK(inside >= 20);
}

TEST_CASE("finite difference") {
  const GbmParams g{0.0488, 0.0, 0.2};
  const PutContract c{35.0, 0.0833, 40.0};
  const double bench = crr_binomial_put(g, c, 10000);
  OracleConfig oc;
  const FdResult coarse = fd_american_put(g, c, oc);
  CHECK(std::abs(coarse.price - bench) <= 2e-2);
  CHECK(coarse.price >= 0.0);
  oc.fd_space_steps = 600;
  const FdResult fine = fd_american_put(g, c, oc);
  CHECK(std::abs(fine.price - bench) <= 5e-3);

  const PutContract atm{40.0, 0.5833, 40.0};
  const FdResult r = fd_american_put(g, atm, oc);
  CHECK(r.price >= black_scholes_put(g, atm));
  CHECK(r.boundary > 0.0);
  CHECK(r.boundary < 40.0);
  oc.fd_space_steps = 10;
  CHECK_THROWS_AS(fd_american_put(g, atm, oc), ParameterError);
}

TEST_CASE("binomial implied boundary") {
  const GbmParams g{0.0488, 0.0, 0.2};
  const PutContract c{40.0, 0.5833, 40.0};
  const BoundaryGrid b = binomial_implied_boundary(g, c, 10000, 100);
  REQUIRE(b.values.size() == 101u);
  CHECK(b.values.back() == 40.0);
  for (std::size_t i = 1; i < b.values.size(); ++i) CHECK(b.values[i] >= b.values[i - 1]);
  const BoundaryGrid e = solve_boundary(make_expansion(build_gbm(g), 40.0, 2), c, 100);
  for (std::size_t i = 0; i + 2 < b.values.size(); ++i) CHECK(e.values[i] == doctest::Approx(b.values[i]).epsilon(1e-2));
}

TEST_CASE("american dominates european") {
  for (const Table1Case& tc : table1_cases()) {
    const GbmParams g{0.0488, 0.0, tc.sigma};
    const PutContract c{tc.K, tc.T, 40.0};
    CHECK(crr_binomial_put(g, c, 2000) >= black_scholes_put(g, c) - 1e-4);
  }
}
