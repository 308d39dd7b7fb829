// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "eep/eep_solver.hpp"
#include "eep/jump_solver.hpp"
#include "eep/oracles.hpp"

namespace {

using namespace eep;

const GbmParams kGbm{0.0488, 0.0, 0.2};
const PutContract kContract{40.0, 0.5833, 40.0};

struct PremiumFixture {
  DensityExpansion expansion = make_expansion(build_gbm(kGbm), kContract.strike, 2);
  ExpansionLaw law{expansion, kContract};
  BoundaryGrid grid = solve_boundary(expansion, kContract, 100);
};

const PremiumFixture& premium_fixture() {
  static const PremiumFixture f;
  return f;
}

template <bool Parallel>
void BM_PremiumSum(benchmark::State& state) {
  const PremiumFixture& f = premium_fixture();
  const int l = static_cast<int>(state.range(0));
  const double b = f.grid.values[l];
  auto src = f.law.from(b, kContract.maturity - f.grid.time(l));
  for (auto _ : state) {
    long clamps = 0;
    const double s = Parallel ? eps_sum_parallel(f.law, *src, b, l, f.grid, &clamps)
                              : eps_sum_serial(f.law, *src, b, l, f.grid, &clamps);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_PremiumSum<false>)->Name("premium_sum/serial")->Arg(0)->Arg(50);
BENCHMARK(BM_PremiumSum<true>)->Name("premium_sum/parallel")->Arg(0)->Arg(50);

void BM_BoundarySolve(benchmark::State& state) {
  DensityExpansion ex = make_expansion(build_gbm(kGbm), kContract.strike, 2);
  SolverConfig sc;
  sc.parallel = state.range(0) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_boundary(ex, kContract, 50, sc));
}
BENCHMARK(BM_BoundarySolve)->Name("boundary_solve/parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Binomial(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel ? crr_binomial_put_parallel(kGbm, kContract, 10000)
                                      : crr_binomial_put(kGbm, kContract, 10000));
  }
}
BENCHMARK(BM_Binomial)->Name("crr_10000/parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  OracleConfig oc;
  oc.mc_paths = 200000;
  oc.parallel = state.range(0) != 0;
  const JumpModel model = build_merton_model({});
  for (auto _ : state) benchmark::DoNotOptimize(mc_european_put(model, kContract, oc));
}
BENCHMARK(BM_MonteCarlo)->Name("mc_merton/parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_EuropeanLattice(benchmark::State& state) {
  JumpDensityExpansion ex = make_jump_expansion(build_merton_model({}), kContract.strike, 2);
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    EuropeanLattice lat(ex, kContract, 50, 0.01, parallel);
    benchmark::DoNotOptimize(lat.value(0, 40.0));
  }
}
BENCHMARK(BM_EuropeanLattice)->Name("european_lattice/parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
