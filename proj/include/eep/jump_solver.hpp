#pragma once

#include <utility>
#include <vector>

#include "eep/eep_solver.hpp"
#include "eep/jump_hermite.hpp"

namespace eep {

// Put values on (time knot, log-spaced state knot) pairs.
struct ValueGrid {
  std::vector<double> time_knots;
  std::vector<double> space_knots;
  std::vector<double> values;  // row-major, one row per time knot

  double at(int n, int i) const { return values[static_cast<std::size_t>(n) * space_knots.size() + i]; }
  // Linear in log S on time row n.
  double row_value(int n, double S) const;
  // Bilinear in (t, log S).
  double value(double t, double S) const;
  double s_max() const { return space_knots.back(); }
};

struct JumpSolverConfig {
  SolverConfig base{50};
  int value_knots = 200;
  double value_floor_rel = 1e-3;
  int max_passes = 20;
  double fixed_point_tol_rel = 1e-5;
  double lattice_step = 0.01;  // log-price spacing of the European lattice
  int excess_points = 256;     // pre-jump knots of the tabulated rebalancing integrand
};

struct JumpPricingResult {
  double price = 0.0;
  double european = 0.0;
  double premium = 0.0;
  double rebalance = 0.0;  // nonnegative cost; price = european + premium - rebalance
  BoundaryGrid boundary;
  ValueGrid value_grid;
  int fixed_point_iters = 0;
  std::vector<double> boundary_deltas;
  Diagnostics diagnostics;
};

// European put values p(l dt, S) by backward induction of the one-step kernel on a log grid.
class EuropeanLattice {
 public:
  EuropeanLattice(const JumpDensityExpansion& expansion, const PutContract& contract, int N,
                  double step, bool parallel);
  // Value at time index l (0 <= l <= N).
  double value(int l, double S) const;
  int steps() const { return N_; }

 private:
  const JumpDensityExpansion& expansion_;
  PutContract contract_;
  int N_;
  double dt_;
  double x0_;
  double h_;
  std::vector<std::vector<double>> layers_;  // layers_[l] for l = 0..N-1
};

// Expected post-jump excess of the value over intrinsic, for a pre-jump log price x below B:
// int_{log B - x} (P(t_n, e^{x+z}) - (K - e^{x+z})) v(z) dz.
double post_jump_excess(const JumpDensityExpansion& expansion, const PutContract& contract,
                        const ValueGrid& grid, int n, double x, double B);

double rebalancing_eta(const JumpDensityExpansion& expansion, const PutContract& contract,
                       const ValueGrid& value_grid, double s_gap, double B_from,
                       const BoundaryGrid& boundary, int to_index);

std::pair<BoundaryGrid, ValueGrid> solve_boundary_jump(const JumpDensityExpansion& expansion,
                                                       const PutContract& contract, int N,
                                                       const JumpSolverConfig& config = {});

JumpPricingResult price_jump(const JumpDensityExpansion& expansion, const PutContract& contract,
                             int N, const JumpSolverConfig& config = {});

// Log-price expansion anchored at the strike.
JumpDensityExpansion make_jump_expansion(const JumpModel& model, double strike, int order,
                                         JumpExpansionConfig config = {});

}  // namespace eep
