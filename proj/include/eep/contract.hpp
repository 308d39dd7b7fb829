#pragma once

#include <vector>

#include "eep/errors.hpp"

namespace eep {

struct PutContract {
  double strike = 40.0;
  double maturity = 0.5;
  double spot = 40.0;
  void validate() const;
  bool operator==(const PutContract&) const = default;
};

// Step-function exercise boundary on t_n = n * dt, n = 0..N.
struct BoundaryGrid {
  int n_steps = 0;
  double dt = 0.0;
  std::vector<double> values;

  double time(int n) const { return n * dt; }
  // Piecewise constant on the left knot.
  double at_time(double t) const;
};

struct Diagnostics {
  long panels = 0;
  long clamps = 0;
  long root_iterations = 0;
  long kernels = 0;
};

struct PricingResult {
  double price = 0.0;
  double european = 0.0;
  double premium = 0.0;
  BoundaryGrid boundary;
  Diagnostics diagnostics;
};

struct SolverConfig {
  int steps = 100;
  int quad_nodes = 64;
  double trunc_sd = 10.0;
  double root_tol_rel = 1e-8;
  double lower_eps_rel = 1e-8;
  bool parallel = true;
};

}  // namespace eep
