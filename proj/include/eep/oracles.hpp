#pragma once

#include <cstdint>

#include "eep/contract.hpp"
#include "eep/models.hpp"

namespace eep {

struct OracleConfig {
  int binomial_steps = 10000;
  long mc_paths = 1000000;
  std::uint64_t mc_seed = 20240607;
  int mc_time_steps = 1000;
  int fd_space_steps = 200;
  int fd_time_steps = 200;
  bool parallel = true;
  void validate() const;
  bool operator==(const OracleConfig&) const = default;
};

double bs_put(double S, double K, double r, double delta, double sigma, double tau);
double black_scholes_put(const GbmParams& params, const PutContract& contract);
double lognormal_density(const GbmParams& params, double S_to, double S_from, double dt);

double crr_binomial_put(const GbmParams& params, const PutContract& contract, int steps);
// Same tree; each layer's node loop split across OpenMP threads.
double crr_binomial_put_parallel(const GbmParams& params, const PutContract& contract, int steps);

BoundaryGrid binomial_implied_boundary(const GbmParams& params, const PutContract& contract,
                                       int steps, int grid_steps);

double merton_series_put(const MertonParams& params, const PutContract& contract, int n_terms = 200);
// Poisson-weighted Gaussian mixture for the log-price transition density.
double merton_mixture_density(const MertonParams& params, double x_to, double x_from, double dt);

struct McResult {
  double price = 0.0;
  double std_err = 0.0;
  long explosive = 0;
  long paths = 0;
};

McResult mc_european_put(const DiffusionSpec& spec, const PutContract& contract,
                         const OracleConfig& config);
McResult mc_european_put(const JumpModel& model, const PutContract& contract,
                         const OracleConfig& config);

struct FdResult {
  double price = 0.0;
  double boundary = 0.0;  // exercise boundary at t = 0
};

FdResult fd_american_put(const GbmParams& params, const PutContract& contract,
                         const OracleConfig& config);

}  // namespace eep
