#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eep/config.hpp"
#include "eep/contract.hpp"

namespace eep {

// Process exit codes of the eepx tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitIo = 4,
  kExitRowFailure = 5,
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Applies the worker count to the OpenMP runtime; 0 leaves it alone.
void apply_workers(int workers);

struct PriceReport {
  ModelKind model = ModelKind::gbm;
  int order = 0;
  int steps = 0;
  double price = 0.0;
  double european = 0.0;
  double premium = 0.0;
  std::optional<double> rebalance;
  std::optional<int> fixed_point_iters;
  BoundaryGrid boundary;
  Diagnostics diagnostics;
  std::optional<McResult> mc_european;
  std::optional<double> runtime_seconds;
};

PriceReport run_price(const RunConfig& config, bool with_mc = false);
std::string render_price(const PriceReport& report);

BoundaryGrid run_boundary(const RunConfig& config);
std::string render_boundary_csv(const BoundaryGrid& boundary);

struct BenchRow {
  double K = 0.0;
  double sigma = 0.0;
  double T = 0.0;
  double benchmark_price = 0.0;
  double hermite_price = 0.0;
  double abs_error = 0.0;
  bool failed = false;
  std::string error;
};

struct Table1Result {
  std::vector<BenchRow> rows;
  double rmse = 0.0;
  int failures = 0;
};

struct Table1Case {
  double K;
  double sigma;
  double T;
};

// The 27 (K, sigma, T) cases with S0 = 40, r = 0.0488 and no dividends.
std::vector<Table1Case> table1_cases();
Table1Result run_table1(int order, int steps, const OracleConfig& oracle, int workers);
std::string render_table1_csv(const Table1Result& result);
// RMSE over rows that did not fail.
double rmse(const std::vector<BenchRow>& rows);

struct DensityRow {
  double S_from = 0.0;
  double S_to = 0.0;
  double density = 0.0;
};

struct DensityCheck {
  ModelKind model = ModelKind::gbm;
  int order = 0;
  double delta_t = 0.0;
  double intensity = 0.0;
  std::vector<DensityRow> rows;
  double normalization_error = 0.0;
  long clamps = 0;
  // Against the exact density when the model has one (GBM lognormal, Merton mixture).
  std::optional<double> sup_relative_error;
  double central_lo = 0.0;
  double central_hi = 0.0;
};

DensityCheck run_density_check(const RunConfig& config);
std::string render_density_csv(const DensityCheck& check);
std::string render_density_summary(const DensityCheck& check);

struct SweepRow {
  int order = 0;
  double strike = 0.0;
  double price = 0.0;
  double benchmark = 0.0;
  double relative_error = 0.0;
};

// Orders 1..3 over the configured strikes against the binomial benchmark; GBM only.
std::vector<SweepRow> run_order_sweep(const RunConfig& config);
std::string render_sweep_csv(const std::vector<SweepRow>& rows);
// Median relative error of one order.
double median_relative_error(const std::vector<SweepRow>& rows, int order);

// Writes text to path, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& text);

}  // namespace eep
