#include "eep/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "eep/eep_solver.hpp"
#include "eep/jump_solver.hpp"
#include "eep/oracles.hpp"
#include "json.hpp"

namespace eep {

using json = nlohmann::ordered_json;

namespace {

constexpr double kZ995 = 2.5758293035489004;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json diagnostics_json(const Diagnostics& d) {
  return {{"panels", d.panels}, {"clamps", d.clamps}, {"root_iterations", d.root_iterations},
          {"kernels", d.kernels}};
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  s.steps = c.steps;
  return s;
}

JumpSolverConfig jump_solver_config(const RunConfig& c) {
  JumpSolverConfig s;
  s.base.steps = c.steps;
  return s;
}

// Index range [lo, hi] holding the central 99% of a density sampled on an even grid.
std::pair<std::size_t, std::size_t> central_range(const std::vector<double>& pdf) {
  std::vector<double> cdf(pdf.size(), 0.0);
  for (std::size_t i = 1; i < pdf.size(); ++i) cdf[i] = cdf[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]);
  const double total = cdf.back();
  std::size_t lo = 0;
  while (lo + 1 < cdf.size() && cdf[lo + 1] < 0.005 * total) ++lo;
  std::size_t hi = cdf.size() - 1;
  while (hi > lo && cdf[hi - 1] > 0.995 * total) --hi;
  return {lo, hi};
}

DensityCheck diffusion_density_check(const RunConfig& cfg) {
  const DiffusionSpec spec = diffusion_spec(cfg);
  const double S0 = cfg.contract.spot;
  const double dt = cfg.density.delta_t;
  DensityExpansion ex = make_expansion(spec, cfg.contract.strike, cfg.order);
  const LampertiTransform& tr = ex.transform();
  const double y0 = tr.gamma(S0);
  const Interval yr = tr.y_range();
  const double reach = 8.0 * std::sqrt(dt);
  const double y_lo = std::max(y0 - reach, yr.lo);
  // A bounded y-range maps its upper end to S = infinity, where the drift integral diverges.
  const double y_hi = std::min({y0 + reach, yr.hi, tr.gamma(100.0 * S0)});
  SourceKernel k = ex.kernel(S0, y_lo, y_hi);

  DensityCheck out;
  out.model = cfg.model;
  out.order = cfg.order;
  out.delta_t = dt;

  const int n = 20000;
  const double h = (y_hi - y_lo) / n;
  std::vector<double> ys(n + 1), py(n + 1), ps(n + 1), ss(n + 1);
  for (int i = 0; i <= n; ++i) {
    ys[i] = y_lo + i * h;
    py[i] = k.density_y(ys[i], dt, &out.clamps);
    ss[i] = k.state(ys[i]);
    ps[i] = py[i] / spec.sigma(ss[i]);
  }
  double mass = 0.0;
  for (int i = 1; i <= n; ++i) mass += 0.5 * h * (py[i] + py[i - 1]);
  out.normalization_error = std::abs(mass - 1.0);

  if (cfg.model == ModelKind::gbm) {
    const GbmParams& g = cfg.gbm;
    const double m = std::log(S0) + (g.r - g.delta - 0.5 * g.sigma * g.sigma) * dt;
    const double sd = g.sigma * std::sqrt(dt);
    out.central_lo = std::exp(m - kZ995 * sd);
    out.central_hi = std::exp(m + kZ995 * sd);
    double sup = 0.0;
    for (int i = 0; i <= n; ++i) {
      if (ss[i] < out.central_lo || ss[i] > out.central_hi) continue;
      const double exact = lognormal_density(g, ss[i], S0, dt);
      sup = std::max(sup, std::abs(ps[i] / exact - 1.0));
    }
    out.sup_relative_error = sup;
  } else {
    auto [a, b] = central_range(py);
    out.central_lo = ss[a];
    out.central_hi = ss[b];
  }

  const int pts = cfg.density.points;
  const double yd_lo = std::max(y0 - 5.0 * std::sqrt(dt), yr.lo);
  const double yd_hi = std::min(y0 + 5.0 * std::sqrt(dt), yr.hi);
  for (int i = 0; i < pts; ++i) {
    const double y = yd_lo + (yd_hi - yd_lo) * i / (pts - 1);
    const double S = k.state(y);
    out.rows.push_back({S0, S, k.density_y(y, dt) / spec.sigma(S)});
  }
  return out;
}

DensityCheck jump_density_check(const RunConfig& cfg) {
  const JumpModel model = jump_model(cfg);
  const double S0 = cfg.contract.spot;
  const double x0 = std::log(S0);
  const double dt = cfg.density.delta_t;
  JumpDensityExpansion ex = make_jump_expansion(model, cfg.contract.strike, cfg.order);
  JumpSourceKernel k = ex.kernel(x0, dt);
  const double sigma = cfg.model == ModelKind::merton ? cfg.merton.sigma : cfg.kou.sigma;

  DensityCheck out;
  out.model = cfg.model;
  out.order = cfg.order;
  out.delta_t = dt;
  out.intensity = ex.intensity();

  const Interval sup = model.jumps.support;
  const double spread = 8.0 * sigma * std::sqrt(dt);
  const double x_lo = x0 + std::min(0.0, 2.0 * sup.lo) - spread;
  const double x_hi = x0 + std::max(0.0, 2.0 * sup.hi) + spread;
  const int n = 40000;
  const double h = (x_hi - x_lo) / n;
  std::vector<double> xs(n + 1), px(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = x_lo + i * h;
    px[i] = k.density(xs[i], dt, &out.clamps);
  }
  double mass = 0.0;
  for (int i = 1; i <= n; ++i) mass += 0.5 * h * (px[i] + px[i - 1]);
  out.normalization_error = std::abs(mass - 1.0);

  if (cfg.model == ModelKind::merton) {
    std::vector<double> ref(n + 1);
    for (int i = 0; i <= n; ++i) ref[i] = merton_mixture_density(cfg.merton, xs[i], x0, dt);
    auto [a, b] = central_range(ref);
    double worst = 0.0;
    for (std::size_t i = a; i <= b; ++i) worst = std::max(worst, std::abs(px[i] / ref[i] - 1.0));
    out.sup_relative_error = worst;
    out.central_lo = std::exp(xs[a]);
    out.central_hi = std::exp(xs[b]);
  } else {
    auto [a, b] = central_range(px);
    out.central_lo = std::exp(xs[a]);
    out.central_hi = std::exp(xs[b]);
  }

  const int pts = cfg.density.points;
  const double xd_lo = x0 - 5.0 * sigma * std::sqrt(dt);
  const double xd_hi = x0 + 5.0 * sigma * std::sqrt(dt);
  for (int i = 0; i < pts; ++i) {
    const double x = xd_lo + (xd_hi - xd_lo) * i / (pts - 1);
    const double S = std::exp(x);
    out.rows.push_back({S0, S, k.density(x, dt) / S});
  }
  return out;
}

}  // namespace

void apply_workers(int workers) {
  if (workers > 0) omp_set_num_threads(workers);
}

PriceReport run_price(const RunConfig& cfg, bool with_mc) {
  cfg.validate();
  PriceReport rep;
  rep.model = cfg.model;
  rep.order = cfg.order;
  rep.steps = cfg.steps;
  if (is_jump_model(cfg.model)) {
    const JumpModel model = jump_model(cfg);
    JumpDensityExpansion ex = make_jump_expansion(model, cfg.contract.strike, cfg.order);
    JumpPricingResult r = price_jump(ex, cfg.contract, cfg.steps, jump_solver_config(cfg));
    rep.price = r.price;
    rep.european = r.european;
    rep.premium = r.premium;
    rep.rebalance = r.rebalance;
    rep.fixed_point_iters = r.fixed_point_iters;
    rep.boundary = std::move(r.boundary);
    rep.diagnostics = r.diagnostics;
    if (with_mc) rep.mc_european = mc_european_put(model, cfg.contract, cfg.oracle);
  } else {
    const DiffusionSpec spec = diffusion_spec(cfg);
    DensityExpansion ex = make_expansion(spec, cfg.contract.strike, cfg.order);
    PricingResult r = price(ex, cfg.contract, cfg.steps, solver_config(cfg));
    rep.price = r.price;
    rep.european = r.european;
    rep.premium = r.premium;
    rep.boundary = std::move(r.boundary);
    rep.diagnostics = r.diagnostics;
    if (with_mc) rep.mc_european = mc_european_put(spec, cfg.contract, cfg.oracle);
  }
  return rep;
}

std::string render_price(const PriceReport& rep) {
  json j;
  j["model"] = to_string(rep.model);
  j["m"] = rep.order;
  j["N"] = rep.steps;
  j["P"] = rep.price;
  j["p"] = rep.european;
  j["e"] = rep.premium;
  if (rep.rebalance) j["g"] = *rep.rebalance;
  if (rep.fixed_point_iters) j["fixed_point_iters"] = *rep.fixed_point_iters;
  if (!rep.boundary.values.empty()) j["boundary_t0"] = rep.boundary.values.front();
  j["diagnostics"] = diagnostics_json(rep.diagnostics);
  if (rep.mc_european) {
    j["mc_european"] = {{"price", rep.mc_european->price},
                        {"std_err", rep.mc_european->std_err},
                        {"paths", rep.mc_european->paths},
                        {"explosive", rep.mc_european->explosive}};
  }
  j["runtime_seconds"] = rep.runtime_seconds ? json(*rep.runtime_seconds) : json(nullptr);
  return j.dump(2) + "\n";
}

BoundaryGrid run_boundary(const RunConfig& cfg) {
  cfg.validate();
  if (is_jump_model(cfg.model)) {
    JumpDensityExpansion ex = make_jump_expansion(jump_model(cfg), cfg.contract.strike, cfg.order);
    return solve_boundary_jump(ex, cfg.contract, cfg.steps, jump_solver_config(cfg)).first;
  }
  DensityExpansion ex = make_expansion(diffusion_spec(cfg), cfg.contract.strike, cfg.order);
  return solve_boundary(ex, cfg.contract, cfg.steps, solver_config(cfg));
}

std::string render_boundary_csv(const BoundaryGrid& b) {
  std::string s = "step_index,time_years,boundary\n";
  for (int n = 0; n <= b.n_steps; ++n) {
    s += std::to_string(n) + "," + num(b.time(n)) + "," + num(b.values[n]) + "\n";
  }
  return s;
}

std::vector<Table1Case> table1_cases() {
  std::vector<Table1Case> out;
  for (double sigma : {0.2, 0.3, 0.4}) {
    for (double K : {35.0, 40.0, 45.0}) {
      for (double T : {0.0833, 0.3333, 0.5833}) out.push_back({K, sigma, T});
    }
  }
  return out;
}

double rmse(const std::vector<BenchRow>& rows) {
  double s = 0.0;
  int n = 0;
  for (const BenchRow& r : rows) {
    if (r.failed) continue;
    s += r.abs_error * r.abs_error;
    ++n;
  }
  return n ? std::sqrt(s / n) : 0.0;
}

Table1Result run_table1(int order, int steps, const OracleConfig& oracle, int workers) {
  const std::vector<Table1Case> cases = table1_cases();
  Table1Result res;
  res.rows.resize(cases.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  const int n = static_cast<int>(cases.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    const Table1Case& tc = cases[i];
    BenchRow& row = res.rows[i];
    row.K = tc.K;
    row.sigma = tc.sigma;
    row.T = tc.T;
    try {
      GbmParams g{0.0488, 0.0, tc.sigma};
      PutContract c{tc.K, tc.T, 40.0};
      row.benchmark_price = crr_binomial_put(g, c, oracle.binomial_steps);
      DensityExpansion ex = make_expansion(build_gbm(g), tc.K, order);
      SolverConfig sc;
      sc.steps = steps;
      row.hermite_price = price(ex, c, steps, sc).price;
      row.abs_error = std::abs(row.benchmark_price - row.hermite_price);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  }
  for (const BenchRow& r : res.rows) res.failures += r.failed ? 1 : 0;
  res.rmse = rmse(res.rows);
  return res;
}

std::string render_table1_csv(const Table1Result& res) {
  std::string s = "K,sigma,T,benchmark_price,hermite_price,abs_error,status\n";
  for (const BenchRow& r : res.rows) {
    s += num(r.K) + "," + num(r.sigma) + "," + num(r.T) + ",";
    if (r.failed) {
      s += ",,,failed\n";
    } else {
      s += num(r.benchmark_price) + "," + num(r.hermite_price) + "," + num(r.abs_error) + ",ok\n";
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "# RMSE %.3e\n", res.rmse);
  s += buf;
  return s;
}

DensityCheck run_density_check(const RunConfig& cfg) {
  cfg.validate();
  return is_jump_model(cfg.model) ? jump_density_check(cfg) : diffusion_density_check(cfg);
}

std::string render_density_csv(const DensityCheck& d) {
  const bool jumps = is_jump_model(d.model);
  std::string s = jumps ? "S_from,S_to,delta_t,m,density,intensity\n" : "S_from,S_to,delta_t,m,density\n";
  for (const DensityRow& r : d.rows) {
    s += num(r.S_from) + "," + num(r.S_to) + "," + num(d.delta_t) + "," + std::to_string(d.order) +
         "," + num(r.density);
    if (jumps) s += "," + num(d.intensity);
    s += "\n";
  }
  return s;
}

std::string render_density_summary(const DensityCheck& d) {
  json j;
  j["model"] = to_string(d.model);
  j["m"] = d.order;
  j["delta_t"] = d.delta_t;
  j["normalization_error"] = d.normalization_error;
  j["clamps"] = d.clamps;
  j["central_range"] = {d.central_lo, d.central_hi};
  j["sup_relative_error"] = d.sup_relative_error ? json(*d.sup_relative_error) : json(nullptr);
  return j.dump(2) + "\n";
}

std::vector<SweepRow> run_order_sweep(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.model != ModelKind::gbm) throw ConfigError("model: order-sweep supports gbm only");
  const std::vector<double>& strikes = cfg.sweep.strikes;
  const int ns = static_cast<int>(strikes.size());
  std::vector<double> bench(ns);
  std::vector<SweepRow> rows(3 * strikes.size());
  const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
  std::vector<std::string> errors(rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < ns; ++i) {
    PutContract c = cfg.contract;
    c.strike = strikes[i];
    bench[i] = crr_binomial_put(cfg.gbm, c, cfg.oracle.binomial_steps);
  }
  const int n = static_cast<int>(rows.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    const int m = 1 + i / ns;
    const int s = i % ns;
    PutContract c = cfg.contract;
    c.strike = strikes[s];
    SweepRow& row = rows[i];
    row.order = m;
    row.strike = c.strike;
    row.benchmark = bench[s];
    try {
      DensityExpansion ex = make_expansion(build_gbm(cfg.gbm), c.strike, m);
      SolverConfig sc;
      sc.steps = cfg.steps;
      row.price = price(ex, c, cfg.steps, sc).price;
      row.relative_error = std::abs(row.price - row.benchmark) / row.benchmark;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const std::string& e : errors) {
    if (!e.empty()) throw Error("order sweep: " + e);
  }
  return rows;
}

std::string render_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "m,strike,price,benchmark,relative_error\n";
  for (const SweepRow& r : rows) {
    s += std::to_string(r.order) + "," + num(r.strike) + "," + num(r.price) + "," + num(r.benchmark) +
         "," + num(r.relative_error) + "\n";
  }
  return s;
}

double median_relative_error(const std::vector<SweepRow>& rows, int order) {
  std::vector<double> v;
  for (const SweepRow& r : rows) {
    if (r.order == order) v.push_back(r.relative_error);
  }
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << text;
  out.close();
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace eep
