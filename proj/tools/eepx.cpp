// eepx: American put pricing by the early-exercise-premium recursion.

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "eep/commands.hpp"
#include "eep/config.hpp"

namespace {

struct Flags {
  std::string config;
  std::string model;
  std::optional<int> order;
  std::optional<int> steps;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_timing = false;
  bool mc = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--model", f.model, "gbm, cev, nmr, merton or kou");
  cmd->add_option("--order", f.order, "Hermite expansion order m");
  cmd->add_option("--steps", f.steps, "time steps N");
  cmd->add_option("--workers", f.workers, "OpenMP worker count (0 = runtime default)");
  cmd->add_option("--seed", f.seed, "Monte Carlo seed");
  cmd->add_option("--out", f.out, "output path (default stdout)");
}

eep::RunConfig resolve(const Flags& f) {
  eep::RunConfig cfg = f.config.empty() ? eep::parse_config("{}") : eep::load_config(f.config);
  if (!f.model.empty()) {
    const eep::ModelKind kind = eep::parse_model_kind(f.model);
    if (kind != cfg.model && cfg.steps == eep::default_steps(cfg.model)) {
      cfg.steps = eep::default_steps(kind);
    }
    if (kind != cfg.model && cfg.contract == eep::default_contract(cfg.model)) {
      cfg.contract = eep::default_contract(kind);
    }
    cfg.model = kind;
  }
  if (f.order) cfg.order = *f.order;
  if (f.steps) cfg.steps = *f.steps;
  if (f.workers) cfg.workers = *f.workers;
  if (f.seed) cfg.oracle.mc_seed = *f.seed;
  cfg.validate();
  eep::apply_workers(cfg.workers);
  return cfg;
}

int run(const std::string& name, const Flags& f) {
  const eep::RunConfig cfg = resolve(f);
  if (name == "price") {
    const auto t0 = std::chrono::steady_clock::now();
    eep::PriceReport rep = eep::run_price(cfg, f.mc);
    if (!f.no_timing) {
      rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    eep::write_output(f.out, eep::render_price(rep));
    return eep::kExitOk;
  }
  if (name == "boundary") {
    eep::write_output(f.out, eep::render_boundary_csv(eep::run_boundary(cfg)));
    return eep::kExitOk;
  }
  if (name == "table1") {
    const int order = f.order ? *f.order : 2;
    const int steps = f.steps ? *f.steps : 100;
    const eep::Table1Result res = eep::run_table1(order, steps, cfg.oracle, cfg.workers);
    eep::write_output(f.out, eep::render_table1_csv(res));
    for (const eep::BenchRow& r : res.rows) {
      if (r.failed) std::cerr << "row K=" << r.K << " sigma=" << r.sigma << " T=" << r.T << " failed: " << r.error << "\n";
    }
    return res.failures ? eep::kExitRowFailure : eep::kExitOk;
  }
  if (name == "density-check") {
    const eep::DensityCheck d = eep::run_density_check(cfg);
    eep::write_output(f.out, eep::render_density_csv(d));
    (f.out.empty() || f.out == "-" ? std::cerr : std::cout) << eep::render_density_summary(d);
    return eep::kExitOk;
  }
  if (name == "order-sweep") {
    eep::write_output(f.out, eep::render_sweep_csv(eep::run_order_sweep(cfg)));
    return eep::kExitOk;
  }
  return eep::kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"American put pricing with Hermite transition density expansions"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* price = app.add_subcommand("price", "price one contract and print a JSON report");
  add_common(price, flags);
  price->add_flag("--no-timing", flags.no_timing, "report runtime_seconds as null");
  price->add_flag("--mc", flags.mc, "add a Monte Carlo European cross-check");
  add_common(app.add_subcommand("boundary", "exercise boundary as CSV"), flags);
  add_common(app.add_subcommand("table1", "27-row GBM benchmark table with RMSE"), flags);
  add_common(app.add_subcommand("density-check", "transition density dump and summary"), flags);
  add_common(app.add_subcommand("order-sweep", "orders 1..3 over a strike sweep"), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return eep::kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return run(name, flags);
  } catch (const eep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return eep::kExitConfig;
  } catch (const eep::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return eep::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return eep::kExitSolver;
  }
}
