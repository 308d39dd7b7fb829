#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "eep/commands.hpp"
#include "eep/config.hpp"
#include "json.hpp"

using namespace eep;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "eepx_cli_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch_dir() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

int run_eepx(const std::string& args, const std::string& stdout_name = "stdout.txt") {
  const fs::path out = scratch_dir() / stdout_name;
  const std::string cmd = std::string(EEPX_PATH) + " " + args + " > " + out.string() + " 2> " +
                          (scratch_dir() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char ch : s) n += ch == '\n';
  return n;
}

}  // namespace

TEST_CASE("config round trip") {
  const RunConfig d = parse_config("{}");
  CHECK(parse_config(dump_config(d)) == d);

  const RunConfig c = parse_config(R"({"model": "kou", "params": {"lambda": 0.2, "eta1": 4.0},
      "contract": {"strike": 42}, "order": 1, "steps": 30, "workers": 1,
      "oracle": {"mc_paths": 5000, "mc_seed": 9}})");
  CHECK(c.model == ModelKind::kou);
  CHECK(c.kou.lambda == 0.2);
  CHECK(c.kou.eta1 == 4.0);
  CHECK(c.contract.strike == 42.0);
  CHECK(c.contract.spot == 40.0);
  CHECK(c.steps == 30);
  CHECK(c.oracle.mc_seed == 9u);
  CHECK(parse_config(dump_config(c)) == c);
}

TEST_CASE("config defaults follow the model") {
  CHECK(parse_config(R"({"model": "gbm"})").steps == 100);
  CHECK(parse_config(R"({"model": "merton"})").steps == 50);
  const RunConfig nmr = parse_config(R"({"model": "nmr"})");
  CHECK(nmr.contract == PutContract{20.0, 0.0833, 20.0});
  CHECK(parse_config(R"({"model": "cev"})").contract == PutContract{100.0, 1.0, 40.0});
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"modle": "gbm"})"), doctest::Contains("modle: unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"params": {"r": "0.05"}})"), doctest::Contains("expected a number"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"params": {"r": 4.88}})"), doctest::Contains("r"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("{\n  \"model\": \"gbm\",\n  \"order\": }"), doctest::Contains("parse error"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": "heston"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"model": "merton", "order": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"steps": 1})"), ConfigError);
  CHECK_THROWS_AS(load_config((scratch_dir() / "missing.json").string()), ConfigError);
}

TEST_CASE("price report") {
  RunConfig c = parse_config(R"({"contract": {"strike": 40, "maturity": 0.5833, "spot": 40}})");
  const PriceReport r = run_price(c);
  CHECK(std::abs(r.price - 1.9906) <= 5e-4);
  const auto j = nlohmann::json::parse(render_price(r));
  CHECK(j["model"] == "gbm");
  CHECK(j["N"] == 100);
  CHECK(j["P"].get<double>() == r.price);
  CHECK(j["runtime_seconds"].is_null());
  CHECK(!j.contains("g"));

  RunConfig g = parse_config(R"({"steps": 50})");
  RunConfig m = parse_config(R"({"model": "merton", "params": {"lambda": 0}, "steps": 50})");
  const PriceReport rm = run_price(m);
  CHECK(std::abs(rm.price - run_price(g).price) <= 1e-5);
  const auto jm = nlohmann::json::parse(render_price(rm));
  CHECK(jm["g"].get<double>() == 0.0);
  CHECK(jm["fixed_point_iters"] == 1);
}

TEST_CASE("boundary csv") {
  const BoundaryGrid b = run_boundary(parse_config(R"({"contract": {"maturity": 0.5833}})"));
  const std::string csv = render_boundary_csv(b);
  CHECK(csv.rfind("step_index,time_years,boundary\n", 0) == 0);
  CHECK(count_lines(csv) == 102);
  CHECK(b.values.back() == 40.0);
  CHECK(b.values.front() < b.values.back());
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("density summary") {
  const DensityCheck d = run_density_check(parse_config("{}"));
  CHECK(d.normalization_error <= 1e-3);
  REQUIRE(d.sup_relative_error.has_value());
  CHECK(*d.sup_relative_error <= 1e-3);
  CHECK(count_lines(render_density_csv(d)) == static_cast<int>(d.rows.size()) + 1);
}

TEST_CASE("order sweep shape") {
  const RunConfig c = parse_config(R"({"steps": 40, "sweep": {"strikes": [35, 45]}})");
  const std::vector<SweepRow> rows = run_order_sweep(c);
  CHECK(rows.size() == 6u);
  CHECK(count_lines(render_sweep_csv(rows)) == 7);
  for (const SweepRow& r : rows) CHECK(r.relative_error == doctest::Approx(std::abs(r.price - r.benchmark) / r.benchmark));
  CHECK_THROWS_AS(run_order_sweep(parse_config(R"({"model": "cev"})")), ConfigError);
}

TEST_CASE("eepx exit codes") {
  CHECK(run_eepx("price --config " + write_file("bad.json", "{ \"model\": ").string()) == kExitConfig);
  CHECK(run_eepx("price --bogus-flag") == kExitConfig);
  CHECK(run_eepx("price --model sabr") == kExitConfig);
  CHECK(run_eepx("boundary --steps 10 --out /nonexistent-dir/b.csv") == kExitIo);
  const fs::path nmr = write_file("nmr40.json", R"({"model": "nmr", "contract": {"strike": 40, "spot": 40}, "steps": 10})");
  CHECK(run_eepx("price --config " + nmr.string()) == kExitSolver);
}

TEST_CASE("eepx outputs are deterministic") {
  const fs::path a = scratch_dir() / "b1.csv", b = scratch_dir() / "b2.csv";
  REQUIRE(run_eepx("boundary --steps 20 --out " + a.string()) == kExitOk);
  REQUIRE(run_eepx("boundary --steps 20 --workers 1 --out " + b.string()) == kExitOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(count_lines(slurp(a)) == 22);

  REQUIRE(run_eepx("price --steps 20 --no-timing --mc --seed 3", "p1.json") == kExitOk);
  REQUIRE(run_eepx("price --steps 20 --no-timing --mc --seed 3", "p2.json") == kExitOk);
  const std::string p1 = slurp(scratch_dir() / "p1.json");
  CHECK(p1 == slurp(scratch_dir() / "p2.json"));
  CHECK(nlohmann::json::parse(p1).contains("mc_european"));
}
