#include "eep/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace eep {

using json = nlohmann::ordered_json;

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    const std::string field = path_.empty() ? std::string(key) : path_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(field + ": expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(field + ": expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(field + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(field + ": expected a string");
    }
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field + ": " + e.what());
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }

  const json& child(const char* key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string field(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(field(it.key().c_str()) + ": unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

template <class F>
void validated(const std::string& field, F f) {
  try {
    f();
  } catch (const ParameterError& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

void read_params(const json& j, RunConfig& c) {
  Reader r(j, "params");
  switch (c.model) {
    case ModelKind::gbm:
      r.get("r", c.gbm.r);
      r.get("delta", c.gbm.delta);
      r.get("sigma", c.gbm.sigma);
      break;
    case ModelKind::cev:
      r.get("r", c.cev.r);
      r.get("delta", c.cev.delta);
      r.get("sigma", c.cev.sigma);
      r.get("alpha", c.cev.alpha);
      break;
    case ModelKind::nmr:
      r.get("a", c.nmr.a);
      r.get("b", c.nmr.b);
      r.get("c", c.nmr.c);
      r.get("v", c.nmr.v);
      r.get("sigma", c.nmr.sigma);
      r.get("gamma", c.nmr.gamma);
      r.get("r", c.nmr.r);
      r.get("delta", c.nmr.delta);
      break;
    case ModelKind::merton:
      r.get("r", c.merton.r);
      r.get("delta", c.merton.delta);
      r.get("sigma", c.merton.sigma);
      r.get("lambda", c.merton.lambda);
      r.get("mu_J", c.merton.mu_J);
      r.get("sigma_J", c.merton.sigma_J);
      break;
    case ModelKind::kou:
      r.get("r", c.kou.r);
      r.get("delta", c.kou.delta);
      r.get("sigma", c.kou.sigma);
      r.get("lambda", c.kou.lambda);
      r.get("p", c.kou.p);
      r.get("q", c.kou.q);
      r.get("eta1", c.kou.eta1);
      r.get("eta2", c.kou.eta2);
      break;
  }
  r.finish();
}

json write_params(const RunConfig& c) {
  switch (c.model) {
    case ModelKind::gbm:
      return {{"r", c.gbm.r}, {"delta", c.gbm.delta}, {"sigma", c.gbm.sigma}};
    case ModelKind::cev:
      return {{"r", c.cev.r}, {"delta", c.cev.delta}, {"sigma", c.cev.sigma}, {"alpha", c.cev.alpha}};
    case ModelKind::nmr:
      return {{"a", c.nmr.a},         {"b", c.nmr.b},         {"c", c.nmr.c},
              {"v", c.nmr.v},         {"sigma", c.nmr.sigma}, {"gamma", c.nmr.gamma},
              {"r", c.nmr.r},         {"delta", c.nmr.delta}};
    case ModelKind::merton:
      return {{"r", c.merton.r},         {"delta", c.merton.delta}, {"sigma", c.merton.sigma},
              {"lambda", c.merton.lambda}, {"mu_J", c.merton.mu_J}, {"sigma_J", c.merton.sigma_J}};
    case ModelKind::kou:
      return {{"r", c.kou.r},       {"delta", c.kou.delta}, {"sigma", c.kou.sigma},
              {"lambda", c.kou.lambda}, {"p", c.kou.p},     {"q", c.kou.q},
              {"eta1", c.kou.eta1}, {"eta2", c.kou.eta2}};
  }
  return {};
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::gbm: return "gbm";
    case ModelKind::cev: return "cev";
    case ModelKind::nmr: return "nmr";
    case ModelKind::merton: return "merton";
    case ModelKind::kou: return "kou";
  }
  return "gbm";
}

ModelKind parse_model_kind(const std::string& name) {
  for (ModelKind k : {ModelKind::gbm, ModelKind::cev, ModelKind::nmr, ModelKind::merton, ModelKind::kou}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("model: unknown model '" + name + "' (expected gbm, cev, nmr, merton or kou)");
}

bool is_jump_model(ModelKind kind) { return kind == ModelKind::merton || kind == ModelKind::kou; }

int default_steps(ModelKind kind) { return is_jump_model(kind) ? 50 : 100; }

PutContract default_contract(ModelKind kind) {
  switch (kind) {
    case ModelKind::cev:
      return {100.0, 1.0, 40.0};
    case ModelKind::nmr:
      return {20.0, 0.0833, 20.0};
    default:
      return {40.0, 0.5, 40.0};
  }
}

void RunConfig::validate() const {
  switch (model) {
    case ModelKind::gbm: validated("params", [&] { gbm.validate(); }); break;
    case ModelKind::cev: validated("params", [&] { cev.validate(); }); break;
    case ModelKind::nmr: validated("params", [&] { nmr.validate(); }); break;
    case ModelKind::merton: validated("params", [&] { merton.validate(); }); break;
    case ModelKind::kou: validated("params", [&] { kou.validate(); }); break;
  }
  validated("contract", [&] { contract.validate(); });
  validated("oracle", [&] { oracle.validate(); });
  if (is_jump_model(model)) {
    check(order >= 1 && order <= 2, "order: must be 1 or 2 for jump models");
  } else {
    check(order >= 1 && order <= 3, "order: must be 1, 2 or 3");
  }
  check(steps >= 2, "steps: must be at least 2");
  check(workers >= 0, "workers: must be nonnegative");
  check(density.delta_t > 0.0, "density.delta_t: must be positive");
  check(density.points >= 3, "density.points: must be at least 3");
  check(!sweep.strikes.empty(), "sweep.strikes: must not be empty");
  for (double k : sweep.strikes) check(k > 0.0, "sweep.strikes: strikes must be positive");
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  RunConfig c;
  Reader top(j, "");
  std::string model = "gbm";
  top.get("model", model);
  c.model = parse_model_kind(model);
  c.steps = default_steps(c.model);
  c.contract = default_contract(c.model);
  if (top.has("params")) read_params(top.child("params"), c);
  if (top.has("contract")) {
    Reader r(top.child("contract"), "contract");
    r.get("strike", c.contract.strike);
    r.get("maturity", c.contract.maturity);
    r.get("spot", c.contract.spot);
    r.finish();
  }
  top.get("order", c.order);
  top.get("steps", c.steps);
  top.get("workers", c.workers);
  if (top.has("oracle")) {
    Reader r(top.child("oracle"), "oracle");
    r.get("binomial_steps", c.oracle.binomial_steps);
    r.get("mc_paths", c.oracle.mc_paths);
    r.get("mc_seed", c.oracle.mc_seed);
    r.get("mc_time_steps", c.oracle.mc_time_steps);
    r.get("fd_space_steps", c.oracle.fd_space_steps);
    r.get("fd_time_steps", c.oracle.fd_time_steps);
    r.finish();
  }
  if (top.has("density")) {
    Reader r(top.child("density"), "density");
    r.get("delta_t", c.density.delta_t);
    r.get("points", c.density.points);
    r.finish();
  }
  if (top.has("sweep")) {
    Reader r(top.child("sweep"), "sweep");
    r.get("strikes", c.sweep.strikes);
    r.finish();
  }
  top.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
  json j;
  j["model"] = to_string(c.model);
  j["params"] = write_params(c);
  j["contract"] = {{"strike", c.contract.strike}, {"maturity", c.contract.maturity}, {"spot", c.contract.spot}};
  j["order"] = c.order;
  j["steps"] = c.steps;
  j["workers"] = c.workers;
  j["oracle"] = {{"binomial_steps", c.oracle.binomial_steps}, {"mc_paths", c.oracle.mc_paths},
                 {"mc_seed", c.oracle.mc_seed},               {"mc_time_steps", c.oracle.mc_time_steps},
                 {"fd_space_steps", c.oracle.fd_space_steps}, {"fd_time_steps", c.oracle.fd_time_steps}};
  j["density"] = {{"delta_t", c.density.delta_t}, {"points", c.density.points}};
  j["sweep"] = {{"strikes", c.sweep.strikes}};
  return j.dump(2) + "\n";
}

DiffusionSpec diffusion_spec(const RunConfig& c) {
  switch (c.model) {
    case ModelKind::gbm: return build_gbm(c.gbm);
    case ModelKind::cev: return build_cev(c.cev);
    case ModelKind::nmr: return build_nmr(c.nmr);
    default: throw ConfigError("model: " + to_string(c.model) + " is a jump model");
  }
}

JumpModel jump_model(const RunConfig& c) {
  switch (c.model) {
    case ModelKind::merton: return build_merton_model(c.merton);
    case ModelKind::kou: return build_kou_model(c.kou);
    default: throw ConfigError("model: " + to_string(c.model) + " is not a jump model");
  }
}

}  // namespace eep
