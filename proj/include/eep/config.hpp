#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eep/contract.hpp"
#include "eep/models.hpp"
#include "eep/oracles.hpp"

namespace eep {

enum class ModelKind { gbm, cev, nmr, merton, kou };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
bool is_jump_model(ModelKind kind);

struct DensityOptions {
  double delta_t = 0.0833;
  int points = 401;
  bool operator==(const DensityOptions&) const = default;
};

struct SweepOptions {
  std::vector<double> strikes{10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70};
  bool operator==(const SweepOptions&) const = default;
};

struct RunConfig {
  ModelKind model = ModelKind::gbm;
  GbmParams gbm;
  CevParams cev;
  NmrParams nmr;
  MertonParams merton;
  KouParams kou;
  PutContract contract;
  int order = 2;
  int steps = 100;
  int workers = 0;  // 0 keeps the OpenMP default
  OracleConfig oracle;
  DensityOptions density;
  SweepOptions sweep;

  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

// Default step count for a model family when the file leaves it out.
int default_steps(ModelKind kind);
// Contract of each model's reference example.
PutContract default_contract(ModelKind kind);

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& config);

DiffusionSpec diffusion_spec(const RunConfig& config);
JumpModel jump_model(const RunConfig& config);

}  // namespace eep
