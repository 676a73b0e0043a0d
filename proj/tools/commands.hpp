#pragma once

#include <string>
#include <vector>

#include "circadia/params.hpp"
#include "circadia/potentials.hpp"
#include "json.hpp"

namespace circadia::cli {

enum ExitCode { kOk = 0, kUsage = 1, kRegime = 2, kNumerical = 3 };

struct CommonOptions {
  std::string circuit;
  std::string out = "out";
  int jobs = 1;
  int grid = 0;  // 0 selects the command default
  std::string basis;
  bool charge_half_factor = false;
  std::string kappa_ladder;
};

struct LoadedCircuit {
  ReducedCircuit rc;
  PotentialModel potential = PotentialModel::cosine();
  nlohmann::json description;
};

/// SI form (C_F, Cp_F, L_H, EJ_J | EJ_GHz, ng) or reduced form (kappa, xi,
/// lambdaJ, ng); optional "potential" object.
LoadedCircuit load_circuit(const std::string& path);

std::vector<double> parse_list(const std::string& text, const std::string& field);

int cmd_reduce(const CommonOptions& o);

struct BoOptions {
  std::string x_range = "-3,3,21";
  double y_half_width = 12.0;
};
int cmd_bo_sweep(const CommonOptions& o, const BoOptions& b);

int cmd_compare(const CommonOptions& o);

struct DynamicsOptions {
  double t_end = 0.0;  // 0 selects one slow period
  double dt = 0.02;
  double x0 = 1.0;
  double px0 = 0.0;
  std::string scheme = "yoshida6";
  double energy_tolerance = 1e-8;
  bool step_halving = false;
};
int cmd_dynamics(const CommonOptions& o, const DynamicsOptions& d);

struct FosterOptions {
  std::string samples;
  int resonances = 0;
  std::string l_zero = "auto";
  std::string model;
  std::string omega = "0.1,10,200";
};
int cmd_foster(const CommonOptions& o, const FosterOptions& f);

}  // namespace circadia::cli
