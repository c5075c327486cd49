#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynabc/solver.hpp"

namespace dynabc {

/// Validated run configuration. Keys come from a flat dotted-key text
/// file (`section.key = value`); unknown keys are rejected and semantic
/// violations are collected exhaustively rather than fail-fast.
struct RunConfig {
  // grid
  std::string grid_mode = "strip";  // strip | interval
  int nx = 32;
  int ny = 17;
  double Lx = 1.0;
  double Ly = 1.0;

  // potentials (textual specs, e.g. "power:3", "affine:-1,0")
  std::string beta = "power:3";
  std::string pi = "affine:-1,0";
  std::string beta_gamma = "power:3";
  std::string pi_gamma = "affine:-1,0";
  std::string hypothesis = "H1";

  // noise
  int noise_modes = 16;
  double noise_decay = 1.0;
  std::string noise_kind = "additive";
  double noise_sigma0 = 0.1;
  double noise_mollify_delta = 0.0;
  int noise_mollify_m = 0;

  // solver
  double dt = 1e-3;
  double T = 0.25;
  double lambda = 0.1;
  double eps = 0.1;
  double newton_tol = 1e-10;
  int newton_max = 50;
  int save_every = 1;
  bool save_states = false;
  std::string initial = "sin-mode";

  // experiment blocks
  std::vector<double> sweep_lambdas = {0.2, 0.1, 0.05, 0.025, 0.0125};
  std::vector<double> sweep_epsilons = {0.1, 0.05, 0.02, 0.008, 0};
  std::vector<double> cd_deltas0 = {1e-3, 1e-2, 1e-1};
  int cd_samples = 10;
  int mc_samples = 20;
  std::string mc_statistic = "supnorm2";

  // canonical sorted key=value map with defaults applied
  std::map<std::string, std::string> canonical() const;
  // stable hash of the canonical form
  std::string fingerprint() const;
  // canonical text round-trips through parse_config_text
  std::string canonical_text() const;
};

struct ParseOutcome {
  std::optional<RunConfig> config;  // set only when errors is empty
  std::vector<std::string> errors;
};

ParseOutcome parse_config_file(const std::string& path);
ParseOutcome parse_config_text(const std::string& text);

// graph/perturbation/profile spec parsers (shared with tests)
MonotoneGraph parse_graph_spec(const std::string& spec);
Perturbation parse_perturbation_spec(const std::string& spec);
InitialCondition parse_initial_spec(const std::string& spec);

/// Builds the solver-level configuration (grid, potentials, noise) from a
/// validated RunConfig. Throws only on internal inconsistencies; semantic
/// validation belongs to parsing.
SolverConfig make_solver_config(const RunConfig& rc);

}  // namespace dynabc
