#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dynabc/solver.hpp"

namespace dynabc {

/// One row of a parameter sweep: the swept value plus named metrics.
struct SweepEntry {
  double parameter = 0;
  std::map<std::string, double> metrics;
};

struct SweepReport {
  std::string name;
  std::string parameter_name;
  std::vector<SweepEntry> entries;
  std::vector<std::string> assertion_failures;  // empty means pass
  bool pass = false;
  double runtime_seconds = 0;
  // persisted alongside the report so metrics can be recomputed offline
  std::vector<RunResult> runs;
};

/// Pathwise Yosida-parameter convergence: consecutive trajectory distances
/// d_j = ||X_{l_j} - X_{l_{j+1}}||_{L2(0,T;H)} with a frozen noise path.
/// Asserts d strictly decreasing and d_last < d_first / 4; when the bulk
/// graph is linear the distances must also scale linearly in lambda
/// (consecutive ratios within 10% of 1/2 under halving).
SweepReport lambda_sweep(const SolverConfig& base, const std::vector<double>& lambdas,
                         std::uint64_t seed);

/// Vanishing surface viscosity: runs the eps list down to 0 at fixed
/// lambda with a frozen noise path. Asserts (i) distance to the eps = 0
/// run decreasing, (ii) eps * ||y||^2_{H1} decreasing at least linearly
/// in eps, (iii) sqrt(eps) * ||grad_G y|| spread bounded, plus weak
/// convergence probes against fixed smooth test fields.
struct EpsSweepOptions {
  double distance_drop = 0.10;       // d(eps_min) < drop * d(eps_max)
  double linear_slack = 1.25;        // per-level slack on the linear decrease
  double sqrt_eps_spread_max = 3.0;  // max/min of sqrt(eps)||grad_G y||
};
SweepReport eps_sweep(const SolverConfig& base, const std::vector<double>& epsilons,
                      std::uint64_t seed, const EpsSweepOptions& opt = {});

/// Lipschitz continuity of the solution map: paired runs from perturbed
/// initial data under an identical noise path, M Monte-Carlo samples per
/// perturbation size. The ratio R must be uniform within a factor 2
/// across perturbation sizes.
SweepReport continuous_dependence(const SolverConfig& base, const std::vector<double>& deltas0,
                                  int samples, std::uint64_t seed);

struct McEstimate {
  std::string statistic;
  int samples = 0;
  double mean = 0;
  double standard_error = 0;
  std::vector<double> values;  // per-trajectory, in trajectory-id order
};

/// Monte-Carlo mean and standard error of a named trajectory functional:
/// "supnorm2", "dirichlet", "duality", or "one".
McEstimate mc_expectation(const SolverConfig& cfg, int samples, const std::string& statistic,
                          std::uint64_t seed);

// L2(0,T;H) distance between two trajectories recorded on the same grid
// and step sequence (right-endpoint rule)
double trajectory_distance(const Grid& grid, const RunResult& a, const RunResult& b, double dt);

}  // namespace dynabc
