#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynabc/bulk_surface_operator.hpp"
#include "dynabc/grid.hpp"
#include "dynabc/noise.hpp"
#include "dynabc/potential.hpp"

namespace dynabc {

/// Named initial profiles; the mode number applies to the sin profile.
struct InitialCondition {
  enum class Kind { Constant, SinMode, RandomUniform, Explicit };
  Kind kind = Kind::SinMode;
  double constant = 0;
  int mode = 1;
  std::optional<Field> explicit_field;

  static InitialCondition constant_profile(double c);
  static InitialCondition sin_mode(int mode = 1);
  static InitialCondition random_uniform();
  static InitialCondition from_field(Field f);

  State realize(const Grid& grid, std::uint64_t seed) const;
  State realize(const Grid& grid, std::uint64_t seed, std::uint32_t trajectory) const;
};

/// Everything one trajectory needs. The stepper treats the diffusion
/// operator and the regularized monotone part implicitly, the Lipschitz
/// perturbation and the noise explicitly at the left endpoint.
struct SolverConfig {
  Grid grid;
  double dt = 1e-3;
  double T = 0.25;
  double lambda = 0.1;  // Yosida parameter
  double eps = 0.1;     // surface diffusion coefficient
  double newton_tol = 1e-10;
  int newton_max = 50;
  int save_every = 1;
  GammaOperator gamma;
  NoiseModel noise;
  InitialCondition initial;
  std::string fingerprint;  // opaque configuration tag echoed into results

  void validate() const;  // throws on dt * C_P >= 1 and similar
};

struct StepStats {
  int newton_iters = 0;
  double final_residual = 0;
};

/// One implicit Euler-Maruyama step from state s at time t. Newton on the
/// mass-weighted residual; the Jacobian is symmetric positive definite
/// because the Yosida slope is nonnegative, and backtracking keeps the
/// residual strictly decreasing.
State step(const BulkSurfaceOperator& op, const SolverConfig& cfg, const State& s, double t,
           std::uint32_t trajectory, std::uint32_t step_index, std::uint64_t seed,
           StepStats* stats = nullptr);

/// Same step with the raw Wiener increment supplied by the caller (the
/// diffusion coefficient is still evaluated here, at the current state).
State step_with_increment(const BulkSurfaceOperator& op, const SolverConfig& cfg,
                          const State& s, const FieldPair& increment,
                          StepStats* stats = nullptr);

struct SeriesRow {
  std::uint64_t step = 0;
  double t = 0;
  double norm_h = 0;
  double grad_norm = 0;
  double surf_grad_norm = 0;
  double energy_gl = 0;
  int newton_iters = 0;
};

struct RunResult {
  std::vector<double> times;        // saved-state times (decimated)
  std::vector<State> states;        // decimated by save_every
  std::vector<Field> xi;            // bulk selection beta_lambda(x) at saved steps
  std::vector<BoundaryField> xi_gamma;
  std::vector<SeriesRow> series;    // one row per step, including step 0
  std::vector<double> duality_mass;     // per step: mass-weighted sum of j + j*
  std::vector<double> duality_pairing;  // per step: mass-weighted sum of xi * state
  std::vector<double> fenchel_residual; // per step: aggregated duality gap
  std::uint64_t seed = 0;
  std::string fingerprint;
  std::uint64_t increment_checksum = 0;  // over the raw Wiener increments
  int max_newton_iters = 0;
  std::uint64_t total_newton_iters = 0;
  bool valid = false;
  std::string error;
};

/// Runs one trajectory from t = 0 to T. The trajectory id selects the
/// noise substream, so Monte-Carlo batches share a run seed and differ
/// only in the id; results are bit-reproducible per (cfg, seed, id).
RunResult run_trajectory(const SolverConfig& cfg, std::uint64_t seed,
                         std::uint32_t trajectory = 0);

/// Ginzburg-Landau free energy with the Moreau-regularized convex part:
/// gradient terms plus j_lambda + G on each side.
double energy_gl(const SolverConfig& cfg, const State& s);

struct EnergyIdentityReport {
  std::vector<double> lambdas;
  std::vector<double> lhs;          // Monte-Carlo mean of the energy aggregate
  std::vector<double> rhs_base;     // 1 + ||X0||^2 + noise proxy
  std::vector<double> fitted_k;     // lhs / rhs_base per lambda
  double reference_k = 0;
  double max_relative_drift = 0;    // vs the reference lambda
  bool pass = false;
};

/// Monte-Carlo check that the discrete energy aggregate is bounded by
/// K (1 + ||X0||^2 + noise proxy) with K stable as lambda shrinks.
EnergyIdentityReport discrete_energy_identity_check(const SolverConfig& cfg,
                                                    const std::vector<double>& lambdas,
                                                    int samples, std::uint64_t seed,
                                                    double drift_tol = 0.25);

}  // namespace dynabc
