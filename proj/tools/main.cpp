// dynabc command-line laboratory: simulate trajectories of the coupled
// bulk-surface stochastic Allen-Cahn system and run its verification
// experiments. Exit codes: 0 success, 1 assertion failure, 2 usage or
// configuration error. Failures are also emitted as JSON on stderr.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "dynabc/config.hpp"
#include "dynabc/experiments.hpp"
#include "dynabc/operator_checks.hpp"
#include "dynabc/run_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int samples = 0;  // 0 = use the config value
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "configuration file (section.key = value)");
  cmd->add_option("--seed", opts.seed, "run seed");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--samples", opts.samples, "Monte-Carlo sample count override");
  cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
}

void emit_error_json(const std::string& kind, const json& detail) {
  json err;
  err["error"] = kind;
  err["detail"] = detail;
  std::cerr << err.dump() << std::endl;
}

int load_config(const CommonOpts& opts, dynabc::RunConfig& rc) {
  if (opts.config_path.empty()) {
    rc = dynabc::RunConfig{};  // defaults
    return kExitOk;
  }
  const auto outcome = dynabc::parse_config_file(opts.config_path);
  if (!outcome.config) {
    emit_error_json("config", outcome.errors);
    std::cerr << "configuration rejected:" << std::endl;
    for (const auto& e : outcome.errors) std::cerr << "  - " << e << std::endl;
    return kExitUsage;
  }
  rc = *outcome.config;
  return kExitOk;
}

void write_report(const CommonOpts& opts, const json& report) {
  if (!opts.out_dir.empty()) {
    fs::create_directories(opts.out_dir);
    std::ofstream f(fs::path(opts.out_dir) / "report.json");
    f << report.dump(2) << '\n';
  }
  if (!opts.quiet) std::cout << report.dump(2) << std::endl;
}

void write_table(const CommonOpts& opts, const std::string& name,
                 const dynabc::SweepReport& rep) {
  if (opts.out_dir.empty()) return;
  const fs::path dir = fs::path(opts.out_dir) / "tables";
  fs::create_directories(dir);
  std::ofstream f(dir / (name + ".csv"));
  // header: parameter plus the union of metric names
  std::vector<std::string> cols;
  for (const auto& e : rep.entries) {
    for (const auto& [k, v] : e.metrics) {
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    }
  }
  f << rep.parameter_name;
  for (const auto& c : cols) f << ',' << c;
  f << '\n';
  for (const auto& e : rep.entries) {
    f << dynabc::format_shortest(e.parameter);
    for (const auto& c : cols) {
      f << ',';
      if (auto it = e.metrics.find(c); it != e.metrics.end()) {
        f << dynabc::format_shortest(it->second);
      }
    }
    f << '\n';
  }
}

json sweep_to_json(const dynabc::SweepReport& rep) {
  json j;
  j["name"] = rep.name;
  j["parameter"] = rep.parameter_name;
  j["pass"] = rep.pass;
  j["runtime_seconds"] = rep.runtime_seconds;
  j["failures"] = rep.assertion_failures;
  json entries = json::array();
  for (const auto& e : rep.entries) {
    json je;
    je["parameter"] = e.parameter;
    for (const auto& [k, v] : e.metrics) je[k] = v;
    entries.push_back(je);
  }
  j["values"] = entries;
  return j;
}

void persist_sweep_runs(const CommonOpts& opts, const dynabc::RunConfig& rc,
                        const dynabc::SweepReport& rep) {
  if (opts.out_dir.empty()) return;
  for (std::size_t k = 0; k < rep.runs.size(); ++k) {
    const fs::path dir = fs::path(opts.out_dir) / "runs" /
                         (rep.parameter_name + "_" +
                          dynabc::format_shortest(rep.entries[k].parameter));
    dynabc::persist_run(dir, rc, opts.seed, rep.runs[k]);
  }
}

int run_simulate(const CommonOpts& opts) {
  dynabc::RunConfig rc;
  if (const int code = load_config(opts, rc); code != kExitOk) return code;
  const dynabc::SolverConfig cfg = dynabc::make_solver_config(rc);
  const dynabc::RunResult result = dynabc::run_trajectory(cfg, opts.seed);
  const fs::path dir = opts.out_dir.empty() ? fs::path("run") : fs::path(opts.out_dir);
  dynabc::persist_run(dir, rc, opts.seed, result);
  if (!result.valid) {
    emit_error_json("simulation", result.error);
    return kExitAssertion;
  }
  if (!opts.quiet) {
    std::cout << "wrote " << (dir / "series.csv").string() << " ("
              << result.series.size() - 1 << " steps, fingerprint " << rc.fingerprint() << ")"
              << std::endl;
  }
  return kExitOk;
}

int run_verify_operator(const CommonOpts& opts) {
  dynabc::RunConfig rc;
  if (const int code = load_config(opts, rc); code != kExitOk) return code;
  const dynabc::SolverConfig cfg = dynabc::make_solver_config(rc);
  const dynabc::BulkSurfaceOperator op(cfg.grid, cfg.eps);

  json checks = json::array();
  bool all_pass = true;
  auto push = [&](const dynabc::CheckResult& r) {
    json c;
    c["name"] = r.name;
    c["pass"] = r.pass;
    c["value"] = r.value;
    c["tolerance"] = r.tolerance;
    c["detail"] = r.detail;
    checks.push_back(c);
    all_pass = all_pass && r.pass;
  };

  for (double delta : {0.01, 0.1, 1.0}) {
    push(dynabc::verify_contraction(op, delta, 50, opts.seed));
  }
  push(dynabc::verify_max_principle(op, 0.1, 1.0, 2.0, 50, opts.seed));
  {
    // position stability is asserted where the kernel diagonal is flat
    const auto rep = dynabc::verify_smoothing(op, 4.0, 2);
    push(rep.overall);
    const auto profile = dynabc::verify_smoothing(op, 0.1, 2);
    json diag;
    diag["name"] = "smoothing_profile_delta_0.1";
    diag["ratios"] = profile.ratios;
    diag["spread"] = profile.spread;
    checks.push_back(diag);
  }
  {
    dynabc::FieldPair smooth = dynabc::FieldPair::zero(cfg.grid);
    for (int j = 0; j < cfg.grid.ny(); ++j) {
      for (int i = 0; i < cfg.grid.nx(); ++i) {
        smooth.bulk[cfg.grid.bulk_index(i, j)] =
            std::sin(2 * 3.14159265358979323846 * i / cfg.grid.nx());
      }
    }
    smooth.boundary = dynabc::trace(cfg.grid, smooth.bulk);
    // rate assertion inside the first-order window, decrease outside it
    const auto rep = dynabc::verify_delta_asymptotics(
        op, smooth, {0.0125, 0.00625, 0.003125, 0.0015625, 0.00078125, 0.000390625}, true);
    push(rep.overall);
    auto coarse = dynabc::verify_delta_asymptotics(
        op, smooth, {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125}, false);
    coarse.overall.name = "delta_asymptotics_monotone";
    push(coarse.overall);
  }
  push(dynabc::verify_jensen(op, 0.1, cfg.gamma.bulk, 20, opts.seed));

  json report;
  report["command"] = "verify-operator";
  report["fingerprint"] = rc.fingerprint();
  report["checks"] = checks;
  report["pass"] = all_pass;
  write_report(opts, report);
  if (!all_pass) {
    emit_error_json("verify-operator", checks);
    return kExitAssertion;
  }
  return kExitOk;
}

int run_verify_potentials(const CommonOpts& opts) {
  dynabc::RunConfig rc;
  if (const int code = load_config(opts, rc); code != kExitOk) return code;
  const dynabc::SolverConfig cfg = dynabc::make_solver_config(rc);

  json checks = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, double value, double tol,
                    const std::string& detail) {
    json c;
    c["name"] = name;
    c["pass"] = pass;
    c["value"] = value;
    c["tolerance"] = tol;
    c["detail"] = detail;
    checks.push_back(c);
    all_pass = all_pass && pass;
  };

  const dynabc::MonotoneGraph* graphs[] = {&cfg.gamma.bulk.beta, &cfg.gamma.boundary.beta};
  double worst_contraction = 0, worst_lipschitz = 0, worst_gap = 0, worst_sign = 0;
  for (const auto* gph : graphs) {
    for (int t = 0; t < 2500; ++t) {
      const double r = 20.0 * (dynabc::uniform_at({opts.seed, dynabc::kStreamVerify,
                                                   static_cast<std::uint32_t>(t), 1, 0}) -
                               0.5);
      const double r2 = 20.0 * (dynabc::uniform_at({opts.seed, dynabc::kStreamVerify,
                                                    static_cast<std::uint32_t>(t), 2, 0}) -
                                0.5);
      const double lam = std::pow(2.0, -1.0 - 9.0 * dynabc::uniform_at(
                                                        {opts.seed, dynabc::kStreamVerify,
                                                         static_cast<std::uint32_t>(t), 3, 0}));
      const double j1 = gph->resolvent(r, lam), j2 = gph->resolvent(r2, lam);
      worst_contraction = std::max(worst_contraction,
                                   std::abs(j1 - j2) - std::abs(r - r2));
      const double y1 = gph->yosida(r, lam), y2 = gph->yosida(r2, lam);
      worst_lipschitz = std::max(worst_lipschitz,
                                 std::abs(y1 - y2) - std::abs(r - r2) / lam);
      worst_sign = std::max(worst_sign, -(y1 * r));
      const dynabc::PotentialPair pp{*gph, dynabc::Perturbation::zero(), dynabc::Side::Bulk};
      worst_gap = std::max(worst_gap, pp.fenchel_gap(r, lam) / gph->growth_scale(r));
    }
  }
  record("resolvent_contraction", worst_contraction <= 1e-9, worst_contraction, 1e-9,
         "max |J(r)-J(r')| - |r-r'| over samples");
  record("yosida_lipschitz", worst_lipschitz <= 1e-9, worst_lipschitz, 1e-9,
         "max |Y(r)-Y(r')| - |r-r'|/lambda over samples");
  record("sign_property", worst_sign <= 0, worst_sign, 0, "min of beta_lambda(r) * r");
  record("fenchel_gap", worst_gap <= 1e-8, worst_gap, 1e-8,
         "max normalized duality gap over samples");

  const auto hyp = cfg.gamma.check_hypothesis();
  record("hypothesis", hyp.finite, hyp.fitted_constant, 0, hyp.detail);
  record("symmetry", std::isfinite(hyp.symmetry_ratio_bulk) &&
                         std::isfinite(hyp.symmetry_ratio_boundary),
         std::max(hyp.symmetry_ratio_bulk, hyp.symmetry_ratio_boundary), 0,
         "max j(r)/j(-r) over samples");

  json report;
  report["command"] = "verify-potentials";
  report["fingerprint"] = rc.fingerprint();
  report["checks"] = checks;
  report["pass"] = all_pass;
  write_report(opts, report);
  if (!all_pass) {
    emit_error_json("verify-potentials", checks);
    return kExitAssertion;
  }
  return kExitOk;
}

int run_sweep(const CommonOpts& opts, const std::string& which) {
  dynabc::RunConfig rc;
  if (const int code = load_config(opts, rc); code != kExitOk) return code;
  const dynabc::SolverConfig cfg = dynabc::make_solver_config(rc);

  dynabc::SweepReport rep;
  if (which == "lambda") {
    rep = dynabc::lambda_sweep(cfg, rc.sweep_lambdas, opts.seed);
  } else if (which == "eps") {
    rep = dynabc::eps_sweep(cfg, rc.sweep_epsilons, opts.seed);
  } else {
    const int samples = opts.samples > 0 ? opts.samples : rc.cd_samples;
    rep = dynabc::continuous_dependence(cfg, rc.cd_deltas0, samples, opts.seed);
  }

  json report = sweep_to_json(rep);
  report["fingerprint"] = rc.fingerprint();
  write_report(opts, report);
  write_table(opts, rep.name, rep);
  persist_sweep_runs(opts, rc, rep);
  if (!rep.pass) {
    emit_error_json(rep.name, rep.assertion_failures);
    return kExitAssertion;
  }
  return kExitOk;
}

int run_mc_energy(const CommonOpts& opts) {
  dynabc::RunConfig rc;
  if (const int code = load_config(opts, rc); code != kExitOk) return code;
  const dynabc::SolverConfig cfg = dynabc::make_solver_config(rc);
  const int samples = opts.samples > 0 ? opts.samples : rc.mc_samples;
  const auto est = dynabc::mc_expectation(cfg, samples, rc.mc_statistic, opts.seed);

  json report;
  report["command"] = "mc-energy";
  report["fingerprint"] = rc.fingerprint();
  report["statistic"] = est.statistic;
  report["samples"] = est.samples;
  report["mean"] = est.mean;
  report["standard_error"] = est.standard_error;
  report["values"] = est.values;
  write_report(opts, report);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale simulator for stochastic Allen-Cahn dynamics with "
               "dynamic boundary conditions"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  CommonOpts opts;
  auto* simulate = app.add_subcommand("simulate", "run one trajectory and persist it");
  auto* verify_op = app.add_subcommand("verify-operator",
                                       "resolvent contraction / maximum principle / smoothing checks");
  auto* verify_pot = app.add_subcommand("verify-potentials",
                                        "scalar monotone-calculus property checks");
  auto* sweep_lambda = app.add_subcommand("sweep-lambda", "Yosida-parameter convergence study");
  auto* sweep_eps = app.add_subcommand("sweep-eps", "vanishing surface-viscosity study");
  auto* cd = app.add_subcommand("continuous-dependence",
                                "Lipschitz continuity of the solution map");
  auto* mc = app.add_subcommand("mc-energy", "Monte-Carlo estimate of a trajectory functional");
  for (auto* cmd : {simulate, verify_op, verify_pot, sweep_lambda, sweep_eps, cd, mc}) {
    add_common(cmd, opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(opts);
    if (verify_op->parsed()) return run_verify_operator(opts);
    if (verify_pot->parsed()) return run_verify_potentials(opts);
    if (sweep_lambda->parsed()) return run_sweep(opts, "lambda");
    if (sweep_eps->parsed()) return run_sweep(opts, "eps");
    if (cd->parsed()) return run_sweep(opts, "cd");
    if (mc->parsed()) return run_mc_energy(opts);
  } catch (const std::invalid_argument& ex) {
    emit_error_json("config", ex.what());
    return kExitUsage;
  } catch (const std::exception& ex) {
    emit_error_json("runtime", ex.what());
    return kExitAssertion;
  }
  return kExitUsage;
}
