#include "dynabc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dynabc {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

// shortest round-trip decimal form
std::string format_value(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_value(int v) { return std::to_string(v); }

std::string format_value(bool v) { return v ? "true" : "false"; }

std::string format_list(const std::vector<double>& vs) {
  std::string out;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    if (k) out += ",";
    out += format_value(vs[k]);
  }
  return out;
}

struct Parser {
  std::vector<std::string> errors;

  void fail(int line, const std::string& msg) {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << msg;
    errors.push_back(os.str());
  }

  bool to_double(const std::string& v, double& out) {
    try {
      std::size_t pos = 0;
      out = std::stod(v, &pos);
      return pos == v.size();
    } catch (...) {
      return false;
    }
  }

  bool to_int(const std::string& v, int& out) {
    try {
      std::size_t pos = 0;
      out = std::stoi(v, &pos);
      return pos == v.size();
    } catch (...) {
      return false;
    }
  }

  bool to_bool(const std::string& v, bool& out) {
    if (v == "true" || v == "1") { out = true; return true; }
    if (v == "false" || v == "0") { out = false; return true; }
    return false;
  }

  bool to_list(const std::string& v, std::vector<double>& out) {
    out.clear();
    for (const auto& piece : split(v, ',')) {
      double d;
      if (!to_double(trim(piece), d)) return false;
      out.push_back(d);
    }
    return !out.empty();
  }
};

}  // namespace

MonotoneGraph parse_graph_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  const std::string kind = trim(parts[0]);
  if (kind == "zero") return MonotoneGraph::zero();
  if (kind == "sinh") return MonotoneGraph::hyperbolic_sine();
  if (kind == "linear") {
    if (parts.size() != 2) throw std::invalid_argument("linear graph needs one parameter");
    return MonotoneGraph::linear(std::stod(parts[1]));
  }
  if (kind == "power") {
    if (parts.size() != 2) throw std::invalid_argument("power graph needs one parameter");
    return MonotoneGraph::power(std::stod(parts[1]));
  }
  if (kind == "pl") {
    // pl:<slope_left>:<r,v>;<r,v>;...:<slope_right>
    if (parts.size() != 4) {
      throw std::invalid_argument("pl graph spec is pl:<slope_left>:<r,v;...>:<slope_right>");
    }
    std::vector<std::array<double, 2>> verts;
    for (const auto& pt : split(parts[2], ';')) {
      const auto rv = split(pt, ',');
      if (rv.size() != 2) throw std::invalid_argument("pl vertex must be r,v");
      verts.push_back({std::stod(rv[0]), std::stod(rv[1])});
    }
    return MonotoneGraph::piecewise_linear(std::move(verts), std::stod(parts[1]),
                                           std::stod(parts[3]));
  }
  if (kind == "indicator" || kind == "subdifferential-indicator") {
    throw std::invalid_argument(
        "indicator subdifferentials have a bounded domain and are not admissible; "
        "use a piecewise-linear approximation defined on all of R");
  }
  throw std::invalid_argument("unknown graph kind '" + kind + "'");
}

Perturbation parse_perturbation_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  const std::string kind = trim(parts[0]);
  if (kind == "zero") return Perturbation::zero();
  if (kind == "affine") {
    if (parts.size() != 2) throw std::invalid_argument("affine perturbation needs a,b");
    const auto ab = split(parts[1], ',');
    if (ab.size() != 2) throw std::invalid_argument("affine perturbation needs a,b");
    return Perturbation::affine(std::stod(ab[0]), std::stod(ab[1]));
  }
  if (kind == "pl") {
    if (parts.size() < 2) throw std::invalid_argument("pl perturbation needs points");
    std::vector<std::array<double, 2>> pts;
    for (std::size_t k = 1; k < parts.size(); ++k) {
      const auto rv = split(parts[k], ',');
      if (rv.size() != 2) throw std::invalid_argument("pl point must be r,v");
      pts.push_back({std::stod(rv[0]), std::stod(rv[1])});
    }
    return Perturbation::piecewise_linear(std::move(pts));
  }
  throw std::invalid_argument("unknown perturbation kind '" + kind + "'");
}

InitialCondition parse_initial_spec(const std::string& spec) {
  const auto parts = split(spec, ':');
  const std::string kind = trim(parts[0]);
  if (kind == "constant") {
    if (parts.size() != 2) throw std::invalid_argument("constant profile needs a value");
    return InitialCondition::constant_profile(std::stod(parts[1]));
  }
  if (kind == "sin-mode" || kind == "sin") {
    int mode = 1;
    if (parts.size() == 2) mode = std::stoi(parts[1]);
    return InitialCondition::sin_mode(mode);
  }
  if (kind == "random-uniform") return InitialCondition::random_uniform();
  throw std::invalid_argument("unknown initial profile '" + spec + "'");
}

namespace {

ParseOutcome finish(Parser& p, RunConfig rc) {
  // semantic validation, exhaustive
  if (rc.grid_mode != "strip" && rc.grid_mode != "interval") {
    p.fail(0, "grid.mode must be strip or interval");
  }
  if (rc.grid_mode == "strip" && rc.nx < 4) p.fail(0, "grid.nx must be >= 4 in strip mode");
  if (rc.ny < 3) p.fail(0, "grid.ny must be >= 3");
  if (!(rc.Lx > 0)) p.fail(0, "grid.Lx must be positive");
  if (!(rc.Ly > 0)) p.fail(0, "grid.Ly must be positive");
  if (rc.grid_mode == "interval" && rc.eps > 0) {
    p.fail(0, "solver.eps > 0 is incompatible with grid.mode = interval "
              "(the boundary of an interval carries no surface diffusion)");
  }
  if (!(rc.noise_decay > 0.5)) p.fail(0, "noise.decay must exceed 1/2");
  if (rc.noise_modes < 0) p.fail(0, "noise.modes must be >= 0");
  if (!(rc.noise_sigma0 >= 0)) p.fail(0, "noise.sigma0 must be >= 0");
  if (rc.noise_kind != "additive" && rc.noise_kind != "linear-multiplicative" &&
      rc.noise_kind != "bounded-multiplicative") {
    p.fail(0, "noise.kind must be additive, linear-multiplicative or bounded-multiplicative");
  }
  if (rc.noise_mollify_m < 0) p.fail(0, "noise.mollify_m must be >= 0");
  if (rc.noise_mollify_m > 0 && !(rc.noise_mollify_delta > 0)) {
    p.fail(0, "noise.mollify_delta must be positive when noise.mollify_m > 0");
  }
  if (!(rc.dt > 0)) p.fail(0, "solver.dt must be positive");
  if (!(rc.T >= 0)) p.fail(0, "solver.T must be >= 0");
  if (!(rc.lambda > 0)) p.fail(0, "solver.lambda must be positive");
  if (!(rc.eps >= 0)) p.fail(0, "solver.eps must be >= 0");
  if (rc.save_every < 1) p.fail(0, "solver.save_every must be >= 1");
  if (rc.newton_max < 1) p.fail(0, "solver.newton_max must be >= 1");
  if (rc.cd_samples < 2) p.fail(0, "cd.samples must be >= 2");
  if (rc.mc_samples < 2) p.fail(0, "mc.samples must be >= 2");

  double cpi = 0;
  try {
    cpi = std::max(parse_perturbation_spec(rc.pi).lipschitz(),
                   parse_perturbation_spec(rc.pi_gamma).lipschitz());
  } catch (const std::exception& ex) {
    p.fail(0, std::string("potentials: ") + ex.what());
  }
  if (rc.dt * cpi >= 1) {
    std::ostringstream os;
    os << "solver.dt * C_P = " << rc.dt * cpi << " must stay below 1 "
       << "(explicit perturbation stability guard)";
    p.fail(0, os.str());
  }
  try {
    parse_graph_spec(rc.beta);
  } catch (const std::exception& ex) {
    p.fail(0, std::string("potentials.beta: ") + ex.what());
  }
  try {
    parse_graph_spec(rc.beta_gamma);
  } catch (const std::exception& ex) {
    p.fail(0, std::string("potentials.beta_gamma: ") + ex.what());
  }
  try {
    parse_initial_spec(rc.initial);
  } catch (const std::exception& ex) {
    p.fail(0, std::string("solver.initial: ") + ex.what());
  }
  if (rc.hypothesis != "H1" && rc.hypothesis != "H2" && rc.hypothesis != "H3") {
    p.fail(0, "potentials.hypothesis must be H1, H2 or H3");
  }

  ParseOutcome out;
  out.errors = p.errors;
  if (out.errors.empty()) out.config = std::move(rc);
  return out;
}

}  // namespace

ParseOutcome parse_config_text(const std::string& text) {
  Parser p;
  RunConfig rc;

  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      p.fail(lineno, "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) {
      p.fail(lineno, "expected key = value");
      continue;
    }

    auto num = [&](double& slot) {
      if (!p.to_double(val, slot)) p.fail(lineno, key + ": not a number: '" + val + "'");
    };
    auto integer = [&](int& slot) {
      if (!p.to_int(val, slot)) p.fail(lineno, key + ": not an integer: '" + val + "'");
    };
    auto flag = [&](bool& slot) {
      if (!p.to_bool(val, slot)) p.fail(lineno, key + ": not a boolean: '" + val + "'");
    };
    auto list = [&](std::vector<double>& slot) {
      if (!p.to_list(val, slot)) p.fail(lineno, key + ": not a comma list of numbers");
    };

    if (key == "grid.mode") rc.grid_mode = val;
    else if (key == "grid.nx") integer(rc.nx);
    else if (key == "grid.ny") integer(rc.ny);
    else if (key == "grid.Lx") num(rc.Lx);
    else if (key == "grid.Ly") num(rc.Ly);
    else if (key == "potentials.beta") rc.beta = val;
    else if (key == "potentials.pi") rc.pi = val;
    else if (key == "potentials.beta_gamma") rc.beta_gamma = val;
    else if (key == "potentials.pi_gamma") rc.pi_gamma = val;
    else if (key == "potentials.hypothesis") rc.hypothesis = val;
    else if (key == "noise.modes") integer(rc.noise_modes);
    else if (key == "noise.decay") num(rc.noise_decay);
    else if (key == "noise.kind") rc.noise_kind = val;
    else if (key == "noise.sigma0") num(rc.noise_sigma0);
    else if (key == "noise.mollify_delta") num(rc.noise_mollify_delta);
    else if (key == "noise.mollify_m") integer(rc.noise_mollify_m);
    else if (key == "solver.dt") num(rc.dt);
    else if (key == "solver.T") num(rc.T);
    else if (key == "solver.lambda") num(rc.lambda);
    else if (key == "solver.eps") num(rc.eps);
    else if (key == "solver.newton_tol") num(rc.newton_tol);
    else if (key == "solver.newton_max") integer(rc.newton_max);
    else if (key == "solver.save_every") integer(rc.save_every);
    else if (key == "solver.save_states") flag(rc.save_states);
    else if (key == "solver.initial") rc.initial = val;
    else if (key == "sweep.lambdas") list(rc.sweep_lambdas);
    else if (key == "sweep.epsilons") list(rc.sweep_epsilons);
    else if (key == "cd.deltas0") list(rc.cd_deltas0);
    else if (key == "cd.samples") integer(rc.cd_samples);
    else if (key == "mc.samples") integer(rc.mc_samples);
    else if (key == "mc.statistic") rc.mc_statistic = val;
    else p.fail(lineno, "unknown key '" + key + "'");
  }

  return finish(p, std::move(rc));
}

ParseOutcome parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    ParseOutcome out;
    out.errors.push_back("cannot open config file: " + path);
    return out;
  }
  std::ostringstream os;
  os << f.rdbuf();
  return parse_config_text(os.str());
}

std::map<std::string, std::string> RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["grid.mode"] = grid_mode;
  kv["grid.nx"] = format_value(nx);
  kv["grid.ny"] = format_value(ny);
  kv["grid.Lx"] = format_value(Lx);
  kv["grid.Ly"] = format_value(Ly);
  kv["potentials.beta"] = beta;
  kv["potentials.pi"] = pi;
  kv["potentials.beta_gamma"] = beta_gamma;
  kv["potentials.pi_gamma"] = pi_gamma;
  kv["potentials.hypothesis"] = hypothesis;
  kv["noise.modes"] = format_value(noise_modes);
  kv["noise.decay"] = format_value(noise_decay);
  kv["noise.kind"] = noise_kind;
  kv["noise.sigma0"] = format_value(noise_sigma0);
  kv["noise.mollify_delta"] = format_value(noise_mollify_delta);
  kv["noise.mollify_m"] = format_value(noise_mollify_m);
  kv["solver.dt"] = format_value(dt);
  kv["solver.T"] = format_value(T);
  kv["solver.lambda"] = format_value(lambda);
  kv["solver.eps"] = format_value(eps);
  kv["solver.newton_tol"] = format_value(newton_tol);
  kv["solver.newton_max"] = format_value(newton_max);
  kv["solver.save_every"] = format_value(save_every);
  kv["solver.save_states"] = format_value(save_states);
  kv["solver.initial"] = initial;
  kv["sweep.lambdas"] = format_list(sweep_lambdas);
  kv["sweep.epsilons"] = format_list(sweep_epsilons);
  kv["cd.deltas0"] = format_list(cd_deltas0);
  kv["cd.samples"] = format_value(cd_samples);
  kv["mc.samples"] = format_value(mc_samples);
  kv["mc.statistic"] = mc_statistic;
  return kv;
}

std::string RunConfig::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0x1f;
    h *= 1099511628211ull;
  };
  for (const auto& [k, v] : canonical()) {
    feed(k);
    feed(v);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string RunConfig::canonical_text() const {
  std::string out;
  for (const auto& [k, v] : canonical()) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

SolverConfig make_solver_config(const RunConfig& rc) {
  Grid grid = rc.grid_mode == "strip" ? Grid::strip(rc.nx, rc.ny, rc.Lx, rc.Ly)
                                      : Grid::interval(rc.ny, rc.Ly);

  GammaOperator gamma;
  gamma.bulk = PotentialPair{parse_graph_spec(rc.beta), parse_perturbation_spec(rc.pi),
                             Side::Bulk};
  gamma.boundary = PotentialPair{parse_graph_spec(rc.beta_gamma),
                                 parse_perturbation_spec(rc.pi_gamma), Side::Boundary};
  gamma.hypothesis = rc.hypothesis == "H1"   ? GrowthHypothesis::H1
                     : rc.hypothesis == "H2" ? GrowthHypothesis::H2
                                             : GrowthHypothesis::H3;

  DiffusionKind kind = DiffusionKind::Additive;
  if (rc.noise_kind == "linear-multiplicative") kind = DiffusionKind::LinearMultiplicative;
  if (rc.noise_kind == "bounded-multiplicative") kind = DiffusionKind::BoundedMultiplicative;
  NoiseModel noise(grid, rc.noise_modes, rc.noise_modes, rc.noise_decay, kind, rc.noise_sigma0);
  noise.mollify_m = rc.noise_mollify_m;
  noise.mollify_delta = rc.noise_mollify_delta;

  SolverConfig cfg{std::move(grid),
                   rc.dt,
                   rc.T,
                   rc.lambda,
                   rc.eps,
                   rc.newton_tol,
                   rc.newton_max,
                   rc.save_every,
                   std::move(gamma),
                   std::move(noise),
                   parse_initial_spec(rc.initial),
                   rc.fingerprint()};
  return cfg;
}

}  // namespace dynabc
