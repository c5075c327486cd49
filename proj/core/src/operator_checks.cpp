#include "dynabc/operator_checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynabc/rng.hpp"

namespace dynabc {

Field random_field(const Grid& grid, std::uint64_t seed, std::uint32_t index) {
  Field f(grid.num_nodes());
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = normal_at({seed, kStreamVerify, index, static_cast<std::uint32_t>(k), 0});
  }
  return f;
}

FieldPair random_pair(const Grid& grid, std::uint64_t seed, std::uint32_t index) {
  FieldPair p;
  p.bulk = random_field(grid, seed, index);
  p.boundary.resize(grid.num_boundary());
  for (std::size_t b = 0; b < p.boundary.size(); ++b) {
    p.boundary[b] = normal_at({seed, kStreamVerify, index,
                               kBoundarySlotBit | static_cast<std::uint32_t>(b), 1});
  }
  return p;
}

CheckResult verify_contraction(const BulkSurfaceOperator& op, double delta, int trials,
                               std::uint64_t seed) {
  CheckResult res;
  res.name = "contraction";
  res.tolerance = 1.0 + 1e-10;
  double worst_h = 1.0, worst_l1 = 1.0;
  int worst_trial = -1;
  const Grid& g = op.grid();
  for (int t = 0; t < trials; ++t) {
    const FieldPair rhs = random_pair(g, seed, static_cast<std::uint32_t>(t));
    const double in_h = norm_h(g, rhs);
    const double in_l1 = norm_l1(g, rhs);
    const State out = op.resolvent(rhs, delta);
    const FieldPair outp = FieldPair::from_state(out);
    const double ratio_h = in_h > 0 ? norm_h(g, outp) / in_h : 1.0;
    const double ratio_l1 = in_l1 > 0 ? norm_l1(g, outp) / in_l1 : 1.0;
    if (ratio_h > worst_h) { worst_h = ratio_h; worst_trial = t; }
    if (ratio_l1 > worst_l1) { worst_l1 = ratio_l1; worst_trial = t; }
  }
  res.value = std::max(worst_h, worst_l1);
  res.pass = res.value <= res.tolerance;
  std::ostringstream os;
  os << "max H ratio " << worst_h << ", max L1 ratio " << worst_l1;
  if (!res.pass) os << ", violated at trial " << worst_trial << " (seed " << seed << ")";
  res.detail = os.str();
  return res;
}

CheckResult verify_max_principle(const BulkSurfaceOperator& op, double delta, double c1,
                                 double c2, int trials, std::uint64_t seed) {
  CheckResult res;
  res.name = "max_principle";
  res.tolerance = 1e-10;
  const Grid& g = op.grid();
  const double c = std::max(c1, c2);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t worst_node = 0;
  for (int t = 0; t < trials; ++t) {
    FieldPair rhs = random_pair(g, seed, static_cast<std::uint32_t>(t));
    // push data below the prescribed ceilings, keeping it otherwise rough
    for (double& v : rhs.bulk) v = c1 - std::abs(v);
    for (double& v : rhs.boundary) v = c2 - std::abs(v);
    const State out = op.resolvent(rhs, delta);
    for (std::size_t k = 0; k < out.x().size(); ++k) {
      const double excess = out.x()[k] - c;
      if (excess > worst) { worst = excess; worst_node = k; }
    }
  }
  res.value = worst;
  res.pass = worst <= res.tolerance;
  std::ostringstream os;
  os << "max excess over bound " << c << " is " << worst;
  if (!res.pass) os << " at node " << worst_node;
  res.detail = os.str();
  return res;
}

SmoothingReport verify_smoothing(const BulkSurfaceOperator& op, double delta, int m,
                                 double spread_tol) {
  SmoothingReport rep;
  const Grid& g = op.grid();
  // spike placements: walk a wall-normal line of nodes at i = 0, plus one
  // off-axis interior node; translation invariance covers the rest of x
  std::vector<std::size_t> nodes;
  for (int j = 0; j < g.ny(); ++j) nodes.push_back(g.bulk_index(0, j));
  if (g.mode() == GridMode::Strip) nodes.push_back(g.bulk_index(g.nx() / 3, g.ny() / 2));

  rep.ratios.reserve(nodes.size());
  for (std::size_t node : nodes) {
    FieldPair spike = FieldPair::zero(g);
    double mass = g.mass_bulk()[node];
    const std::ptrdiff_t b = g.boundary_of(node);
    if (b >= 0) mass += g.mass_boundary()[static_cast<std::size_t>(b)];
    spike.bulk[node] = 1.0 / mass;
    if (b >= 0) spike.boundary[static_cast<std::size_t>(b)] = 1.0 / mass;
    // unit L1 mass by construction
    double out_sup;
    if (m == 0) {
      out_sup = sup_norm(spike);
    } else {
      const State out = op.resolvent(spike, delta, m);
      out_sup = sup_norm(FieldPair::from_state(out));
    }
    rep.ratios.push_back(out_sup);
  }
  rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.min_ratio = *std::min_element(rep.ratios.begin(), rep.ratios.end());
  rep.spread = rep.min_ratio > 0 ? rep.max_ratio / rep.min_ratio - 1.0 : 0.0;

  rep.overall.name = "smoothing";
  rep.overall.tolerance = spread_tol;
  rep.overall.value = rep.spread;
  rep.overall.pass = std::isfinite(rep.max_ratio) && (m == 0 || rep.spread <= spread_tol);
  std::ostringstream os;
  os << "L1->Linf ratio in [" << rep.min_ratio << ", " << rep.max_ratio << "], spread "
     << rep.spread;
  rep.overall.detail = os.str();
  return rep;
}

AsymptoticsReport verify_delta_asymptotics(const BulkSurfaceOperator& op, const FieldPair& rhs,
                                           const std::vector<double>& deltas, bool expect_rate) {
  AsymptoticsReport rep;
  rep.deltas = deltas;
  const Grid& g = op.grid();
  for (std::size_t k = 0; k + 1 < deltas.size(); ++k) {
    if (!(deltas[k] > deltas[k + 1]) || !(deltas[k + 1] > 0)) {
      throw std::invalid_argument("verify_delta_asymptotics: deltas must be strictly decreasing and positive");
    }
  }
  for (double d : deltas) {
    const State out = op.resolvent(rhs, d);
    FieldPair diff = FieldPair::from_state(out);
    for (std::size_t k = 0; k < diff.bulk.size(); ++k) diff.bulk[k] -= rhs.bulk[k];
    for (std::size_t b = 0; b < diff.boundary.size(); ++b) diff.boundary[b] -= rhs.boundary[b];
    rep.errors.push_back(norm_h(g, diff));
  }
  // data in the kernel of the operator reproduces itself for every delta
  const double floor = 1e-13 * (1.0 + norm_h(g, rhs));
  bool all_zero = true;
  for (double e : rep.errors) all_zero = all_zero && e <= floor;

  rep.monotone = true;
  for (std::size_t k = 0; k + 1 < rep.errors.size(); ++k) {
    rep.ratios.push_back(rep.errors[k] > 0 ? rep.errors[k + 1] / rep.errors[k] : 0.0);
    if (!all_zero && !(rep.errors[k + 1] < rep.errors[k])) rep.monotone = false;
  }
  rep.first_order = true;
  for (double r : rep.ratios) {
    if (!all_zero && (r < 0.4 || r > 0.6)) rep.first_order = false;
  }
  rep.overall.name = "delta_asymptotics";
  rep.overall.pass = rep.monotone && (!expect_rate || rep.first_order);
  rep.overall.value = rep.ratios.empty() ? 0.0 : rep.ratios.back();
  rep.overall.tolerance = 0.6;
  std::ostringstream os;
  os << "errors";
  for (double e : rep.errors) os << " " << e;
  rep.overall.detail = os.str();
  return rep;
}

CheckResult verify_jensen(const BulkSurfaceOperator& op, double delta, const PotentialPair& p,
                          int trials, std::uint64_t seed) {
  CheckResult res;
  res.name = "jensen";
  res.tolerance = 1e-9;
  const Grid& g = op.grid();
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    const FieldPair r = random_pair(g, seed, static_cast<std::uint32_t>(t));

    // bulk component on (f, 0)
    FieldPair fonly = FieldPair::zero(g);
    fonly.bulk = r.bulk;
    const State u = op.resolvent(fonly, delta);
    FieldPair phif = FieldPair::zero(g);
    for (std::size_t k = 0; k < phif.bulk.size(); ++k) phif.bulk[k] = p.j(fonly.bulk[k]);
    const State u_phi = op.resolvent(phif, delta);
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
      worst = std::max(worst, p.j(u.x()[k]) - u_phi.x()[k]);
    }

    // boundary component on (0, g)
    FieldPair gonly = FieldPair::zero(g);
    gonly.boundary = r.boundary;
    const State v = op.resolvent(gonly, delta);
    FieldPair phig = FieldPair::zero(g);
    for (std::size_t b = 0; b < phig.boundary.size(); ++b) {
      phig.boundary[b] = p.j(gonly.boundary[b]);
    }
    const State v_phi = op.resolvent(phig, delta);
    for (std::size_t b = 0; b < g.num_boundary(); ++b) {
      worst = std::max(worst, p.j(v.boundary_value(b)) - v_phi.boundary_value(b));
    }
  }
  res.value = worst;
  res.pass = worst <= res.tolerance;
  std::ostringstream os;
  os << "max convexity violation " << worst;
  res.detail = os.str();
  return res;
}

}  // namespace dynabc
