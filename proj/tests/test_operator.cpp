#include <doctest.h>

#include <cmath>
#include <vector>

#include "dynabc/bulk_surface_operator.hpp"
#include "dynabc/operator_checks.hpp"
#include "dynabc/rng.hpp"
#include "oracles.hpp"

using namespace dynabc;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Dense reassembly of the shifted system (M + delta K) from the edge-weight
// rules, written independently of the sparse path.
struct DenseSystem {
  std::vector<std::vector<double>> A;
  std::vector<double> mass;
};

DenseSystem dense_shifted(const Grid& g, double eps, double delta) {
  const std::size_t n = g.num_nodes();
  DenseSystem sys;
  sys.A.assign(n, std::vector<double>(n, 0.0));
  sys.mass.assign(n, 0.0);
  auto edge = [&](std::size_t a, std::size_t b, double w) {
    sys.A[a][a] += delta * w;
    sys.A[b][b] += delta * w;
    sys.A[a][b] -= delta * w;
    sys.A[b][a] -= delta * w;
  };
  if (g.mode() == GridMode::Strip) {
    for (int j = 0; j < g.ny(); ++j) {
      const bool wall = j == 0 || j == g.ny() - 1;
      const double wy = wall ? g.hy() / 2 : g.hy();
      for (int i = 0; i < g.nx(); ++i) {
        double w = wy / g.hx();
        if (wall) w += eps / g.hx();
        edge(g.bulk_index(i, j), g.bulk_index(i + 1, j), w);
      }
    }
    for (int j = 0; j + 1 < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        edge(g.bulk_index(i, j), g.bulk_index(i, j + 1), g.hx() / g.hy());
      }
    }
  } else {
    for (int j = 0; j + 1 < g.ny(); ++j) {
      edge(g.bulk_index(0, j), g.bulk_index(0, j + 1), 1.0 / g.hy());
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    double m = g.mass_bulk()[k];
    if (const auto b = g.boundary_of(k); b >= 0) {
      m += g.mass_boundary()[static_cast<std::size_t>(b)];
    }
    sys.mass[k] = m;
    sys.A[k][k] += m;
  }
  return sys;
}

std::vector<double> dense_resolvent(const Grid& g, double eps, double delta,
                                    const FieldPair& rhs) {
  auto sys = dense_shifted(g, eps, delta);
  std::vector<double> b(g.num_nodes(), 0.0);
  for (std::size_t k = 0; k < g.num_nodes(); ++k) b[k] = g.mass_bulk()[k] * rhs.bulk[k];
  for (std::size_t i = 0; i < g.num_boundary(); ++i) {
    b[g.boundary_to_bulk(i)] += g.mass_boundary()[i] * rhs.boundary[i];
  }
  return oracle::dense_solve(std::move(sys.A), std::move(b));
}

}  // namespace

TEST_CASE("constants are in the kernel of the coupled operator") {
  const Grid g = Grid::strip(8, 5, 2, 1);
  for (double eps : {0.0, 0.5}) {
    const BulkSurfaceOperator op(g, eps);
    const State out = op.apply(State::constant(g, 3.7));
    for (double v : out.x()) CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("eps > 0 is rejected in interval mode") {
  const Grid g = Grid::interval(5, 1);
  CHECK_THROWS(BulkSurfaceOperator(g, 0.1));
  CHECK_NOTHROW(BulkSurfaceOperator(g, 0.0));
}

TEST_CASE("apply reproduces the tangential mode eigenvalue to second order") {
  const Grid g = Grid::strip(32, 17, 1, 1);
  const BulkSurfaceOperator op(g, 0.0);
  Field x(g.num_nodes());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) x[g.bulk_index(i, j)] = std::sin(kTwoPi * i / g.nx());
  }
  const State out = op.apply(State(g, x));
  const double kappa_sq = kTwoPi * kTwoPi;
  for (int j = 2; j < g.ny() - 2; ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const std::size_t n = g.bulk_index(i, j);
      if (std::abs(x[n]) < 0.3) continue;  // avoid near-zero division
      CHECK(out.x()[n] / x[n] == doctest::Approx(kappa_sq).epsilon(5e-3));
    }
  }
}

TEST_CASE("quadratic form is positive semidefinite on random fields") {
  const Grid g = Grid::strip(12, 7, 1, 1);
  const BulkSurfaceOperator op(g, 0.3);
  for (std::uint32_t t = 0; t < 100; ++t) {
    const State s(g, random_field(g, 21, t));
    CHECK(op.quadratic_form(s) >= 0.0);
  }
}

TEST_CASE("self-adjointness in the weighted inner product") {
  const Grid g = Grid::strip(10, 6, 1.2, 0.8);
  const BulkSurfaceOperator op(g, 0.25);
  for (std::uint32_t t = 0; t < 50; ++t) {
    const State s1(g, random_field(g, 22, 2 * t));
    const State s2(g, random_field(g, 22, 2 * t + 1));
    const State k1 = op.apply(s1);
    const State k2 = op.apply(s2);
    // <K s1, s2> = <s1, K s2> with the M-weighting folded into apply
    double a = 0, b = 0, scale = 0;
    for (std::size_t n = 0; n < g.num_nodes(); ++n) {
      const double m = op.mass()[static_cast<Eigen::Index>(n)];
      a += m * k1.x()[n] * s2.x()[n];
      b += m * s1.x()[n] * k2.x()[n];
      scale += std::abs(m * k1.x()[n] * s2.x()[n]);
    }
    CHECK(std::abs(a - b) <= 1e-12 * (1 + scale));
  }
}

TEST_CASE("resolvent fixed points and zero") {
  const Grid g = Grid::strip(8, 5, 1, 1);
  const BulkSurfaceOperator op(g, 0.2);
  SUBCASE("constants for any delta and power") {
    for (double delta : {0.05, 1.0}) {
      for (int m : {1, 2, 3}) {
        const State out = op.resolvent(State::constant(g, -1.4), delta, m);
        for (double v : out.x()) CHECK(v == doctest::Approx(-1.4).epsilon(1e-11));
      }
    }
  }
  SUBCASE("zero maps to zero") {
    const State out = op.resolvent(FieldPair::zero(g), 0.7, 2);
    for (double v : out.x()) CHECK(v == 0.0);
  }
}

TEST_CASE("tiny 1-D resolvent against the explicit 3x3 solve") {
  const Grid g = Grid::interval(3, 1.0);  // hy = 1/2
  const BulkSurfaceOperator op(g, 0.0);
  FieldPair rhs = FieldPair::zero(g);
  rhs.bulk[1] = 1.0;  // unit spike at the midpoint
  const State out = op.resolvent(rhs, 1.0, 1);

  const auto ref = dense_resolvent(g, 0.0, 1.0, rhs);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(out.x()[k] == doctest::Approx(ref[k]).epsilon(1e-12));
  }
  // fully explicit check of the same 3x3 system:
  // mass = (1/4 + 1, 1/2, 1/4 + 1), edge weight 1/hy = 2
  const std::vector<std::vector<double>> A = {
      {1.25 + 2, -2, 0}, {-2, 0.5 + 4, -2}, {0, -2, 1.25 + 2}};
  const std::vector<double> b = {0, 0.5, 0};
  const auto ref2 = oracle::dense_solve(A, b);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(out.x()[k] == doctest::Approx(ref2[k]).epsilon(1e-12));
  }
}

TEST_CASE("resolvent matches the dense oracle on a small strip") {
  const Grid g = Grid::strip(6, 4, 1.5, 1.0);
  for (double eps : {0.0, 0.4}) {
    const BulkSurfaceOperator op(g, eps);
    const FieldPair rhs = random_pair(g, 31, 5);
    const State out = op.resolvent(rhs, 0.3, 1);
    const auto ref = dense_resolvent(g, eps, 0.3, rhs);
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
      CHECK(out.x()[k] == doctest::Approx(ref[k]).epsilon(1e-10));
    }
  }
}

TEST_CASE("resolvent identity on trace-compatible states") {
  const Grid g = Grid::strip(8, 5, 1, 1);
  const BulkSurfaceOperator op(g, 0.15);
  const State s(g, random_field(g, 33, 2));
  // (I + delta C)^{-1} (I + delta C) s = s
  const double delta = 0.4;
  const State cs = op.apply(s);
  FieldPair forward = FieldPair::from_state(s);
  const BoundaryField cs_b = cs.boundary_values();
  for (std::size_t k = 0; k < g.num_nodes(); ++k) forward.bulk[k] += delta * cs.x()[k];
  for (std::size_t b = 0; b < g.num_boundary(); ++b) forward.boundary[b] += delta * cs_b[b];
  const State back = op.resolvent(forward, delta, 1);
  for (std::size_t k = 0; k < g.num_nodes(); ++k) {
    CHECK(back.x()[k] == doctest::Approx(s.x()[k]).epsilon(1e-9));
  }
}

TEST_CASE("quadratic form is nondecreasing in eps") {
  const Grid g = Grid::strip(10, 6, 1, 1);
  const State s(g, random_field(g, 35, 0));
  double prev = -1;
  for (double eps : {0.0, 0.1, 0.5, 1.0}) {
    const BulkSurfaceOperator op(g, eps);
    const double q = op.quadratic_form(s);
    CHECK(q >= prev);
    prev = q;
  }
}

TEST_CASE("contraction check over random data") {
  const Grid g = Grid::strip(16, 9, 1, 1);
  for (double eps : {0.0, 0.5}) {
    const BulkSurfaceOperator op(g, eps);
    for (double delta : {0.01, 0.1, 1.0}) {
      const auto res = verify_contraction(op, delta, 40, 51);
      CAPTURE(res.detail);
      CHECK(res.pass);
    }
  }
}

TEST_CASE("contraction trivial cases") {
  const Grid g = Grid::strip(8, 5, 1, 1);
  const BulkSurfaceOperator op(g, 0.1);
  SUBCASE("zero rhs reports ratio one by convention") {
    const auto res = verify_contraction(op, 0.5, 1, 99);
    CHECK(res.pass);
    CHECK(res.value >= 0.0);
  }
  SUBCASE("constant pairs sit exactly on the bound") {
    FieldPair c{Field(g.num_nodes(), 2.0), BoundaryField(g.num_boundary(), 2.0)};
    const State out = op.resolvent(c, 0.5);
    CHECK(norm_h(g, FieldPair::from_state(out)) ==
          doctest::Approx(norm_h(g, c)).epsilon(1e-11));
  }
}

TEST_CASE("maximum principle") {
  const Grid g = Grid::strip(16, 9, 1, 1);
  const BulkSurfaceOperator op(g, 0.3);
  SUBCASE("equal constant data is a fixed point") {
    FieldPair c{Field(g.num_nodes(), 1.0), BoundaryField(g.num_boundary(), 1.0)};
    const State out = op.resolvent(c, 0.25);
    for (double v : out.x()) CHECK(v == doctest::Approx(1.0).epsilon(1e-11));
  }
  SUBCASE("mixed ceilings bound by the max") {
    FieldPair c{Field(g.num_nodes(), 1.0), BoundaryField(g.num_boundary(), 2.0)};
    const State out = op.resolvent(c, 0.25);
    for (double v : out.x()) CHECK(v <= 2.0 + 1e-10);
  }
  SUBCASE("random data below mixed ceilings") {
    const auto res = verify_max_principle(op, 0.1, 0.5, 0.5, 60, 77);
    CAPTURE(res.detail);
    CHECK(res.pass);
  }
  SUBCASE("oracle spot check on a small grid") {
    const Grid gs = Grid::strip(8, 5, 1, 1);
    const BulkSurfaceOperator ops(gs, 0.0);
    FieldPair rhs = random_pair(gs, 41, 0);
    for (double& v : rhs.bulk) v = 0.5 - std::abs(v);   // <= 0.5
    for (double& v : rhs.boundary) v = 0.5;             // == 0.5
    const State out = ops.resolvent(rhs, 0.2);
    const auto ref = dense_resolvent(gs, 0.0, 0.2, rhs);
    for (std::size_t k = 0; k < gs.num_nodes(); ++k) {
      CHECK(out.x()[k] == doctest::Approx(ref[k]).epsilon(1e-10));
      CHECK(out.x()[k] <= 0.5 + 1e-10);
    }
  }
}

TEST_CASE("spike smoothing is position independent and bounded under refinement") {
  const Grid coarse = Grid::strip(16, 9, 1, 1);
  const Grid fine = Grid::strip(64, 33, 1, 1);
  const double delta = 0.1;

  SUBCASE("translation invariance along the periodic direction is exact") {
    const BulkSurfaceOperator op(coarse, 0.2);
    auto spike_ratio = [&](int i, int j) {
      FieldPair spike = FieldPair::zero(coarse);
      const std::size_t node = coarse.bulk_index(i, j);
      double mass = coarse.mass_bulk()[node];
      if (const auto b = coarse.boundary_of(node); b >= 0) {
        mass += coarse.mass_boundary()[static_cast<std::size_t>(b)];
        spike.boundary[static_cast<std::size_t>(b)] = 1.0 / mass;
      }
      spike.bulk[node] = 1.0 / mass;
      return sup_norm(FieldPair::from_state(op.resolvent(spike, delta, 2)));
    };
    CHECK(spike_ratio(2, 4) == doctest::Approx(spike_ratio(11, 4)).epsilon(1e-10));
    CHECK(spike_ratio(0, 0) == doctest::Approx(spike_ratio(7, 0)).epsilon(1e-10));
  }

  SUBCASE("m = 2 ratios are position stable once the kernel diagonal flattens") {
    // at delta = 0.1 the wall spike smooths to a peak ~2.4x the interior
    // one; the 5% position-stability window opens around delta = 4
    for (const Grid* g : {&coarse, &fine}) {
      const BulkSurfaceOperator op(*g, 0.2);
      const auto rep = verify_smoothing(op, 4.0, 2);
      CAPTURE(rep.overall.detail);
      CHECK(rep.overall.pass);
      CHECK(rep.spread <= 0.05);
      const auto rough = verify_smoothing(op, delta, 2);
      CHECK(std::isfinite(rough.max_ratio));
      CHECK(rough.spread > 0.05);  // documented, not asserted as stability
    }
  }

  SUBCASE("m = 0 blows up under refinement while m = 2 stays bounded") {
    const BulkSurfaceOperator opc(coarse, 0.2);
    const BulkSurfaceOperator opf(fine, 0.2);
    const auto id_c = verify_smoothing(opc, delta, 0);
    const auto id_f = verify_smoothing(opf, delta, 0);
    CHECK(id_f.max_ratio >= 4.0 * id_c.max_ratio);
    const auto sm_c = verify_smoothing(opc, delta, 2);
    const auto sm_f = verify_smoothing(opf, delta, 2);
    CHECK(sm_f.max_ratio <= 2.0 * sm_c.max_ratio);
  }
}

TEST_CASE("delta asymptotics") {
  const Grid g = Grid::strip(16, 9, 1, 1);
  const BulkSurfaceOperator op(g, 0.1);
  // the first-order window needs delta * ||A rhs|| << ||rhs||; for the 2 pi
  // tangential mode that means starting the halving around 1e-2
  const std::vector<double> deltas = {0.0125, 0.00625, 0.003125, 0.0015625, 0.00078125,
                                      0.000390625};
  const std::vector<double> coarse_deltas = {0.4, 0.2, 0.1, 0.05, 0.025, 0.0125};

  SUBCASE("constant rhs reproduces itself at every delta") {
    FieldPair c{Field(g.num_nodes(), 1.0), BoundaryField(g.num_boundary(), 1.0)};
    const auto rep = verify_delta_asymptotics(op, c, deltas, true);
    CHECK(rep.overall.pass);
    for (double e : rep.errors) CHECK(e < 1e-12);
  }
  SUBCASE("smooth rhs halves at first order") {
    FieldPair smooth = FieldPair::zero(g);
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        smooth.bulk[g.bulk_index(i, j)] = std::sin(kTwoPi * i / g.nx());
      }
    }
    smooth.boundary = trace(g, smooth.bulk);
    const auto rep = verify_delta_asymptotics(op, smooth, deltas, true);
    CAPTURE(rep.overall.detail);
    CHECK(rep.monotone);
    CHECK(rep.first_order);
    for (double r : rep.ratios) CHECK(r == doctest::Approx(0.5).epsilon(0.2));
    // outside the asymptotic window only the decrease survives
    const auto coarse = verify_delta_asymptotics(op, smooth, coarse_deltas, false);
    CHECK(coarse.monotone);
  }
  SUBCASE("rough rhs only decreases") {
    const auto rep = verify_delta_asymptotics(op, random_pair(g, 61, 0), coarse_deltas, false);
    CHECK(rep.monotone);
    CHECK(rep.overall.pass);
  }
}

TEST_CASE("jensen inequality for the resolvent components") {
  const Grid g = Grid::strip(8, 5, 1, 1);
  const BulkSurfaceOperator op(g, 0.2);
  const PotentialPair quad{MonotoneGraph::linear(1), Perturbation::zero(), Side::Bulk};
  const PotentialPair quartic{MonotoneGraph::power(3), Perturbation::zero(), Side::Bulk};

  SUBCASE("random data, quadratic and quartic potentials") {
    CHECK(verify_jensen(op, 0.1, quad, 15, 71).pass);
    CHECK(verify_jensen(op, 0.1, quartic, 15, 72).pass);
  }
  SUBCASE("constant data achieves equality") {
    FieldPair c = FieldPair::zero(g);
    for (double& v : c.bulk) v = 0.8;
    const State u = op.resolvent(c, 0.1);
    FieldPair jc = FieldPair::zero(g);
    for (double& v : jc.bulk) v = quad.j(0.8);
    const State uj = op.resolvent(jc, 0.1);
    // both sides apply the same sub-markovian average to constants
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
      CHECK(quad.j(u.x()[k]) <= uj.x()[k] + 1e-9);
    }
  }
  SUBCASE("zero data gives zero on both sides") {
    const State u = op.resolvent(FieldPair::zero(g), 0.1);
    for (double v : u.x()) CHECK(v == 0.0);
  }
  SUBCASE("dense-oracle cross check of the averaged inequality on 8x5") {
    const FieldPair r = random_pair(g, 73, 3);
    FieldPair fonly = FieldPair::zero(g);
    fonly.bulk = r.bulk;
    const auto u = dense_resolvent(g, 0.2, 0.1, fonly);
    FieldPair phif = FieldPair::zero(g);
    for (std::size_t k = 0; k < g.num_nodes(); ++k) phif.bulk[k] = quad.j(fonly.bulk[k]);
    const auto uj = dense_resolvent(g, 0.2, 0.1, phif);
    for (std::size_t k = 0; k < g.num_nodes(); ++k) {
      CHECK(quad.j(u[k]) <= uj[k] + 1e-9);
    }
  }
}
