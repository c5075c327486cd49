#include "dynabc/bulk_surface_operator.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dynabc {

BulkSurfaceOperator::BulkSurfaceOperator(const Grid& grid, double eps)
    : grid_(grid), eps_(eps) {
  if (!(eps >= 0)) throw std::invalid_argument("BulkSurfaceOperator: eps must be >= 0");
  if (grid.mode() == GridMode::Interval && eps > 0) {
    throw std::invalid_argument(
        "BulkSurfaceOperator: eps > 0 is not meaningful in interval mode "
        "(the boundary is a point set)");
  }

  const std::size_t n = grid.num_nodes();
  const int nx = grid.nx(), ny = grid.ny();
  const double hx = grid.hx(), hy = grid.hy();

  std::vector<Eigen::Triplet<double>> trip;
  auto add_edge = [&trip](std::size_t a, std::size_t b, double w) {
    trip.emplace_back(a, a, w);
    trip.emplace_back(b, b, w);
    trip.emplace_back(a, b, -w);
    trip.emplace_back(b, a, -w);
  };

  if (grid.mode() == GridMode::Strip) {
    for (int j = 0; j < ny; ++j) {
      const double wy = (j == 0 || j == ny - 1) ? hy / 2 : hy;
      double w = wy / hx;
      if (eps > 0 && (j == 0 || j == ny - 1)) w += eps / hx;  // tangential circle term
      for (int i = 0; i < nx; ++i) {
        add_edge(grid.bulk_index(i, j), grid.bulk_index(i + 1, j), w);
      }
    }
    const double w = hx / hy;
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        add_edge(grid.bulk_index(i, j), grid.bulk_index(i, j + 1), w);
      }
    }
  } else {
    const double w = 1.0 / hy;
    for (int j = 0; j + 1 < ny; ++j) {
      add_edge(grid.bulk_index(0, j), grid.bulk_index(0, j + 1), w);
    }
  }

  K_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  K_.setFromTriplets(trip.begin(), trip.end());
  K_.makeCompressed();

  M_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    double m = grid.mass_bulk()[k];
    const std::ptrdiff_t b = grid.boundary_of(k);
    if (b >= 0) m += grid.mass_boundary()[static_cast<std::size_t>(b)];
    M_[static_cast<Eigen::Index>(k)] = m;
  }
}

State BulkSurfaceOperator::apply(const State& s) const {
  const Eigen::Map<const Eigen::VectorXd> x(s.x().data(),
                                            static_cast<Eigen::Index>(s.x().size()));
  Eigen::VectorXd out = K_ * x;
  out.array() /= M_.array();
  return State(grid_, Field(out.data(), out.data() + out.size()));
}

double BulkSurfaceOperator::quadratic_form(const State& s) const {
  const Eigen::Map<const Eigen::VectorXd> x(s.x().data(),
                                            static_cast<Eigen::Index>(s.x().size()));
  return x.dot(K_ * x);
}

Eigen::VectorXd BulkSurfaceOperator::load(const FieldPair& rhs) const {
  const Grid& g = grid_;
  if (rhs.bulk.size() != g.num_nodes() || rhs.boundary.size() != g.num_boundary()) {
    throw std::invalid_argument("BulkSurfaceOperator: rhs dimensions do not match grid");
  }
  Eigen::VectorXd b(static_cast<Eigen::Index>(g.num_nodes()));
  for (std::size_t k = 0; k < g.num_nodes(); ++k) {
    b[static_cast<Eigen::Index>(k)] = g.mass_bulk()[k] * rhs.bulk[k];
  }
  for (std::size_t i = 0; i < g.num_boundary(); ++i) {
    b[static_cast<Eigen::Index>(g.boundary_to_bulk(i))] +=
        g.mass_boundary()[i] * rhs.boundary[i];
  }
  return b;
}

const BulkSurfaceOperator::Factor& BulkSurfaceOperator::factor_for(double delta) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(delta);
  if (it != cache_.end()) return *it->second;
  auto f = std::make_unique<Factor>();
  f->A = delta * K_;
  for (Eigen::Index k = 0; k < M_.size(); ++k) f->A.coeffRef(k, k) += M_[k];
  f->A.makeCompressed();
  f->ldlt.compute(f->A);
  if (f->ldlt.info() != Eigen::Success) {
    throw std::runtime_error("BulkSurfaceOperator: factorization failed");
  }
  return *cache_.emplace(delta, std::move(f)).first->second;
}

Eigen::VectorXd BulkSurfaceOperator::solve_shifted(double delta, const Eigen::VectorXd& b) const {
  if (!(delta > 0)) throw std::invalid_argument("resolvent: delta must be > 0");
  Eigen::VectorXd z;
  const Eigen::SparseMatrix<double>* A = nullptr;
  if (grid_.num_nodes() <= kDirectSolveMaxNodes) {
    const Factor& f = factor_for(delta);
    z = f.ldlt.solve(b);
    A = &f.A;
  } else {
    Eigen::SparseMatrix<double> Adyn = delta * K_;
    for (Eigen::Index k = 0; k < M_.size(); ++k) Adyn.coeffRef(k, k) += M_[k];
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(10000);
    cg.compute(Adyn);
    z = cg.solve(b);
    const double resid = (Adyn * z - b).norm();
    const double scale = b.norm();
    if (resid > kSolveResidual * (scale > 0 ? scale : 1.0)) {
      std::ostringstream os;
      os << "resolvent solve stagnated: relative residual " << resid / (scale > 0 ? scale : 1.0)
         << " after " << cg.iterations() << " CG iterations";
      throw std::runtime_error(os.str());
    }
    return z;
  }
  const double resid = (*A * z - b).norm();
  const double scale = b.norm();
  if (resid > kSolveResidual * (scale > 0 ? scale : 1.0)) {
    std::ostringstream os;
    os << "resolvent solve failed: relative residual " << resid / (scale > 0 ? scale : 1.0);
    throw std::runtime_error(os.str());
  }
  return z;
}

State BulkSurfaceOperator::resolvent(const FieldPair& rhs, double delta, int m) const {
  if (m < 1) throw std::invalid_argument("resolvent: power m must be >= 1");
  Eigen::VectorXd z = solve_shifted(delta, load(rhs));
  // iterates are trace-compatible, so their load is just M z
  for (int k = 1; k < m; ++k) {
    z = solve_shifted(delta, M_.cwiseProduct(z));
  }
  return State(grid_, Field(z.data(), z.data() + z.size()));
}

State BulkSurfaceOperator::resolvent(const State& rhs, double delta, int m) const {
  if (m < 1) throw std::invalid_argument("resolvent: power m must be >= 1");
  const Eigen::Map<const Eigen::VectorXd> x(rhs.x().data(),
                                            static_cast<Eigen::Index>(rhs.x().size()));
  Eigen::VectorXd z = x;
  for (int k = 0; k < m; ++k) {
    z = solve_shifted(delta, M_.cwiseProduct(z));
  }
  return State(grid_, Field(z.data(), z.data() + z.size()));
}

}  // namespace dynabc
