#include "dynabc/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace dynabc {

struct Grid::Data {
  GridMode mode = GridMode::Strip;
  int nx = 0, ny = 0;
  double Lx = 0, Ly = 0, hx = 0, hy = 0;
  std::vector<std::size_t> boundary_nodes;
  std::vector<std::ptrdiff_t> boundary_of;
  std::vector<double> mass_bulk;
  std::vector<double> mass_boundary;

  std::size_t index(int i, int j) const {
    if (mode == GridMode::Strip) i = ((i % nx) + nx) % nx;
    return static_cast<std::size_t>(j) * nx + i;
  }

  void build_tables() {
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    mass_bulk.assign(n, 0.0);
    boundary_of.assign(n, -1);

    const bool strip = (mode == GridMode::Strip);
    const double cell = strip ? hx * hy : hy;
    for (int j = 0; j < ny; ++j) {
      const bool wall = (j == 0 || j == ny - 1);
      for (int i = 0; i < nx; ++i) {
        mass_bulk[index(i, j)] = wall ? cell / 2 : cell;
      }
    }

    // boundary ordering: row j=0 first, then row j=ny-1, each in i order
    boundary_nodes.clear();
    for (int i = 0; i < nx; ++i) boundary_nodes.push_back(index(i, 0));
    for (int i = 0; i < nx; ++i) boundary_nodes.push_back(index(i, ny - 1));
    for (std::size_t b = 0; b < boundary_nodes.size(); ++b) {
      boundary_of[boundary_nodes[b]] = static_cast<std::ptrdiff_t>(b);
    }

    // counting measure on the two endpoints in interval mode
    mass_boundary.assign(boundary_nodes.size(), strip ? hx : 1.0);
  }
};

Grid Grid::strip(int nx, int ny, double Lx, double Ly) {
  if (nx < 4) throw std::invalid_argument("Grid: strip mode needs nx >= 4");
  if (ny < 3) throw std::invalid_argument("Grid: ny >= 3 required");
  if (!(Lx > 0) || !(Ly > 0)) throw std::invalid_argument("Grid: Lx, Ly must be positive");
  auto d = std::make_shared<Data>();
  d->mode = GridMode::Strip;
  d->nx = nx;
  d->ny = ny;
  d->Lx = Lx;
  d->Ly = Ly;
  d->hx = Lx / nx;
  d->hy = Ly / (ny - 1);
  d->build_tables();
  return Grid(std::move(d));
}

Grid Grid::interval(int ny, double Ly) {
  if (ny < 3) throw std::invalid_argument("Grid: ny >= 3 required");
  if (!(Ly > 0)) throw std::invalid_argument("Grid: Ly must be positive");
  auto d = std::make_shared<Data>();
  d->mode = GridMode::Interval;
  d->nx = 1;
  d->ny = ny;
  d->Lx = 1.0;
  d->Ly = Ly;
  d->hx = 1.0;  // unused in interval mode
  d->hy = Ly / (ny - 1);
  d->build_tables();
  return Grid(std::move(d));
}

GridMode Grid::mode() const { return data_->mode; }
int Grid::nx() const { return data_->nx; }
int Grid::ny() const { return data_->ny; }
double Grid::Lx() const { return data_->Lx; }
double Grid::Ly() const { return data_->Ly; }
double Grid::hx() const { return data_->hx; }
double Grid::hy() const { return data_->hy; }

std::size_t Grid::num_nodes() const {
  return static_cast<std::size_t>(data_->nx) * data_->ny;
}

std::size_t Grid::num_boundary() const { return data_->boundary_nodes.size(); }

std::size_t Grid::bulk_index(int i, int j) const { return data_->index(i, j); }

std::size_t Grid::boundary_to_bulk(std::size_t b) const { return data_->boundary_nodes[b]; }

bool Grid::is_boundary_node(std::size_t node) const { return data_->boundary_of[node] >= 0; }

std::ptrdiff_t Grid::boundary_of(std::size_t node) const { return data_->boundary_of[node]; }

const std::vector<double>& Grid::mass_bulk() const { return data_->mass_bulk; }

const std::vector<double>& Grid::mass_boundary() const { return data_->mass_boundary; }

double Grid::domain_measure() const {
  return data_->mode == GridMode::Strip ? data_->Lx * data_->Ly : data_->Ly;
}

double Grid::boundary_measure() const {
  return data_->mode == GridMode::Strip ? 2 * data_->Lx : 2.0;
}

State::State(Grid grid, Field x) : grid_(std::move(grid)), x_(std::move(x)) {
  if (x_.size() != grid_.num_nodes()) {
    throw std::invalid_argument("State: field size does not match grid");
  }
}

State State::zero(const Grid& grid) {
  return State(grid, Field(grid.num_nodes(), 0.0));
}

State State::constant(const Grid& grid, double c) {
  return State(grid, Field(grid.num_nodes(), c));
}

BoundaryField State::boundary_values() const {
  return trace(grid_, x_);
}

FieldPair FieldPair::zero(const Grid& grid) {
  return {Field(grid.num_nodes(), 0.0), BoundaryField(grid.num_boundary(), 0.0)};
}

FieldPair FieldPair::from_state(const State& s) {
  return {s.x(), s.boundary_values()};
}

BoundaryField trace(const Grid& grid, const Field& x) {
  if (x.size() != grid.num_nodes()) {
    throw std::invalid_argument("trace: field size does not match grid");
  }
  BoundaryField y(grid.num_boundary());
  for (std::size_t b = 0; b < y.size(); ++b) y[b] = x[grid.boundary_to_bulk(b)];
  return y;
}

double grad_sq_bulk(const Grid& grid, const Field& x) {
  if (x.size() != grid.num_nodes()) {
    throw std::invalid_argument("grad_sq_bulk: field size does not match grid");
  }
  const int nx = grid.nx(), ny = grid.ny();
  const double hx = grid.hx(), hy = grid.hy();
  double acc = 0.0;

  if (grid.mode() == GridMode::Strip) {
    // x-direction edges, weighted hy (hy/2 on wall rows) / hx
    for (int j = 0; j < ny; ++j) {
      const double wy = (j == 0 || j == ny - 1) ? hy / 2 : hy;
      const double w = wy / hx;
      for (int i = 0; i < nx; ++i) {
        const double d = x[grid.bulk_index(i + 1, j)] - x[grid.bulk_index(i, j)];
        acc += w * d * d;
      }
    }
    // y-direction edges, weighted hx / hy
    const double w = hx / hy;
    for (int j = 0; j + 1 < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double d = x[grid.bulk_index(i, j + 1)] - x[grid.bulk_index(i, j)];
        acc += w * d * d;
      }
    }
  } else {
    const double w = 1.0 / hy;
    for (int j = 0; j + 1 < ny; ++j) {
      const double d = x[grid.bulk_index(0, j + 1)] - x[grid.bulk_index(0, j)];
      acc += w * d * d;
    }
  }
  return acc;
}

double grad_sq_boundary(const Grid& grid, const BoundaryField& y) {
  if (y.size() != grid.num_boundary()) {
    throw std::invalid_argument("grad_sq_boundary: field size does not match grid");
  }
  if (grid.mode() == GridMode::Interval) return 0.0;  // 0-manifold, no gradient
  const int nx = grid.nx();
  const double w = 1.0 / grid.hx();
  double acc = 0.0;
  for (int row = 0; row < 2; ++row) {
    const std::size_t base = static_cast<std::size_t>(row) * nx;
    for (int i = 0; i < nx; ++i) {
      const double d = y[base + (i + 1) % nx] - y[base + i];
      acc += w * d * d;
    }
  }
  return acc;
}

FieldNorms norms(const Grid& grid, const State& s) {
  FieldNorms out;
  double h2 = 0;
  for (std::size_t k = 0; k < s.x().size(); ++k) {
    h2 += grid.mass_bulk()[k] * s.x()[k] * s.x()[k];
  }
  double hg2 = 0;
  for (std::size_t b = 0; b < grid.num_boundary(); ++b) {
    const double v = s.boundary_value(b);
    hg2 += grid.mass_boundary()[b] * v * v;
  }
  out.h = std::sqrt(h2);
  out.h_gamma = std::sqrt(hg2);
  out.grad_h = std::sqrt(grad_sq_bulk(grid, s.x()));
  out.grad_gamma = std::sqrt(grad_sq_boundary(grid, s.boundary_values()));
  return out;
}

double norm_h_sq(const Grid& grid, const FieldPair& f) {
  double acc = 0;
  for (std::size_t k = 0; k < f.bulk.size(); ++k) {
    acc += grid.mass_bulk()[k] * f.bulk[k] * f.bulk[k];
  }
  for (std::size_t b = 0; b < f.boundary.size(); ++b) {
    acc += grid.mass_boundary()[b] * f.boundary[b] * f.boundary[b];
  }
  return acc;
}

double norm_h(const Grid& grid, const FieldPair& f) {
  return std::sqrt(norm_h_sq(grid, f));
}

double norm_l1(const Grid& grid, const FieldPair& f) {
  double acc = 0;
  for (std::size_t k = 0; k < f.bulk.size(); ++k) {
    acc += grid.mass_bulk()[k] * std::abs(f.bulk[k]);
  }
  for (std::size_t b = 0; b < f.boundary.size(); ++b) {
    acc += grid.mass_boundary()[b] * std::abs(f.boundary[b]);
  }
  return acc;
}

double sup_norm(const FieldPair& f) {
  double m = 0;
  for (double v : f.bulk) m = std::max(m, std::abs(v));
  for (double v : f.boundary) m = std::max(m, std::abs(v));
  return m;
}

double norm_h_sq(const Grid& grid, const State& s) {
  double acc = 0;
  for (std::size_t k = 0; k < s.x().size(); ++k) {
    acc += grid.mass_bulk()[k] * s.x()[k] * s.x()[k];
  }
  for (std::size_t b = 0; b < grid.num_boundary(); ++b) {
    const double v = s.boundary_value(b);
    acc += grid.mass_boundary()[b] * v * v;
  }
  return acc;
}

double norm_h(const Grid& grid, const State& s) {
  return std::sqrt(norm_h_sq(grid, s));
}

}  // namespace dynabc
