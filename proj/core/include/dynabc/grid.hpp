#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace dynabc {

using Field = std::vector<double>;          // one value per bulk node
using BoundaryField = std::vector<double>;  // one value per boundary node

enum class GridMode { Strip, Interval };

/// Spatial discretization of the bulk domain and its boundary manifold.
///
/// Strip mode: a rectangle periodic in x with walls at y = 0 and y = Ly.
/// The boundary consists of the two wall rows, each a discrete circle of
/// nx nodes, so the surface Laplacian is a 1-D periodic Laplacian.
/// Interval mode: ny nodes on [0, Ly]; the boundary is the two endpoints
/// (a 0-manifold, so the surface-diffusion coefficient must be zero).
///
/// A Grid is a cheap handle over immutable shared data: copies alias the
/// same tables and any copy keeps them alive, so states can outlive the
/// configuration that created them. Safe to share across threads.
class Grid {
public:
  static Grid strip(int nx, int ny, double Lx, double Ly);
  static Grid interval(int ny, double Ly);

  GridMode mode() const;
  int nx() const;
  int ny() const;
  double Lx() const;
  double Ly() const;
  double hx() const;
  double hy() const;

  std::size_t num_nodes() const;
  std::size_t num_boundary() const;

  // (i, j) -> flat index; i is periodic in strip mode
  std::size_t bulk_index(int i, int j) const;

  // boundary index -> bulk index (injective)
  std::size_t boundary_to_bulk(std::size_t b) const;
  bool is_boundary_node(std::size_t node) const;
  // bulk index -> boundary index, or -1 for interior nodes
  std::ptrdiff_t boundary_of(std::size_t node) const;

  // trapezoid quadrature weights; sum(mass_bulk) = Lx*Ly, sum(mass_boundary) = |boundary|
  const std::vector<double>& mass_bulk() const;
  const std::vector<double>& mass_boundary() const;

  double domain_measure() const;    // Lx*Ly (strip) or Ly (interval)
  double boundary_measure() const;  // 2*Lx (strip) or 2 (interval)

private:
  struct Data;
  explicit Grid(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

/// Trace-compatible pair (x, y = x|_boundary). The boundary component is
/// a view of the single coupled vector, so trace compatibility holds
/// bitwise by construction.
class State {
public:
  State(Grid grid, Field x);
  static State zero(const Grid& grid);
  static State constant(const Grid& grid, double c);

  const Grid& grid() const { return grid_; }
  const Field& x() const { return x_; }
  Field& x() { return x_; }
  double operator[](std::size_t node) const { return x_[node]; }
  double& operator[](std::size_t node) { return x_[node]; }

  double boundary_value(std::size_t b) const { return x_[grid_.boundary_to_bulk(b)]; }
  BoundaryField boundary_values() const;

private:
  Grid grid_;
  Field x_;
};

/// A generic element of the product space H x H_Gamma: independent bulk
/// and boundary fields (no trace compatibility).
struct FieldPair {
  Field bulk;
  BoundaryField boundary;

  static FieldPair zero(const Grid& grid);
  static FieldPair from_state(const State& s);
};

// restriction of a bulk field to the boundary, in boundary-index order
BoundaryField trace(const Grid& grid, const Field& x);

struct FieldNorms {
  double h = 0;           // mass-weighted L2 of the bulk field
  double h_gamma = 0;     // mass-weighted L2 of the boundary trace
  double grad_h = 0;      // L2 of the discrete bulk gradient
  double grad_gamma = 0;  // L2 of the discrete surface gradient
};

FieldNorms norms(const Grid& grid, const State& s);

// squared norms of the gradient parts, as edge sums (forward differences,
// periodic in x); these match the stiffness quadratic form exactly
double grad_sq_bulk(const Grid& grid, const Field& x);
double grad_sq_boundary(const Grid& grid, const BoundaryField& y);

// mass-weighted norms on the product space
double norm_h_sq(const Grid& grid, const FieldPair& f);
double norm_h(const Grid& grid, const FieldPair& f);
double norm_l1(const Grid& grid, const FieldPair& f);
double sup_norm(const FieldPair& f);

double norm_h_sq(const Grid& grid, const State& s);
double norm_h(const Grid& grid, const State& s);

}  // namespace dynabc
