#include "dynabc/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace dynabc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;

// 1-D profile catalogue: index 0 is the constant, odd indices are cosines,
// even indices sines, with increasing frequency
double periodic_profile(int idx, double t) {  // t in [0, 1)
  if (idx == 0) return 1.0;
  const int m = (idx + 1) / 2;
  return idx % 2 == 1 ? kSqrt2 * std::cos(kTwoPi * m * t) : kSqrt2 * std::sin(kTwoPi * m * t);
}

double wall_profile(int idx, double t) {  // t in [0, 1], Neumann cosines
  if (idx == 0) return 1.0;
  return kSqrt2 * std::cos(kPi * idx * t);
}

}  // namespace

std::string to_string(DiffusionKind k) {
  switch (k) {
    case DiffusionKind::Additive: return "additive";
    case DiffusionKind::LinearMultiplicative: return "linear-multiplicative";
    case DiffusionKind::BoundedMultiplicative: return "bounded-multiplicative";
  }
  return "?";
}

NoiseModel::NoiseModel(const Grid& grid, int n_modes_bulk, int n_modes_boundary,
                       double decay, DiffusionKind kind, double sigma0)
    : decay_(decay), kind_(kind), sigma0_(sigma0) {
  if (n_modes_bulk < 0 || n_modes_boundary < 0) {
    throw std::invalid_argument("NoiseModel: mode counts must be >= 0");
  }
  if (!(decay > 0.5)) {
    throw std::invalid_argument("NoiseModel: decay must exceed 1/2");
  }
  if (!(sigma0 >= 0)) {
    throw std::invalid_argument("NoiseModel: sigma0 must be >= 0");
  }

  amp_bulk_.resize(n_modes_bulk);
  amp_boundary_.resize(n_modes_boundary);
  for (int k = 0; k < n_modes_bulk; ++k) amp_bulk_[k] = std::pow(k + 1.0, -decay - 0.5);
  for (int k = 0; k < n_modes_boundary; ++k) amp_boundary_[k] = std::pow(k + 1.0, -decay - 0.5);

  const int nx = grid.nx(), ny = grid.ny();

  // bulk: diagonal enumeration of (x-profile, y-profile) pairs
  bulk_modes_.reserve(n_modes_bulk);
  {
    int a = 0, b = 0, diag = 0;
    for (int k = 0; k < n_modes_bulk; ++k) {
      Field e(grid.num_nodes());
      for (int j = 0; j < ny; ++j) {
        const double ty = (ny > 1) ? static_cast<double>(j) / (ny - 1) : 0.0;
        const double py = wall_profile(b, ty);
        for (int i = 0; i < nx; ++i) {
          const double tx = static_cast<double>(i) / nx;
          const double px = grid.mode() == GridMode::Strip ? periodic_profile(a, tx) : 1.0;
          e[grid.bulk_index(i, j)] = px * py;
        }
      }
      bulk_modes_.push_back(std::move(e));
      if (grid.mode() == GridMode::Interval) {
        ++b;  // only wall-normal structure in 1-D
      } else if (a == 0) {
        ++diag;
        a = diag;
        b = 0;
      } else {
        --a;
        ++b;
      }
    }
  }

  // boundary: Fourier profiles alternating between the two circles
  boundary_modes_.reserve(n_modes_boundary);
  for (int k = 0; k < n_modes_boundary; ++k) {
    BoundaryField e(grid.num_boundary(), 0.0);
    const int circle = k % 2;
    const int prof = k / 2;
    if (grid.mode() == GridMode::Strip) {
      const std::size_t base = static_cast<std::size_t>(circle) * nx;
      for (int i = 0; i < nx; ++i) {
        e[base + i] = periodic_profile(prof, static_cast<double>(i) / nx);
      }
    } else {
      e[circle] = 1.0;  // point mass on one endpoint
    }
    boundary_modes_.push_back(std::move(e));
  }
}

FieldPair NoiseModel::sample_increment(const Grid& grid, double dt, std::uint64_t seed,
                                       std::uint32_t trajectory, std::uint32_t step) const {
  if (dt < 0) throw std::invalid_argument("sample_increment: dt must be >= 0");
  FieldPair out = FieldPair::zero(grid);
  if (dt == 0) return out;
  const double sd = std::sqrt(dt);
  for (std::size_t k = 0; k < bulk_modes_.size(); ++k) {
    const double xi =
        sd * normal_at({seed, trajectory, step, static_cast<std::uint32_t>(k), 0});
    const double c = amp_bulk_[k] * xi;
    const Field& e = bulk_modes_[k];
    for (std::size_t n = 0; n < out.bulk.size(); ++n) out.bulk[n] += c * e[n];
  }
  for (std::size_t k = 0; k < boundary_modes_.size(); ++k) {
    const double xi = sd * normal_at({seed, trajectory, step,
                                      kBoundarySlotBit | static_cast<std::uint32_t>(k), 0});
    const double c = amp_boundary_[k] * xi;
    const BoundaryField& e = boundary_modes_[k];
    for (std::size_t b = 0; b < out.boundary.size(); ++b) out.boundary[b] += c * e[b];
  }
  return out;
}

FieldPair NoiseModel::apply_diffusion(const State& s, const FieldPair& increment) const {
  FieldPair out = increment;
  switch (kind_) {
    case DiffusionKind::Additive:
      for (double& v : out.bulk) v *= sigma0_;
      for (double& v : out.boundary) v *= sigma0_;
      break;
    case DiffusionKind::LinearMultiplicative: {
      for (std::size_t n = 0; n < out.bulk.size(); ++n) out.bulk[n] *= sigma0_ * s[n];
      for (std::size_t b = 0; b < out.boundary.size(); ++b) {
        out.boundary[b] *= sigma0_ * s.boundary_value(b);
      }
      break;
    }
    case DiffusionKind::BoundedMultiplicative: {
      auto coeff = [&](double x) { return sigma0_ * x / (1 + std::abs(x)); };
      for (std::size_t n = 0; n < out.bulk.size(); ++n) out.bulk[n] *= coeff(s[n]);
      for (std::size_t b = 0; b < out.boundary.size(); ++b) {
        out.boundary[b] *= coeff(s.boundary_value(b));
      }
      break;
    }
  }
  return out;
}

double NoiseModel::bulk_variance_at(std::size_t node) const {
  double acc = 0;
  for (std::size_t k = 0; k < bulk_modes_.size(); ++k) {
    const double v = amp_bulk_[k] * bulk_modes_[k][node];
    acc += v * v;
  }
  return acc;
}

double NoiseModel::boundary_variance_at(std::size_t b) const {
  double acc = 0;
  for (std::size_t k = 0; k < boundary_modes_.size(); ++k) {
    const double v = amp_boundary_[k] * boundary_modes_[k][b];
    acc += v * v;
  }
  return acc;
}

double NoiseModel::hs_norm_sq(const Grid& grid) const {
  double acc = 0;
  for (std::size_t k = 0; k < bulk_modes_.size(); ++k) {
    double n2 = 0;
    for (std::size_t n = 0; n < bulk_modes_[k].size(); ++n) {
      n2 += grid.mass_bulk()[n] * bulk_modes_[k][n] * bulk_modes_[k][n];
    }
    acc += amp_bulk_[k] * amp_bulk_[k] * n2;
  }
  for (std::size_t k = 0; k < boundary_modes_.size(); ++k) {
    double n2 = 0;
    for (std::size_t b = 0; b < boundary_modes_[k].size(); ++b) {
      n2 += grid.mass_boundary()[b] * boundary_modes_[k][b] * boundary_modes_[k][b];
    }
    acc += amp_boundary_[k] * amp_boundary_[k] * n2;
  }
  return sigma0_ * sigma0_ * acc;
}

}  // namespace dynabc
