#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynabc/grid.hpp"
#include "dynabc/rng.hpp"

namespace dynabc {

enum class DiffusionKind { Additive, LinearMultiplicative, BoundedMultiplicative };

std::string to_string(DiffusionKind k);

/// Truncated spectral Wiener noise for the bulk and boundary equations.
/// Mode k carries amplitude (k+1)^(-decay-1/2); squared amplitudes are
/// summable for decay > 1/2, the discrete stand-in for a Hilbert-Schmidt
/// covariance. Bulk modes are tensor Fourier modes on the strip, boundary
/// modes are Fourier modes alternating between the two wall circles, and
/// the two streams draw from disjoint counter substreams.
class NoiseModel {
public:
  NoiseModel(const Grid& grid, int n_modes_bulk, int n_modes_boundary, double decay,
             DiffusionKind kind, double sigma0);

  int n_modes_bulk() const { return static_cast<int>(bulk_modes_.size()); }
  int n_modes_boundary() const { return static_cast<int>(boundary_modes_.size()); }
  double decay() const { return decay_; }
  DiffusionKind kind() const { return kind_; }
  double sigma0() const { return sigma0_; }

  // increments pre-applied with the operator resolvent when m > 0
  int mollify_m = 0;
  double mollify_delta = 0;

  /// One Wiener increment over a step of length dt: sum over modes of
  /// a_k * N(0, dt) * e_k, deterministically addressed by
  /// (seed, trajectory, step). dt = 0 yields zero fields.
  FieldPair sample_increment(const Grid& grid, double dt, std::uint64_t seed,
                             std::uint32_t trajectory, std::uint32_t step) const;

  /// Pointwise diffusion coefficient applied to an increment. The additive
  /// kind ignores the state.
  FieldPair apply_diffusion(const State& s, const FieldPair& increment) const;

  // per-node increment variance for unit dt (the analytic mode sum)
  double bulk_variance_at(std::size_t node) const;
  double boundary_variance_at(std::size_t b) const;

  // sum over modes of a_k^2 ||e_k||^2 in the product norm, the
  // Hilbert-Schmidt proxy used by the energy inequality (additive kind)
  double hs_norm_sq(const Grid& grid) const;

  const std::vector<double>& amplitudes_bulk() const { return amp_bulk_; }
  const std::vector<double>& amplitudes_boundary() const { return amp_boundary_; }
  const std::vector<Field>& bulk_modes() const { return bulk_modes_; }
  const std::vector<BoundaryField>& boundary_modes() const { return boundary_modes_; }

private:
  double decay_;
  DiffusionKind kind_;
  double sigma0_;
  std::vector<double> amp_bulk_, amp_boundary_;
  std::vector<Field> bulk_modes_;
  std::vector<BoundaryField> boundary_modes_;
};

}  // namespace dynabc
