#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dynabc/bulk_surface_operator.hpp"
#include "dynabc/potential.hpp"

namespace dynabc {

/// Outcome of one resolvent property check; `value` is the measured
/// quantity compared against `tolerance` (meaning depends on the check).
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0;
  double tolerance = 0;
  std::string detail;
};

/// Resolvent contraction in the product L2 norm and in the mass-weighted
/// L1 norm over random right-hand sides. Returns the max observed ratios;
/// zero inputs report ratio 1 by convention.
CheckResult verify_contraction(const BulkSurfaceOperator& op, double delta, int trials,
                               std::uint64_t seed);

/// Pointwise bound u, v <= max(c1, c2) for data bounded above by c1 (bulk)
/// and c2 (boundary). `value` is the worst signed excess over the bound.
CheckResult verify_max_principle(const BulkSurfaceOperator& op, double delta, double c1,
                                 double c2, int trials, std::uint64_t seed);

struct SmoothingReport {
  CheckResult overall;
  double max_ratio = 0;      // sup over spikes of ||R^m spike||_inf / ||spike||_L1
  double min_ratio = 0;
  double spread = 0;         // max/min - 1 across spike positions
  std::vector<double> ratios;
};

/// Spike-input L1 -> Linf smoothing of the resolvent power: the ratio must
/// be finite and stable (within `spread_tol`) as the spike position moves
/// between interior and boundary nodes.
SmoothingReport verify_smoothing(const BulkSurfaceOperator& op, double delta, int m,
                                 double spread_tol = 0.05);

struct AsymptoticsReport {
  CheckResult overall;
  std::vector<double> deltas;
  std::vector<double> errors;   // ||(I+delta C)^{-1} rhs - rhs||_H
  std::vector<double> ratios;   // consecutive error ratios
  bool monotone = false;
  bool first_order = false;     // ratios within [0.4, 0.6] under delta halving
};

/// delta -> 0 consistency of the resolvent. Monotone decrease is always
/// required; the first-order rate is asserted only when `expect_rate` is
/// set (smooth data).
AsymptoticsReport verify_delta_asymptotics(const BulkSurfaceOperator& op, const FieldPair& rhs,
                                           const std::vector<double>& deltas, bool expect_rate);

/// Generalized Jensen inequality for the resolvent components against a
/// convex potential: checks the bulk component on (f, 0) pairs and the
/// boundary component on (0, g) pairs. `value` is the largest violation.
CheckResult verify_jensen(const BulkSurfaceOperator& op, double delta, const PotentialPair& p,
                          int trials, std::uint64_t seed);

// deterministic Gaussian field helpers used by the checks and tests
FieldPair random_pair(const Grid& grid, std::uint64_t seed, std::uint32_t index);
Field random_field(const Grid& grid, std::uint64_t seed, std::uint32_t index);

}  // namespace dynabc
