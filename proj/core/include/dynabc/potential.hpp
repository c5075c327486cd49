#pragma once

#include <array>
#include <string>
#include <vector>

#include "dynabc/monotone.hpp"

namespace dynabc {

/// Lipschitz perturbation of the convex part of a double-well potential:
/// affine or continuous bounded-slope piecewise linear.
class Perturbation {
public:
  Perturbation() = default;  // the zero perturbation

  static Perturbation zero();
  static Perturbation affine(double a, double b);
  // continuous piecewise-linear interpolant of (r_k, v_k) points, extended
  // with the end segment slopes
  static Perturbation piecewise_linear(std::vector<std::array<double, 2>> points);

  double operator()(double r) const;
  double lipschitz() const { return lipschitz_; }
  // primitive G with G(0) = 0
  double primitive(double r) const;
  std::string describe() const;

private:
  bool affine_ = true;
  double a_ = 0, b_ = 0;
  std::vector<std::array<double, 2>> pts_;
  std::vector<double> prim_at_pts_;
  double lipschitz_ = 0;
};

enum class Side { Bulk, Boundary };

/// Convex potential plus Lipschitz perturbation for one side of the
/// coupled system: F = j + G with j' = beta and G' = pi.
struct PotentialPair {
  MonotoneGraph beta;
  Perturbation pi;
  Side side = Side::Bulk;

  double j(double r) const { return beta.primitive(r); }
  double conjugate(double s) const { return beta.conjugate(s); }
  // Moreau envelope j_lambda(r) = |r-s|^2/(2 lambda) + j(s), s the resolvent point
  double moreau(double r, double lambda) const;
  // |j(s) + j*(beta_lambda(r)) - beta_lambda(r) s|; vanishes up to roundoff
  double fenchel_gap(double r, double lambda) const;
};

enum class GrowthHypothesis { H1, H2, H3 };

struct HypothesisReport {
  GrowthHypothesis hypothesis;
  bool finite = false;       // every sampled ratio finite
  double fitted_constant = 0;
  double fitted_exponent = 0;  // polynomial-bound exponent (H2/H3 only)
  double symmetry_ratio_bulk = 0;     // max j(r)/j(-r) over samples
  double symmetry_ratio_boundary = 0;
  std::string detail;
};

/// The coupled nonlinearity: bulk and boundary potentials together with
/// the growth hypothesis declared for them.
struct GammaOperator {
  PotentialPair bulk;
  PotentialPair boundary;
  GrowthHypothesis hypothesis = GrowthHypothesis::H1;

  double lipschitz_perturbation() const;  // max of the two pi constants

  // finite-sample spot check of the declared hypothesis on a log-spaced
  // grid |r| in [1, 1e6]; fits the comparison constant and reports it
  HypothesisReport check_hypothesis() const;
};

}  // namespace dynabc
