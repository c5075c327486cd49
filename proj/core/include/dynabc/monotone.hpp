#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

namespace dynabc {

/// Maximal monotone graph on R with full domain, from a fixed catalogue.
/// All kinds satisfy 0 in beta(0) and D(beta) = R; subdifferentials of
/// indicator functions are rejected at construction.
///
/// The piecewise-linear kind is described by vertices of the graph curve
/// in the (r, value) plane; repeated abscissae encode jump intervals
/// (the only multivalued case). End slopes extend the graph to all of R.
class MonotoneGraph {
public:
  enum class Kind { Zero, Linear, Power, Sinh, PiecewiseLinear };

  MonotoneGraph() = default;  // the zero graph

  static MonotoneGraph zero();
  static MonotoneGraph linear(double a);
  static MonotoneGraph power(double p);
  static MonotoneGraph hyperbolic_sine();
  static MonotoneGraph piecewise_linear(std::vector<std::array<double, 2>> vertices,
                                        double slope_left, double slope_right);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  bool single_valued() const;
  std::string describe() const;

  // minimal/maximal selection of beta(r); equal except at jump knots
  double value_lo(double r) const;
  double value_hi(double r) const;

  // the unique s with s + lambda*beta(s) containing r; 1-Lipschitz in r
  double resolvent(double r, double lambda) const;
  // beta_lambda(r) = (r - resolvent(r, lambda)) / lambda
  double yosida(double r, double lambda) const;
  // a.e. derivative of beta_lambda, in [0, 1/lambda]; a subgradient slope
  // at kinks (used by the semismooth Newton solver)
  double yosida_slope(double r, double lambda) const;

  // convex primitive j with j(0) = 0, j >= 0
  double primitive(double r) const;
  // Fenchel conjugate j*(s) in [0, +inf]; +inf is returned as infinity()
  double conjugate(double s) const;

  // an upper bound for |beta(r)| used when scaling tolerances
  double growth_scale(double r) const;

  static constexpr double kSolveTol = 1e-12;

private:
  double pl_value(double r, bool hi) const;
  double pl_resolvent(double r, double lambda) const;
  double pl_primitive(double r) const;
  double pl_conjugate(double s) const;
  double pl_slope_at(double s) const;

  Kind kind_ = Kind::Zero;
  double param_ = 0;  // a for Linear, p for Power
  std::vector<std::array<double, 2>> verts_;
  double slope_left_ = 0, slope_right_ = 0;
  std::vector<double> pl_primitive_at_verts_;  // j at vertex abscissae
};

}  // namespace dynabc
