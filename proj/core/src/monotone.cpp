#include "dynabc/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dynabc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Solve f(s) = 0 on [lo, hi] with f nondecreasing, f(lo) <= 0 <= f(hi).
// Bisection brings Newton into its basin; Newton polishes to kSolveTol.
template <typename F, typename DF>
double bisect_newton(F f, DF df, double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0 || fhi < 0) throw std::runtime_error("scalar solve: invalid bracket");
  if (flo == 0) return lo;
  if (fhi == 0) return hi;

  for (int it = 0; it < 200 && hi - lo > 1e-6 * (1 + std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm <= 0) lo = mid; else hi = mid;
  }

  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double fs = f(s);
    if (fs <= 0) lo = std::max(lo, s); else hi = std::min(hi, s);
    const double d = df(s);
    double snew;
    if (std::isfinite(d) && d > 0) {
      snew = s - fs / d;
      if (!(snew > lo && snew < hi)) snew = 0.5 * (lo + hi);
    } else {
      snew = 0.5 * (lo + hi);
    }
    if (std::abs(snew - s) <= MonotoneGraph::kSolveTol) return snew;
    s = snew;
  }
  if (hi - lo > 16 * MonotoneGraph::kSolveTol) {
    throw std::runtime_error("scalar solve: no convergence after max iterations");
  }
  return s;
}

double sgn(double r) { return r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0); }

}  // namespace

MonotoneGraph MonotoneGraph::zero() {
  MonotoneGraph g;
  g.kind_ = Kind::Zero;
  return g;
}

MonotoneGraph MonotoneGraph::linear(double a) {
  if (!(a >= 0)) throw std::invalid_argument("MonotoneGraph::linear: slope must be >= 0");
  MonotoneGraph g;
  g.kind_ = Kind::Linear;
  g.param_ = a;
  return g;
}

MonotoneGraph MonotoneGraph::power(double p) {
  if (!(p >= 1)) throw std::invalid_argument("MonotoneGraph::power: exponent must be >= 1");
  MonotoneGraph g;
  g.kind_ = Kind::Power;
  g.param_ = p;
  return g;
}

MonotoneGraph MonotoneGraph::hyperbolic_sine() {
  MonotoneGraph g;
  g.kind_ = Kind::Sinh;
  return g;
}

MonotoneGraph MonotoneGraph::piecewise_linear(std::vector<std::array<double, 2>> vertices,
                                              double slope_left, double slope_right) {
  if (vertices.empty()) {
    throw std::invalid_argument("MonotoneGraph::piecewise_linear: needs at least one vertex");
  }
  if (!(slope_left >= 0) || !(slope_right >= 0) ||
      !std::isfinite(slope_left) || !std::isfinite(slope_right)) {
    throw std::invalid_argument(
        "MonotoneGraph::piecewise_linear: end slopes must be finite and >= 0 "
        "(the graph must be defined on all of R)");
  }
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
    if (vertices[k][0] > vertices[k + 1][0] || vertices[k][1] > vertices[k + 1][1]) {
      throw std::invalid_argument(
          "MonotoneGraph::piecewise_linear: vertices must be nondecreasing in both coordinates");
    }
  }
  MonotoneGraph g;
  g.kind_ = Kind::PiecewiseLinear;
  g.verts_ = std::move(vertices);
  g.slope_left_ = slope_left;
  g.slope_right_ = slope_right;

  // 0 in beta(0) is part of the contract for every catalogued graph
  if (g.value_lo(0.0) > 0 || g.value_hi(0.0) < 0) {
    throw std::invalid_argument("MonotoneGraph::piecewise_linear: 0 must belong to beta(0)");
  }

  // j at the vertex abscissae, accumulated trapezoid-exact from 0
  g.pl_primitive_at_verts_.assign(g.verts_.size(), 0.0);
  // integrate segment by segment starting from the vertex bracketing 0
  // first compute j relative to verts_[0], then shift so that j(0) = 0
  std::vector<double> rel(g.verts_.size(), 0.0);
  for (std::size_t k = 0; k + 1 < g.verts_.size(); ++k) {
    const double dr = g.verts_[k + 1][0] - g.verts_[k][0];
    rel[k + 1] = rel[k] + 0.5 * (g.verts_[k][1] + g.verts_[k + 1][1]) * dr;
  }
  // j(0) relative to verts_[0]
  MonotoneGraph tmp = g;
  tmp.pl_primitive_at_verts_ = rel;
  const double j0 = tmp.pl_primitive(0.0);
  for (std::size_t k = 0; k < rel.size(); ++k) g.pl_primitive_at_verts_[k] = rel[k] - j0;
  return g;
}

bool MonotoneGraph::single_valued() const {
  if (kind_ != Kind::PiecewiseLinear) return true;
  for (std::size_t k = 0; k + 1 < verts_.size(); ++k) {
    if (verts_[k][0] == verts_[k + 1][0] && verts_[k][1] < verts_[k + 1][1]) return false;
  }
  return true;
}

std::string MonotoneGraph::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Zero: os << "zero"; break;
    case Kind::Linear: os << "linear:" << param_; break;
    case Kind::Power: os << "power:" << param_; break;
    case Kind::Sinh: os << "sinh"; break;
    case Kind::PiecewiseLinear:
      os << "pl:" << slope_left_;
      for (const auto& v : verts_) os << "," << v[0] << ":" << v[1];
      os << "," << slope_right_;
      break;
  }
  return os.str();
}

double MonotoneGraph::value_lo(double r) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Linear: return param_ * r;
    case Kind::Power: return std::pow(std::abs(r), param_) * sgn(r);
    case Kind::Sinh: return std::sinh(r);
    case Kind::PiecewiseLinear: return pl_value(r, false);
  }
  return 0.0;
}

double MonotoneGraph::value_hi(double r) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Linear: return param_ * r;
    case Kind::Power: return std::pow(std::abs(r), param_) * sgn(r);
    case Kind::Sinh: return std::sinh(r);
    case Kind::PiecewiseLinear: return pl_value(r, true);
  }
  return 0.0;
}

double MonotoneGraph::pl_value(double r, bool hi) const {
  // before the first / after the last vertex: linear extension
  if (r < verts_.front()[0]) {
    return verts_.front()[1] + slope_left_ * (r - verts_.front()[0]);
  }
  if (r > verts_.back()[0]) {
    return verts_.back()[1] + slope_right_ * (r - verts_.back()[0]);
  }
  // collect the interval of values at r
  double lo = kInf, hival = -kInf;
  for (std::size_t k = 0; k < verts_.size(); ++k) {
    if (verts_[k][0] == r) {
      lo = std::min(lo, verts_[k][1]);
      hival = std::max(hival, verts_[k][1]);
    }
  }
  if (lo <= hival) return hi ? hival : lo;
  for (std::size_t k = 0; k + 1 < verts_.size(); ++k) {
    const double r0 = verts_[k][0], r1 = verts_[k + 1][0];
    if (r0 < r && r < r1) {
      const double t = (r - r0) / (r1 - r0);
      return verts_[k][1] + t * (verts_[k + 1][1] - verts_[k][1]);
    }
  }
  throw std::logic_error("pl_value: unreachable");
}

double MonotoneGraph::resolvent(double r, double lambda) const {
  if (!(lambda > 0)) throw std::invalid_argument("resolvent: lambda must be > 0");
  if (!std::isfinite(r)) throw std::invalid_argument("resolvent: r must be finite");
  switch (kind_) {
    case Kind::Zero: return r;
    case Kind::Linear: return r / (1 + lambda * param_);
    case Kind::Power: {
      const double p = param_;
      if (p == 1.0) return r / (1 + lambda);
      if (r == 0) return 0.0;
      const double a = std::abs(r);
      auto f = [&](double t) { return t + lambda * std::pow(t, p) - a; };
      auto df = [&](double t) {
        return 1 + lambda * p * (t > 0 ? std::pow(t, p - 1) : (p > 1 ? 0.0 : 1.0));
      };
      return sgn(r) * bisect_newton(f, df, 0.0, a);
    }
    case Kind::Sinh: {
      if (r == 0) return 0.0;
      const double a = std::abs(r);
      // sinh overflows past ~710; the solution is always in [0, min(a, cap)]
      const double cap = std::min(a, std::asinh(a / lambda) + 1);
      auto f = [&](double t) { return t + lambda * std::sinh(t) - a; };
      auto df = [&](double t) { return 1 + lambda * std::cosh(t); };
      return sgn(r) * bisect_newton(f, df, 0.0, cap);
    }
    case Kind::PiecewiseLinear: return pl_resolvent(r, lambda);
  }
  return r;
}

double MonotoneGraph::pl_resolvent(double r, double lambda) const {
  // the resolvent is the piecewise-linear function through (r_k + lambda v_k, r_k);
  // vertical graph segments map to flat resolvent plateaus (closed form at knots)
  const double first = verts_.front()[0] + lambda * verts_.front()[1];
  const double last = verts_.back()[0] + lambda * verts_.back()[1];
  if (r <= first) {
    return verts_.front()[0] + (r - first) / (1 + lambda * slope_left_);
  }
  if (r >= last) {
    return verts_.back()[0] + (r - last) / (1 + lambda * slope_right_);
  }
  for (std::size_t k = 0; k + 1 < verts_.size(); ++k) {
    const double a0 = verts_[k][0] + lambda * verts_[k][1];
    const double a1 = verts_[k + 1][0] + lambda * verts_[k + 1][1];
    if (a0 <= r && r <= a1) {
      if (a1 == a0) return verts_[k][0];
      const double t = (r - a0) / (a1 - a0);
      return verts_[k][0] + t * (verts_[k + 1][0] - verts_[k][0]);
    }
  }
  throw std::logic_error("pl_resolvent: unreachable");
}

double MonotoneGraph::yosida(double r, double lambda) const {
  return (r - resolvent(r, lambda)) / lambda;
}

double MonotoneGraph::yosida_slope(double r, double lambda) const {
  // d/dr beta_lambda = (1 - J') / lambda with J' the resolvent slope
  double jp = 1.0;
  const double s = resolvent(r, lambda);
  switch (kind_) {
    case Kind::Zero: jp = 1.0; break;
    case Kind::Linear: jp = 1.0 / (1 + lambda * param_); break;
    case Kind::Power: {
      const double p = param_;
      const double as = std::abs(s);
      const double bp = p == 1.0 ? 1.0 : p * (as > 0 ? std::pow(as, p - 1) : 0.0);
      jp = 1.0 / (1 + lambda * bp);
      break;
    }
    case Kind::Sinh: jp = 1.0 / (1 + lambda * std::cosh(s)); break;
    case Kind::PiecewiseLinear: {
      const double bp = pl_slope_at(s);
      jp = std::isfinite(bp) ? 1.0 / (1 + lambda * bp) : 0.0;
      break;
    }
  }
  return (1.0 - jp) / lambda;
}

double MonotoneGraph::pl_slope_at(double s) const {
  // slope of beta at s; +inf inside a jump knot
  if (s < verts_.front()[0]) return slope_left_;
  if (s > verts_.back()[0]) return slope_right_;
  for (std::size_t k = 0; k + 1 < verts_.size(); ++k) {
    const double r0 = verts_[k][0], r1 = verts_[k + 1][0];
    if (r0 == s && r1 == s && verts_[k][1] < verts_[k + 1][1]) return kInf;
    if (r0 <= s && s < r1) {
      return (verts_[k + 1][1] - verts_[k][1]) / (r1 - r0);
    }
  }
  // s equals the last abscissa
  if (verts_.size() >= 2 && verts_[verts_.size() - 2][0] < s) {
    const auto& a = verts_[verts_.size() - 2];
    const auto& b = verts_.back();
    return (b[1] - a[1]) / (b[0] - a[0]);
  }
  return slope_right_;
}

double MonotoneGraph::primitive(double r) const {
  switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Linear: return 0.5 * param_ * r * r;
    case Kind::Power: return std::pow(std::abs(r), param_ + 1) / (param_ + 1);
    case Kind::Sinh: return std::cosh(r) - 1.0;
    case Kind::PiecewiseLinear: return pl_primitive(r);
  }
  return 0.0;
}

double MonotoneGraph::pl_primitive(double r) const {
  auto seg_integral = [](double v0, double v1, double r0, double r1, double to) {
    // integral of the linear interpolant from r0 to "to" (r0 <= to <= r1)
    if (r1 == r0) return 0.0;
    const double t = (to - r0) / (r1 - r0);
    const double vt = v0 + t * (v1 - v0);
    return 0.5 * (v0 + vt) * (to - r0);
  };
  if (r < verts_.front()[0]) {
    const double d = r - verts_.front()[0];
    return pl_primitive_at_verts_.front() + verts_.front()[1] * d + 0.5 * slope_left_ * d * d;
  }
  if (r > verts_.back()[0]) {
    const double d = r - verts_.back()[0];
    return pl_primitive_at_verts_.back() + verts_.back()[1] * d + 0.5 * slope_right_ * d * d;
  }
  for (std::size_t k = 0; k + 1 < verts_.size(); ++k) {
    if (verts_[k][0] <= r && r <= verts_[k + 1][0]) {
      return pl_primitive_at_verts_[k] +
             seg_integral(verts_[k][1], verts_[k + 1][1], verts_[k][0], verts_[k + 1][0], r);
    }
  }
  return pl_primitive_at_verts_.back();
}

double MonotoneGraph::conjugate(double s) const {
  if (!std::isfinite(s)) throw std::invalid_argument("conjugate: s must be finite");
  switch (kind_) {
    case Kind::Zero: return s == 0 ? 0.0 : kInf;
    case Kind::Linear:
      if (param_ == 0) return s == 0 ? 0.0 : kInf;
      return 0.5 * s * s / param_;
    case Kind::Power: {
      const double q = (param_ + 1) / param_;
      return std::pow(std::abs(s), q) / q;
    }
    case Kind::Sinh: {
      // maximizer r = asinh(s); value s*asinh(s) - sqrt(1+s^2) + 1
      const double v = s * std::asinh(s) - std::sqrt(1 + s * s) + 1.0;
      if (!std::isfinite(v)) {
        throw std::runtime_error("conjugate: evaluation saturated for sinh graph at s=" +
                                 std::to_string(s));
      }
      return v;
    }
    case Kind::PiecewiseLinear: return pl_conjugate(s);
  }
  return 0.0;
}

double MonotoneGraph::pl_conjugate(double s) const {
  // j*(s) = r s - j(r) for any r with s in beta(r); invert the graph
  if (s < verts_.front()[1]) {
    if (slope_left_ == 0) return kInf;
    const double r = verts_.front()[0] + (s - verts_.front()[1]) / slope_left_;
    return r * s - pl_primitive(r);
  }
  if (s > verts_.back()[1]) {
    if (slope_right_ == 0) return kInf;
    const double r = verts_.back()[0] + (s - verts_.back()[1]) / slope_right_;
    return r * s - pl_primitive(r);
  }
  for (std::size_t k = 0; k < verts_.size(); ++k) {
    const bool within_value =
        verts_[k][1] >= s || (k + 1 < verts_.size() && verts_[k + 1][1] >= s);
    if (!within_value) continue;
    if (verts_[k][1] >= s) {
      return verts_[k][0] * s - pl_primitive(verts_[k][0]);
    }
    const double v0 = verts_[k][1], v1 = verts_[k + 1][1];
    const double r0 = verts_[k][0], r1 = verts_[k + 1][0];
    if (v1 == v0) continue;  // flat segment, s not attained here
    const double r = r0 + (s - v0) / (v1 - v0) * (r1 - r0);
    return r * s - pl_primitive(r);
  }
  return verts_.back()[0] * s - pl_primitive(verts_.back()[0]);
}

double MonotoneGraph::growth_scale(double r) const {
  switch (kind_) {
    case Kind::Zero: return 1.0;
    case Kind::Linear: return 1.0 + param_ * std::abs(r);
    case Kind::Power: return 1.0 + std::pow(std::abs(r), param_);
    case Kind::Sinh: return 1.0 + std::abs(std::sinh(r));
    case Kind::PiecewiseLinear:
      return 1.0 + std::max(std::abs(value_lo(r)), std::abs(value_hi(r)));
  }
  return 1.0;
}

}  // namespace dynabc
