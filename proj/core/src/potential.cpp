#include "dynabc/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dynabc {

Perturbation Perturbation::zero() { return affine(0, 0); }

Perturbation Perturbation::affine(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("Perturbation::affine: coefficients must be finite");
  }
  Perturbation p;
  p.affine_ = true;
  p.a_ = a;
  p.b_ = b;
  p.lipschitz_ = std::abs(a);
  return p;
}

Perturbation Perturbation::piecewise_linear(std::vector<std::array<double, 2>> points) {
  if (points.size() < 2) {
    throw std::invalid_argument("Perturbation::piecewise_linear: needs at least two points");
  }
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    if (!(points[k][0] < points[k + 1][0])) {
      throw std::invalid_argument(
          "Perturbation::piecewise_linear: abscissae must be strictly increasing");
    }
  }
  Perturbation p;
  p.affine_ = false;
  p.pts_ = std::move(points);
  p.lipschitz_ = 0;
  for (std::size_t k = 0; k + 1 < p.pts_.size(); ++k) {
    const double slope =
        (p.pts_[k + 1][1] - p.pts_[k][1]) / (p.pts_[k + 1][0] - p.pts_[k][0]);
    p.lipschitz_ = std::max(p.lipschitz_, std::abs(slope));
  }
  // primitive relative to the first point, then shifted so G(0) = 0
  p.prim_at_pts_.assign(p.pts_.size(), 0.0);
  for (std::size_t k = 0; k + 1 < p.pts_.size(); ++k) {
    const double dr = p.pts_[k + 1][0] - p.pts_[k][0];
    p.prim_at_pts_[k + 1] =
        p.prim_at_pts_[k] + 0.5 * (p.pts_[k][1] + p.pts_[k + 1][1]) * dr;
  }
  const double g0 = p.primitive(0.0);
  for (double& v : p.prim_at_pts_) v -= g0;
  return p;
}

double Perturbation::operator()(double r) const {
  if (affine_) return a_ * r + b_;
  if (r <= pts_.front()[0]) {
    const double s = (pts_[1][1] - pts_[0][1]) / (pts_[1][0] - pts_[0][0]);
    return pts_.front()[1] + s * (r - pts_.front()[0]);
  }
  if (r >= pts_.back()[0]) {
    const auto& a = pts_[pts_.size() - 2];
    const auto& b = pts_.back();
    const double s = (b[1] - a[1]) / (b[0] - a[0]);
    return pts_.back()[1] + s * (r - pts_.back()[0]);
  }
  for (std::size_t k = 0; k + 1 < pts_.size(); ++k) {
    if (pts_[k][0] <= r && r <= pts_[k + 1][0]) {
      const double t = (r - pts_[k][0]) / (pts_[k + 1][0] - pts_[k][0]);
      return pts_[k][1] + t * (pts_[k + 1][1] - pts_[k][1]);
    }
  }
  return pts_.back()[1];
}

double Perturbation::primitive(double r) const {
  if (affine_) return 0.5 * a_ * r * r + b_ * r;
  auto seg = [&](std::size_t k, double from, double to) {
    const double v0 = (*this)(from), v1 = (*this)(to);
    (void)k;
    return 0.5 * (v0 + v1) * (to - from);
  };
  if (r <= pts_.front()[0]) {
    return prim_at_pts_.front() + seg(0, pts_.front()[0], r);
  }
  if (r >= pts_.back()[0]) {
    return prim_at_pts_.back() + seg(0, pts_.back()[0], r);
  }
  for (std::size_t k = 0; k + 1 < pts_.size(); ++k) {
    if (pts_[k][0] <= r && r <= pts_[k + 1][0]) {
      return prim_at_pts_[k] + seg(k, pts_[k][0], r);
    }
  }
  return prim_at_pts_.back();
}

std::string Perturbation::describe() const {
  std::ostringstream os;
  if (affine_) {
    os << "affine:" << a_ << "," << b_;
  } else {
    os << "pl";
    for (const auto& p : pts_) os << ":" << p[0] << "," << p[1];
  }
  return os.str();
}

double PotentialPair::moreau(double r, double lambda) const {
  const double s = beta.resolvent(r, lambda);
  return (r - s) * (r - s) / (2 * lambda) + beta.primitive(s);
}

double PotentialPair::fenchel_gap(double r, double lambda) const {
  const double s = beta.resolvent(r, lambda);
  const double xi = (r - s) / lambda;
  const double jstar = beta.conjugate(xi);
  if (!std::isfinite(jstar)) {
    // xi lies in beta(s), so the conjugate is finite in exact arithmetic;
    // an infinite value can only come from roundoff pushing xi past the
    // range of a bounded graph
    return std::abs(beta.primitive(s) - xi * s);
  }
  return std::abs(beta.primitive(s) + jstar - xi * s);
}

double GammaOperator::lipschitz_perturbation() const {
  return std::max(bulk.pi.lipschitz(), boundary.pi.lipschitz());
}

HypothesisReport GammaOperator::check_hypothesis() const {
  HypothesisReport rep;
  rep.hypothesis = hypothesis;
  rep.finite = true;

  std::vector<double> samples;
  for (int k = 0; k <= 60; ++k) {
    const double r = std::pow(10.0, 6.0 * k / 60.0);  // log-spaced in [1, 1e6]
    samples.push_back(r);
    samples.push_back(-r);
  }

  double c = 0, c_exp = 0;
  double sym_b = 0, sym_g = 0;
  for (double r : samples) {
    const double jb = bulk.j(r);
    const double jg = boundary.j(r);
    if (!std::isfinite(jb) || !std::isfinite(jg)) {
      rep.finite = false;
      continue;
    }
    switch (hypothesis) {
      case GrowthHypothesis::H1:
        c = std::max(c, jb / (1 + jg));
        c = std::max(c, jg / (1 + jb));
        break;
      case GrowthHypothesis::H2:
        // j controlled by j_Gamma; j_Gamma polynomially bounded
        c = std::max(c, jb / (1 + jg));
        if (std::abs(r) > 10 && jg > 1) {
          c_exp = std::max(c_exp, std::log(jg) / std::log(std::abs(r)));
        }
        break;
      case GrowthHypothesis::H3:
        // j_Gamma controlled by j; j polynomially bounded
        c = std::max(c, jg / (1 + jb));
        if (std::abs(r) > 10 && jb > 1) {
          c_exp = std::max(c_exp, std::log(jb) / std::log(std::abs(r)));
        }
        break;
    }
    const double jb_m = bulk.j(-r);
    const double jg_m = boundary.j(-r);
    if (jb_m > 0) sym_b = std::max(sym_b, jb / jb_m);
    if (jg_m > 0) sym_g = std::max(sym_g, jg / jg_m);
  }
  if (!std::isfinite(c) || (hypothesis != GrowthHypothesis::H1 && !std::isfinite(c_exp))) {
    rep.finite = false;
  }
  rep.fitted_constant = c;
  rep.fitted_exponent = c_exp;
  rep.symmetry_ratio_bulk = sym_b;
  rep.symmetry_ratio_boundary = sym_g;

  std::ostringstream os;
  os << "C=" << c;
  if (hypothesis != GrowthHypothesis::H1) os << " p=" << c_exp;
  rep.detail = os.str();
  return rep;
}

}  // namespace dynabc
