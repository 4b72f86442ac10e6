#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "orthogeo/point.hpp"

namespace orthogeo {

/// Minkowski gauge of a centrally symmetric convex body in the plane
/// (or of the round ball in any dimension).
///
/// `radon(p)` glues the l^p unit circle on the quadrants where both
/// coordinates share a sign to the dual l^q circle (1/p + 1/q = 1) on the
/// other two quadrants. Both arcs pass through (+-1,0) and (0,+-1) with
/// vertical/horizontal tangents there, so the glued curve is C^1 and strictly
/// convex, and Birkhoff orthogonality in the resulting plane is symmetric.
class NormGauge {
public:
  enum class Kind { euclidean, lp, radon, polygon };

  static NormGauge euclidean() { return NormGauge(Kind::euclidean, 2.0); }

  static NormGauge lp(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp exponent must be finite and > 1");
    return NormGauge(Kind::lp, p);
  }

  static NormGauge radon(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("radon exponent must be finite and > 1");
    return NormGauge(Kind::radon, p);
  }

  /// Polygonal unit ball. Vertices counterclockwise, centrally symmetric.
  static NormGauge polygon(std::vector<Point> vertices) {
    const std::size_t n = vertices.size();
    if (n < 4 || n % 2 != 0) throw std::invalid_argument("polygon norm needs an even number (>= 4) of vertices");
    NormGauge g(Kind::polygon, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = vertices[i];
      const Point& b = vertices[(i + 1) % n];
      const Point& opp = vertices[(i + n / 2) % n];
      if (a.dim() != 2) throw std::invalid_argument("polygon norm vertices must be planar");
      if (std::abs(a[0] + opp[0]) > 1e-12 || std::abs(a[1] + opp[1]) > 1e-12)
        throw std::invalid_argument("polygon norm must be centrally symmetric");
      // Outward normal of edge a->b for a counterclockwise polygon.
      const double nx = b[1] - a[1];
      const double ny = a[0] - b[0];
      const double h = nx * a[0] + ny * a[1];
      if (!(h > 0.0)) throw std::invalid_argument("polygon norm must contain the origin in its interior, counterclockwise");
      g.facets_.push_back({nx / h, ny / h});
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = vertices[i];
      const Point& b = vertices[(i + 1) % n];
      const Point& c = vertices[(i + 2) % n];
      const double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
      if (!(cross > 0.0)) throw std::invalid_argument("polygon norm vertices are not in strictly convex position");
    }
    g.vertices_ = std::move(vertices);
    return g;
  }

  Kind kind() const { return kind_; }
  double exponent() const { return p_; }
  double dual_exponent() const { return p_ / (p_ - 1.0); }
  const std::vector<Point>& vertices() const { return vertices_; }

  double operator()(const Point& v) const {
    if (!v.finite()) throw std::domain_error("gauge of non-finite vector " + to_string(v));
    if (kind_ != Kind::euclidean && v.dim() != 2) throw std::invalid_argument("planar gauge applied to non-planar vector");
    switch (kind_) {
      case Kind::euclidean: return euclidean_norm(v);
      case Kind::lp: return lp_norm(v, p_);
      case Kind::radon:
        return (v[0] * v[1] >= 0.0) ? lp_norm(v, p_) : lp_norm(v, dual_exponent());
      case Kind::polygon: {
        double best = 0.0;
        for (const auto& f : facets_) best = std::max(best, f[0] * v[0] + f[1] * v[1]);
        return best;
      }
    }
    return 0.0;
  }

  /// Boundary point of the unit ball in direction angle `theta`.
  Point unit_boundary(double theta) const {
    const Point u{std::cos(theta), std::sin(theta)};
    return (1.0 / (*this)(u)) * u;
  }

  static double lp_norm(const Point& v, double p) {
    double scale = 0.0;
    for (double c : v.coords()) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return 0.0;
    const double inv = 1.0 / scale;
    double s = 0.0;
    if (p == 4.0) {
      for (double c : v.coords()) {
        const double r = c * inv;
        s += (r * r) * (r * r);
      }
      return scale * std::sqrt(std::sqrt(s));
    }
    for (double c : v.coords()) s += std::pow(std::abs(c) * inv, p);
    return scale * std::pow(s, 1.0 / p);
  }

private:
  NormGauge(Kind k, double p) : kind_(k), p_(p) {}

  Kind kind_;
  double p_;
  std::vector<std::array<double, 2>> facets_;
  std::vector<Point> vertices_;
};

}  // namespace orthogeo
