#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "orthogeo/point.hpp"

namespace orthogeo {

/// Bounded open convex planar domain: an axis-aligned ellipse or a convex
/// polygon given counterclockwise.
class ConvexBody {
public:
  enum class Kind { ellipse, polygon };

  static ConvexBody ellipse(Point center, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse axes must be positive");
    ConvexBody body(Kind::ellipse);
    body.center_ = center;
    body.axes_ = {a, b};
    return body;
  }

  static ConvexBody polygon(std::vector<Point> vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    ConvexBody body(Kind::polygon);
    Point c{0.0, 0.0};
    for (const auto& v : vertices) c = c + v;
    body.center_ = (1.0 / static_cast<double>(n)) * c;
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = vertices[i];
      const Point& b = vertices[(i + 1) % n];
      const Point& nxt = vertices[(i + 2) % n];
      const double cross = (b[0] - a[0]) * (nxt[1] - b[1]) - (b[1] - a[1]) * (nxt[0] - b[0]);
      if (!(cross > 0.0)) throw std::invalid_argument("polygon vertices must be counterclockwise and in convex position");
      double nx = b[1] - a[1];
      double ny = a[0] - b[0];
      const double len = std::hypot(nx, ny);
      nx /= len;
      ny /= len;
      body.edges_.push_back({nx, ny, nx * a[0] + ny * a[1]});
    }
    body.vertices_ = std::move(vertices);
    if (!(body.boundary_distance(body.center_) > 0.0)) throw std::invalid_argument("degenerate polygon");
    return body;
  }

  Kind kind() const { return kind_; }
  const Point& center() const { return center_; }
  const std::vector<Point>& vertices() const { return vertices_; }
  double semi_axis_x() const { return axes_[0]; }
  double semi_axis_y() const { return axes_[1]; }

  /// Lower bound on the Euclidean distance from x to the boundary; negative
  /// outside. Exact for polygons, a radial proxy (scaled) for ellipses.
  double boundary_distance(const Point& x) const {
    if (kind_ == Kind::polygon) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& e : edges_) m = std::min(m, e.h - (e.nx * x[0] + e.ny * x[1]));
      return m;
    }
    const double u = (x[0] - center_[0]) / axes_[0];
    const double v = (x[1] - center_[1]) / axes_[1];
    return (1.0 - std::hypot(u, v)) * std::min(axes_[0], axes_[1]);
  }

  /// Axis-aligned bounding box {xmin, xmax, ymin, ymax}.
  std::array<double, 4> bounding_box() const {
    if (kind_ == Kind::ellipse)
      return {center_[0] - axes_[0], center_[0] + axes_[0], center_[1] - axes_[1], center_[1] + axes_[1]};
    std::array<double, 4> bb{1e300, -1e300, 1e300, -1e300};
    for (const auto& v : vertices_) {
      bb[0] = std::min(bb[0], v[0]);
      bb[1] = std::max(bb[1], v[0]);
      bb[2] = std::min(bb[2], v[1]);
      bb[3] = std::max(bb[3], v[1]);
    }
    return bb;
  }

  /// Exit parameters of the line x + tau*u (u need not be normalized):
  /// returns {back, forward} with x - back*u and x + forward*u on the boundary.
  std::pair<double, double> chord(const Point& x, const Point& u) const {
    if (kind_ == Kind::polygon) {
      double fwd = std::numeric_limits<double>::infinity();
      double back = std::numeric_limits<double>::infinity();
      for (const auto& e : edges_) {
        const double rate = e.nx * u[0] + e.ny * u[1];
        const double slack = e.h - (e.nx * x[0] + e.ny * x[1]);
        if (rate > 0.0) fwd = std::min(fwd, slack / rate);
        else if (rate < 0.0) back = std::min(back, slack / -rate);
      }
      return {back, fwd};
    }
    // |p + tau v|^2 = 1 in normalized coordinates; roots have opposite signs.
    const double px = (x[0] - center_[0]) / axes_[0];
    const double py = (x[1] - center_[1]) / axes_[1];
    const double vx = u[0] / axes_[0];
    const double vy = u[1] / axes_[1];
    const double a = vx * vx + vy * vy;
    const double b = px * vx + py * vy;
    const double c = (px - 1.0) * (px + 1.0) + py * py;
    const double disc = std::sqrt(b * b - a * c);
    const double q = -(b + std::copysign(disc, b));
    const double r1 = q / a;
    const double r2 = c / q;
    return {-std::min(r1, r2), std::max(r1, r2)};
  }

private:
  struct Edge {
    double nx, ny, h;
  };

  explicit ConvexBody(Kind k) : kind_(k) {}

  Kind kind_;
  Point center_{0.0, 0.0};
  std::array<double, 2> axes_{1.0, 1.0};
  std::vector<Point> vertices_;
  std::vector<Edge> edges_;
};

}  // namespace orthogeo
