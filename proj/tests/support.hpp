#pragma once

// Hand-rolled generators and independent oracles shared by the unit tests.
// Oracles deliberately avoid the library's closed forms: chords are found by
// brute-force line/edge intersection, gauges by bisection on the unit curve,
// projections by dense grids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "orthogeo/space.hpp"
#include "orthogeo/space_parse.hpp"

namespace testing_support {

using namespace orthogeo;

/// Every family with its usual parameters, plus a few extra shapes.
inline std::vector<std::string> all_space_names() {
  return {"euclidean:1",    "euclidean:2",       "euclidean:3",       "lp:4",
          "lp:1.5",         "radon:4",           "radon:3",           "polynorm:1/0,1/1,0/1,-1/0,-1/-1,0/-1",
          "klein",          "hilbert:square",    "hilbert:triangle",  "hilbert:ellipse",
          "hilbert:ellipse:a=2,b=1", "cap:1.0",  "cap:0.7",           "prod(lp:4)",
          "prod(klein)",    "prod(prod(euclidean:1))"};
}

/// Runs `body(index, rng)` for n generated cases; the case index is part of
/// every failure message through SCOPED_TRACE at the call site.
template <class Body>
void for_cases(int n, std::uint64_t seed, Body&& body) {
  for (int i = 0; i < n; ++i) {
    RandomStream rng = RandomStream::for_task(seed, static_cast<std::uint64_t>(i));
    body(i, rng);
  }
}

namespace oracle {

/// Parameters (s_min < 0 < 1 < s_max) where x + s (y - x) meets the boundary
/// of the unit disk, from the quadratic |x + s u|^2 = 1 in long double.
inline std::pair<long double, long double> disk_chord(const Point& x, const Point& y) {
  const long double ux = y[0] - x[0], uy = y[1] - x[1];
  const long double a = ux * ux + uy * uy;
  const long double b = 2 * (x[0] * ux + x[1] * uy);
  const long double c = (long double)x[0] * x[0] + (long double)x[1] * x[1] - 1;
  const long double disc = std::sqrt(b * b - 4 * a * c);
  return {(-b - disc) / (2 * a), (-b + disc) / (2 * a)};
}

/// Hilbert distance from chord parameters: 1/2 log of the cross ratio
/// (|a-y| |b-x|) / (|a-x| |b-y|) with a = x + s0 u, b = x + s1 u.
inline double cross_ratio_distance(long double s0, long double s1) {
  return static_cast<double>(0.5L * std::log(((1 - s0) * s1) / ((-s0) * (s1 - 1))));
}

inline double klein_distance(const Point& x, const Point& y) {
  const auto [s0, s1] = disk_chord(x, y);
  return cross_ratio_distance(s0, s1);
}

/// Chord parameters through a convex polygon by intersecting the line with
/// every edge.
inline std::pair<long double, long double> polygon_chord(const std::vector<Point>& v, const Point& x, const Point& y) {
  const long double ux = y[0] - x[0], uy = y[1] - x[1];
  long double lo = -std::numeric_limits<long double>::infinity(), hi = std::numeric_limits<long double>::infinity();
  std::vector<long double> hits;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p = v[i];
    const Point& q = v[(i + 1) % v.size()];
    const long double ex = q[0] - p[0], ey = q[1] - p[1];
    const long double den = ux * ey - uy * ex;
    if (den == 0) continue;
    // x + s u = p + r e
    const long double wx = p[0] - x[0], wy = p[1] - x[1];
    const long double s = (wx * ey - wy * ex) / den;
    const long double r = (wx * uy - wy * ux) / den;
    if (r >= -1e-15L && r <= 1 + 1e-15L) hits.push_back(s);
  }
  for (long double s : hits) {
    if (s < 0) lo = std::max(lo, s);
    else hi = std::min(hi, s);
  }
  return {lo, hi};
}

inline double polygon_hilbert_distance(const std::vector<Point>& v, const Point& x, const Point& y) {
  const auto [s0, s1] = polygon_chord(v, x, y);
  return cross_ratio_distance(s0, s1);
}

/// Radon gauge: the unit curve is the l^p curve where the coordinates share a
/// sign and the l^q curve elsewhere; bisect on the radius r with v/r on the curve.
inline double radon_gauge(double p, const Point& v) {
  if (v[0] == 0.0 && v[1] == 0.0) return 0.0;
  const double q = p / (p - 1.0);
  const double e = v[0] * v[1] >= 0.0 ? p : q;
  auto inside = [&](double r) { return std::pow(std::abs(v[0]) / r, e) + std::pow(std::abs(v[1]) / r, e) <= 1.0; };
  double lo = 0.0, hi = 1.0;
  while (!inside(hi)) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? hi : lo) = mid;
  }
  return hi;
}

/// Parameter t in [lo, hi] with f(t) = 0 for increasing f, by bisection.
template <class F>
double bisect(F&& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct GridMin {
  double dist;
  double t;
};

/// Literal dense-grid minimum of t -> d(x, seg(t)) over n points.
inline GridMin dense_grid(const Space& s, const Point& x, const GeodesicSegment& seg, int n = 100000) {
  GridMin best{std::numeric_limits<double>::infinity(), 0.0};
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / (n - 1);
    const double d = s.raw_distance(x, seg(t));
    if (d < best.dist) best = {d, t};
  }
  return best;
}

struct GridOracle {
  /// Minimum over the literal grid.
  double literal;
  /// The same after local polishing.
  double polished;
};

/// Dense grid, then ternary search inside the cells around the best few grid
/// points. Grid spacing alone cannot resolve kinked minima (polygonal bodies)
/// to 1e-7, the polish can.
inline GridOracle grid_oracle(const Space& s, const Point& x, const GeodesicSegment& seg, int n = 100000) {
  std::vector<std::pair<double, int>> vals(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) vals[i] = {s.raw_distance(x, seg(static_cast<double>(i) / (n - 1))), i};
  std::partial_sort(vals.begin(), vals.begin() + 8, vals.end());
  double best = vals.front().first;
  for (int k = 0; k < 8; ++k) {
    double a = std::max(0, vals[k].second - 1) / static_cast<double>(n - 1);
    double b = std::min(n - 1, vals[k].second + 1) / static_cast<double>(n - 1);
    for (int it = 0; it < 100; ++it) {
      const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
      if (s.raw_distance(x, seg(m1)) <= s.raw_distance(x, seg(m2))) b = m2;
      else a = m1;
    }
    best = std::min(best, s.raw_distance(x, seg(0.5 * (a + b))));
  }
  return {vals.front().first, best};
}

inline double polished_grid(const Space& s, const Point& x, const GeodesicSegment& seg, int n = 100000) {
  return grid_oracle(s, x, seg, n).polished;
}

}  // namespace oracle
}  // namespace testing_support
