#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

namespace orthogeo {

/// Largest coordinate count any model space uses (euclidean:n plus nested products).
inline constexpr std::size_t kMaxDim = 8;

/// Fixed-capacity coordinate vector. Points never allocate so that the inner
/// distance loops stay cheap.
class Point {
public:
  Point() = default;

  explicit Point(std::size_t dim) : n_(dim) {
    if (dim > kMaxDim) throw std::length_error("point dimension exceeds kMaxDim");
  }

  Point(std::initializer_list<double> xs) : Point(xs.size()) {
    std::copy(xs.begin(), xs.end(), c_.begin());
  }

  explicit Point(std::span<const double> xs) : Point(xs.size()) {
    std::copy(xs.begin(), xs.end(), c_.begin());
  }

  std::size_t dim() const { return n_; }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }

  std::span<const double> coords() const { return {c_.data(), n_}; }
  std::span<double> coords() { return {c_.data(), n_}; }

  /// Copy with one extra trailing coordinate.
  Point extended(double last) const {
    Point p(n_ + 1);
    std::copy_n(c_.begin(), n_, p.c_.begin());
    p.c_[n_] = last;
    return p;
  }

  /// Copy without the trailing coordinate.
  Point truncated() const {
    Point p(n_ - 1);
    std::copy_n(c_.begin(), n_ - 1, p.c_.begin());
    return p;
  }

  bool finite() const {
    return std::all_of(c_.begin(), c_.begin() + n_, [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const Point& a, const Point& b) {
    return a.n_ == b.n_ && std::equal(a.c_.begin(), a.c_.begin() + a.n_, b.c_.begin());
  }

  // Unused trailing coordinates are always zero, so whole-array loops are safe.
  friend Point operator+(Point a, const Point& b) {
    for (std::size_t i = 0; i < kMaxDim; ++i) a.c_[i] += b.c_[i];
    return a;
  }
  friend Point operator-(Point a, const Point& b) {
    for (std::size_t i = 0; i < kMaxDim; ++i) a.c_[i] -= b.c_[i];
    return a;
  }
  friend Point operator*(double s, Point a) {
    for (std::size_t i = 0; i < kMaxDim; ++i) a.c_[i] *= s;
    return a;
  }

private:
  std::array<double, kMaxDim> c_{};
  std::size_t n_ = 0;
};

inline double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

inline double euclidean_norm(const Point& a) { return std::sqrt(dot(a, a)); }

/// (1-t)a + tb, exact at both ends.
inline Point lerp(const Point& a, const Point& b, double t) {
  if (t == 0.0) return a;
  if (t == 1.0) return b;
  Point p(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) p[i] = a[i] + t * (b[i] - a[i]);
  return p;
}

inline std::string to_string(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) s += ",";
    s += std::to_string(p[i]);
  }
  return s + ")";
}

}  // namespace orthogeo
