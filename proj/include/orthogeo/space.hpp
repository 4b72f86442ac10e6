#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "orthogeo/convex_body.hpp"
#include "orthogeo/gauge.hpp"
#include "orthogeo/point.hpp"
#include "orthogeo/rng.hpp"

namespace orthogeo {

class Space;

/// Thrown when a point lies outside the admissible domain of a space.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Per-segment precomputed data owned by the space that built the segment.
struct SegmentCache {
  std::array<double, 6> v{};
};

/// Constant-speed geodesic t in [0,1] -> M. Holds a non-owning pointer to its
/// space; segments must not outlive the SpaceHandle that produced them.
class GeodesicSegment {
public:
  GeodesicSegment(const Space* space, Point x, Point y, double length, SegmentCache cache = {})
      : space_(space), x_(x), y_(y), length_(length), cache_(cache) {}

  Point operator()(double t) const;

  const Space& space() const { return *space_; }
  const Point& start() const { return x_; }
  const Point& end() const { return y_; }
  double length() const { return length_; }
  const SegmentCache& cache() const { return cache_; }
  bool degenerate() const { return length_ == 0.0; }

  /// Same geodesic traversed backwards.
  GeodesicSegment reversed() const;

private:
  const Space* space_;
  Point x_, y_;
  double length_;
  SegmentCache cache_;
};

/// Immutable model geodesic space.
class Space {
public:
  enum class Kind { euclidean, normed_plane, hilbert, klein, sphere_cap, product };

  virtual ~Space() = default;

  virtual Kind kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual bool admissible(const Point& x) const = 0;
  /// Region random points are drawn from; a subset of the admissible domain.
  virtual bool in_sampling_region(const Point& x) const = 0;
  virtual Point random_point(RandomStream& rng) const = 0;
  /// Typical extent of the sampling region, used for step sizes and product factors.
  virtual double sampling_scale() const = 0;
  /// Gauge of the tangent-free model when the space is itself a normed plane.
  virtual const NormGauge* gauge() const { return nullptr; }

  /// Moves one coordinate by `step`, re-projecting onto the domain where needed.
  /// Empty when the result leaves the sampling region.
  virtual std::optional<Point> perturb(const Point& x, std::size_t coord, double step) const {
    Point y = x;
    y[coord] += step;
    if (!in_sampling_region(y)) return std::nullopt;
    return y;
  }

  const std::string& name() const { return name_; }

  double distance(const Point& x, const Point& y) const {
    require(x);
    require(y);
    return raw_distance(x, y);
  }

  GeodesicSegment geodesic(const Point& x, const Point& y) const {
    require(x);
    require(y);
    if (x == y) return GeodesicSegment(this, x, y, 0.0);
    return raw_geodesic(x, y);
  }

  void require(const Point& x) const {
    if (x.dim() != dim()) throw DomainError("point " + to_string(x) + " has wrong dimension for " + name_);
    if (!x.finite() || !admissible(x)) throw DomainError("point " + to_string(x) + " outside the domain of " + name_);
  }

  /// Unchecked evaluation at t in [0,1]; endpoints are reproduced exactly.
  virtual Point evaluate(const GeodesicSegment& seg, double t) const = 0;

  virtual double raw_distance(const Point& x, const Point& y) const = 0;
  virtual GeodesicSegment raw_geodesic(const Point& x, const Point& y) const = 0;

protected:
  explicit Space(std::string name) : name_(std::move(name)) {}

private:
  std::string name_;
};

inline Point GeodesicSegment::operator()(double t) const {
  if (t <= 0.0 || length_ == 0.0) return x_;
  if (t >= 1.0) return y_;
  return space_->evaluate(*this, t);
}

inline GeodesicSegment GeodesicSegment::reversed() const {
  if (length_ == 0.0) return GeodesicSegment(space_, y_, x_, 0.0);
  return space_->raw_geodesic(y_, x_);
}

/// Shared immutable handle to a model space.
class SpaceHandle {
public:
  SpaceHandle() = default;
  explicit SpaceHandle(std::shared_ptr<const Space> s) : s_(std::move(s)) {}

  const Space& operator*() const { return *s_; }
  const Space* operator->() const { return s_.get(); }
  const Space* get() const { return s_.get(); }
  explicit operator bool() const { return static_cast<bool>(s_); }

private:
  std::shared_ptr<const Space> s_;
};

// ---------------------------------------------------------------------------
// Linear spaces

namespace detail {

inline constexpr double kPlaneBox = 10.0;
inline constexpr double kStandoff = 1e-3;
inline constexpr double kBoundaryReject = 1e-10;

class LinearSpace : public Space {
public:
  double sampling_scale() const override { return kPlaneBox; }
  bool admissible(const Point&) const override { return true; }
  bool in_sampling_region(const Point& x) const override {
    for (double c : x.coords())
      if (!(std::abs(c) <= kPlaneBox)) return false;
    return true;
  }
  Point random_point(RandomStream& rng) const override {
    Point p(dim());
    for (auto& c : p.coords()) c = rng.uniform(-kPlaneBox, kPlaneBox);
    return p;
  }
  Point evaluate(const GeodesicSegment& seg, double t) const override { return lerp(seg.start(), seg.end(), t); }
  GeodesicSegment raw_geodesic(const Point& x, const Point& y) const override {
    return GeodesicSegment(this, x, y, raw_distance(x, y));
  }

protected:
  using Space::Space;
};

}  // namespace detail

class EuclideanSpace final : public detail::LinearSpace {
public:
  EuclideanSpace(std::size_t n, std::string name) : LinearSpace(std::move(name)), n_(n) {
    if (n == 0 || n >= kMaxDim) throw std::invalid_argument("euclidean dimension out of range");
  }
  Kind kind() const override { return Kind::euclidean; }
  std::size_t dim() const override { return n_; }
  const NormGauge* gauge() const override { return n_ == 2 ? &gauge_ : nullptr; }
  double raw_distance(const Point& x, const Point& y) const override { return euclidean_norm(y - x); }

private:
  std::size_t n_;
  NormGauge gauge_ = NormGauge::euclidean();
};

class NormedPlane final : public detail::LinearSpace {
public:
  NormedPlane(NormGauge g, std::string name) : LinearSpace(std::move(name)), gauge_(std::move(g)) {}
  Kind kind() const override { return Kind::normed_plane; }
  std::size_t dim() const override { return 2; }
  const NormGauge* gauge() const override { return &gauge_; }
  double raw_distance(const Point& x, const Point& y) const override { return gauge_(y - x); }

private:
  NormGauge gauge_;
};

// ---------------------------------------------------------------------------
// Chord geometries

/// Hilbert geometry of a planar convex body: half the log of the cross-ratio
/// of x, y and the two boundary points of their chord. Chords are geodesics.
/// The Klein disk reuses the same chord code with a closed-form distance.
class HilbertSpace final : public Space {
public:
  HilbertSpace(ConvexBody body, std::string name, bool klein = false)
      : Space(std::move(name)), body_(std::move(body)), klein_(klein) {
    bbox_ = body_.bounding_box();
  }

  Kind kind() const override { return klein_ ? Kind::klein : Kind::hilbert; }
  std::size_t dim() const override { return 2; }
  const ConvexBody& body() const { return body_; }

  bool admissible(const Point& x) const override { return body_.boundary_distance(x) > detail::kBoundaryReject; }
  bool in_sampling_region(const Point& x) const override {
    return body_.boundary_distance(x) >= detail::kStandoff;
  }
  double sampling_scale() const override { return 1.0; }

  Point random_point(RandomStream& rng) const override {
    for (;;) {
      Point p{rng.uniform(bbox_[0], bbox_[1]), rng.uniform(bbox_[2], bbox_[3])};
      if (in_sampling_region(p)) return p;
    }
  }

  double raw_distance(const Point& x, const Point& y) const override {
    if (x == y) return 0.0;
    if (klein_) return klein_distance(x, y);
    // Fixed argument order keeps the computed distance exactly symmetric.
    if (std::pair(y[0], y[1]) < std::pair(x[0], x[1])) return raw_distance(y, x);
    const auto [back, fwd] = body_.chord(x, y - x);
    // Cross-ratio (|a-y||b-x|)/(|a-x||b-y|) in units of |y-x|.
    return 0.5 * (std::log1p(1.0 / back) + std::log1p(1.0 / (fwd - 1.0)));
  }

  GeodesicSegment raw_geodesic(const Point& x, const Point& y) const override {
    const Point u = y - x;
    const auto [back, fwd] = body_.chord(x, u);
    const Point a = x - back * u;
    const Point b = x + fwd * u;
    SegmentCache c;
    c.v = {a[0], a[1], b[0], b[1], 0.5 * std::log(back / fwd), 0.5 * std::log((back + 1.0) / (fwd - 1.0))};
    return GeodesicSegment(this, x, y, raw_distance(x, y), c);
  }

  Point evaluate(const GeodesicSegment& seg, double t) const override {
    const auto& c = seg.cache().v;
    const double phi = c[4] + t * (c[5] - c[4]);
    const double sigma = 1.0 / (1.0 + std::exp(-2.0 * phi));
    return Point{c[0] + sigma * (c[2] - c[0]), c[1] + sigma * (c[3] - c[1])};
  }

  /// Hyperbolic distance in the Klein model, via the Poincare disk formula
  /// 2 asinh(|p-q| / sqrt((1-|p|^2)(1-|q|^2))), accurate for nearby points.
  static double klein_distance(const Point& x, const Point& y) {
    const auto to_poincare = [](const Point& k) {
      const double r2 = dot(k, k);
      return (1.0 / (1.0 + std::sqrt((1.0 - r2)))) * k;
    };
    const Point p = to_poincare(x);
    const Point q = to_poincare(y);
    const double denom = std::sqrt((1.0 - dot(p, p)) * (1.0 - dot(q, q)));
    return 2.0 * std::asinh(euclidean_norm(p - q) / denom);
  }

private:
  ConvexBody body_;
  bool klein_;
  std::array<double, 4> bbox_{};
};

// ---------------------------------------------------------------------------
// Spherical cap

/// Closed cap of angular radius R < pi/2 around the north pole of the unit
/// sphere, points stored as unit 3-vectors. Geodesics are great-circle arcs.
class SphereCap final : public Space {
public:
  SphereCap(double radius, std::string name) : Space(std::move(name)), radius_(radius) {
    if (!(radius > 0.0) || !(radius < std::numbers::pi / 2)) throw std::invalid_argument("cap radius must lie in (0, pi/2)");
  }

  Kind kind() const override { return Kind::sphere_cap; }
  std::size_t dim() const override { return 3; }
  double radius() const { return radius_; }
  double sampling_scale() const override { return radius_; }

  static Point center() { return Point{0.0, 0.0, 1.0}; }

  static double polar_angle(const Point& x) { return std::atan2(std::hypot(x[0], x[1]), x[2]); }

  bool admissible(const Point& x) const override {
    return std::abs(euclidean_norm(x) - 1.0) <= 1e-9 && polar_angle(x) <= radius_ + 1e-12;
  }
  bool in_sampling_region(const Point& x) const override {
    return admissible(x) && polar_angle(x) <= radius_ - detail::kStandoff;
  }

  Point random_point(RandomStream& rng) const override {
    // Area-uniform: the height is uniform on the cap.
    const double z = rng.uniform(std::cos(radius_ - detail::kStandoff), 1.0);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Point{r * std::cos(phi), r * std::sin(phi), z};
  }

  std::optional<Point> perturb(const Point& x, std::size_t coord, double step) const override {
    Point y = x;
    y[coord] += step;
    y = (1.0 / euclidean_norm(y)) * y;
    if (!in_sampling_region(y)) return std::nullopt;
    return y;
  }

  double raw_distance(const Point& x, const Point& y) const override {
    const Point cr{x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]};
    return std::atan2(euclidean_norm(cr), dot(x, y));
  }

  GeodesicSegment raw_geodesic(const Point& x, const Point& y) const override {
    const double theta = raw_distance(x, y);
    SegmentCache c;
    c.v[0] = theta;
    c.v[1] = std::sin(theta);
    return GeodesicSegment(this, x, y, theta, c);
  }

  Point evaluate(const GeodesicSegment& seg, double t) const override {
    const double theta = seg.cache().v[0];
    Point p;
    if (theta < 1e-9) {
      p = lerp(seg.start(), seg.end(), t);
    } else {
      const double s = seg.cache().v[1];
      p = (std::sin((1.0 - t) * theta) / s) * seg.start() + (std::sin(t * theta) / s) * seg.end();
    }
    return (1.0 / euclidean_norm(p)) * p;
  }

private:
  double radius_;
};

// ---------------------------------------------------------------------------
// L2 product with the real line

/// M x_2 R with metric sqrt(d(x,y)^2 + |t-s|^2); the R factor is the last coordinate.
class ProductSpace final : public Space {
public:
  ProductSpace(SpaceHandle base, std::string name) : Space(std::move(name)), base_(std::move(base)) {
    if (base_->dim() + 1 > kMaxDim) throw std::invalid_argument("product nesting exceeds supported dimension");
  }

  Kind kind() const override { return Kind::product; }
  std::size_t dim() const override { return base_->dim() + 1; }
  const SpaceHandle& base() const { return base_; }
  double sampling_scale() const override { return base_->sampling_scale(); }

  bool admissible(const Point& x) const override { return base_->admissible(x.truncated()); }
  bool in_sampling_region(const Point& x) const override {
    return base_->in_sampling_region(x.truncated()) && std::abs(x[dim() - 1]) <= sampling_scale();
  }
  Point random_point(RandomStream& rng) const override {
    const Point b = base_->random_point(rng);
    return b.extended(rng.uniform(-sampling_scale(), sampling_scale()));
  }

  std::optional<Point> perturb(const Point& x, std::size_t coord, double step) const override {
    const std::size_t last = dim() - 1;
    if (coord == last) {
      Point y = x;
      y[last] += step;
      if (!in_sampling_region(y)) return std::nullopt;
      return y;
    }
    auto b = base_->perturb(x.truncated(), coord, step);
    if (!b) return std::nullopt;
    return b->extended(x[last]);
  }

  double raw_distance(const Point& x, const Point& y) const override {
    const std::size_t last = dim() - 1;
    const double d = base_->raw_distance(x.truncated(), y.truncated());
    const double h = x[last] - y[last];
    return std::sqrt(d * d + h * h);
  }

  GeodesicSegment raw_geodesic(const Point& x, const Point& y) const override {
    const Point bx = x.truncated();
    const Point by = y.truncated();
    SegmentCache c;
    if (!(bx == by)) c = base_->raw_geodesic(bx, by).cache();
    return GeodesicSegment(this, x, y, raw_distance(x, y), c);
  }

  Point evaluate(const GeodesicSegment& seg, double t) const override {
    const std::size_t last = dim() - 1;
    const Point bx = seg.start().truncated();
    const Point by = seg.end().truncated();
    const double h = seg.start()[last] + t * (seg.end()[last] - seg.start()[last]);
    if (bx == by) return bx.extended(h);
    const GeodesicSegment base_seg(base_.get(), bx, by, base_->raw_distance(bx, by), seg.cache());
    return base_->evaluate(base_seg, t).extended(h);
  }

private:
  SpaceHandle base_;
};

// ---------------------------------------------------------------------------
// Free-function surface

inline double distance(const SpaceHandle& s, const Point& x, const Point& y) { return s->distance(x, y); }

inline GeodesicSegment geodesic(const SpaceHandle& s, const Point& x, const Point& y) { return s->geodesic(x, y); }

inline Point midpoint(const SpaceHandle& s, const Point& x, const Point& y) { return s->geodesic(x, y)(0.5); }

inline Point random_point(const SpaceHandle& s, RandomStream& rng) { return s->random_point(rng); }

inline double gauge_eval(const NormGauge& g, const Point& v) { return g(v); }

inline SpaceHandle make_euclidean(std::size_t n) {
  return SpaceHandle(std::make_shared<EuclideanSpace>(n, "euclidean:" + std::to_string(n)));
}

inline SpaceHandle make_normed_plane(NormGauge g, std::string name) {
  return SpaceHandle(std::make_shared<NormedPlane>(std::move(g), std::move(name)));
}

inline SpaceHandle make_hilbert(ConvexBody body, std::string name) {
  return SpaceHandle(std::make_shared<HilbertSpace>(std::move(body), std::move(name)));
}

inline SpaceHandle make_klein() {
  return SpaceHandle(std::make_shared<HilbertSpace>(ConvexBody::ellipse(Point{0.0, 0.0}, 1.0, 1.0), "klein", true));
}

inline SpaceHandle make_sphere_cap(double radius, std::string name) {
  return SpaceHandle(std::make_shared<SphereCap>(radius, std::move(name)));
}

inline SpaceHandle product_space(const SpaceHandle& base) {
  return SpaceHandle(std::make_shared<ProductSpace>(base, "prod(" + base->name() + ")"));
}

}  // namespace orthogeo
