#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "orthogeo/space.hpp"

namespace orthogeo {

/// Two carrier geodesics from a common base point and cone parameters s, s'.
/// Schedule lambda_k = 2^-k for k in [k_min, k_max].
struct ConeProbe {
  Point base;
  GeodesicSegment gamma;
  GeodesicSegment eta;
  double s = 1.0;
  double s_prime = 1.0;
  int k_min = 4;
  int k_max = 24;

  static double lambda(int k) { return std::ldexp(1.0, -k); }
};

struct ConeValue {
  double value = 0.0;
  bool converged = false;
  /// s, s' were shrunk to fit the carriers; `value` is scaled back.
  bool rescaled = false;
  std::vector<double> lambdas;
  /// Raw quotients at the (possibly rescaled) parameters.
  std::vector<double> q;
};

namespace detail {

inline constexpr double kConeStable = 1e-7;

/// Runs the schedule q(lambda) until two successive values agree to
/// kConeStable * (1 + q); otherwise extrapolates geometrically from the last
/// three values and reports non-convergence.
template <class Q>
ConeValue run_schedule(int k_min, int k_max, Q&& quotient) {
  ConeValue cv;
  for (int k = k_min; k <= k_max; ++k) {
    const double lam = ConeProbe::lambda(k);
    cv.lambdas.push_back(lam);
    cv.q.push_back(quotient(lam));
    const std::size_t n = cv.q.size();
    if (n >= 2 && std::abs(cv.q[n - 1] - cv.q[n - 2]) < kConeStable * (1.0 + std::abs(cv.q[n - 2]))) {
      cv.value = cv.q[n - 1];
      cv.converged = true;
      return cv;
    }
  }
  const std::size_t n = cv.q.size();
  cv.value = cv.q.back();
  if (n >= 3) {
    const double d1 = cv.q[n - 2] - cv.q[n - 3];
    const double d2 = cv.q[n - 1] - cv.q[n - 2];
    double r = d2 != 0.0 ? d1 / d2 : 2.0;
    if (!(r >= 1.5 && r <= 8.0)) r = 2.0;
    cv.value = cv.q[n - 1] + d2 / (r - 1.0);
  }
  return cv;
}

inline void validate_probe(const Space& space, const ConeProbe& p) {
  space.require(p.base);
  if (p.k_min < 0 || p.k_max <= p.k_min) throw std::invalid_argument("cone schedule needs k_min < k_max");
  if (!(p.s >= 0.0) || !(p.s_prime >= 0.0)) throw std::invalid_argument("cone parameters must be >= 0");
  for (const GeodesicSegment* c : {&p.gamma, &p.eta}) {
    if (space.raw_distance(c->start(), p.base) > 1e-10) throw std::invalid_argument("carrier does not start at the base point");
    if (c->degenerate()) throw std::invalid_argument("degenerate carrier");
  }
}

}  // namespace detail

/// lim d(gamma(lambda s), eta(lambda s')) / lambda with unit-speed carriers.
inline ConeValue cone_distance(const Space& space, const ConeProbe& probe) {
  detail::validate_probe(space, probe);
  double s = probe.s, sp = probe.s_prime;
  double factor = 1.0;
  const double reach = ConeProbe::lambda(probe.k_min) * std::max(s, sp);
  const double room = std::min(probe.gamma.length(), probe.eta.length());
  if (reach > room) {
    factor = room / reach;
    s *= factor;
    sp *= factor;
  }
  const double lg = probe.gamma.length(), le = probe.eta.length();
  ConeValue cv = detail::run_schedule(probe.k_min, probe.k_max, [&](double lam) {
    return space.raw_distance(probe.gamma(lam * s / lg), probe.eta(lam * sp / le)) / lam;
  });
  cv.rescaled = factor != 1.0;
  cv.value /= factor;
  return cv;
}

inline ConeValue cone_distance(const SpaceHandle& space, const ConeProbe& probe) { return cone_distance(*space, probe); }

struct HomogeneityDefect {
  double defect = 0.0;
  bool converged = false;
};

/// |d_x(c s, c s') - c d_x(s, s')|; zero on any cone.
inline HomogeneityDefect cone_homogeneity_defect(const Space& space, const ConeProbe& probe, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("homogeneity factor must be > 0");
  ConeProbe scaled = probe;
  scaled.s *= c;
  scaled.s_prime *= c;
  const ConeValue a = cone_distance(space, probe);
  const ConeValue b = cone_distance(space, scaled);
  return {std::abs(b.value - c * a.value), a.converged && b.converged};
}

inline HomogeneityDefect cone_homogeneity_defect(const SpaceHandle& space, const ConeProbe& probe, double c) {
  return cone_homogeneity_defect(*space, probe, c);
}

// ---------------------------------------------------------------------------
// Tangent charts: directions at x as vectors in R^tangent_dim

inline std::size_t tangent_dim(const Space& space) {
  switch (space.kind()) {
    case Space::Kind::euclidean: return space.dim();
    case Space::Kind::normed_plane:
    case Space::Kind::hilbert:
    case Space::Kind::klein:
    case Space::Kind::sphere_cap: return 2;
    case Space::Kind::product: break;
  }
  throw std::invalid_argument("no tangent chart for " + space.name());
}

/// Point reached from x by the tangent vector v: x + v in linear charts, the
/// exponential map on the sphere (with a fixed orthonormal frame at x).
inline Point chart_point(const Space& space, const Point& x, const Point& v) {
  if (space.kind() == Space::Kind::product) throw std::invalid_argument("no tangent chart for " + space.name());
  if (space.kind() != Space::Kind::sphere_cap) return x + v;
  const Point a = std::abs(x[0]) < 0.9 ? Point{1.0, 0.0, 0.0} : Point{0.0, 1.0, 0.0};
  Point e1 = a - dot(a, x) * x;
  e1 = (1.0 / euclidean_norm(e1)) * e1;
  const Point e2{x[1] * e1[2] - x[2] * e1[1], x[2] * e1[0] - x[0] * e1[2], x[0] * e1[1] - x[1] * e1[0]};
  const double r = euclidean_norm(v);
  if (r == 0.0) return x;
  const Point dir = (v[0] / r) * e1 + (v[1] / r) * e2;
  Point p = std::cos(r) * x + std::sin(r) * dir;
  return (1.0 / euclidean_norm(p)) * p;
}

/// Geodesic from x in the chart direction u, as long as the domain allows
/// (up to the sampling scale).
inline GeodesicSegment direction_carrier(const Space& space, const Point& x, const Point& u) {
  const double nu = euclidean_norm(u);
  if (!(nu > 0.0)) throw std::invalid_argument("zero direction");
  const Point unit = (1.0 / nu) * u;
  double delta = space.sampling_scale();
  for (int i = 0; i < 60; ++i, delta *= 0.5) {
    const Point y = chart_point(space, x, delta * unit);
    if (space.admissible(y)) return space.geodesic(x, y);
  }
  throw DomainError("no room for a carrier at " + to_string(x));
}

/// Tangent (Finsler) norm F(u) = lim d(x, chart(x, lambda u)) / lambda.
inline ConeValue tangent_norm(const Space& space, const Point& x, const Point& u, int k_min = 4, int k_max = 24) {
  space.require(x);
  while (k_min < k_max && !space.admissible(chart_point(space, x, ConeProbe::lambda(k_min) * u))) ++k_min;
  return detail::run_schedule(k_min, k_max, [&](double lam) {
    return space.raw_distance(x, chart_point(space, x, lam * u)) / lam;
  });
}

inline Point random_direction(std::size_t dim, RandomStream& rng) {
  for (;;) {
    Point u(dim);
    for (std::size_t i = 0; i < dim; ++i) u[i] = rng.uniform(-1.0, 1.0);
    const double n = euclidean_norm(u);
    if (n > 0.1 && n <= 1.0) return (1.0 / n) * u;
  }
}

/// Random base point, two random directions and s, s' in [0.2, 1].
inline ConeProbe random_cone_probe(const Space& space, RandomStream& rng) {
  ConeProbe p{space.random_point(rng), GeodesicSegment(nullptr, {}, {}, 0.0), GeodesicSegment(nullptr, {}, {}, 0.0)};
  const std::size_t td = tangent_dim(space);
  p.gamma = direction_carrier(space, p.base, random_direction(td, rng));
  p.eta = direction_carrier(space, p.base, random_direction(td, rng));
  p.s = rng.uniform(0.2, 1.0);
  p.s_prime = rng.uniform(0.2, 1.0);
  return p;
}

struct ConeComparison {
  double max_deviation = 0.0;
  bool converged = true;
  int pairs = 0;
  /// q_k schedule of every sampled pair, for convergence plots.
  std::vector<std::vector<double>> schedules;
};

/// Max over sampled direction pairs of |d_x(s u, s' u') - model(s u/F(u), s' u'/F(u'))|,
/// i.e. the distance between the tangent cone at x and a normed model whose
/// coordinates are the chart's.
inline ConeComparison compare_cone_to_model(const Space& space, const Point& x, const Space& model, int samples,
                                            std::uint64_t seed = 0x7A6u) {
  if (model.kind() != Space::Kind::euclidean && model.kind() != Space::Kind::normed_plane)
    throw std::invalid_argument("model must be a normed space: " + model.name());
  space.require(x);
  const std::size_t td = tangent_dim(space);
  if (model.dim() != td) throw std::invalid_argument("model dimension does not match the tangent dimension of " + space.name());
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  ConeComparison cmp;
  for (int i = 0; i < samples; ++i) {
    RandomStream rng = RandomStream::for_task(seed, static_cast<std::uint64_t>(i));
    const Point u = random_direction(td, rng);
    const Point w = random_direction(td, rng);
    ConeProbe probe{x, direction_carrier(space, x, u), direction_carrier(space, x, w)};
    probe.s = rng.uniform(0.2, 1.0);
    probe.s_prime = rng.uniform(0.2, 1.0);
    const ConeValue cone = cone_distance(space, probe);
    const ConeValue fu = tangent_norm(space, x, u);
    const ConeValue fw = tangent_norm(space, x, w);
    const double m = model.raw_distance((probe.s / fu.value) * u, (probe.s_prime / fw.value) * w);
    cmp.max_deviation = std::max(cmp.max_deviation, std::abs(cone.value - m));
    cmp.converged = cmp.converged && cone.converged && fu.converged && fw.converged;
    cmp.schedules.push_back(cone.q);
    ++cmp.pairs;
  }
  return cmp;
}

inline ConeComparison compare_cone_to_model(const SpaceHandle& space, const Point& x, const SpaceHandle& model,
                                            int samples, std::uint64_t seed = 0x7A6u) {
  return compare_cone_to_model(*space, x, *model, samples, seed);
}

}  // namespace orthogeo
