#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "orthogeo/solvers.hpp"
#include "orthogeo/space.hpp"

namespace orthogeo {

struct MarginOptions {
  int grid = 33;
  double tol = 1e-6;
  bool refine = true;
  ProjectionOptions projection{};
};

/// Violation of gamma _|_p eta and of eta _|_p gamma.
struct OrthoMargin {
  double forward = 0.0;
  double backward = 0.0;
  int grid = 0;
};

namespace detail {

inline void require_common_start(const Space& space, const GeodesicSegment& a, const GeodesicSegment& b) {
  if (space.raw_distance(a.start(), b.start()) > 1e-10)
    throw std::invalid_argument("geodesics must start at a common point: " + to_string(a.start()) + " vs " +
                                to_string(b.start()));
}

}  // namespace detail

/// max_t [ d(p, gamma_t) - d(gamma_t, eta) ] with p the common start point.
/// A value <= tol certifies gamma _|_p eta at the sampling resolution.
inline double birkhoff_margin(const Space& space, const GeodesicSegment& gamma, const GeodesicSegment& eta,
                              const MarginOptions& opt = {}) {
  detail::require_common_start(space, gamma, eta);
  if (gamma.degenerate() || eta.degenerate()) return 0.0;
  const Point& p = gamma.start();
  ProjectionOptions popt = opt.projection;
  popt.polish_feet = false;  // only the distance is needed
  auto deficit = [&](double t) {
    const Point g = gamma(t);
    return space.raw_distance(p, g) - project_to_geodesic(space, g, eta, popt).dist;
  };
  const int n = std::max(opt.grid, 2);
  double worst = 0.0;
  int worst_i = 0;
  for (int i = 1; i < n; ++i) {
    const double m = deficit(static_cast<double>(i) / (n - 1));
    if (m > worst) {
      worst = m;
      worst_i = i;
    }
  }
  // Near-threshold margins get a golden-section maximization around the worst grid point.
  if (opt.refine && worst > 0.1 * opt.tol && worst < 10.0 * opt.tol) {
    double a = static_cast<double>(std::max(worst_i - 1, 0)) / (n - 1);
    double b = static_cast<double>(std::min(worst_i + 1, n - 1)) / (n - 1);
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double fc = deficit(c), fd = deficit(d);
    for (int it = 0; it < 40; ++it) {
      if (fc >= fd) {
        b = d, d = c, fd = fc;
        c = b - kInvPhi * (b - a);
        fc = deficit(c);
      } else {
        a = c, c = d, fc = fd;
        d = a + kInvPhi * (b - a);
        fd = deficit(d);
      }
    }
    worst = std::max({worst, fc, fd});
  }
  return worst;
}

inline double birkhoff_margin(const SpaceHandle& space, const GeodesicSegment& gamma, const GeodesicSegment& eta,
                              const MarginOptions& opt = {}) {
  return birkhoff_margin(*space, gamma, eta, opt);
}

inline OrthoMargin ortho_margins(const Space& space, const GeodesicSegment& gamma, const GeodesicSegment& eta,
                                 const MarginOptions& opt = {}) {
  return {birkhoff_margin(space, gamma, eta, opt), birkhoff_margin(space, eta, gamma, opt), opt.grid};
}

/// The two sub-geodesics of `seg` emanating from the interior point at
/// parameter t: towards seg(0) and towards seg(1). Degenerate halves are omitted.
inline std::vector<GeodesicSegment> split_at(const Space& space, const GeodesicSegment& seg, double t) {
  std::vector<GeodesicSegment> halves;
  const Point p = seg(t);
  if (space.raw_distance(p, seg.start()) > 0.0) halves.push_back(space.geodesic(p, seg.start()));
  if (space.raw_distance(p, seg.end()) > 0.0) halves.push_back(space.geodesic(p, seg.end()));
  return halves;
}

struct OrthogonalPair {
  GeodesicSegment gamma;
  Point foot;
  double foot_param;
  ProjectionResult projection;
};

/// Projects q onto eta and joins the (first) foot to q. By construction gamma
/// is Birkhoff orthogonal, at the foot, to both halves of eta.
inline OrthogonalPair construct_orthogonal_pair(const Space& space, const GeodesicSegment& eta, const Point& q,
                                                const ProjectionOptions& popt = {}) {
  ProjectionResult pr = project_to_geodesic(space, q, eta, popt);
  if (!pr.converged) throw std::runtime_error("projection did not converge");
  if (!(pr.dist > 1e-12)) throw std::invalid_argument("point lies on the geodesic; no orthogonal direction");
  const Point foot = pr.feet.front();
  const double t = pr.foot_params.front();
  return {space.geodesic(foot, q), foot, t, std::move(pr)};
}

inline OrthogonalPair construct_orthogonal_pair(const SpaceHandle& space, const GeodesicSegment& eta, const Point& q,
                                                const ProjectionOptions& popt = {}) {
  return construct_orthogonal_pair(*space, eta, q, popt);
}

// ---------------------------------------------------------------------------
// Normed planes: dual functionals

/// l_v(w) = lim (|v + e w|^2 - |v|^2) / (2e), by central differences at
/// e in {1e-3, 5e-4, 2.5e-4} with two Richardson levels.
inline double dual_functional(const NormGauge& norm, const Point& v, const Point& w) {
  const double nv = norm(v);
  if (!(nv > 0.0)) throw std::domain_error("dual functional undefined at the zero vector");
  const double scale = nv / std::max(norm(w), 1e-300);
  auto central = [&](double e) {
    const double h = e * scale;
    const double up = norm(v + h * w);
    const double dn = norm(v - (h)*w);
    return (up * up - dn * dn) / (4.0 * h);
  };
  const double d1 = central(1e-3), d2 = central(5e-4), d3 = central(2.5e-4);
  const double r1 = (4.0 * d2 - d1) / 3.0;
  const double r2 = (4.0 * d3 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

// ---------------------------------------------------------------------------
// One-sided slopes

/// lim_{tau->0+} [d^2(eta(tau), gamma_1) - d^2(eta_0, gamma_1)] / tau with eta
/// moving at unit speed. Forward differences at tau in {1e-3, 5e-4, 2.5e-4}
/// (clipped to eta's length), Richardson-extrapolated twice.
inline double one_sided_slope(const Space& space, const GeodesicSegment& eta, const GeodesicSegment& gamma) {
  detail::require_common_start(space, eta, gamma);
  if (eta.degenerate() || gamma.degenerate()) throw std::invalid_argument("one-sided slope of a degenerate geodesic");
  const Point& target = gamma.end();
  const double base = space.raw_distance(eta.start(), target);
  const double len = eta.length();
  const double h0 = std::min(1e-3, 0.5 * len);
  auto fd = [&](double tau) {
    const double d = space.raw_distance(eta(tau / len), target);
    return (d * d - base * base) / tau;
  };
  const double d1 = fd(h0), d2 = fd(0.5 * h0), d3 = fd(0.25 * h0);
  const double r1 = 2.0 * d2 - d1;
  const double r2 = 2.0 * d3 - d2;
  return (4.0 * r2 - r1) / 3.0;
}

inline double one_sided_slope(const SpaceHandle& space, const GeodesicSegment& eta, const GeodesicSegment& gamma) {
  return one_sided_slope(*space, eta, gamma);
}

/// |slope(eta; gamma)/|gamma| - slope(gamma; eta)/|eta||. Dividing by the
/// partner's length makes the commutation test scale-free, so segments of any
/// length stand in for the unit-length geodesics of the two-sided angle test.
inline double slope_commutation_defect(const Space& space, const GeodesicSegment& gamma, const GeodesicSegment& eta) {
  const double a = one_sided_slope(space, eta, gamma) / gamma.length();
  const double b = one_sided_slope(space, gamma, eta) / eta.length();
  return std::abs(a - b);
}

inline double slope_commutation_defect(const SpaceHandle& space, const GeodesicSegment& gamma,
                                       const GeodesicSegment& eta) {
  return slope_commutation_defect(*space, gamma, eta);
}

}  // namespace orthogeo
