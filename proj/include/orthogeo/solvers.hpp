#pragma once

#include <algorithm>
#include <array>
#include <stdexcept>
#include <utility>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "orthogeo/space.hpp"

namespace orthogeo {

struct ProjectionOptions {
  int grid = 64;
  int max_golden_iterations = 200;
  /// Golden-section search stops once the bracket is this narrow in t.
  double bracket_tol = 1e-11;
  /// Feet are all refined minima within foot_tol_rel * (1 + dist) of the best.
  double foot_tol_rel = 1e-8;
  /// Re-center each foot in its near-minimal sublevel interval. The profile is
  /// flat at a minimum (quartic for l^4), so the golden-section argmin alone is
  /// only accurate to about sqrt(eps) or eps^(1/4) in t.
  bool polish_feet = true;
};

/// Nearest-point set of a point onto a compact set.
struct ProjectionResult {
  double dist = std::numeric_limits<double>::infinity();
  std::vector<Point> feet;
  /// Segment parameters of the feet (projections onto a geodesic only).
  std::vector<double> foot_params;
  bool converged = false;
  std::int64_t evaluations = 0;

  double foot_tol() const { return 1e-8 * (1.0 + dist); }
};

namespace detail {

struct Minimum {
  double t;
  double f;
};

/// Golden-section minimization of f on [a, b]. Returns the best point seen,
/// including the bracket ends fa/fb supplied by the caller.
template <class F>
Minimum golden_section(F&& f, double a, double fa, double b, double fb, const ProjectionOptions& opt,
                       std::int64_t& evals, bool& converged) {
  constexpr double kInvPhi = 0.6180339887498949;
  Minimum best = fa <= fb ? Minimum{a, fa} : Minimum{b, fb};
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  evals += 2;
  int it = 0;
  for (; it < opt.max_golden_iterations && (b - a) > opt.bracket_tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  converged = converged && (b - a) <= opt.bracket_tol;
  if (fc < best.f) best = {c, fc};
  if (fd < best.f) best = {d, fd};
  return best;
}

/// Midpoint of the interval around t where f stays within a hair of f(t).
template <class F>
double polish_argmin(F&& f, double t, double ft, double h, std::int64_t& evals) {
  const double level = ft + 1e-12 * (1.0 + std::abs(ft));
  auto crossing = [&](double inside, double outside) {
    const double fo = f(outside);
    ++evals;
    if (fo <= level) return outside;
    for (int i = 0; i < 45; ++i) {
      const double mid = 0.5 * (inside + outside);
      (f(mid) <= level ? inside : outside) = mid;
      ++evals;
    }
    return inside;
  };
  const double lo = crossing(t, std::max(0.0, t - h));
  const double hi = crossing(t, std::min(1.0, t + h));
  const double c = 0.5 * (lo + hi);
  ++evals;
  return f(c) <= level ? c : t;
}

}  // namespace detail

/// Global minimum of t -> d(x, seg(t)) on [0,1]. The distance profile is not
/// assumed unimodal: every local minimum of a uniform grid is refined and all
/// refined minima within the foot tolerance are reported.
inline ProjectionResult project_to_geodesic(const Space& space, const Point& x, const GeodesicSegment& seg,
                                            const ProjectionOptions& opt = {}) {
  space.require(x);
  ProjectionResult r;
  if (seg.degenerate()) {
    r.dist = space.raw_distance(x, seg.start());
    r.feet = {seg.start()};
    r.foot_params = {0.0};
    r.converged = true;
    r.evaluations = 1;
    return r;
  }
  auto f = [&](double t) { return space.raw_distance(x, seg(t)); };

  const int g = std::max(opt.grid, 3);
  std::vector<double> ts(g), fs(g);
  for (int i = 0; i < g; ++i) {
    ts[i] = static_cast<double>(i) / (g - 1);
    fs[i] = f(ts[i]);
  }
  r.evaluations = g;
  r.converged = true;

  std::vector<detail::Minimum> minima;
  for (int i = 0; i < g; ++i) {
    const bool left_ok = i == 0 || fs[i] <= fs[i - 1];
    const bool right_ok = i == g - 1 || fs[i] <= fs[i + 1];
    if (!(left_ok && right_ok)) continue;
    const int lo = std::max(i - 1, 0);
    const int hi = std::min(i + 1, g - 1);
    minima.push_back(detail::golden_section(f, ts[lo], fs[lo], ts[hi], fs[hi], opt, r.evaluations, r.converged));
    if (fs[i] < minima.back().f) minima.back() = {ts[i], fs[i]};
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : minima) best = std::min(best, m.f);
  r.dist = best;
  const double tol = opt.foot_tol_rel * (1.0 + best);
  std::sort(minima.begin(), minima.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  for (const auto& m : minima) {
    if (m.f > best + tol) continue;
    if (!r.foot_params.empty() && m.t - r.foot_params.back() < 1e-7) {
      if (m.f < f(r.foot_params.back())) {
        r.foot_params.back() = m.t;
        r.feet.back() = seg(m.t);
      }
      continue;
    }
    r.foot_params.push_back(m.t);
    r.feet.push_back(seg(m.t));
  }
  if (opt.polish_feet) {
    const double h = 1.0 / (g - 1);
    for (std::size_t k = 0; k < r.feet.size(); ++k) {
      const double t = detail::polish_argmin(f, r.foot_params[k], f(r.foot_params[k]), h, r.evaluations);
      r.foot_params[k] = t;
      r.feet[k] = seg(t);
      r.dist = std::min(r.dist, f(t));
    }
  }
  return r;
}

inline ProjectionResult project_to_geodesic(const SpaceHandle& space, const Point& x, const GeodesicSegment& seg,
                                            const ProjectionOptions& opt = {}) {
  return project_to_geodesic(*space, x, seg, opt);
}

// ---------------------------------------------------------------------------
// Convex hull iteration

/// Generation-n sampling of the hull iteration G_0 = A,
/// G_n = points on geodesics between pairs of G_{n-1}.
struct HullSampling {
  int generation = 0;
  std::vector<Point> samples;
  std::vector<Point> generators;
  /// For each sample: indices (into the previous generation's samples) of the
  /// geodesic it was drawn from, or {-1,-1} when inherited unchanged.
  std::vector<std::array<int, 2>> parents;
  /// Samples of generation n-1 (empty for n = 0).
  std::vector<Point> previous;
  bool truncated = false;
};

struct HullOptions {
  int density = 16;
  std::size_t budget = 20000;
  std::uint64_t seed = 0x4855u;
};

inline HullSampling convex_hull_samples(const Space& space, const std::vector<Point>& generators, int n,
                                        const HullOptions& opt = {}) {
  if (generators.empty()) throw std::invalid_argument("hull of an empty set");
  if (n < 0) throw std::invalid_argument("hull generation must be >= 0");
  if (opt.density < 2) throw std::invalid_argument("hull density must be >= 2");
  for (const auto& p : generators) space.require(p);

  HullSampling h;
  h.generators = generators;
  h.samples = generators;
  h.parents.assign(generators.size(), {-1, -1});
  RandomStream rng(opt.seed);
  const int interior = opt.density - 2;
  for (int gen = 1; gen <= n; ++gen) {
    h.previous = h.samples;
    const auto& prev = h.previous;
    const std::size_t m = prev.size();
    std::vector<std::array<int, 2>> pairs;
    const std::size_t all_pairs = m * (m - 1) / 2;
    const std::size_t pair_budget = std::max<std::size_t>(1, opt.budget / std::max(interior, 1));
    if (all_pairs <= pair_budget) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
    } else {
      h.truncated = true;
      for (std::size_t k = 0; k < pair_budget; ++k) {
        const auto i = static_cast<int>(rng.next() % m);
        auto j = static_cast<int>(rng.next() % (m - 1));
        if (j >= i) ++j;
        pairs.push_back({std::min(i, j), std::max(i, j)});
      }
    }
    std::vector<Point> next = prev;
    std::vector<std::array<int, 2>> parents(prev.size(), {-1, -1});
    for (const auto& [i, j] : pairs) {
      if (prev[i] == prev[j]) continue;
      const GeodesicSegment seg = space.geodesic(prev[i], prev[j]);
      for (int k = 1; k <= interior; ++k) {
        next.push_back(seg(static_cast<double>(k) / (opt.density - 1)));
        parents.push_back({i, j});
      }
    }
    h.samples = std::move(next);
    h.parents = std::move(parents);
    h.generation = gen;
  }
  return h;
}

inline HullSampling convex_hull_samples(const SpaceHandle& space, const std::vector<Point>& generators, int n,
                                        const HullOptions& opt = {}) {
  return convex_hull_samples(*space, generators, n, opt);
}

namespace detail {

/// Best distance over the sampling, refined along the parent geodesics of the
/// closest samples.
inline ProjectionResult project_to_sampling(const Space& space, const Point& x, const HullSampling& h,
                                            const ProjectionOptions& popt) {
  constexpr std::size_t kRefine = 16;
  ProjectionResult r;
  r.converged = true;
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(h.samples.size());
  for (std::size_t i = 0; i < h.samples.size(); ++i) ranked.push_back({space.raw_distance(x, h.samples[i]), i});
  r.evaluations = static_cast<std::int64_t>(h.samples.size());
  std::sort(ranked.begin(), ranked.end());

  struct Candidate {
    double f;
    Point p;
  };
  std::vector<Candidate> cands;
  std::vector<std::array<int, 2>> refined;
  for (const auto& [d, i] : ranked) {
    if (cands.size() >= kRefine && refined.size() >= kRefine) break;
    cands.push_back({d, h.samples[i]});
    const auto par = h.parents[i];
    if (par[0] < 0 || refined.size() >= kRefine) continue;
    if (std::find(refined.begin(), refined.end(), par) != refined.end()) continue;
    refined.push_back(par);
    const GeodesicSegment seg = space.geodesic(h.previous[par[0]], h.previous[par[1]]);
    const ProjectionResult sub = project_to_geodesic(space, x, seg, popt);
    r.evaluations += sub.evaluations;
    r.converged = r.converged && sub.converged;
    for (const auto& foot : sub.feet) cands.push_back({sub.dist, foot});
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : cands) best = std::min(best, c.f);
  r.dist = best;
  const double tol = popt.foot_tol_rel * (1.0 + best);
  for (const auto& c : cands) {
    if (c.f > best + tol) continue;
    const bool dup = std::any_of(r.feet.begin(), r.feet.end(),
                                 [&](const Point& q) { return space.raw_distance(q, c.p) <= tol; });
    if (!dup) r.feet.push_back(c.p);
  }
  return r;
}

}  // namespace detail

/// Projection onto the closed convex hull of A, approximated by the
/// generation-n hull sampling. Not converged when generations n-1 and n
/// disagree on the distance by more than `tol`.
inline ProjectionResult project_to_hull(const Space& space, const Point& x, const std::vector<Point>& generators,
                                        int n, double tol, const HullOptions& hopt = {},
                                        const ProjectionOptions& popt = {}) {
  space.require(x);
  const HullSampling hn = convex_hull_samples(space, generators, n, hopt);
  ProjectionResult r = detail::project_to_sampling(space, x, hn, popt);
  if (n > 0) {
    const HullSampling hp = convex_hull_samples(space, generators, n - 1, hopt);
    const ProjectionResult rp = detail::project_to_sampling(space, x, hp, popt);
    r.evaluations += rp.evaluations;
    if (std::abs(rp.dist - r.dist) > tol) r.converged = false;
  }
  return r;
}

inline ProjectionResult project_to_hull(const SpaceHandle& space, const Point& x, const std::vector<Point>& generators,
                                        int n, double tol, const HullOptions& hopt = {},
                                        const ProjectionOptions& popt = {}) {
  return project_to_hull(*space, x, generators, n, tol, hopt, popt);
}

}  // namespace orthogeo
