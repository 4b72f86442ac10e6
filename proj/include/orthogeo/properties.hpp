#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "orthogeo/orthogonality.hpp"
#include "orthogeo/solvers.hpp"
#include "orthogeo/space.hpp"

namespace orthogeo {

enum class Property { so, a, ne, so_star, ne_star, busemann, cat0, strict_convexity };

inline constexpr Property kAllProperties[] = {Property::so,      Property::a,        Property::ne,
                                              Property::so_star, Property::ne_star,  Property::busemann,
                                              Property::cat0,    Property::strict_convexity};

inline std::string_view property_name(Property p) {
  switch (p) {
    case Property::so: return "so";
    case Property::a: return "a";
    case Property::ne: return "ne";
    case Property::so_star: return "so*";
    case Property::ne_star: return "ne*";
    case Property::busemann: return "busemann";
    case Property::cat0: return "cat0";
    case Property::strict_convexity: return "strict";
  }
  return "?";
}

inline std::optional<Property> parse_property(std::string_view s) {
  for (Property p : kAllProperties)
    if (property_name(p) == s) return p;
  if (s == "so_star") return Property::so_star;
  if (s == "ne_star") return Property::ne_star;
  return std::nullopt;
}

struct TrialConfig {
  enum class NeSets { segment, hull };

  int trials = 2000;
  double tol = 1e-6;
  std::uint64_t seed = 42;
  int grid = 33;
  bool refine = true;
  /// Exponent for the strict p-convexity check.
  double p = 2.0;
  NeSets ne_sets = NeSets::segment;
  int hull_generation = 2;
  std::size_t witnesses_kept = 5;
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  unsigned jobs = 0;

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
    if (grid < 2) throw std::invalid_argument("grid must be >= 2");
    if (!(p > 1.0)) throw std::invalid_argument("p must be > 1");
  }

  MarginOptions margin_options() const {
    MarginOptions m;
    m.grid = grid;
    m.tol = tol;
    m.refine = refine;
    return m;
  }
};

/// Raw parameters of one randomized trial: sampled points plus scalars in [0,1].
struct TrialSample {
  std::vector<Point> points;
  std::vector<double> scalars;
};

/// Concrete configuration realizing a violation margin.
struct Witness {
  std::string space;
  Property property = Property::so;
  TrialSample sample;
  double margin = 0.0;
  std::int64_t trial = -1;
};

enum class Status { pass, fail, inconclusive };

inline std::string_view status_name(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

struct PropertyVerdict {
  Property property = Property::so;
  std::string space;
  Status status = Status::inconclusive;
  double worst_margin = 0.0;
  /// Pass iff worst_margin <= threshold. tol for every property except strict
  /// convexity, where the margin is the negated strictness gap and the
  /// threshold is -tol.
  double threshold = 0.0;
  int trials_run = 0;
  int skipped = 0;
  std::vector<Witness> witnesses;
  TrialConfig config;

  bool pass() const { return status == Status::pass; }
};

/// Trial-level failure that removes the trial from the verdict (non-converged
/// solve or degenerate draw).
class SkippedTrial : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Per-trial kernels

/// Space on which the property is actually evaluated: the L2 product with R
/// for the stable variants.
inline SpaceHandle evaluation_space(const SpaceHandle& space, Property p) {
  if (p == Property::so_star || p == Property::ne_star) return product_space(space);
  return space;
}

inline Property base_property(Property p) {
  if (p == Property::so_star) return Property::so;
  if (p == Property::ne_star) return Property::ne;
  return p;
}

inline TrialSample draw_trial(const Space& space, Property prop, const TrialConfig& cfg, RandomStream& rng) {
  TrialSample s;
  auto pts = [&](int n) {
    for (int i = 0; i < n; ++i) s.points.push_back(space.random_point(rng));
  };
  switch (base_property(prop)) {
    case Property::so: pts(3); break;
    case Property::a:
      pts(3);
      s.scalars.push_back(rng.uniform());
      break;
    case Property::ne: pts(cfg.ne_sets == TrialConfig::NeSets::hull ? 5 : 4); break;
    default: pts(3); break;
  }
  return s;
}

namespace detail {

inline ProjectionResult checked_projection(const Space& space, const Point& x, const GeodesicSegment& seg) {
  ProjectionResult r = project_to_geodesic(space, x, seg);
  if (!r.converged || r.feet.empty()) throw SkippedTrial("projection did not converge");
  return r;
}

inline GeodesicSegment nondegenerate(const Space& space, const Point& a, const Point& b) {
  GeodesicSegment seg = space.geodesic(a, b);
  if (seg.length() <= 1e-9 * space.sampling_scale()) throw SkippedTrial("degenerate geodesic");
  return seg;
}

inline double margin_so(const Space& space, const TrialSample& s, const TrialConfig& cfg) {
  const GeodesicSegment eta = nondegenerate(space, s.points[0], s.points[1]);
  const Point& q = s.points[2];
  const ProjectionResult pr = checked_projection(space, q, eta);
  if (pr.dist <= 1e-9 * space.sampling_scale()) throw SkippedTrial("point on the geodesic");
  const MarginOptions mopt = cfg.margin_options();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pr.feet.size(); ++k) {
    const GeodesicSegment gamma = space.geodesic(pr.feet[k], q);
    for (const auto& half : split_at(space, eta, pr.foot_params[k]))
      worst = std::max(worst, birkhoff_margin(space, half, gamma, mopt));
  }
  return worst;
}

inline double margin_a(const Space& space, const TrialSample& s) {
  const GeodesicSegment c = nondegenerate(space, s.points[0], s.points[1]);
  const Point& x = s.points[2];
  const Point y = c(s.scalars.at(0));
  const ProjectionResult pr = checked_projection(space, x, c);
  const double dxy = space.raw_distance(x, y);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& f : pr.feet) worst = std::max(worst, space.raw_distance(f, y) - dxy);
  return worst;
}

inline double margin_ne(const Space& space, const TrialSample& s, const TrialConfig& cfg) {
  ProjectionResult px, py;
  const Point *x = nullptr, *y = nullptr;
  if (s.points.size() == 5) {
    const std::vector<Point> gens(s.points.begin(), s.points.begin() + 3);
    x = &s.points[3];
    y = &s.points[4];
    px = project_to_hull(space, *x, gens, cfg.hull_generation, 0.1 * cfg.tol);
    py = project_to_hull(space, *y, gens, cfg.hull_generation, 0.1 * cfg.tol);
    if (!px.converged || !py.converged) throw SkippedTrial("hull projection did not converge");
  } else {
    const GeodesicSegment c = nondegenerate(space, s.points[0], s.points[1]);
    x = &s.points[2];
    y = &s.points[3];
    px = checked_projection(space, *x, c);
    py = checked_projection(space, *y, c);
  }
  const double dxy = space.raw_distance(*x, *y);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& fx : px.feet)
    for (const auto& fy : py.feet) worst = std::max(worst, space.raw_distance(fx, fy) - dxy);
  return worst;
}

inline double margin_busemann(const Space& space, const TrialSample& s) {
  const Point& o = s.points[0];
  const Point ma = space.geodesic(o, s.points[1])(0.5);
  const Point mb = space.geodesic(o, s.points[2])(0.5);
  return space.raw_distance(ma, mb) - 0.5 * space.raw_distance(s.points[1], s.points[2]);
}

inline double margin_cat0(const Space& space, const TrialSample& s) {
  const Point &x = s.points[0], &y = s.points[1], &z = s.points[2];
  const Point m = space.geodesic(x, y)(0.5);
  const auto sq = [&](const Point& a, const Point& b) {
    const double d = space.raw_distance(a, b);
    return d * d;
  };
  return -(0.5 * sq(x, z) + 0.5 * sq(y, z) - sq(m, z) - 0.25 * sq(x, y));
}

inline double margin_strict(const Space& space, const TrialSample& s, const TrialConfig& cfg) {
  const Point& x = s.points[0];
  const GeodesicSegment g = nondegenerate(space, s.points[1], s.points[2]);
  const auto dp = [&](const Point& y) { return std::pow(space.raw_distance(x, y), cfg.p); };
  const double gap = 0.5 * dp(g.start()) + 0.5 * dp(g.end()) - dp(g(0.5));
  return -gap / std::pow(g.length(), cfg.p);
}

}  // namespace detail

/// Margin of one trial on the evaluation space (product space for so*/ne*).
/// Throws SkippedTrial for degenerate or non-converged trials.
inline double evaluate_trial(const Space& eval_space, Property prop, const TrialSample& s, const TrialConfig& cfg) {
  for (const auto& p : s.points) eval_space.require(p);
  switch (base_property(prop)) {
    case Property::so: return detail::margin_so(eval_space, s, cfg);
    case Property::a: return detail::margin_a(eval_space, s);
    case Property::ne: return detail::margin_ne(eval_space, s, cfg);
    case Property::busemann: return detail::margin_busemann(eval_space, s);
    case Property::cat0: return detail::margin_cat0(eval_space, s);
    case Property::strict_convexity: return detail::margin_strict(eval_space, s, cfg);
    default: break;
  }
  throw std::logic_error("unhandled property");
}

inline double pass_threshold(Property p, double tol) { return p == Property::strict_convexity ? -tol : tol; }

/// Re-evaluates a witness on the named space.
inline double replay_witness(const SpaceHandle& space, const Witness& w, const TrialConfig& cfg) {
  const SpaceHandle eval = evaluation_space(space, w.property);
  return evaluate_trial(*eval, w.property, w.sample, cfg);
}

// ---------------------------------------------------------------------------
// Deterministic parallel trial runner

/// Runs fn(i) for i in [0, n) on `jobs` threads; results are stored by index,
/// so any schedule yields identical output.
template <class Result, class Fn>
std::vector<Result> run_indexed(int n, unsigned jobs, Fn&& fn) {
  std::vector<Result> out(static_cast<std::size_t>(n));
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max(n, 1)));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) out[i] = fn(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

/// Randomized check of one property. Trial i draws from the stream
/// (cfg.seed, i) only.
inline PropertyVerdict check_property(const SpaceHandle& space, Property prop, const TrialConfig& cfg) {
  cfg.validate();
  const SpaceHandle eval = evaluation_space(space, prop);
  const auto margins = run_indexed<std::optional<double>>(cfg.trials, cfg.jobs, [&](int i) -> std::optional<double> {
    RandomStream rng = RandomStream::for_task(cfg.seed, static_cast<std::uint64_t>(i));
    const TrialSample s = draw_trial(*eval, prop, cfg, rng);
    try {
      return evaluate_trial(*eval, prop, s, cfg);
    } catch (const SkippedTrial&) {
      return std::nullopt;
    }
  });

  PropertyVerdict v;
  v.property = prop;
  v.space = space->name();
  v.config = cfg;
  v.threshold = pass_threshold(prop, cfg.tol);
  v.trials_run = cfg.trials;
  v.worst_margin = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, int>> violations;
  for (int i = 0; i < cfg.trials; ++i) {
    if (!margins[i]) {
      ++v.skipped;
      continue;
    }
    v.worst_margin = std::max(v.worst_margin, *margins[i]);
    if (*margins[i] > v.threshold) violations.push_back({*margins[i], i});
  }
  std::sort(violations.begin(), violations.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::size_t k = 0; k < violations.size() && k < cfg.witnesses_kept; ++k) {
    const int i = violations[k].second;
    RandomStream rng = RandomStream::for_task(cfg.seed, static_cast<std::uint64_t>(i));
    v.witnesses.push_back({space->name(), prop, draw_trial(*eval, prop, cfg, rng), violations[k].first, i});
  }
  if (!violations.empty()) v.status = Status::fail;
  else if (v.skipped * 100 > cfg.trials || v.skipped == cfg.trials) v.status = Status::inconclusive;
  else v.status = Status::pass;
  return v;
}

inline PropertyVerdict check_so(const SpaceHandle& s, const TrialConfig& c) { return check_property(s, Property::so, c); }
inline PropertyVerdict check_property_a(const SpaceHandle& s, const TrialConfig& c) {
  return check_property(s, Property::a, c);
}
inline PropertyVerdict check_ne(const SpaceHandle& s, const TrialConfig& c) { return check_property(s, Property::ne, c); }
inline PropertyVerdict check_so_star(const SpaceHandle& s, const TrialConfig& c) {
  return check_property(s, Property::so_star, c);
}
inline PropertyVerdict check_ne_star(const SpaceHandle& s, const TrialConfig& c) {
  return check_property(s, Property::ne_star, c);
}
inline PropertyVerdict check_busemann(const SpaceHandle& s, const TrialConfig& c) {
  return check_property(s, Property::busemann, c);
}
inline PropertyVerdict check_cat0(const SpaceHandle& s, const TrialConfig& c) {
  return check_property(s, Property::cat0, c);
}
inline PropertyVerdict check_strict_p_convexity(const SpaceHandle& s, double p, TrialConfig c) {
  c.p = p;
  return check_property(s, Property::strict_convexity, c);
}

// ---------------------------------------------------------------------------
// Uniform infinity-convexity modulus

struct ModulusEstimate {
  double rho = 0.0;
  int qualifying = 0;
  bool inconclusive = true;
};

/// rho(eps) ~ 1 - max d(x,m) / max{d(x,y), d(x,z)} over sampled triples with
/// d(y,z) > eps * max{d(x,y), d(x,z)}, m the midpoint of y and z. Approaches
/// the true modulus from above as the sampling densifies.
inline ModulusEstimate estimate_infty_convexity_modulus(const SpaceHandle& space, double eps, int samples,
                                                        std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 2.0)) throw std::invalid_argument("eps must lie in (0, 2)");
  ModulusEstimate est;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    RandomStream rng = RandomStream::for_task(seed, static_cast<std::uint64_t>(i));
    const Point x = space->random_point(rng);
    const Point y = space->random_point(rng);
    const Point z = space->random_point(rng);
    const double m = std::max(space->raw_distance(x, y), space->raw_distance(x, z));
    if (!(m > 0.0) || !(space->raw_distance(y, z) > eps * m)) continue;
    ++est.qualifying;
    worst = std::max(worst, space->raw_distance(x, midpoint(space, y, z)) / m);
  }
  est.inconclusive = est.qualifying == 0;
  est.rho = 1.0 - worst;
  return est;
}

}  // namespace orthogeo
