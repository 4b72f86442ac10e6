#include <gtest/gtest.h>

#include <cmath>

#include "orthogeo/battery.hpp"
#include "orthogeo/orthogonality.hpp"
#include "orthogeo/properties.hpp"
#include "orthogeo/search.hpp"
#include "orthogeo/space_parse.hpp"
#include "support.hpp"

using namespace orthogeo;
namespace ts = testing_support;

namespace {

TrialConfig cfg_with(int trials, std::uint64_t seed = 1) {
  TrialConfig c;
  c.trials = trials;
  c.seed = seed;
  return c;
}

PropertyVerdict check(const std::string& space, Property p, int trials, std::uint64_t seed = 1) {
  return check_property(parse_space(space), p, cfg_with(trials, seed));
}

void expect_replays(const SpaceHandle& space, const PropertyVerdict& v) {
  for (const auto& w : v.witnesses) EXPECT_NEAR(replay_witness(space, w, v.config), w.margin, 1e-9);
}

}  // namespace

TEST(CheckSo, Examples) {
  const auto e = check("euclidean:3", Property::so, 1000);
  EXPECT_TRUE(e.pass());
  EXPECT_LE(e.worst_margin, 1e-7);

  const auto l = parse_space("lp:4");
  const auto v = check_so(l, cfg_with(1000));
  EXPECT_EQ(v.status, Status::fail);
  ASSERT_FALSE(v.witnesses.empty());
  EXPECT_GT(v.witnesses.front().margin, 1e-2);
  expect_replays(l, v);

  EXPECT_TRUE(check("radon:4", Property::so, 1000).pass());
}

// The worst lp:4 witness is a configuration of the (2,1)/(1,-8) type: gamma is
// orthogonal to eta, while the dual of eta's direction does not annihilate gamma.
TEST(CheckSo, Lp4WitnessIsAnAsymmetricPair) {
  const auto l = parse_space("lp:4");
  const auto v = check_so(l, cfg_with(1000));
  ASSERT_FALSE(v.witnesses.empty());
  const auto& s = v.witnesses.front().sample;
  const auto eta = l->geodesic(s.points[0], s.points[1]);
  const auto pr = project_to_geodesic(*l, s.points[2], eta);
  const Point g = s.points[2] - pr.feet.front();
  const Point u = s.points[1] - s.points[0];
  const NormGauge& n = *l->gauge();
  const double t = pr.foot_params.front();
  ASSERT_GT(t, 1e-6);
  ASSERT_LT(t, 1 - 1e-6);
  EXPECT_LE(std::abs(dual_functional(n, g, u)), 1e-5 * n(g) * n(u));
  EXPECT_GT(std::abs(dual_functional(n, u, g)), 1e-2 * n(g) * n(u));
}

TEST(CheckPropertyA, Examples) {
  const auto e = check("euclidean:2", Property::a, 1000);
  EXPECT_TRUE(e.pass());
  EXPECT_LE(e.worst_margin, 1e-8);
  const auto l = parse_space("lp:4");
  const auto v = check_property_a(l, cfg_with(1000));
  EXPECT_EQ(v.status, Status::fail);
  expect_replays(l, v);
}

// A right spherical triangle has cos c = cos a cos b. Once the cap's diameter
// exceeds pi/2 the far vertex can see the foot further away than a point of
// the arc, so property A (and with it SO) genuinely fails on cap:1.0, while a
// cap of radius 0.7 (diameter < pi/2) keeps it.
TEST(CheckPropertyA, CapDependsOnRadius) {
  const auto c1 = parse_space("cap:1.0");
  const auto v = check_property_a(c1, cfg_with(2000));
  EXPECT_EQ(v.status, Status::fail);
  expect_replays(c1, v);
  EXPECT_TRUE(check("cap:0.7", Property::a, 2000).pass());
  EXPECT_TRUE(check("cap:0.7", Property::so, 1000).pass());
}

TEST(CheckPropertyA, SphericalOracleForCapWitness) {
  // Independent spherical trigonometry: with foot f, y on the arc and x off
  // it, cos d(x,y) = cos d(x,f) cos d(f,y) when the foot is interior.
  const auto c = parse_space("cap:1.0");
  const auto v = check_property_a(c, cfg_with(2000));
  int checked = 0;
  for (const auto& w : v.witnesses) {
    const auto& s = w.sample;
    const auto seg = c->geodesic(s.points[0], s.points[1]);
    const auto pr = project_to_geodesic(*c, s.points[2], seg);
    const Point y = seg(s.scalars[0]);
    const double t = pr.foot_params.front();
    if (t <= 1e-6 || t >= 1 - 1e-6) continue;
    const double a = std::acos(std::clamp(dot(s.points[2], pr.feet.front()), -1.0, 1.0));
    const double b = std::acos(std::clamp(dot(pr.feet.front(), y), -1.0, 1.0));
    const double hyp = std::acos(std::cos(a) * std::cos(b));
    EXPECT_NEAR(w.margin, b - hyp, 1e-6);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(CheckNe, Examples) {
  EXPECT_TRUE(check("euclidean:2", Property::ne, 1000).pass());
  EXPECT_TRUE(check("radon:4", Property::ne, 1000).pass());
  const auto c = parse_space("cap:1.0");
  const auto v = check_ne(c, cfg_with(2000));
  EXPECT_EQ(v.status, Status::fail);
  expect_replays(c, v);
}

TEST(CheckNe, HullSetsOnEuclidean) {
  TrialConfig cfg = cfg_with(100);
  cfg.ne_sets = TrialConfig::NeSets::hull;
  const auto v = check_ne(parse_space("euclidean:2"), cfg);
  EXPECT_NE(v.status, Status::fail);
}

TEST(CheckStable, Examples) {
  EXPECT_TRUE(check("euclidean:2", Property::so_star, 1000).pass());
  const auto r = parse_space("radon:4");
  const auto v = check_so_star(r, cfg_with(2000));
  EXPECT_EQ(v.status, Status::fail);
  ASSERT_FALSE(v.witnesses.empty());
  // Witness points live on the 3-dimensional product.
  EXPECT_EQ(v.witnesses.front().sample.points.front().dim(), 3u);
  expect_replays(r, v);
  EXPECT_TRUE(check("klein", Property::so_star, 1000).pass());
}

TEST(CheckBusemann, Examples) {
  const auto e = check("euclidean:2", Property::busemann, 1000);
  EXPECT_TRUE(e.pass());
  EXPECT_LE(e.worst_margin, 1e-12);
  EXPECT_TRUE(check("lp:4", Property::busemann, 1000).pass());
  const auto c = parse_space("cap:1.0");
  const auto v = check_busemann(c, cfg_with(2000));
  EXPECT_EQ(v.status, Status::fail);
  expect_replays(c, v);
}

TEST(CheckCat0, Examples) {
  for (const char* n : {"euclidean:2", "euclidean:3"}) {
    const auto v = check(n, Property::cat0, 1000);
    EXPECT_TRUE(v.pass());
    EXPECT_LE(std::abs(v.worst_margin), 1e-9) << n;
  }
  EXPECT_TRUE(check("klein", Property::cat0, 10000).pass());
  const auto l = parse_space("lp:4");
  const auto v = check_cat0(l, cfg_with(1000));
  EXPECT_EQ(v.status, Status::fail);
  expect_replays(l, v);
}

TEST(CheckStrictConvexity, Examples) {
  const auto e = check_strict_p_convexity(parse_space("euclidean:2"), 2.0, cfg_with(500));
  EXPECT_TRUE(e.pass());
  EXPECT_NEAR(-e.worst_margin, 0.25, 1e-9);
  EXPECT_EQ(e.threshold, -1e-6);
  EXPECT_TRUE(check_strict_p_convexity(parse_space("klein"), 2.0, cfg_with(500)).pass());
  EXPECT_TRUE(check_strict_p_convexity(parse_space("lp:4"), 2.0, cfg_with(500)).pass());
}

TEST(CheckStrictConvexity, RejectsP) {
  EXPECT_THROW(check_strict_p_convexity(parse_space("euclidean:2"), 1.0, cfg_with(10)), std::invalid_argument);
}

TEST(Verdict, PassIffWorstMarginWithinThreshold) {
  for (const char* n : {"euclidean:2", "lp:4", "cap:1.0", "hilbert:square"})
    for (Property p : kAllProperties) {
      const auto v = check(n, p, 100, 5);
      if (v.status == Status::inconclusive) continue;
      EXPECT_EQ(v.pass(), v.worst_margin <= v.threshold) << n << " " << property_name(p);
      EXPECT_EQ(v.witnesses.empty(), v.pass()) << n << " " << property_name(p);
      EXPECT_LE(v.witnesses.size(), v.config.witnesses_kept);
      for (std::size_t i = 1; i < v.witnesses.size(); ++i)
        EXPECT_GE(v.witnesses[i - 1].margin, v.witnesses[i].margin);
    }
}

TEST(Verdict, TooManySkippedTrialsIsInconclusive) {
  // On a line, q falls inside eta's segment in a good share of the draws and
  // those trials are skipped; more than 1% skipped means inconclusive.
  const auto v = check("euclidean:1", Property::so, 50);
  EXPECT_EQ(v.status, Status::inconclusive);
  EXPECT_GT(v.skipped * 100, v.trials_run);
  EXPECT_LT(v.skipped, v.trials_run);
  EXPECT_LE(v.worst_margin, v.threshold);
}

TEST(Verdict, InvalidConfig) {
  const auto e = parse_space("euclidean:2");
  TrialConfig c;
  c.trials = 0;
  EXPECT_THROW(check_so(e, c), std::invalid_argument);
  c = {};
  c.tol = 0;
  EXPECT_THROW(check_so(e, c), std::invalid_argument);
}

TEST(Determinism, IndependentOfJobs) {
  for (const char* n : {"lp:4", "cap:1.0"})
    for (Property p : {Property::so, Property::ne, Property::cat0}) {
      TrialConfig a = cfg_with(300, 77), b = a;
      a.jobs = 1;
      b.jobs = 4;
      const auto va = check_property(parse_space(n), p, a), vb = check_property(parse_space(n), p, b);
      EXPECT_EQ(va.status, vb.status);
      EXPECT_EQ(va.worst_margin, vb.worst_margin);
      ASSERT_EQ(va.witnesses.size(), vb.witnesses.size());
      for (std::size_t i = 0; i < va.witnesses.size(); ++i) {
        EXPECT_EQ(va.witnesses[i].trial, vb.witnesses[i].trial);
        EXPECT_EQ(va.witnesses[i].margin, vb.witnesses[i].margin);
      }
    }
}

TEST(Determinism, SeedChangesTheDraws) {
  const auto a = check("lp:4", Property::cat0, 100, 1), b = check("lp:4", Property::cat0, 100, 2);
  EXPECT_NE(a.worst_margin, b.worst_margin);
}

// ---------------------------------------------------------------------------
// modulus

TEST(Modulus, EuclideanAtOne) {
  const auto est = estimate_infty_convexity_modulus(parse_space("euclidean:2"), 1.0, 200000, 11);
  EXPECT_FALSE(est.inconclusive);
  EXPECT_GE(est.rho, 0.133);
  EXPECT_LE(est.rho, 0.14);
}

TEST(Modulus, UniformlyConvexNormsArePositive) {
  for (const char* n : {"lp:4", "radon:4"}) {
    const auto est = estimate_infty_convexity_modulus(parse_space(n), 1.0, 50000, 12);
    EXPECT_GT(est.rho, 0.0) << n;
  }
}

TEST(Modulus, Errors) {
  EXPECT_THROW(estimate_infty_convexity_modulus(parse_space("euclidean:2"), 2.0, 10, 1), std::invalid_argument);
  EXPECT_THROW(estimate_infty_convexity_modulus(parse_space("euclidean:2"), 0.0, 10, 1), std::invalid_argument);
  EXPECT_TRUE(estimate_infty_convexity_modulus(parse_space("euclidean:2"), 1.9999, 3, 1).inconclusive);
}

// ---------------------------------------------------------------------------
// search

TEST(Search, Examples) {
  const auto none = search_counterexample(parse_space("euclidean:2"), Property::cat0, cfg_with(1, 3));
  EXPECT_FALSE(none.witness);
  EXPECT_LE(none.best.margin, 1e-9);

  const auto l = parse_space("lp:4");
  const auto so = search_counterexample(l, Property::so, cfg_with(1, 3));
  ASSERT_TRUE(so.witness);
  EXPECT_GT(so.witness->margin, 0.01);
  EXPECT_NEAR(replay_witness(l, *so.witness, cfg_with(1, 3)), so.witness->margin, 1e-9);

  const auto c = parse_space("cap:1.0");
  const auto ne = search_counterexample(c, Property::ne, cfg_with(1, 3));
  ASSERT_TRUE(ne.witness);
  EXPECT_GT(ne.witness->margin, 0.001);
  EXPECT_NEAR(replay_witness(c, *ne.witness, cfg_with(1, 3)), ne.witness->margin, 1e-9);
}

TEST(Search, RespectsBudgetAndImprovesOnDraws) {
  SearchOptions o;
  o.budget = 600;
  const auto l = parse_space("lp:4");
  const auto r = search_counterexample(l, Property::cat0, cfg_with(1, 4), o);
  EXPECT_LE(r.evaluations, o.budget);
  // The multistart phase alone is the first 240 draws of the same streams.
  TrialConfig c = cfg_with(240, 4);
  EXPECT_GE(r.best.margin, check_cat0(l, c).worst_margin);
}

TEST(Search, RejectsStrictConvexity) {
  EXPECT_THROW(search_counterexample(parse_space("lp:4"), Property::strict_convexity, cfg_with(1)),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// implication rules on synthetic rows

namespace {

std::vector<BatteryCell> row(const std::string& name, std::initializer_list<std::pair<Property, Status>> cells) {
  std::vector<BatteryCell> out;
  for (const auto& [p, s] : cells) out.push_back({name, p, s, 0.0});
  return out;
}

constexpr Status P = Status::pass, F = Status::fail, I = Status::inconclusive;

}  // namespace

TEST(Implications, ConsistentRowsAreClean) {
  using enum Property;
  EXPECT_TRUE(check_implications(row("e", {{so, P}, {a, P}, {ne, P}, {so_star, P}, {ne_star, P}, {busemann, P}, {cat0, P}}))
                  .empty());
  EXPECT_TRUE(check_implications(row("l", {{so, F}, {a, F}, {ne, F}, {so_star, F}, {ne_star, F}, {busemann, P}, {cat0, F}}))
                  .empty());
}

TEST(Implications, EachRuleFires) {
  using enum Property;
  auto msgs = [](std::vector<BatteryCell> c) { return check_implications(c); };
  EXPECT_EQ(msgs(row("x", {{so, P}, {a, F}})), std::vector<std::string>{"x: so <=> a"});
  EXPECT_EQ(msgs(row("x", {{so, F}, {ne, P}})), std::vector<std::string>{"x: ne => so"});
  EXPECT_EQ(msgs(row("x", {{so, P}, {ne, F}, {busemann, P}})), std::vector<std::string>{"x: busemann => (so <=> ne)"});
  EXPECT_EQ(msgs(row("x", {{so_star, P}, {busemann, P}, {cat0, F}})),
            std::vector<std::string>{"x: busemann & so* => cat0"});
  EXPECT_EQ(msgs(row("x", {{so_star, F}, {ne_star, P}})), std::vector<std::string>{"x: ne* => so*"});
  EXPECT_EQ(msgs(row("x", {{cat0, P}, {busemann, F}})), std::vector<std::string>{"x: cat0 => busemann & so* & ne*"});
}

TEST(Implications, InconclusiveCellsAreVacuous) {
  using enum Property;
  EXPECT_TRUE(check_implications(row("x", {{so, I}, {a, F}, {ne, P}})).empty());
  EXPECT_TRUE(check_implications(row("x", {{so, P}, {ne, I}, {busemann, P}})).empty());
}

TEST(BatteryCsv, HeaderQuotingAndFormat) {
  BatteryResult r;
  r.seed = 9;
  r.cells.push_back({"prod(lp:4)", Property::so_star, Status::fail, 0.5});
  r.cells.push_back({"polynorm:1/0,0/1,-1/0,0/-1", Property::so, Status::pass, 1e-17});
  EXPECT_EQ(battery_csv(r),
            "space,property,verdict,worst_margin,seed\n"
            "prod(lp:4),so*,fail,0.5,9\n"
            "\"polynorm:1/0,0/1,-1/0,0/-1\",so,pass,1e-17,9\n");
  EXPECT_EQ(csv_field("a\"b,c"), "\"a\"\"b,c\"");
}
