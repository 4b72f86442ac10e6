#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "orthogeo/properties.hpp"

namespace orthogeo {

inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::json;

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

/// Non-finite margins (every trial skipped) serialize as null.
inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const Point& p) {
  json a = json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

inline Point point_from_json(const json& j) {
  if (!j.is_array() || j.empty() || j.size() > kMaxDim) throw std::invalid_argument("malformed point: " + j.dump());
  Point p(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) p[i] = j[i].get<double>();
  return p;
}

inline std::string_view ne_sets_name(TrialConfig::NeSets s) {
  return s == TrialConfig::NeSets::hull ? "hull" : "segment";
}

inline json to_json(const TrialConfig& c) {
  return {{"trials", c.trials},
          {"tol", c.tol},
          {"seed", c.seed},
          {"grid", c.grid},
          {"refine", c.refine},
          {"p", c.p},
          {"ne_sets", ne_sets_name(c.ne_sets)},
          {"hull_generation", c.hull_generation},
          {"witnesses_kept", c.witnesses_kept}};
}

/// Overlays the keys present in `j` onto `base`.
inline TrialConfig config_from_json(const json& j, TrialConfig base = {}) {
  if (j.contains("trials")) base.trials = j["trials"].get<int>();
  if (j.contains("tol")) base.tol = j["tol"].get<double>();
  if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("grid")) base.grid = j["grid"].get<int>();
  if (j.contains("refine")) base.refine = j["refine"].get<bool>();
  if (j.contains("p")) base.p = j["p"].get<double>();
  if (j.contains("ne_sets")) {
    const auto s = j["ne_sets"].get<std::string>();
    if (s == "hull") base.ne_sets = TrialConfig::NeSets::hull;
    else if (s == "segment") base.ne_sets = TrialConfig::NeSets::segment;
    else throw std::invalid_argument("unknown ne_sets value: " + s);
  }
  if (j.contains("hull_generation")) base.hull_generation = j["hull_generation"].get<int>();
  if (j.contains("witnesses_kept")) base.witnesses_kept = j["witnesses_kept"].get<std::size_t>();
  if (j.contains("jobs")) base.jobs = j["jobs"].get<unsigned>();
  return base;
}

inline json to_json(const Witness& w) {
  json pts = json::array();
  for (const auto& p : w.sample.points) pts.push_back(to_json(p));
  return {{"space", w.space},
          {"property", property_name(w.property)},
          {"points", pts},
          {"scalars", w.sample.scalars},
          {"margin", w.margin},
          {"trial", w.trial}};
}

inline Witness witness_from_json(const json& j) {
  Witness w;
  w.space = j.at("space").get<std::string>();
  const auto name = j.at("property").get<std::string>();
  const auto prop = parse_property(name);
  if (!prop) throw std::invalid_argument("unknown property in witness: " + name);
  w.property = *prop;
  for (const auto& p : j.at("points")) w.sample.points.push_back(point_from_json(p));
  w.sample.scalars = j.at("scalars").get<std::vector<double>>();
  w.margin = j.at("margin").get<double>();
  w.trial = j.at("trial").get<std::int64_t>();
  return w;
}

/// Report of one property check. Keys are emitted in lexicographic order.
inline json verdict_report(const PropertyVerdict& v, double wall_time) {
  json ws = json::array();
  for (const auto& w : v.witnesses) ws.push_back(to_json(w));
  json notes = json::array();
  if (base_property(v.property) == Property::ne)
    notes.push_back(std::string("ne is tested on ") +
                    (v.config.ne_sets == TrialConfig::NeSets::hull ? "sampled hulls of 3 points"
                                                                   : "geodesic segments") +
                    " only; this under-approximates all closed weakly convex sets");
  return {{"tool_version", kToolVersion},
          {"notes", notes},
          {"kind", "check"},
          {"space", v.space},
          {"property", property_name(v.property)},
          {"config", to_json(v.config)},
          {"verdict", status_name(v.status)},
          {"worst_margin", number_or_null(v.worst_margin)},
          {"threshold", v.threshold},
          {"trials_run", v.trials_run},
          {"skipped", v.skipped},
          {"witnesses", ws},
          {"wall_time", wall_time},
          {"seed", v.config.seed}};
}

}  // namespace orthogeo
