#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "orthogeo/properties.hpp"
#include "orthogeo/report.hpp"
#include "orthogeo/space_parse.hpp"

namespace orthogeo {

inline const std::vector<std::string>& default_battery_spaces() {
  static const std::vector<std::string> rows{"euclidean:2", "euclidean:3", "lp:4",           "radon:4",
                                             "klein",       "hilbert:square", "hilbert:ellipse", "cap:1.0"};
  return rows;
}

struct BatteryCell {
  std::string space;
  Property property = Property::so;
  Status status = Status::inconclusive;
  double worst_margin = 0.0;
};

struct BatteryResult {
  std::vector<BatteryCell> cells;
  std::uint64_t seed = 0;
  /// Human-readable description of every violated implication.
  std::vector<std::string> violations;
  bool any_inconclusive = false;

  const BatteryCell* find(const std::string& space, Property p) const {
    for (const auto& c : cells)
      if (c.space == space && c.property == p) return &c;
    return nullptr;
  }
};

/// Implications between the properties that every row must respect. Only
/// definite verdicts take part; inconclusive cells make a rule vacuous.
inline std::vector<std::string> check_implications(const std::vector<BatteryCell>& cells) {
  std::map<std::string, std::map<Property, Status>> rows;
  std::vector<std::string> order;
  for (const auto& c : cells) {
    if (!rows.count(c.space)) order.push_back(c.space);
    rows[c.space][c.property] = c.status;
  }
  std::vector<std::string> out;
  for (const auto& space : order) {
    const auto& r = rows[space];
    // 1 = pass, 0 = fail, -1 = unknown
    auto v = [&](Property p) {
      const auto it = r.find(p);
      if (it == r.end() || it->second == Status::inconclusive) return -1;
      return it->second == Status::pass ? 1 : 0;
    };
    auto bad = [&](const char* rule) { out.push_back(space + ": " + rule); };
    const int so = v(Property::so), a = v(Property::a), ne = v(Property::ne), sos = v(Property::so_star),
              nes = v(Property::ne_star), bus = v(Property::busemann), cat = v(Property::cat0);
    if (so >= 0 && a >= 0 && so != a) bad("so <=> a");
    if (ne == 1 && so == 0) bad("ne => so");
    if (bus == 1 && so >= 0 && ne >= 0 && so != ne) bad("busemann => (so <=> ne)");
    if (bus == 1 && sos == 1 && cat == 0) bad("busemann & so* => cat0");
    if (nes == 1 && sos == 0) bad("ne* => so*");
    if (cat == 1 && (bus == 0 || sos == 0 || nes == 0)) bad("cat0 => busemann & so* & ne*");
  }
  return out;
}

inline BatteryResult run_battery(const std::vector<std::string>& spaces, const TrialConfig& cfg) {
  BatteryResult res;
  res.seed = cfg.seed;
  for (const auto& name : spaces) {
    const SpaceHandle space = parse_space(name);
    for (Property p : kAllProperties) {
      const PropertyVerdict v = check_property(space, p, cfg);
      res.cells.push_back({name, p, v.status, v.worst_margin});
      res.any_inconclusive = res.any_inconclusive || v.status == Status::inconclusive;
    }
  }
  res.violations = check_implications(res.cells);
  return res;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

inline std::string battery_csv(const BatteryResult& r) {
  std::ostringstream os;
  os << "space,property,verdict,worst_margin,seed\n";
  for (const auto& c : r.cells)
    os << csv_field(c.space) << ',' << property_name(c.property) << ',' << status_name(c.status) << ','
       << format_double(c.worst_margin) << ',' << r.seed << '\n';
  return os.str();
}

}  // namespace orthogeo
