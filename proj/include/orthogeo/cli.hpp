#pragma once

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "orthogeo/battery.hpp"
#include "orthogeo/properties.hpp"
#include "orthogeo/report.hpp"
#include "orthogeo/search.hpp"
#include "orthogeo/space_parse.hpp"
#include "orthogeo/tangent.hpp"

namespace orthogeo::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kInconclusive = 2, kUsage = 3 };

/// Environment variable consulted for the default seed.
inline constexpr const char* kSeedEnv = "ORTHOGEO_SEED";

class UsageError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline int exit_code(Status s) {
  switch (s) {
    case Status::pass: return kPass;
    case Status::fail: return kFail;
    case Status::inconclusive: return kInconclusive;
  }
  return kInconclusive;
}

inline std::uint64_t parse_seed(const std::string& s, const std::string& what) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw UsageError("invalid seed in " + what + ": '" + s + "'");
  return v;
}

inline Property parse_property_arg(const std::string& s) {
  const auto p = parse_property(s);
  if (!p) throw UsageError("unknown property '" + s + "' (expected so, a, ne, so*, ne*, busemann, cat0, strict)");
  return *p;
}

inline SpaceHandle parse_space_arg(const std::string& s) {
  try {
    return parse_space(s);
  } catch (const SpaceParseError& e) {
    throw UsageError(std::string("bad space '") + std::string(e.token()) + "': " + e.what());
  }
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> xs;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    double v = 0.0;
    auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc() || end != tok.data() + tok.size())
      throw UsageError("bad " + what + " component '" + tok + "'");
    xs.push_back(v);
  }
  if (xs.empty()) throw UsageError("empty " + what);
  return xs;
}

/// "center" (sphere caps) or comma-separated coordinates.
inline Point parse_point_arg(const Space& space, const std::string& s) {
  if (s == "center") {
    if (space.kind() != Space::Kind::sphere_cap) throw UsageError("point 'center' is only defined for caps");
    return SphereCap::center();
  }
  const std::vector<double> xs = parse_list(s, "point");
  if (xs.size() > kMaxDim) throw UsageError("bad point '" + s + "'");
  const Point p{std::span<const double>(xs)};
  if (p.dim() != space.dim() || !space.admissible(p)) throw UsageError("point '" + s + "' is not in " + space.name());
  return p;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Shared options. Precedence: flag > config file > environment (seed) > default.

struct Common {
  std::string space, property, out, config;
  int trials = 0, grid = 0, hull_generation = 0, budget = 5000;
  double tol = 0.0, p = 0.0;
  std::string seed, ne_sets;
  unsigned jobs = 0;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, bool with_space_property) {
    if (with_space_property) {
      opts["space"] = app->add_option("--space", space, "space descriptor, e.g. lp:4, klein, prod(radon:4)");
      opts["property"] = app->add_option("--property", property, "so, a, ne, so*, ne*, busemann, cat0, strict");
    }
    opts["trials"] = app->add_option("--trials", trials, "number of randomized trials");
    opts["tol"] = app->add_option("--tol", tol, "violation tolerance");
    opts["seed"] = app->add_option("--seed", seed, std::string("master seed (default: $") + kSeedEnv + " or 42)");
    opts["grid"] = app->add_option("--grid", grid, "orthogonality sampling grid");
    opts["p"] = app->add_option("--p", p, "exponent for strict p-convexity");
    opts["ne_sets"] = app->add_option("--ne-sets", ne_sets, "NE test sets: segment or hull");
    opts["hull_generation"] = app->add_option("--hull-generation", hull_generation, "hull iteration depth");
    opts["jobs"] = app->add_option("--jobs", jobs, "worker threads (0 = all cores)");
    opts["out"] = app->add_option("--out", out, "output file");
    opts["config"] = app->add_option("--config", config, "JSON config (same keys as flags, or a report)");
  }

  bool given(const std::string& k) const {
    const auto it = opts.find(k);
    return it != opts.end() && it->second->count() > 0;
  }

  json file() const {
    if (!given("config")) return json::object();
    json j = load_json_file(config);
    if (!j.is_object()) throw UsageError("config '" + config + "' must be a JSON object");
    // A report embeds its config; lift it so that reports re-run as configs.
    if (j.contains("config") && j["config"].is_object()) {
      json flat = j["config"];
      for (const char* k : {"space", "property"})
        if (j.contains(k)) flat[k] = j[k];
      return flat;
    }
    return j;
  }

  TrialConfig trial_config(const json& file) const {
    TrialConfig c;
    if (const char* env = std::getenv(kSeedEnv); env && *env) c.seed = parse_seed(env, kSeedEnv);
    try {
      c = config_from_json(file, c);
    } catch (const json::exception& e) {
      throw UsageError(std::string("bad config value: ") + e.what());
    }
    if (given("trials")) c.trials = trials;
    if (given("tol")) c.tol = tol;
    if (given("seed")) c.seed = parse_seed(seed, "--seed");
    if (given("grid")) c.grid = grid;
    if (given("p")) c.p = p;
    if (given("hull_generation")) c.hull_generation = hull_generation;
    if (given("jobs")) c.jobs = jobs;
    if (given("ne_sets")) {
      if (ne_sets == "hull") c.ne_sets = TrialConfig::NeSets::hull;
      else if (ne_sets == "segment") c.ne_sets = TrialConfig::NeSets::segment;
      else throw UsageError("unknown --ne-sets value '" + ne_sets + "'");
    }
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    return c;
  }

  std::string string_setting(const json& file, const std::string& key, const std::string& flag_value) const {
    if (given(key)) return flag_value;
    if (file.contains(key) && file[key].is_string()) return file[key].get<std::string>();
    throw UsageError("missing required --" + key);
  }
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_check(const Common& a, std::ostream& out) {
  const json file = a.file();
  const TrialConfig cfg = a.trial_config(file);
  const SpaceHandle space = parse_space_arg(a.string_setting(file, "space", a.space));
  const Property prop = parse_property_arg(a.string_setting(file, "property", a.property));
  const auto t0 = std::chrono::steady_clock::now();
  const PropertyVerdict v = check_property(space, prop, cfg);
  const json rep = verdict_report(v, seconds_since(t0));
  if (a.given("out")) {
    write_text(a.out, dump(rep));
    out << v.space << ' ' << property_name(prop) << ' ' << status_name(v.status)
        << " worst_margin=" << format_double(v.worst_margin) << " witnesses=" << v.witnesses.size() << '\n';
  } else {
    out << dump(rep);
  }
  return exit_code(v.status);
}

inline std::vector<std::string> read_battery_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open battery file '" + path + "'");
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    rows.push_back(line.substr(b, e - b + 1));
  }
  if (rows.empty()) throw UsageError("battery file '" + path + "' lists no spaces");
  return rows;
}

inline int cmd_battery(const Common& a, const std::string& battery_file, bool file_given, std::ostream& out,
                       std::ostream& err) {
  const json file = a.file();
  const TrialConfig cfg = a.trial_config(file);
  std::vector<std::string> rows = default_battery_spaces();
  if (file_given) rows = read_battery_file(battery_file);
  for (const auto& r : rows) parse_space_arg(r);
  const BatteryResult res = run_battery(rows, cfg);
  const std::string csv = battery_csv(res);
  if (a.given("out")) write_text(a.out, csv);
  else out << csv;
  for (const auto& v : res.violations) err << "implication violated: " << v << '\n';
  if (!res.violations.empty()) return kFail;
  err << "implications: all hold\n";
  return res.any_inconclusive ? kInconclusive : kPass;
}

inline int cmd_search(const Common& a, std::ostream& out) {
  const json file = a.file();
  const TrialConfig cfg = a.trial_config(file);
  const SpaceHandle space = parse_space_arg(a.string_setting(file, "space", a.space));
  const Property prop = parse_property_arg(a.string_setting(file, "property", a.property));
  SearchOptions opt;
  opt.budget = a.budget;
  if (!a.given("budget") && file.contains("budget")) opt.budget = file["budget"].get<int>();
  if (opt.budget < 1) throw UsageError("--budget must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  SearchResult r;
  try {
    r = search_counterexample(space, prop, cfg, opt);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  json ws = json::array();
  if (r.witness) ws.push_back(to_json(*r.witness));
  const json rep{{"tool_version", kToolVersion},
                 {"kind", "search"},
                 {"space", space->name()},
                 {"property", property_name(prop)},
                 {"config", to_json(cfg)},
                 {"budget", opt.budget},
                 {"evaluations", r.evaluations},
                 {"verdict", r.witness ? "fail" : "pass"},
                 {"worst_margin", number_or_null(r.best.margin)},
                 {"witnesses", ws},
                 {"wall_time", seconds_since(t0)},
                 {"seed", cfg.seed}};
  if (a.given("out")) {
    write_text(a.out, dump(rep));
    out << space->name() << ' ' << property_name(prop) << (r.witness ? " witness" : " none")
        << " best_margin=" << format_double(r.best.margin) << '\n';
  } else {
    out << dump(rep);
  }
  return r.witness ? kFail : kPass;
}

inline int cmd_replay(const std::string& report_path, std::ostream& out) {
  const json rep = load_json_file(report_path);
  TrialConfig cfg;
  std::vector<Witness> ws;
  try {
    cfg = config_from_json(rep.at("config"));
    for (const auto& w : rep.at("witnesses")) ws.push_back(witness_from_json(w));
  } catch (const json::exception& e) {
    throw UsageError("'" + report_path + "' is not a report: " + e.what());
  }
  if (ws.empty()) {
    out << "no witnesses to replay\n";
    return kPass;
  }
  bool ok = true;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const SpaceHandle space = parse_space_arg(ws[i].space);
    const double m = replay_witness(space, ws[i], cfg);
    const double diff = std::abs(m - ws[i].margin);
    ok = ok && diff <= 1e-9;
    out << "witness " << i << ": recorded " << format_double(ws[i].margin) << " replayed " << format_double(m)
        << " diff " << format_double(diff) << '\n';
  }
  return ok ? kPass : kFail;
}

struct TangentArgs {
  std::string point, model, probe = "model", dir1, dir2;
  double c = 2.0, s = 1.0, s2 = 1.0;
  int samples = 100;
};

inline Point parse_direction(const std::string& s, std::size_t dim) {
  const std::vector<double> xs = parse_list(s, "direction");
  if (xs.size() != dim) throw UsageError("direction '" + s + "' must have " + std::to_string(dim) + " components");
  return Point{std::span<const double>(xs)};
}

inline int cmd_tangent(const Common& a, const TangentArgs& t, std::ostream& out) {
  const json file = a.file();
  const TrialConfig cfg = a.trial_config(file);
  const SpaceHandle space = parse_space_arg(a.string_setting(file, "space", a.space));
  std::size_t td = 0;
  try {
    td = tangent_dim(*space);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Point x = parse_point_arg(*space, t.point);
  json rep{{"tool_version", kToolVersion}, {"kind", "tangent"}, {"space", space->name()},
           {"point", to_json(x)},          {"probe", t.probe},    {"seed", cfg.seed}};
  bool converged = true;
  if (t.probe == "model") {
    if (t.model.empty()) throw UsageError("--probe model needs --model");
    const SpaceHandle model = parse_space_arg(t.model);
    ConeComparison cmp;
    try {
      cmp = compare_cone_to_model(space, x, model, t.samples, cfg.seed);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    converged = cmp.converged;
    rep["model"] = model->name();
    rep["samples"] = cmp.pairs;
    rep["max_deviation"] = cmp.max_deviation;
    rep["schedules"] = cmp.schedules;
  } else if (t.probe == "homogeneity") {
    if (!(t.c > 0.0)) throw UsageError("--c must be > 0");
    double worst = 0.0;
    json schedules = json::array();
    for (int i = 0; i < t.samples; ++i) {
      RandomStream rng = RandomStream::for_task(cfg.seed, static_cast<std::uint64_t>(i));
      ConeProbe p{x, direction_carrier(*space, x, random_direction(td, rng)),
                  direction_carrier(*space, x, random_direction(td, rng))};
      p.s = rng.uniform(0.2, 1.0);
      p.s_prime = rng.uniform(0.2, 1.0);
      const HomogeneityDefect d = cone_homogeneity_defect(space, p, t.c);
      worst = std::max(worst, d.defect);
      converged = converged && d.converged;
      schedules.push_back(cone_distance(space, p).q);
    }
    rep["c"] = t.c;
    rep["samples"] = t.samples;
    rep["max_defect"] = worst;
    rep["schedules"] = schedules;
  } else if (t.probe == "distance") {
    if (t.dir1.empty() || t.dir2.empty()) throw UsageError("--probe distance needs --dir1 and --dir2");
    ConeProbe p{x, direction_carrier(*space, x, parse_direction(t.dir1, td)),
                direction_carrier(*space, x, parse_direction(t.dir2, td))};
    p.s = t.s;
    p.s_prime = t.s2;
    const ConeValue cv = cone_distance(space, p);
    converged = cv.converged;
    rep["value"] = cv.value;
    rep["rescaled"] = cv.rescaled;
    rep["lambdas"] = cv.lambdas;
    rep["q"] = cv.q;
  } else {
    throw UsageError("unknown --probe '" + t.probe + "' (expected model, homogeneity, distance)");
  }
  rep["converged"] = converged;
  if (a.given("out")) write_text(a.out, dump(rep));
  else out << dump(rep);
  return converged ? kPass : kInconclusive;
}

inline int cmd_modulus(const Common& a, const std::string& eps_list, int samples, std::ostream& out) {
  const json file = a.file();
  const TrialConfig cfg = a.trial_config(file);
  const SpaceHandle space = parse_space_arg(a.string_setting(file, "space", a.space));
  std::ostringstream csv;
  csv << "space,eps,rho,qualifying\n";
  bool any_inconclusive = false;
  for (const double e : parse_list(eps_list, "eps list")) {
    if (!(e > 0.0 && e < 2.0)) throw UsageError("eps must lie in (0, 2): " + format_double(e));
    const ModulusEstimate m = estimate_infty_convexity_modulus(space, e, samples, cfg.seed);
    any_inconclusive = any_inconclusive || m.inconclusive;
    csv << csv_field(space->name()) << ',' << format_double(e) << ',' << format_double(m.rho) << ',' << m.qualifying
        << '\n';
  }
  if (a.given("out")) write_text(a.out, csv.str());
  else out << csv.str();
  return any_inconclusive ? kInconclusive : kPass;
}

inline int cmd_unitball(const Common& a, int n, std::ostream& out) {
  const json file = a.file();
  const SpaceHandle space = parse_space_arg(a.string_setting(file, "space", a.space));
  const NormGauge* g = space->gauge();
  if (!g) throw UsageError("unit ball needs a normed plane, got '" + space->name() + "'");
  if (n < 3) throw UsageError("--n must be >= 3");
  std::ostringstream csv;
  csv << "x,y\n";
  for (int i = 0; i <= n; ++i) {
    const Point p = g->unit_boundary(2.0 * std::numbers::pi * i / n);
    csv << format_double(p[0]) << ',' << format_double(p[1]) << '\n';
  }
  if (a.given("out")) write_text(a.out, csv.str());
  else out << csv.str();
  return kPass;
}

// ---------------------------------------------------------------------------

/// Entry point of the orthogeo tool. Exit codes: 0 pass, 1 fail, 2 inconclusive, 3 usage.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Randomized checks of orthogonality and projection properties of geodesic spaces", "orthogeo"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Common check_a, battery_a, search_a, tangent_a, modulus_a, unitball_a;
  auto* check = app.add_subcommand("check", "run one property checker on one space");
  check_a.add(check, true);

  auto* battery = app.add_subcommand("battery", "all properties on all battery spaces, as a CSV matrix");
  battery_a.add(battery, false);
  std::string battery_file;
  auto* bf = battery->add_option("--battery-file", battery_file, "one space descriptor per line");

  auto* search = app.add_subcommand("search", "optimize for a counterexample");
  search_a.add(search, true);
  search_a.opts["budget"] = search->add_option("--budget", search_a.budget, "margin evaluations");

  auto* replay = app.add_subcommand("replay", "re-evaluate the witnesses of a report");
  std::string report_path;
  replay->add_option("--report", report_path, "report JSON")->required();

  auto* tangent = app.add_subcommand("tangent", "tangent-cone diagnostics");
  tangent_a.add(tangent, true);
  TangentArgs targs;
  tangent->add_option("--point", targs.point, "base point: comma-separated coordinates or 'center'")->required();
  tangent->add_option("--model", targs.model, "normed model space for --probe model");
  tangent->add_option("--probe", targs.probe, "model, homogeneity or distance");
  tangent->add_option("--c", targs.c, "homogeneity factor");
  tangent->add_option("--samples", targs.samples, "sampled direction pairs");
  tangent->add_option("--dir1", targs.dir1, "first direction (--probe distance)");
  tangent->add_option("--dir2", targs.dir2, "second direction (--probe distance)");
  tangent->add_option("--s", targs.s, "cone parameter on the first direction");
  tangent->add_option("--s2", targs.s2, "cone parameter on the second direction");

  auto* modulus = app.add_subcommand("modulus", "uniform infinity-convexity modulus estimates as CSV");
  modulus_a.add(modulus, true);
  std::string eps_list = "0.25,0.5,1,1.5";
  int mod_samples = 200000;
  modulus->add_option("--eps", eps_list, "comma-separated eps values in (0,2)");
  modulus->add_option("--samples", mod_samples, "sampled triples per eps");

  auto* unitball = app.add_subcommand("unitball", "unit-circle polyline of a normed plane as CSV");
  unitball_a.add(unitball, true);
  int ub_n = 256;
  unitball->add_option("--n", ub_n, "polyline segments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << '\n';
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*check) return cmd_check(check_a, out);
    if (*battery) return cmd_battery(battery_a, battery_file, bf->count() > 0, out, err);
    if (*search) return cmd_search(search_a, out);
    if (*replay) return cmd_replay(report_path, out);
    if (*tangent) return cmd_tangent(tangent_a, targs, out);
    if (*modulus) return cmd_modulus(modulus_a, eps_list, mod_samples, out);
    if (*unitball) return cmd_unitball(unitball_a, ub_n, out);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInconclusive;
  }
  return kUsage;
}

}  // namespace orthogeo::cli
