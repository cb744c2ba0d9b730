#pragma once

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <locale>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vortexgas/admissibility.hpp"
#include "vortexgas/configuration.hpp"
#include "vortexgas/dynamics.hpp"
#include "vortexgas/ensemble.hpp"
#include "vortexgas/error.hpp"
#include "vortexgas/flow_field.hpp"
#include "vortexgas/io.hpp"
#include "vortexgas/landau_ginzburg.hpp"
#include "vortexgas/rng.hpp"
#include "vortexgas/version.hpp"
#include "vortexgas/vortex_core.hpp"

namespace vortexgas::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum class Command { simulate, sample, scan, field, order_parameter, check };

inline std::optional<Command> parse_command(std::string_view name) {
  if (name == "simulate") return Command::simulate;
  if (name == "sample") return Command::sample;
  if (name == "scan") return Command::scan;
  if (name == "field") return Command::field;
  if (name == "order-parameter") return Command::order_parameter;
  if (name == "check") return Command::check;
  return std::nullopt;
}

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::sample: return "sample";
    case Command::scan: return "scan";
    case Command::field: return "field";
    case Command::order_parameter: return "order-parameter";
    case Command::check: return "check";
  }
  return "unknown";
}

struct RunConfig {
  Command command = Command::simulate;
  std::string config_path;             // empty: start from {}
  std::string out_dir = ".";
  std::vector<std::string> overrides;  // key=value, key may be dotted
  std::optional<std::uint64_t> seed;
};

struct RunOutcome {
  int exit_status = 0;
  json error;  // null on success
  std::vector<std::string> artifacts;
};

inline int exit_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config_parse:
    case ErrorCode::invalid_argument: return 2;
    case ErrorCode::inadmissible:
    case ErrorCode::unsupported_geometry: return 3;
    case ErrorCode::io_failure: return 5;
    default: return 4;
  }
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& msg) {
  throw Error(ErrorCode::config_parse, msg);
}

/// Strict object reader: every key must be consumed or `finish` fails.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) parse_fail("'" + where_ + "' must be a JSON object");
  }

  /// True when the key is present and non-null; marks it as known.
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) parse_fail("missing required key '" + path(key) + "'");
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) parse_fail("key '" + path(key) + "' must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double def) { return has(key) ? number(key) : mark(key, def); }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) parse_fail("key '" + path(key) + "' must be an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long def) {
    return has(key) ? integer(key) : mark(key, def);
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return mark(key, def);
    const json& v = raw(key);
    if (!v.is_boolean()) parse_fail("key '" + path(key) + "' must be a boolean");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) parse_fail("key '" + path(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) parse_fail("unknown key '" + path(key) + "'");
    }
  }

 private:
  template <typename T>
  T mark(const std::string& key, T def) {
    seen_.insert(key);
    return def;
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

inline Geometry parse_geometry(const json& j) {
  Reader r(j, "geometry");
  const auto kind = r.string("kind");
  Geometry g = Geometry::plane();
  if (kind == "plane") {
    g = Geometry::plane();
  } else if (kind == "sphere") {
    g = Geometry::sphere();
  } else if (kind == "torus") {
    const double L1 = r.number("L1");
    const double L2 = r.number("L2");
    g = Geometry::torus(L1, L2, r.boolean("allow_extreme_aspect", false));
  } else {
    parse_fail("geometry.kind must be one of plane, torus, sphere (got '" + kind + "')");
  }
  if (!g.is_torus()) {
    r.number("L1", 0.0);
    r.number("L2", 0.0);
    r.boolean("allow_extreme_aspect", false);
  }
  r.finish();
  return g;
}

inline json geometry_json(const Geometry& g) {
  json j{{"kind", std::string(to_string(g.kind()))}};
  if (g.is_torus()) {
    j["L1"] = g.L1();
    j["L2"] = g.L2();
  }
  return j;
}

inline std::vector<Vortex> parse_vortices(const json& j, const char* order_key = "charge") {
  if (!j.is_array()) parse_fail("vortex list must be an array");
  std::vector<Vortex> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Reader r(j[i], "vortices[" + std::to_string(i) + "]");
    const double re = r.number("re");
    const double im = r.number("im");
    const auto n = r.integer(order_key);
    r.finish();
    out.push_back({{re, im}, n});
  }
  return out;
}

inline json vortex_json(const Vortex& v) {
  return {{"re", v.position.real()}, {"im", v.position.imag()}, {"charge", v.charge}};
}

inline json vortices_json(std::span<const Vortex> vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(vortex_json(v));
  return a;
}

inline json conserved_json(const ConservedSet& c) {
  json j{{"energy", c.energy}, {"total_charge", c.total_charge}};
  j["dipole_moment"] = c.dipole_moment
                           ? json::array({c.dipole_moment->real(), c.dipole_moment->imag()})
                           : json(nullptr);
  j["angular_moment"] = c.angular_moment ? json(*c.angular_moment) : json(nullptr);
  return j;
}

inline json event_json(const AnnihilationEvent& e) {
  return {{"time", e.time},
          {"first", vortex_json(e.first)},
          {"second", vortex_json(e.second)},
          {"merged", e.merged ? vortex_json(*e.merged) : json(nullptr)},
          {"separation", e.separation},
          {"energy_before", e.energy_before},
          {"energy_after", e.energy_after}};
}

inline void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) parse_fail("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  if (value.is_object() || value.is_array()) parse_fail("--set " + key + ": only scalar values allowed");

  json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) parse_fail("--set: malformed key '" + key + "'");
    if (!node->is_object()) parse_fail("--set " + key + ": '" + part + "' is not inside an object");
    if (dot == std::string::npos) {
      if (node->contains(part) && ((*node)[part].is_object() || (*node)[part].is_array())) {
        parse_fail("--set " + key + ": target is not a scalar field");
      }
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

struct Context {
  fs::path out_dir;
  fs::path config_dir;
  std::uint64_t seed = 0;
  json resolved = json::object();
  std::vector<std::string> artifacts;

  void write(const std::string& name, const std::string& content) {
    io::write_file((out_dir / name).string(), content);
    artifacts.push_back(name);
  }
};

inline std::ostringstream csv_stream() {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  return os;
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- simulate

struct SimulationInput {
  Configuration initial{Geometry::plane()};
  double t_end = 0.0;
  IntegrationOptions options;
};

inline SimulationInput parse_simulation(Reader& r, Context& ctx) {
  const Geometry g = r.has("geometry") ? parse_geometry(r.raw("geometry")) : Geometry::plane();
  std::vector<Vortex> vs;
  json random_echo = nullptr;
  if (r.has("vortices") && r.has("random")) parse_fail("give either 'vortices' or 'random', not both");
  if (r.has("random")) {
    Reader rr(r.raw("random"), "random");
    const auto n_pairs = rr.integer("n_pairs");
    const double half_width = rr.number("half_width", 1.0);
    const double min_sep = rr.number("min_separation", 0.1);
    rr.finish();
    if (n_pairs < 0 || n_pairs > 100000) parse_fail("random.n_pairs out of range");
    if (!(half_width > 0.0) || !(min_sep >= 0.0)) parse_fail("random: half_width > 0, min_separation >= 0");
    Rng rng(ctx.seed);
    const Configuration probe(g, {});
    for (long long i = 0; i < 2 * n_pairs; ++i) {
      Complex z;
      int tries = 0;
      bool ok = false;
      while (!ok) {
        if (++tries > 100000) throw Error(ErrorCode::invalid_argument, "cannot place random vortices");
        z = g.is_torus() ? Complex{rng.uniform(0.0, g.L1()), rng.uniform(0.0, g.L2())}
                         : Complex{rng.uniform(-half_width, half_width), rng.uniform(-half_width, half_width)};
        ok = std::all_of(vs.begin(), vs.end(), [&](const Vortex& v) {
          return g.is_sphere() || distance(g, z, v.position) >= min_sep;
        });
      }
      vs.push_back({z, i % 2 == 0 ? 1 : -1});
    }
    random_echo = {{"n_pairs", n_pairs}, {"half_width", half_width}, {"min_separation", min_sep}};
  } else {
    vs = parse_vortices(r.raw("vortices"));
  }

  SimulationInput in;
  in.initial = Configuration(g, vs);
  in.t_end = r.number("t_end");
  auto& o = in.options;
  o.output_interval = r.number("output_interval", 0.0);
  o.eta_step = r.number("eta_step", o.eta_step);
  o.tolerance = r.number("tolerance", o.tolerance);
  o.annihilation = r.boolean("annihilation", o.annihilation);
  o.r_core = r.number("r_core", o.r_core);
  o.coincidence_eps = r.number("coincidence_eps", o.coincidence_eps);

  auto& res = ctx.resolved;
  res["geometry"] = geometry_json(g);
  if (!random_echo.is_null()) res["random"] = random_echo;
  res["vortices"] = vortices_json(in.initial.vortices());
  res["t_end"] = in.t_end;
  res["output_interval"] = o.output_interval;
  res["eta_step"] = o.eta_step;
  res["tolerance"] = o.tolerance;
  res["annihilation"] = o.annihilation;
  res["r_core"] = o.r_core;
  res["coincidence_eps"] = o.coincidence_eps;
  return in;
}

struct Frame {
  double time;
  std::vector<Vortex> vortices;
  std::optional<ConservedSet> conserved;
};

struct DriftAccumulator {
  double abs = 0.0;
  std::optional<double> rel = 0.0;
  bool defined = false;

  void add(double delta, double base) {
    defined = true;
    abs = std::max(abs, delta);
    if (base > 0.0) {
      if (rel) rel = std::max(*rel, delta / base);
    } else if (delta > 0.0) {
      rel.reset();
    }
  }

  json to_json() const {
    if (!defined) return nullptr;
    return {{"absolute", abs}, {"relative", rel ? json(*rel) : json(nullptr)}};
  }
};

/// Max drift of each conserved quantity within segments of constant vortex
/// content (segments break at annihilation events).
inline json conservation_report(const Geometry& g, const std::vector<Frame>& frames) {
  DriftAccumulator energy, dipole, angular;
  Charge charge_drift = 0;
  json segments = json::array();
  std::size_t seg_start = 0;
  const auto same_content = [](const Frame& a, const Frame& b) {
    if (a.vortices.size() != b.vortices.size()) return false;
    for (std::size_t i = 0; i < a.vortices.size(); ++i) {
      if (a.vortices[i].charge != b.vortices[i].charge) return false;
    }
    return true;
  };
  const auto close_segment = [&](std::size_t end) {
    segments.push_back({{"start_time", frames[seg_start].time},
                        {"end_time", frames[end].time},
                        {"frames", end - seg_start + 1},
                        {"n_vortices", frames[seg_start].vortices.size()}});
  };
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && !same_content(frames[seg_start], frames[i])) {
      close_segment(i - 1);
      seg_start = i;
    }
    const auto& c0 = frames[seg_start].conserved;
    const auto& c = frames[i].conserved;
    if (!c0 || !c) continue;
    energy.add(std::abs(c->energy - c0->energy), std::abs(c0->energy));
    if (c->dipole_moment && c0->dipole_moment) {
      dipole.add(std::abs(*c->dipole_moment - *c0->dipole_moment), std::abs(*c0->dipole_moment));
    }
    if (c->angular_moment && c0->angular_moment) {
      angular.add(std::abs(*c->angular_moment - *c0->angular_moment), std::abs(*c0->angular_moment));
    }
    charge_drift = std::max<Charge>(charge_drift, std::abs(c->total_charge - frames[0].conserved->total_charge));
  }
  if (!frames.empty()) close_segment(frames.size() - 1);
  return {{"geometry", geometry_json(g)},
          {"frames", frames.size()},
          {"segments", segments},
          {"max_drift",
           {{"energy", energy.to_json()},
            {"dipole_moment", dipole.to_json()},
            {"angular_moment", angular.to_json()},
            {"total_charge", charge_drift}}}};
}

inline std::vector<Frame> frames_from_states(const std::vector<TrajectoryState>& states) {
  std::vector<Frame> out;
  for (const auto& s : states) {
    Frame f{s.time, {s.config.vortices().begin(), s.config.vortices().end()}, std::nullopt};
    if (!s.config.empty()) f.conserved = s.conserved;
    out.push_back(std::move(f));
  }
  return out;
}

inline void run_simulate(Reader& r, Context& ctx) {
  const auto in = parse_simulation(r, ctx);
  r.finish();
  const auto states = integrate(in.initial, in.t_end, in.options);

  auto csv = csv_stream();
  io::write_trajectory_csv(csv, states);
  ctx.write("trajectory.csv", csv.str());

  json series = json::array();
  json events = json::array();
  for (const auto& s : states) {
    json row = conserved_json(s.conserved);
    row["time"] = s.time;
    row["n_vortices"] = s.config.size();
    series.push_back(row);
    for (const auto& e : s.events) events.push_back(event_json(e));
  }
  json doc{{"conserved", series}, {"events", events},
           {"report", conservation_report(in.initial.geometry(), frames_from_states(states))}};
  ctx.write("trajectory.json", dump(doc));
}

inline void run_check(Reader& r, Context& ctx) {
  json report;
  if (r.has("trajectory")) {
    const Geometry g = parse_geometry(r.raw("geometry"));
    const double eps = r.number("coincidence_eps", kDefaultCoincidenceEps);
    fs::path path = r.string("trajectory");
    r.finish();
    if (path.is_relative()) path = ctx.config_dir / path;
    std::istringstream is(io::read_file(path.string()));
    const auto raw = io::read_trajectory_csv(is);
    std::vector<Frame> frames;
    for (const auto& f : raw) {
      const Configuration c(g, f.vortices);
      frames.push_back({f.time, f.vortices, conserved_set(c, eps)});
    }
    ctx.resolved["geometry"] = geometry_json(g);
    ctx.resolved["trajectory"] = path.string();
    ctx.resolved["coincidence_eps"] = eps;
    report = conservation_report(g, frames);
    report["source"] = "stored trajectory";
  } else {
    const auto in = parse_simulation(r, ctx);
    r.finish();
    report = conservation_report(in.initial.geometry(),
                                 frames_from_states(integrate(in.initial, in.t_end, in.options)));
    report["source"] = "fresh integration";
  }
  ctx.write("check.json", dump(report));
}

// ---------------------------------------------------------------- ensemble

inline EnsembleSpec parse_ensemble(Reader& r, Context& ctx, bool scan) {
  EnsembleSpec s;
  s.geometry = r.has("geometry") ? parse_geometry(r.raw("geometry")) : Geometry::torus(1, 1);
  s.n_pairs = static_cast<int>(r.integer("n_pairs"));
  if (!scan) s.beta = r.number("beta");
  s.n_sweeps = r.integer("n_sweeps", s.n_sweeps);
  s.n_burn = r.integer("n_burn", s.n_burn);
  s.proposal_scale = r.number("proposal_scale", 0.0);
  s.hard_core = r.number("hard_core", 0.0);
  s.r_pair = r.number("r_pair", 0.0);
  s.dump_every = r.integer("dump_every", 0);
  r.integer("seed", 0);  // consumed through ctx.seed
  s.seed = ctx.seed;
  if (!s.geometry.is_torus()) validate(s);
  s = resolve(s);

  auto& res = ctx.resolved;
  res["geometry"] = geometry_json(s.geometry);
  res["n_pairs"] = s.n_pairs;
  if (!scan) res["beta"] = s.beta;
  res["n_sweeps"] = s.n_sweeps;
  res["n_burn"] = s.n_burn;
  res["proposal_scale"] = s.proposal_scale;
  res["hard_core"] = s.hard_core;
  res["r_pair"] = s.r_pair;
  res["dump_every"] = s.dump_every;
  return s;
}

inline constexpr std::string_view kScanHeader = "beta,mean_energy,acceptance,dipole_fraction,mean_nn_distance";

inline void write_scan_row(std::ostream& os, double beta, const EnsembleStats& st) {
  os << io::format_double(beta) << ',' << io::format_double(st.mean_energy) << ','
     << io::format_double(st.acceptance) << ',' << io::format_double(st.dipole_fraction) << ','
     << io::format_double(st.mean_nn_distance) << '\n';
}

inline json stats_json(double beta, const EnsembleStats& st) {
  return {{"beta", beta},
          {"mean_energy", st.mean_energy},
          {"acceptance", st.acceptance},
          {"acceptance_excluding_hard_core", st.acceptance_excluding_hard_core},
          {"hard_core_rejection_rate", st.hard_core_rejection_rate},
          {"dipole_fraction", st.dipole_fraction},
          {"mean_nn_distance", st.mean_nn_distance},
          {"samples", st.samples}};
}

inline void run_sample(Reader& r, Context& ctx) {
  const auto spec = parse_ensemble(r, ctx, false);
  r.finish();
  const auto result = sample(spec);

  auto csv = csv_stream();
  csv << kScanHeader << '\n';
  write_scan_row(csv, spec.beta, result.stats);
  ctx.write("sample.csv", csv.str());
  ctx.write("sample.json", dump(stats_json(spec.beta, result.stats)));

  if (!result.dumps.empty()) {
    auto dumps = csv_stream();
    dumps << io::kTrajectoryHeader << '\n';
    for (std::size_t d = 0; d < result.dumps.size(); ++d) {
      const double sweep = static_cast<double>((d + 1) * static_cast<std::size_t>(spec.dump_every));
      const auto vs = result.dumps[d].vortices();
      for (std::size_t i = 0; i < vs.size(); ++i) io::write_trajectory_row(dumps, sweep, i, vs[i]);
    }
    ctx.write("samples.csv", dumps.str());
  }
}

inline void run_scan(Reader& r, Context& ctx) {
  const json& betas_json = r.raw("betas");
  if (!betas_json.is_array() || betas_json.empty()) parse_fail("'betas' must be a nonempty array");
  std::vector<double> betas;
  for (const auto& b : betas_json) {
    if (!b.is_number()) parse_fail("'betas' entries must be numbers");
    betas.push_back(b.get<double>());
  }
  const auto spec = parse_ensemble(r, ctx, true);
  r.finish();
  ctx.resolved["betas"] = betas;
  const auto results = temperature_scan(spec, betas);

  auto csv = csv_stream();
  csv << kScanHeader << '\n';
  json rows = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    write_scan_row(csv, betas[i], results[i].stats);
    json row = stats_json(betas[i], results[i].stats);
    row["seed"] = results[i].spec.seed;
    rows.push_back(row);
  }
  ctx.write("scan.csv", csv.str());
  ctx.write("scan.json", dump(rows));
}

// ---------------------------------------------------------------- field

inline void run_field(Reader& r, Context& ctx) {
  std::vector<DivisorPoint> pts;
  if (r.has("divisor") == r.has("vortices")) parse_fail("give exactly one of 'divisor' or 'vortices'");
  for (const auto& v : parse_vortices(r.raw(r.has("divisor") ? "divisor" : "vortices"),
                                      r.has("divisor") ? "order" : "charge")) {
    pts.push_back({v.position, v.charge});
  }
  const FlowPotential f{Divisor(pts)};

  Reader w(r.raw("window"), "window");
  const Window window{w.number("x_min"), w.number("x_max"), w.number("y_min"), w.number("y_max")};
  w.finish();
  std::size_t nx = 65, ny = 65;
  if (r.has("resolution")) {
    Reader res(r.raw("resolution"), "resolution");
    nx = static_cast<std::size_t>(std::max<long long>(0, res.integer("nx")));
    ny = static_cast<std::size_t>(std::max<long long>(0, res.integer("ny")));
    res.finish();
  }
  const auto n_points = static_cast<std::size_t>(std::max<long long>(0, r.integer("n_points", 1024)));

  std::vector<Circle> contours;
  if (r.has("contours")) {
    const json& cj = r.raw("contours");
    if (!cj.is_array()) parse_fail("'contours' must be an array");
    for (std::size_t i = 0; i < cj.size(); ++i) {
      Reader c(cj[i], "contours[" + std::to_string(i) + "]");
      contours.push_back({{c.number("re"), c.number("im")}, c.number("radius")});
      c.finish();
    }
  } else {
    double radius = 1.0;
    for (const auto& p : pts) radius = std::max(radius, std::abs(p.position) + 1.0);
    contours.push_back({{0.0, 0.0}, radius});
  }
  r.finish();

  json divisor = json::array();
  for (const auto& p : pts) divisor.push_back({{"re", p.position.real()}, {"im", p.position.imag()}, {"order", p.order}});
  auto& res = ctx.resolved;
  res["divisor"] = divisor;
  res["window"] = {{"x_min", window.x_min}, {"x_max", window.x_max}, {"y_min", window.y_min}, {"y_max", window.y_max}};
  res["resolution"] = {{"nx", nx}, {"ny", ny}};
  res["n_points"] = n_points;
  json contours_echo = json::array();
  for (const auto& c : contours) contours_echo.push_back({{"re", c.center.real()}, {"im", c.center.imag()}, {"radius", c.radius}});
  res["contours"] = contours_echo;

  const auto grid = field_grid(f, window, nx, ny);
  auto csv = csv_stream();
  csv << "x,y,u,v\n";
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      csv << io::format_double(grid.x(i)) << ',' << io::format_double(grid.y(j)) << ',';
      if (const auto& v = grid.at(i, j)) {
        csv << io::format_double(v->real()) << ',' << io::format_double(v->imag());
      } else {
        csv << ',';
      }
      csv << '\n';
    }
  }
  ctx.write("field.csv", csv.str());
  ctx.write("divisor.json", dump(divisor));

  json circ = json::array();
  for (const auto& c : contours) {
    const auto result = circulation(f, c, n_points);
    circ.push_back({{"re", c.center.real()}, {"im", c.center.imag()}, {"radius", c.radius},
                    {"winding", result.winding}, {"circulation", result.circulation()},
                    {"residual", result.residual}, {"nodes", result.nodes}});
  }
  ctx.write("field.json", dump({{"chern_class", chern_class(f.divisor())}, {"contours", circ}}));
}

// ---------------------------------------------------------------- order parameter

inline void run_order_parameter(Reader& r, Context& ctx) {
  lg::LGModel model;
  json model_echo;
  if (!r.has("model") || r.raw("model").is_string()) {
    const std::string name = r.has("model") ? r.string("model") : "quadratic";
    if (name == "quadratic") {
      model = lg::LGModel::linear(1.0, 1.0, std::nullopt, 1.0, 1.0);
      model_echo = {{"name", name}, {"a0", 1.0}, {"b", 1.0}, {"c", nullptr}, {"m", 1.0}, {"Tc", 1.0}};
    } else if (name == "sextic") {
      model = lg::LGModel::linear(1.0, 1.0, 0.5, 1.0, 1.0);
      model_echo = {{"name", name}, {"a0", 1.0}, {"b", 1.0}, {"c", 0.5}, {"m", 1.0}, {"Tc", 1.0}};
    } else {
      parse_fail("unknown built-in model '" + name + "' (quadratic, sextic)");
    }
  } else {
    Reader m(r.raw("model"), "model");
    const double a0 = m.number("a0");
    const double b = m.number("b");
    std::optional<double> c;
    if (m.has("c") && !m.raw("c").is_null()) c = m.number("c");
    const double mass = m.number("m", 1.0);
    const double tc = m.number("Tc");
    m.finish();
    if (!(mass > 0.0)) parse_fail("model.m must be positive");
    model = lg::LGModel::linear(a0, b, c, mass, tc);
    model_echo = {{"a0", a0}, {"b", b}, {"c", c ? json(*c) : json(nullptr)}, {"m", mass}, {"Tc", tc}};
  }

  std::vector<double> temps;
  json grid_echo;
  if (r.has("temperatures") && r.has("T_grid")) parse_fail("give either 'temperatures' or 'T_grid'");
  if (r.has("temperatures")) {
    const json& tj = r.raw("temperatures");
    if (!tj.is_array()) parse_fail("'temperatures' must be an array");
    for (const auto& t : tj) {
      if (!t.is_number()) parse_fail("'temperatures' entries must be numbers");
      temps.push_back(t.get<double>());
    }
    grid_echo = temps;
  } else {
    double lo = 0.0, hi = 2.0;
    long long points = 101;
    if (r.has("T_grid")) {
      Reader gr(r.raw("T_grid"), "T_grid");
      lo = gr.number("min");
      hi = gr.number("max");
      points = gr.integer("points");
      gr.finish();
    }
    if (points < 1 || (points > 1 && !(hi > lo))) parse_fail("T_grid needs points >= 1 and max > min");
    for (long long i = 0; i < points; ++i) {
      temps.push_back(points == 1 ? lo : lo + (hi - lo) * double(i) / double(points - 1));
    }
    grid_echo = {{"min", lo}, {"max", hi}, {"points", points}};
  }
  r.finish();
  ctx.resolved["model"] = model_echo;
  ctx.resolved[r.has("temperatures") ? "temperatures" : "T_grid"] = grid_echo;

  const auto sweep = lg::temperature_sweep(model, temps);
  auto csv = csv_stream();
  csv << "T,psi_min,branch,F_min\n";
  json relevance = json::array();
  bool all_relevant = true;
  for (const auto& p : sweep) {
    csv << io::format_double(p.temperature) << ',' << io::format_double(p.psi_min) << ','
        << lg::to_string(p.branch) << ',' << io::format_double(p.free_energy_min) << '\n';
    const auto rel = lg::relevance_check(model, p.temperature);
    all_relevant = all_relevant && rel.physically_relevant;
    relevance.push_back({{"T", rel.temperature},
                         {"nontrivial_stationary", rel.nontrivial_stationary},
                         {"nontrivial_minima", rel.nontrivial_minima},
                         {"physically_relevant", rel.physically_relevant},
                         {"note", rel.note}});
  }
  ctx.write("order_parameter.csv", csv.str());
  ctx.write("relevance.json", dump({{"all_relevant", all_relevant}, {"points", relevance}}));
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace detail

/// Runs one subcommand. Never throws: failures produce a nonzero status and
/// a structured error record, which is also written to <out>/error.json.
inline RunOutcome run(const RunConfig& cfg) {
  using namespace detail;
  const auto started = std::chrono::steady_clock::now();
  RunOutcome outcome;
  Context ctx;
  ctx.out_dir = cfg.out_dir;
  const auto fail = [&](int status, std::string_view code, const std::string& message) {
    outcome.exit_status = status;
    outcome.error = {{"status", "error"},
                     {"command", std::string(to_string(cfg.command))},
                     {"code", std::string(code)},
                     {"message", message},
                     {"exit_status", status}};
    try {
      fs::create_directories(ctx.out_dir);
      io::write_file((ctx.out_dir / "error.json").string(), dump(outcome.error));
    } catch (...) {
    }
    return outcome;
  };

  try {
    json doc = json::object();
    if (!cfg.config_path.empty()) {
      const fs::path p = cfg.config_path;
      ctx.config_dir = p.parent_path();
      const auto text = io::read_file(p.string());
      try {
        doc = json::parse(text);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::config_parse, cfg.config_path + ": " + e.what());
      }
      if (!doc.is_object()) throw Error(ErrorCode::config_parse, "config must be a JSON object");
    }
    for (const auto& o : cfg.overrides) apply_override(doc, o);
    if (cfg.seed) doc["seed"] = *cfg.seed;
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0)) {
        throw Error(ErrorCode::config_parse, "key 'seed' must be a nonnegative integer");
      }
      ctx.seed = doc["seed"].get<std::uint64_t>();
    }

    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw Error(ErrorCode::io_failure, "cannot create output directory: " + ec.message());

    Reader r(doc, "");
    r.integer("seed", 0);
    switch (cfg.command) {
      case Command::simulate: run_simulate(r, ctx); break;
      case Command::sample: run_sample(r, ctx); break;
      case Command::scan: run_scan(r, ctx); break;
      case Command::field: run_field(r, ctx); break;
      case Command::order_parameter: run_order_parameter(r, ctx); break;
      case Command::check: run_check(r, ctx); break;
    }

    ctx.resolved["seed"] = ctx.seed;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json manifest{{"command", std::string(to_string(cfg.command))},
                  {"version", std::string(kVersion)},
                  {"seed", ctx.seed},
                  {"config", ctx.resolved},
                  {"artifacts", ctx.artifacts},
                  {"timestamp", utc_timestamp()},
                  {"wall_time_s", wall}};
    io::write_file((ctx.out_dir / "manifest.json").string(), dump(manifest));
    ctx.artifacts.push_back("manifest.json");
    outcome.artifacts = ctx.artifacts;
    return outcome;
  } catch (const Error& e) {
    return fail(exit_status_for(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(2, "config_parse", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
}

}  // namespace vortexgas::cli
