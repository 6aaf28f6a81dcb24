// Command-line front end: config parsing, scenario runs with artifact
// output (series.csv, run.json, curve snapshots, SVG frames), metric
// tables, oracle tables, and the named verification suites.
//
// Everything lives in this header so the logic is unit-testable; the
// `sheetflow` binary is a thin dispatcher. See docs/config.md for the
// config grammar and the artifact formats.
#ifndef SHEETFLOW_CLI_HPP
#define SHEETFLOW_CLI_HPP

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sheetflow/dynamics.hpp"
#include "sheetflow/oracle.hpp"
#include "sheetflow/shooting.hpp"

namespace sheetflow {
namespace cli {

// Config schema violation; the message names the offending key.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- Config parsing ----------------------------------------------------------
//
// Flat key-value text with [section] headers; '#' starts a comment; keys are
// addressed as "section.key". Unknown keys are rejected per command.
class Config {
 public:
  static Config parse_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw config_error("config line " + std::to_string(lineno) +
                             ": malformed section header '" + t + "'");
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty())
          throw config_error("config line " + std::to_string(lineno) +
                             ": empty section name");
        continue;
      }
      const std::size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw config_error("config line " + std::to_string(lineno) +
                           ": expected 'key = value', got '" + t + "'");
      const std::string key = trim(t.substr(0, eq));
      const std::string val = trim(t.substr(eq + 1));
      if (key.empty())
        throw config_error("config line " + std::to_string(lineno) +
                           ": empty key");
      if (section.empty())
        throw config_error("config key '" + key +
                           "' appears before any [section] header");
      const std::string full = section + "." + key;
      if (cfg.kv_.count(full))
        throw config_error("duplicate config key '" + full + "'");
      cfg.kv_[full] = val;
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }
  std::string require_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end())
      throw config_error("missing required config key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : to_double(key, it->second);
  }
  int get_int(const std::string& key, int fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const double d = to_double(key, it->second);
    const int v = int(d);
    if (double(v) != d)
      throw config_error("config key '" + key + "': expected integer, got '" +
                         it->second + "'");
    return v;
  }
  bool get_bool(const std::string& key, bool fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw config_error("config key '" + key + "': expected true/false, got '" +
                       it->second + "'");
  }

  // Reject keys outside the allowed set (catches typos loudly).
  void restrict_to(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : kv_)
      if (!allowed.count(k))
        throw config_error("unknown config key '" + k + "'");
  }

  const std::map<std::string, std::string>& items() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;

  static std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }
  static double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
      throw config_error("config key '" + key + "': expected number, got '" +
                         v + "'");
    return d;
  }
};

// --- Scenario construction ---------------------------------------------------

inline const std::set<std::string>& scenario_keys() {
  static const std::set<std::string> keys = {
      "geometry.kind", "geometry.n", "geometry.center_x", "geometry.center_y",
      "geometry.radius", "geometry.mode", "geometry.amplitude",
      "geometry.phase", "geometry.y_bottom", "geometry.y_top",
      "state.momentum_mode", "state.momentum_amplitude",
      "state.momentum_phase", "state.momentum_loop", "state.theta_plus",
      "state.theta_minus",
      "green.mode_cutoff",
      "time.dt", "time.steps", "time.scheme",
      "filter.enabled", "filter.floor", "filter.resample_ratio",
      "output.series_every", "output.snapshot_every", "output.svg_every",
      "output.svg_arrow_scale", "output.weak_residual", "output.weak_fields",
      "output.probe_offset",
      "metric.modes",
  };
  return keys;
}

inline SheetCurve curve_from_config(const Config& cfg) {
  const std::string kind = cfg.require_string("geometry.kind");
  const int n = cfg.get_int("geometry.n", 128);
  if (n < 16) throw config_error("config key 'geometry.n': need at least 16");
  const Vec2 c(cfg.get_double("geometry.center_x", 0.5),
               cfg.get_double("geometry.center_y", 0.5));
  if (kind == "circle")
    return make_circle(c, cfg.get_double("geometry.radius", 0.25), n);
  if (kind == "perturbed_circle")
    return make_perturbed_circle(
        c, cfg.get_double("geometry.radius", 0.25), n,
        {{cfg.get_int("geometry.mode", 2), cfg.get_double("geometry.amplitude", 0.01),
          cfg.get_double("geometry.phase", 0.0)}});
  if (kind == "flat_pair")
    return make_flat_pair(cfg.get_double("geometry.y_bottom", 0.25),
                          cfg.get_double("geometry.y_top", 0.75), n);
  throw config_error("config key 'geometry.kind': unknown kind '" + kind +
                     "' (circle | perturbed_circle | flat_pair)");
}

inline SheetState state_from_config(const Config& cfg) {
  SheetCurve g = curve_from_config(cfg);
  VectorXd f = VectorXd::Zero(g.total());
  const double amp = cfg.get_double("state.momentum_amplitude", 0.0);
  if (amp != 0.0) {
    const int mode = cfg.get_int("state.momentum_mode", 2);
    const double ph = cfg.get_double("state.momentum_phase", 0.0);
    const int loop = cfg.get_int("state.momentum_loop", 0);
    if (loop < 0 || loop >= int(g.loops.size()))
      throw config_error("config key 'state.momentum_loop': out of range");
    const int Nl = g.markers_per_loop();
    for (int j = 0; j < Nl; ++j)
      f[loop * Nl + j] = amp * std::cos(TWO_PI * mode * double(j) / Nl + ph);
  }
  SheetState st{g, CoVectorVS{f}, cfg.get_double("state.theta_plus", 0.0),
                cfg.get_double("state.theta_minus", 0.0), 0.0};
  validate_state(st);
  return st;
}

inline StepOptions step_options_from_config(const Config& cfg) {
  StepOptions o;
  const std::string scheme = cfg.get_string("time.scheme", "rk4");
  if (scheme == "rk4")
    o.scheme = Scheme::RK4;
  else if (scheme == "midpoint")
    o.scheme = Scheme::ImplicitMidpoint;
  else
    throw config_error("config key 'time.scheme': unknown scheme '" + scheme +
                       "' (rk4 | midpoint)");
  o.filter = cfg.get_bool("filter.enabled", true);
  o.filter_floor = cfg.get_double("filter.floor", 1e-12);
  if (o.filter_floor < 0.0)
    throw config_error("config key 'filter.floor': must be nonnegative");
  o.resample_ratio = cfg.get_double("filter.resample_ratio", 1.8);
  if (o.resample_ratio <= 1.0)
    throw config_error("config key 'filter.resample_ratio': must exceed 1");
  return o;
}

// --- Environment / small utilities ------------------------------------------

// SHEETFLOW_THREADS caps internal parallelism (0 = auto). The current build
// is single-threaded, so the value is validated and recorded only.
inline int thread_cap_from_env() {
  const char* v = std::getenv("SHEETFLOW_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 0)
    throw config_error("SHEETFLOW_THREADS: expected a nonnegative integer");
  return int(n);
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// --- Artifact writers --------------------------------------------------------

// Snapshot format: one header line "topology N" then, per loop, one "x y"
// line per marker (lifted coordinates).
inline void write_snapshot(const SheetCurve& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << (g.topology == Topology::Contractible ? "contractible" : "loop_pair")
      << " " << g.markers_per_loop() << "\n";
  for (const Loop& l : g.loops)
    for (int j = 0; j < l.n(); ++j)
      out << fmt(l.px[j]) << " " << fmt(l.py[j]) << "\n";
}

inline SheetCurve read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::string topo;
  int n = 0;
  if (!(in >> topo >> n) || n < 4)
    throw std::runtime_error("malformed snapshot header in '" + path + "'");
  const Topology t =
      topo == "loop_pair" ? Topology::LoopPair : Topology::Contractible;
  const int nloops = t == Topology::LoopPair ? 2 : 1;
  std::vector<std::vector<Vec2>> loops(nloops);
  for (int li = 0; li < nloops; ++li) {
    loops[li].resize(n);
    for (int j = 0; j < n; ++j)
      if (!(in >> loops[li][j].x >> loops[li][j].y))
        throw std::runtime_error("truncated snapshot '" + path + "'");
  }
  return build_curve(t, loops);
}

// SVG frame: the unit torus cell, the curve loops, and velocity arrows at a
// fixed marker stride. Styling is fixed so regression diffs are meaningful.
inline void write_svg(const SheetCurve& g, const std::vector<Vec2>& vel,
                      const std::string& path, double arrow_scale) {
  const int W = 600;
  auto X = [&](double x) { return wrap01(x) * W; };
  auto Y = [&](double y) { return (1.0 - wrap01(y)) * W; };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << W << "\" viewBox=\"0 0 " << W << " " << W
      << "\">\n<rect width=\"" << W << "\" height=\"" << W
      << "\" fill=\"white\" stroke=\"#888\"/>\n";
  for (const Loop& l : g.loops) {
    out << "<path d=\"";
    bool pen_up = true;
    for (int j = 0; j <= l.n(); ++j) {
      const int a = j % l.n();
      if (j > 0) {
        const int b = (j - 1) % l.n();
        // break the stroke where the curve wraps around the torus cell
        if (std::abs(wrap01(l.px[a]) - wrap01(l.px[b])) > 0.5 ||
            std::abs(wrap01(l.py[a]) - wrap01(l.py[b])) > 0.5)
          pen_up = true;
      }
      out << (pen_up ? "M" : "L") << fmt(X(l.px[a])) << " " << fmt(Y(l.py[a]))
          << " ";
      pen_up = false;
    }
    out << "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\"/>\n";
  }
  const int stride = std::max(1, g.total() / 48);
  for (int i = 0; i < g.total(); i += stride) {
    const TorusPoint p = g.marker(i);
    const Vec2 v = vel[std::size_t(i)] * arrow_scale;
    const double x0 = X(p.x), y0 = Y(p.y);
    const double x1 = x0 + v.x * W, y1 = y0 - v.y * W;
    out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\""
        << fmt(x1) << "\" y2=\"" << fmt(y1)
        << "\" stroke=\"#c23b22\" stroke-width=\"1\"/>\n";
    // arrow head: short back-strokes at +-150 degrees from the shaft
    const double dx = x1 - x0, dy = y1 - y0, len = std::hypot(dx, dy);
    if (len > 1e-9) {
      const double hx = dx / len * 4.0, hy = dy / len * 4.0;
      out << "<path d=\"M" << fmt(x1) << " " << fmt(y1) << " L"
          << fmt(x1 - hx - hy * 0.6) << " " << fmt(y1 - hy + hx * 0.6) << " M"
          << fmt(x1) << " " << fmt(y1) << " L" << fmt(x1 - hx + hy * 0.6)
          << " " << fmt(y1 - hy - hx * 0.6)
          << "\" stroke=\"#c23b22\" stroke-width=\"1\" fill=\"none\"/>\n";
    }
  }
  out << "</svg>\n";
}

// --- run ---------------------------------------------------------------------

struct RunDiagnostics {
  double t = 0, H = 0, K = 0, P = 0, area = 0, max_curl = 0;
  double pressure_residual = 0, weak = 0;
  bool has_weak = false;
};

inline RunDiagnostics run_diagnostics(const SheetState& st,
                                      const GreenTable& tab,
                                      double probe_offset) {
  LayerOperators ops = build_operators(st.gamma, tab);
  RunDiagnostics d;
  d.t = st.t;
  FlowField F = flow_field(st, ops);
  d.K = F.K;
  d.P = st.gamma.topology == Topology::LoopPair
            ? potential_P(st.gamma, st.theta_plus, st.theta_minus, ops)
            : 0.0;
  d.H = d.K + d.P;
  d.area = st.gamma.area_plus();
  d.max_curl = kelvin_check(st, ops, probe_offset).max_curl;
  d.pressure_residual = recover_pressure(st, tab).continuity_residual;
  return d;
}

struct RunOptions {
  std::string out_dir = ".";
  bool quiet = false;
  unsigned long long seed = 12345;
};

inline int run_scenario(const Config& cfg, const RunOptions& ropt) {
  cfg.restrict_to(scenario_keys());
  const double dt = cfg.get_double("time.dt", 1e-3);
  if (dt <= 0.0) throw config_error("config key 'time.dt': must be positive");
  const int steps = cfg.get_int("time.steps", 100);
  if (steps < 0) throw config_error("config key 'time.steps': must be >= 0");
  const int series_every = cfg.get_int("output.series_every", 1);
  if (series_every < 1)
    throw config_error("config key 'output.series_every': must be >= 1");
  const int snapshot_every = cfg.get_int("output.snapshot_every", 0);
  const int svg_every = cfg.get_int("output.svg_every", 0);
  if (snapshot_every < 0 || svg_every < 0)
    throw config_error("config key 'output.snapshot_every': must be >= 0");
  const double arrow_scale = cfg.get_double("output.svg_arrow_scale", 0.15);
  const bool weak_on = cfg.get_bool("output.weak_residual", false);
  const int weak_fields = cfg.get_int("output.weak_fields", 3);
  const double probe_offset = cfg.get_double("output.probe_offset", 0.05);
  const int threads = thread_cap_from_env();

  SheetState st = state_from_config(cfg);
  GreenTable tab;
  tab.mode_cutoff = cfg.get_int("green.mode_cutoff", 128);
  StepOptions sopt = step_options_from_config(cfg);

  // weak-residual test fields: seeded, fixed count
  std::vector<StreamField> W;
  {
    std::mt19937_64 rng(ropt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < weak_fields; ++t) {
      StreamField w;
      w.modes = {{1, 0, gauss(rng), gauss(rng)},
                 {0, 1, gauss(rng), gauss(rng)},
                 {1, 1, gauss(rng), gauss(rng)},
                 {2, 1, gauss(rng), gauss(rng)}};
      W.push_back(w);
    }
  }
  QuadratureSpec wspec;
  wspec.grid = 192;
  wspec.gauss_per_panel = 12;
  wspec.s_factor = 2;
  wspec.collar_width = 0.1;
  wspec.transition_start = 0.2;

  auto weak_at = [&](const SheetState& s) {
    StepOptions so = sopt;
    so.filter = false;
    so.resample_ratio = 1e300;
    const double h = 1e-3;
    SheetState sp = step(s, h, tab, so), sm = step(s, -h, tab, so);
    DiscontinuousField um = flow_field(sm, build_operators(sm.gamma, tab)).u;
    DiscontinuousField u0 = flow_field(s, build_operators(s.gamma, tab)).u;
    DiscontinuousField up = flow_field(sp, build_operators(sp.gamma, tab)).u;
    double worst = 0.0;
    for (double r : weak_residual(um, u0, up, W, h, wspec))
      worst = std::max(worst, r);
    return worst;
  };

  const std::string dir = ropt.out_dir.empty() ? "." : ropt.out_dir;
  std::ofstream series(dir + "/series.csv");
  if (!series)
    throw std::runtime_error("cannot write '" + dir + "/series.csv'");
  series << "t,H,K,P,area,max_curl,pressure_residual";
  if (weak_on) series << ",weak_residual";
  series << "\n";

  auto emit = [&](const SheetState& s, RunDiagnostics& d) {
    d = run_diagnostics(s, tab, probe_offset);
    if (weak_on) {
      d.weak = weak_at(s);
      d.has_weak = true;
    }
    series << fmt(d.t) << "," << fmt(d.H) << "," << fmt(d.K) << ","
           << fmt(d.P) << "," << fmt(d.area) << "," << fmt(d.max_curl) << ","
           << fmt(d.pressure_residual);
    if (weak_on) series << "," << fmt(d.weak);
    series << "\n";
    series.flush();
  };
  auto frame_name = [&](const char* stem, int idx, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%04d.%s", stem, idx, ext);
    return dir + "/" + buf;
  };
  auto snapshot = [&](const SheetState& s, int idx) {
    write_snapshot(s.gamma, frame_name("curve", idx, "txt"));
  };
  auto svg_frame = [&](const SheetState& s, int idx) {
    LayerOperators ops = build_operators(s.gamma, tab);
    DiscontinuousField u = flow_field(s, ops).u;
    std::vector<Vec2> vel(std::size_t(s.gamma.total()));
    for (int i = 0; i < s.gamma.total(); ++i) {
      const Vec2 a = u.trace(i, +1), b = u.trace(i, -1);
      vel[std::size_t(i)] = (a + b) * 0.5;
    }
    write_svg(s.gamma, vel, frame_name("frame", idx, "svg"), arrow_scale);
  };

  RunDiagnostics first{}, last{};
  int completed = 0;
  std::string error;
  try {
    emit(st, first);
    last = first;
    if (snapshot_every > 0) snapshot(st, 0);
    if (svg_every > 0) svg_frame(st, 0);
    for (int it = 1; it <= steps; ++it) {
      st = step(st, dt, tab, sopt);
      completed = it;
      if (it % series_every == 0 || it == steps) emit(st, last);
      if (snapshot_every > 0 && (it % snapshot_every == 0 || it == steps))
        snapshot(st, it);
      if (svg_every > 0 && (it % svg_every == 0 || it == steps))
        svg_frame(st, it);
      if (!ropt.quiet && (it % (10 * series_every) == 0 || it == steps))
        std::fprintf(stderr, "step %d/%d  t=%.6f  H=%.9e\n", it, steps, st.t,
                     last.H);
    }
  } catch (const std::exception& e) {
    error = e.what();
  }

  std::ofstream js(dir + "/run.json");
  js << "{\n  \"schema_version\": 1,\n  \"command\": \"run\",\n";
  js << "  \"status\": \"" << (error.empty() ? "ok" : "error") << "\",\n";
  if (!error.empty())
    js << "  \"error\": \"" << json_escape(error) << "\",\n";
  js << "  \"seed\": " << ropt.seed << ",\n";
  js << "  \"threads\": " << threads << ",\n";
  js << "  \"steps_requested\": " << steps << ",\n";
  js << "  \"steps_completed\": " << completed << ",\n";
  js << "  \"config\": {\n";
  {
    bool comma = false;
    for (const auto& [k, v] : cfg.items()) {
      if (comma) js << ",\n";
      js << "    \"" << json_escape(k) << "\": \"" << json_escape(v) << "\"";
      comma = true;
    }
  }
  js << "\n  },\n  \"final\": {\n";
  js << "    \"t\": " << fmt(last.t) << ",\n";
  js << "    \"H\": " << fmt(last.H) << ",\n";
  js << "    \"K\": " << fmt(last.K) << ",\n";
  js << "    \"P\": " << fmt(last.P) << ",\n";
  js << "    \"area\": " << fmt(last.area) << ",\n";
  js << "    \"max_curl\": " << fmt(last.max_curl) << ",\n";
  js << "    \"pressure_residual\": " << fmt(last.pressure_residual) << ",\n";
  js << "    \"energy_drift_rel\": "
     << fmt(std::abs(last.H - first.H) /
            std::max(std::abs(first.H), 1e-300)) << ",\n";
  js << "    \"area_drift\": " << fmt(std::abs(last.area - first.area))
     << "\n  }\n}\n";
  return error.empty() ? 0 : 1;
}

// --- metric ------------------------------------------------------------------

inline std::vector<int> parse_mode_list(const std::string& spec) {
  std::vector<int> out;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const std::size_t dots = tok.find("..");
    if (dots != std::string::npos) {
      const int a = std::atoi(tok.substr(0, dots).c_str());
      const int b = std::atoi(tok.substr(dots + 2).c_str());
      if (a < 1 || b < a)
        throw config_error("config key 'metric.modes': bad range '" + tok + "'");
      for (int k = a; k <= b; ++k) out.push_back(k);
    } else {
      const int k = std::atoi(tok.c_str());
      if (k < 1)
        throw config_error("config key 'metric.modes': bad mode '" + tok + "'");
      out.push_back(k);
    }
  }
  if (out.empty()) throw config_error("config key 'metric.modes': empty list");
  return out;
}

// CSV on stdout: mode, vs_metric of a unit cos-mode density on loop 0, the
// closed-form strip oracle where available (flat pairs), relative error.
inline int metric_table(const Config& cfg, std::ostream& out) {
  cfg.restrict_to(scenario_keys());
  SheetCurve g = curve_from_config(cfg);
  GreenTable tab;
  tab.mode_cutoff = cfg.get_int("green.mode_cutoff", 128);
  LayerOperators ops = build_operators(g, tab);
  const std::vector<int> modes =
      parse_mode_list(cfg.get_string("metric.modes", "1..8"));
  const bool flat = cfg.require_string("geometry.kind") == "flat_pair";
  const double hp = flat ? cfg.get_double("geometry.y_top", 0.75) -
                               cfg.get_double("geometry.y_bottom", 0.25)
                         : 0.0;
  out << "mode,vs_metric,oracle,rel_error\n";
  const int Nl = g.markers_per_loop();
  for (int k : modes) {
    VectorXd v(g.total());
    v.setZero();
    for (int j = 0; j < Nl; ++j)
      v[j] = std::cos(TWO_PI * k * double(j) / Nl) * g.weight(j);
    TangentVS xi = TangentVS::make(v);
    const double m = vs_metric(g, xi, ops);
    out << k << "," << fmt(m);
    if (flat) {
      Eigen::Matrix2d M = strip_dtn_block(k, hp).inverse() +
                          strip_dtn_block(k, 1.0 - hp).inverse();
      const double oracle = 0.5 * M(0, 0);
      out << "," << fmt(oracle) << "," << fmt(std::abs(m - oracle) / oracle);
    } else {
      out << ",,";
    }
    out << "\n";
  }
  return 0;
}

// --- oracle ------------------------------------------------------------------

// CSV on stdout: closed-form strip DtN blocks, the modal metric coefficient,
// and the eigenvalues of the linearized flat-pair dynamics.
inline int oracle_table(int k, double hplus, double theta_plus,
                        double theta_minus, std::ostream& out) {
  if (k < 1 || hplus <= 0.0 || hplus >= 1.0)
    throw config_error("oracle: need mode >= 1 and 0 < height < 1");
  const Eigen::Matrix2d Ap = strip_dtn_block(k, hplus);
  const Eigen::Matrix2d Am = strip_dtn_block(k, 1.0 - hplus);
  FourierReferenceFlow ref =
      fourier_reference_flow(k, hplus, theta_plus, theta_minus);
  out << "quantity,value\n";
  out << "dtn_plus_00," << fmt(Ap(0, 0)) << "\n";
  out << "dtn_plus_01," << fmt(Ap(0, 1)) << "\n";
  out << "dtn_minus_00," << fmt(Am(0, 0)) << "\n";
  out << "dtn_minus_01," << fmt(Am(0, 1)) << "\n";
  out << "metric_cos_bottom," << fmt(ref.metric_cos_bottom) << "\n";
  out << "potential_P," << fmt(ref.P) << "\n";
  for (int i = 0; i < 4; ++i)
    out << "eigenvalue_" << i << "," << fmt(ref.eigenvalues[i].real()) << "\n"
        << "eigenvalue_" << i << "_imag," << fmt(ref.eigenvalues[i].imag())
        << "\n";
  return 0;
}

// --- verify ------------------------------------------------------------------

struct VerifyContext {
  std::ostream& out;
  std::string suite;
  bool ok = true;
  void check(const std::string& name, double value, double threshold,
             bool pass) {
    ok = ok && pass;
    out << suite << "," << name << "," << fmt(value) << "," << fmt(threshold)
        << "," << (pass ? "pass" : "FAIL") << "\n";
  }
  void leq(const std::string& name, double value, double threshold) {
    check(name, value, threshold, value <= threshold);
  }
  void geq(const std::string& name, double value, double threshold) {
    check(name, value, threshold, value >= threshold);
  }
};

namespace detail_cli {

inline HarmonicExtension add_ext(const HarmonicExtension& a,
                                 const HarmonicExtension& b) {
  return HarmonicExtension(a.side, a.curve, a.table, a.g + b.g, a.psi + b.psi,
                           a.c0 + b.c0);
}

inline VectorXd random_modes(int N, int kmax, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd v = VectorXd::Zero(N);
  for (int k = 1; k <= kmax; ++k) {
    const double a = gauss(rng), b = gauss(rng);
    for (int i = 0; i < N; ++i) {
      const double th = TWO_PI * k * i / N;
      v[i] += a * std::cos(th) + b * std::sin(th);
    }
  }
  return v;
}

}  // namespace detail_cli

inline void verify_potentials(VerifyContext& vc, unsigned long long seed) {
  GreenTable tab;
  std::mt19937_64 rng(seed);
  for (const bool pair : {false, true}) {
    SheetCurve g = pair ? make_flat_pair(0.3, 0.72, 128)
                        : make_circle({0.5, 0.5}, 0.25, 128);
    LayerOperators ops = build_operators(g, tab);
    const int N = g.total();
    double sj = 0, dj = 0, rt = 0;
    for (int trial = 0; trial < 5; ++trial) {
      VectorXd f = detail_cli::random_modes(N, 4, rng);
      f.array() -= ops.w.dot(f) / ops.w.sum();
      SingleLayer sl = single_layer(g, f, ops);
      // normal-derivative jump of the single layer reproduces the density
      const VectorXd sres =
          ops.dtn_matrix(+1) * sl.g + ops.dtn_matrix(-1) * sl.g - f;
      sj = std::max(sj, sres.lpNorm<Eigen::Infinity>() /
                            f.lpNorm<Eigen::Infinity>());
      VectorXd jmp = detail_cli::random_modes(N, 4, rng);
      DoubleLayer dl = double_layer(g, jmp, ops);
      // Dirichlet jump reproduces the data; own-outward normal derivatives
      // cancel (Neumann continuity)
      const VectorXd djump = dl.trace_plus - dl.trace_minus - jmp;
      const VectorXd ncont =
          ops.dtn_matrix(+1) * dl.trace_plus + ops.dtn_matrix(-1) * dl.trace_minus;
      dj = std::max({dj, djump.lpNorm<Eigen::Infinity>(),
                     ncont.lpNorm<Eigen::Infinity>() /
                         jmp.lpNorm<Eigen::Infinity>()});
      // round trip: the minus trace is the single layer driven by -DtN+ jmp
      SingleLayer rl = single_layer(g, -(ops.dtn_matrix(+1) * jmp), ops);
      rt = std::max(rt, (dl.trace_minus - rl.g).lpNorm<Eigen::Infinity>());
    }
    const char* tag = pair ? "pair" : "circle";
    vc.leq(std::string("single_layer_jump_") + tag, sj, 1e-7);
    vc.leq(std::string("double_layer_jump_") + tag, dj, 1e-7);
    vc.leq(std::string("round_trip_") + tag, rt, 1e-7);
  }
}

inline void verify_hodge(VerifyContext& vc, unsigned long long seed) {
  GreenTable tab;
  SheetCurve g = make_perturbed_circle({0.5, 0.5}, 0.22, 64,
                                       {{2, 0.02, 0.3}, {5, 0.015, 1.1}});
  LayerOperators ops = build_operators(g, tab);
  const int N = g.total();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double orth = 0, idem = 0;
  for (int trial = 0; trial < 10; ++trial) {
    VectorXd f = detail_cli::random_modes(N, 3, rng);
    f.array() -= ops.w.dot(f) / ops.w.sum();
    VectorXd jmp = detail_cli::random_modes(N, 3, rng);
    SingleLayer sl = single_layer(g, f, ops);
    DoubleLayer dl = double_layer(g, jmp, ops);
    DiscontinuousField u(g);
    u.hplus = detail_cli::add_ext(sl.plus, dl.plus);
    u.hminus = detail_cli::add_ext(sl.minus, dl.minus);
    StreamField s;
    s.modes = {{1, 0, gauss(rng), gauss(rng)}, {0, 1, gauss(rng), gauss(rng)}};
    u.set_shared_stream(s);
    HodgeProjection pr = project_hodge(as_two_sided(u), ops);
    double ip = 0, en = 0;
    for (int i = 0; i < N; ++i) {
      const double jn = (pr.v.trace(i, +1) - pr.v.trace(i, -1)).dot(g.normal(i));
      ip += ops.w[i] * pr.grad_plus.g[i] * jn;
      en += ops.w[i] * pr.grad_plus.g[i] *
            (pr.grad_plus.psi[i] + pr.grad_minus.psi[i]);
    }
    orth = std::max(orth, std::abs(ip) / std::max(1.0, std::abs(en)));
    HodgeProjection pr2 = project_hodge(as_two_sided(pr.v), ops);
    idem = std::max(idem, pr2.grad_plus.g.lpNorm<Eigen::Infinity>());
  }
  vc.leq("orthogonality", orth, 1e-8);
  vc.leq("idempotency", idem, 1e-9);
}

inline void verify_metric(VerifyContext& vc, unsigned long long /*seed*/) {
  GreenTable tab;
  SheetCurve g = make_flat_pair(0.25, 0.75, 128);
  LayerOperators ops = build_operators(g, tab);
  const int Nl = g.markers_per_loop();
  double worst = 0;
  for (int k = 1; k <= 8; ++k) {
    VectorXd v = VectorXd::Zero(g.total());
    for (int j = 0; j < Nl; ++j)
      v[j] = std::cos(TWO_PI * k * double(j) / Nl) * g.weight(j);
    const double m = vs_metric(g, TangentVS::make(v), ops);
    Eigen::Matrix2d M =
        strip_dtn_block(k, 0.5).inverse() + strip_dtn_block(k, 0.5).inverse();
    worst = std::max(worst, std::abs(m - 0.5 * M(0, 0)) / (0.5 * M(0, 0)));
  }
  vc.leq("flat_pair_mode_oracle", worst, 1e-7);
}

inline void verify_dynamics(VerifyContext& vc, unsigned long long /*seed*/) {
  GreenTable tab;
  {
    SheetCurve g = make_flat_pair(0.25, 0.75, 64);
    LayerOperators ops = build_operators(g, tab);
    SheetState st{g, CoVectorVS{VectorXd::Zero(g.total())}, 1.0, 0.0, 0.0};
    StateRate r = geodesic_rhs(st, ops, tab);
    vc.leq("steady_rhs", std::max(r.xi.xi.lpNorm<Eigen::Infinity>(),
                                  r.fdot.lpNorm<Eigen::Infinity>()),
           1e-10);
  }
  {
    SheetCurve g = make_circle({0.5, 0.5}, 0.25, 64);
    VectorXd f(g.total());
    for (int i = 0; i < g.total(); ++i) {
      const double th = std::atan2(g.marker(i).y - 0.5, g.marker(i).x - 0.5);
      f[i] = 0.05 * std::cos(2 * th);
    }
    SheetState st{g, CoVectorVS{f}, 0.0, 0.0, 0.0};
    LayerOperators ops = build_operators(g, tab);
    StateRate r = geodesic_rhs(st, ops, tab);
    auto H = [&](const SheetCurve& gc) {
      LayerOperators o = build_operators(gc, tab);
      SheetState s{gc, CoVectorVS{f}, 0.0, 0.0, 0.0};
      return flow_field(s, o).K;
    };
    // phases follow the marker x-coordinates rather than the loop parameter:
    // pure angular harmonics are symmetry-null directions of this state
    std::vector<TangentVS> dirs;
    for (int k = 1; k <= 3; ++k)
      for (bool sn : {false, true}) {
        VectorXd v(g.total());
        for (int j = 0; j < g.total(); ++j) {
          const double ph = TWO_PI * k * g.loops[0].px[j];
          v[j] = (sn ? std::sin(ph) : std::cos(ph)) * g.weight(j);
        }
        dirs.push_back(TangentVS::make(v));
      }
    ShapeGradientFD fd = shape_gradient_fd(H, g, dirs, 1e-3);
    double scale = 0, worst = 0;
    for (std::size_t d = 0; d < dirs.size(); ++d)
      scale = std::max(scale, std::abs(fd.grad[int(d)]));
    for (std::size_t d = 0; d < dirs.size(); ++d)
      worst = std::max(worst,
                       std::abs(r.fdot.dot(dirs[d].xi) + fd.grad[int(d)]));
    vc.leq("shape_gradient_gate", worst / scale, 1e-4);
  }
}

inline void verify_weak(VerifyContext& vc, unsigned long long seed) {
  GreenTable tab;
  QuadratureSpec spec;
  spec.grid = 192;
  spec.gauss_per_panel = 12;
  spec.s_factor = 2;
  spec.collar_width = 0.1;
  spec.transition_start = 0.2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<StreamField> W;
  for (int t = 0; t < 2; ++t) {
    StreamField w;
    w.modes = {{1, 0, gauss(rng), gauss(rng)},
               {0, 1, gauss(rng), gauss(rng)},
               {1, 1, gauss(rng), gauss(rng)},
               {2, 1, gauss(rng), gauss(rng)}};
    W.push_back(w);
  }
  SheetCurve g = make_circle({0.5, 0.5}, 0.25, 64);
  VectorXd f(g.total());
  for (int i = 0; i < g.total(); ++i) {
    const double th = std::atan2(g.marker(i).y - 0.5, g.marker(i).x - 0.5);
    f[i] = 0.1 * std::cos(2 * th);
  }
  SheetState st{g, CoVectorVS{f}, 0.0, 0.0, 0.0};
  StepOptions so;
  so.filter = false;
  const double h = 1e-3;
  SheetState sp = step(st, h, tab, so), sm = step(st, -h, tab, so);
  DiscontinuousField um = flow_field(sm, build_operators(sm.gamma, tab)).u;
  DiscontinuousField u0 = flow_field(st, build_operators(st.gamma, tab)).u;
  DiscontinuousField up = flow_field(sp, build_operators(sp.gamma, tab)).u;
  double worst = 0;
  for (double r : weak_residual(um, u0, up, W, h, spec))
    worst = std::max(worst, r);
  vc.leq("trajectory_residual", worst, 1e-5);
}

inline Section bracket_section(const GreenTable& tab, int k, double amp,
                               double sc, double ss, bool sine) {
  return Section([=, &tab](const SheetCurve& c) {
    LayerOperators o = build_operators(c, tab);
    VectorXd jump(c.total());
    for (int i = 0; i < c.total(); ++i) {
      const double ph = TWO_PI * k * c.marker(i).x;
      jump[i] = amp * (sine ? std::sin(ph) : std::cos(ph));
    }
    DoubleLayer dl = double_layer(c, jump, o);
    DiscontinuousField u(c);
    u.hplus = dl.plus;
    u.hminus = dl.minus;
    StreamField s;
    s.modes = {{1, 0, sc, ss}};
    u.set_shared_stream(s);
    return u;
  });
}

inline void verify_bracket(VerifyContext& vc, unsigned long long /*seed*/) {
  GreenTable tab;
  SheetCurve g = make_flat_pair(0.3, 0.72, 64);
  Section U = bracket_section(tab, 1, 0.15, 0.05, 0.02, false);
  Section V = bracket_section(tab, 1, 0.15, -0.03, 0.04, true);
  const double r1 = bracket_compensation(U, V, g, 1e-2);
  const double r2 = bracket_compensation(U, V, g, 5e-3);
  const double r3 = bracket_compensation(U, V, g, 2.5e-3);
  const double order = 0.5 * (std::log2(r1 / r2) + std::log2(r2 / r3));
  // asymptotic order is 2; at this fixed eps ladder the observed value sits
  // just below (an opposite-sign eps^4 correction of the centered difference),
  // so the gate carries a 1% allowance
  vc.geq("observed_order", order, 1.98);
}

inline int verify_suite(const std::string& name, unsigned long long seed,
                        std::ostream& out) {
  VerifyContext vc{out, name};
  out << "suite,check,value,threshold,status\n";
  if (name == "hodge")
    verify_hodge(vc, seed);
  else if (name == "potentials")
    verify_potentials(vc, seed);
  else if (name == "metric")
    verify_metric(vc, seed);
  else if (name == "dynamics")
    verify_dynamics(vc, seed);
  else if (name == "weak")
    verify_weak(vc, seed);
  else if (name == "bracket")
    verify_bracket(vc, seed);
  else
    throw config_error(
        "verify: unknown suite '" + name +
        "' (hodge | potentials | metric | dynamics | weak | bracket)");
  out << "RESULT," << name << ",,," << (vc.ok ? "PASS" : "FAIL") << "\n";
  return vc.ok ? 0 : 1;
}

// --- argument parsing / dispatch ---------------------------------------------

struct CommonFlags {
  std::string out_dir = ".";
  unsigned long long seed = 12345;
  bool quiet = false;
  std::vector<std::string> positional;
};

inline CommonFlags parse_flags(int argc, char** argv, int first) {
  CommonFlags fl;
  for (int i = first; i < argc; ++i) {
    const std::string a = argv[i];
    auto value = [&](const char* flag) {
      if (i + 1 >= argc)
        throw config_error(std::string(flag) + " requires a value");
      return std::string(argv[++i]);
    };
    if (a == "--out")
      fl.out_dir = value("--out");
    else if (a == "--seed") {
      const std::string v = value("--seed");
      char* end = nullptr;
      fl.seed = std::strtoull(v.c_str(), &end, 10);
      if (end == v.c_str() || *end != '\0')
        throw config_error("--seed: expected an unsigned integer");
    } else if (a == "--quiet")
      fl.quiet = true;
    else if (a.size() > 1 && a[0] == '-' && !std::isdigit(unsigned(a[1])) &&
             a[1] != '.')
      throw config_error("unknown flag '" + a + "'");
    else
      fl.positional.push_back(a);  // includes negative numeric arguments
  }
  return fl;
}

inline int usage(std::ostream& out) {
  out << "usage: sheetflow <command> [args] [--out DIR] [--seed U64] [--quiet]\n"
         "  run CONFIG              execute a scenario, write artifacts to DIR\n"
         "  metric CONFIG           print vs_metric vs oracle table as CSV\n"
         "  verify SUITE            run a named acceptance suite\n"
         "                          (hodge|potentials|metric|dynamics|weak|bracket)\n"
         "  oracle K HEIGHT [TH+ TH-]  print closed-form strip oracles as CSV\n"
         "env: SHEETFLOW_THREADS caps internal parallelism (0 = auto)\n";
  return 2;
}

inline int dispatch(int argc, char** argv, std::ostream& out,
                    std::ostream& err) {
  try {
    if (argc < 2) return usage(err);
    const std::string cmd = argv[1];
    CommonFlags fl = parse_flags(argc, argv, 2);
    if (cmd == "run") {
      if (fl.positional.size() != 1)
        throw config_error("run: expected exactly one config path");
      RunOptions ro;
      ro.out_dir = fl.out_dir;
      ro.quiet = fl.quiet;
      ro.seed = fl.seed;
      return run_scenario(Config::parse_file(fl.positional[0]), ro);
    }
    if (cmd == "metric") {
      if (fl.positional.size() != 1)
        throw config_error("metric: expected exactly one config path");
      return metric_table(Config::parse_file(fl.positional[0]), out);
    }
    if (cmd == "verify") {
      if (fl.positional.size() != 1)
        throw config_error("verify: expected exactly one suite name");
      return verify_suite(fl.positional[0], fl.seed, out);
    }
    if (cmd == "oracle") {
      if (fl.positional.size() != 2 && fl.positional.size() != 4)
        throw config_error("oracle: expected K HEIGHT [THETA+ THETA-]");
      const int k = std::atoi(fl.positional[0].c_str());
      const double h = std::atof(fl.positional[1].c_str());
      const double tp =
          fl.positional.size() == 4 ? std::atof(fl.positional[2].c_str()) : 1.0;
      const double tm =
          fl.positional.size() == 4 ? std::atof(fl.positional[3].c_str()) : 0.0;
      return oracle_table(k, h, tp, tm, out);
    }
    err << "unknown command '" << cmd << "'\n";
    return usage(err);
  } catch (const config_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cli
}  // namespace sheetflow

#endif  // SHEETFLOW_CLI_HPP
