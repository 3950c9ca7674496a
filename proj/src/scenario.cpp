#include "coopnet/scenario.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace coopnet {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

// Raw key/value lines with consumption tracking; anything left unconsumed at
// the end of parsing is unknown or not allowed for the command.
class KeyTable {
 public:
  explicit KeyTable(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      std::string_view raw = text.substr(
          pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;

      const std::size_t hash = raw.find('#');
      if (hash != std::string_view::npos) raw = raw.substr(0, hash);
      const std::string stripped = trim(raw);
      if (stripped.empty()) continue;

      const std::size_t eq = stripped.find('=');
      if (eq == std::string::npos)
        throw ScenarioError(line_no, "expected 'key = value'");
      const std::string key = trim(std::string_view(stripped).substr(0, eq));
      const std::string value = trim(std::string_view(stripped).substr(eq + 1));
      if (key.empty()) throw ScenarioError(line_no, "missing key before '='");
      if (value.empty())
        throw ScenarioError(line_no, "missing value for '" + key + "'");
      auto [it, inserted] = entries_.emplace(key, Entry{value, line_no});
      if (!inserted)
        throw ScenarioError(line_no, "duplicate key '" + key + "' (first on line " +
                                         std::to_string(it->second.line) + ")");
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  int line_of(const std::string& key, int fallback = 0) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.line;
  }

  std::optional<std::string> take_string(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  std::optional<double> take_real(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    const char* s = it->second.value.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s, &end);
    if (end == s || *end != '\0')
      throw ScenarioError(it->second.line, "expected a number for '" + key + "'");
    return v;
  }

  std::optional<long long> take_int(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    const char* s = it->second.value.c_str();
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0' || errno == ERANGE)
      throw ScenarioError(it->second.line, "expected an integer for '" + key + "'");
    return v;
  }

  std::optional<bool> take_bool(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    if (it->second.value == "true") return true;
    if (it->second.value == "false") return false;
    throw ScenarioError(it->second.line,
                        "expected true or false for '" + key + "'");
  }

  void fail_unused(const char* command_name) const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.used)
        throw ScenarioError(entry.line, "unknown or unexpected key '" + key +
                                            "' for command '" + command_name +
                                            "'");
    }
  }

 private:
  std::map<std::string, Entry> entries_;
};

[[noreturn]] void fail_at(const KeyTable& kt, const std::string& key,
                          const std::string& msg, int fallback = 0) {
  throw ScenarioError(kt.line_of(key, fallback), msg);
}

double require_real(KeyTable& kt, const std::string& key, int context_line) {
  auto v = kt.take_real(key);
  if (!v)
    throw ScenarioError(context_line, "missing required key '" + key + "'");
  return *v;
}

void check_range(const KeyTable& kt, const std::string& key, double v,
                 double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi))
    fail_at(kt, key, "'" + key + "' " + what);
}

Mechanism parse_mechanism(KeyTable& kt, int command_line) {
  const auto name = kt.take_string("mechanism.variant");
  if (!name)
    throw ScenarioError(command_line,
                        "missing required key 'mechanism.variant'");
  const int variant_line = kt.line_of("mechanism.variant");
  const auto variant = variant_from_string(*name);
  if (!variant)
    throw ScenarioError(variant_line, "unknown mechanism variant '" + *name + "'");
  Mechanism mech;
  mech.variant = *variant;
  mech.t_s = kt.take_real("mechanism.t_s");
  mech.t_p = kt.take_real("mechanism.t_p");
  if (auto flag = kt.take_bool("mechanism.scale_transit_by_reputation"))
    mech.scale_transit_by_reputation = *flag;
  try {
    mech.validate();
  } catch (const std::invalid_argument& ex) {
    throw ScenarioError(variant_line, ex.what());
  }
  return mech;
}

SolverConfig parse_solver(KeyTable& kt) {
  SolverConfig cfg;
  if (auto v = kt.take_real("solver.grid_step")) cfg.grid_step = *v;
  if (auto v = kt.take_real("solver.tie_tolerance")) cfg.tie_tolerance = *v;
  if (auto v = kt.take_bool("solver.refine")) cfg.refine = *v;
  if (auto v = kt.take_real("solver.refine_tolerance")) cfg.refine_tolerance = *v;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& ex) {
    throw ScenarioError(kt.line_of("solver.grid_step"), ex.what());
  }
  return cfg;
}

// need_s_xn / need_transit control which of the profile quantities the
// command actually consumes; forbid_* keys belong to a swept variable.
struct ProfileNeeds {
  bool s_xn = true;
  bool transit = true;  // s_nx directly or via M
  bool g = true;
  bool e_allowed = true;
};

ServiceProfile parse_profile(KeyTable& kt, int command_line,
                             const ProfileNeeds& needs) {
  ServiceProfile p;
  p.b = kUnboundedBandwidth;

  const auto s_xn = kt.take_real("profile.s_xn");
  const auto s_nx = kt.take_real("profile.s_nx");
  const auto m = kt.take_real("profile.M");

  if (s_nx && m)
    fail_at(kt, "profile.M",
            "specify either 'profile.s_nx' or 'profile.M', not both");
  if (!needs.transit && (s_nx || m))
    fail_at(kt, s_nx ? "profile.s_nx" : "profile.M",
            "the transit load is set by the sweep; drop profile.s_nx/profile.M");

  if (needs.s_xn || m) {
    if (!s_xn)
      throw ScenarioError(command_line, "missing required key 'profile.s_xn'");
    if (!(*s_xn >= 0.0)) fail_at(kt, "profile.s_xn", "'profile.s_xn' must be >= 0");
    p.s_xn = *s_xn;
  }

  if (needs.transit) {
    if (s_nx) {
      if (!(*s_nx > 0.0)) fail_at(kt, "profile.s_nx", "'profile.s_nx' must be > 0");
      p.s_nx = *s_nx;
    } else if (m) {
      if (!(*m > 0.0)) fail_at(kt, "profile.M", "'profile.M' must be > 0");
      if (!(p.s_xn > 0.0))
        fail_at(kt, "profile.M", "'profile.M' needs 'profile.s_xn' > 0");
      p.s_nx = *m * p.s_xn;
    } else {
      throw ScenarioError(command_line,
                          "missing required key 'profile.s_nx' (or 'profile.M')");
    }
  }

  if (needs.g) {
    p.g = require_real(kt, "profile.g", command_line);
    if (!(p.g > 0.0)) fail_at(kt, "profile.g", "'profile.g' must be > 0");
  } else if (kt.has("profile.g")) {
    fail_at(kt, "profile.g",
            "the service value is set by the sweep; drop profile.g");
  }

  if (auto b = kt.take_real("profile.b")) {
    if (!(*b > 0.0)) fail_at(kt, "profile.b", "'profile.b' must be > 0");
    p.b = *b;
  }
  if (needs.e_allowed) {
    if (auto e = kt.take_real("profile.e")) {
      check_range(kt, "profile.e", *e, 0.0, 1.0, "must lie in [0, 1]");
      p.e = *e;
    }
  } else if (kt.has("profile.e")) {
    fail_at(kt, "profile.e",
            "the observation error is set by the sweep; drop profile.e");
  }
  return p;
}

SweepRange parse_range(KeyTable& kt, int command_line) {
  SweepRange r;
  r.lo = require_real(kt, "sweep.lo", command_line);
  r.hi = require_real(kt, "sweep.hi", command_line);
  const auto steps = kt.take_int("sweep.steps");
  if (!steps)
    throw ScenarioError(command_line, "missing required key 'sweep.steps'");
  if (*steps < 2 || *steps > 100'000'000)
    fail_at(kt, "sweep.steps", "'sweep.steps' must be an integer >= 2");
  r.steps = static_cast<int>(*steps);
  if (!(r.lo < r.hi)) fail_at(kt, "sweep.lo", "sweep range needs lo < hi");
  return r;
}

std::vector<double> parse_demands(KeyTable& kt, int command_line, int n_nodes) {
  const auto single = kt.take_real("sim.demand");
  const auto list = kt.take_string("sim.demands");
  if (single && list)
    fail_at(kt, "sim.demands",
            "specify either 'sim.demand' or 'sim.demands', not both");
  std::vector<double> demands;
  if (single) {
    demands.assign(static_cast<std::size_t>(n_nodes), *single);
  } else if (list) {
    std::stringstream ss(*list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string tok = trim(item);
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || end == tok.c_str() || *end != '\0')
        fail_at(kt, "sim.demands", "'sim.demands' must be comma-separated numbers");
      demands.push_back(v);
    }
    if (static_cast<int>(demands.size()) != n_nodes)
      fail_at(kt, "sim.demands",
              "'sim.demands' must list exactly n_nodes values");
  } else {
    throw ScenarioError(command_line,
                        "missing required key 'sim.demand' (or 'sim.demands')");
  }
  return demands;
}

std::string format_bool(bool v) { return v ? "true" : "false"; }

void append_kv(std::string& s, const char* key, const std::string& value) {
  s += ' ';
  s += key;
  s += '=';
  s += value;
}

std::string header_comment(const Scenario& scn) {
  std::string s = "#";
  append_kv(s, "command", to_string(scn.command));
  append_kv(s, "mechanism.variant", to_string(scn.mech.variant));
  if (scn.mech.t_s) append_kv(s, "mechanism.t_s", format_value(*scn.mech.t_s));
  if (scn.mech.t_p) append_kv(s, "mechanism.t_p", format_value(*scn.mech.t_p));
  if (scn.mech.scale_transit_by_reputation)
    append_kv(s, "mechanism.scale_transit_by_reputation", "true");

  if (scn.command == Command::sim) {
    append_kv(s, "profile.g", format_value(scn.sim.g));
    append_kv(s, "profile.b", format_value(scn.sim.b));
    append_kv(s, "profile.e", format_value(scn.sim.e));
    append_kv(s, "sim.n_nodes", std::to_string(scn.sim.n_nodes));
    std::string demands;
    for (std::size_t i = 0; i < scn.sim.demands.size(); ++i) {
      if (i) demands += ',';
      demands += format_value(scn.sim.demands[i]);
    }
    append_kv(s, "sim.demands", demands);
    append_kv(s, "sim.hop_factor", format_value(scn.sim.hop_factor));
    append_kv(s, "sim.rounds", std::to_string(scn.sim.rounds));
    append_kv(s, "sim.seed", std::to_string(scn.sim.seed));
  } else {
    const ServiceProfile& p = scn.profile;
    const bool swept_transit = scn.command == Command::sweep &&
                               scn.sweep_kind == SweepKind::policy_vs_m;
    const bool swept_g = scn.command == Command::sweep &&
                         scn.sweep_kind == SweepKind::policy_vs_g;
    append_kv(s, "profile.s_xn", format_value(p.s_xn));
    if (!swept_transit) append_kv(s, "profile.s_nx", format_value(p.s_nx));
    if (!swept_g) append_kv(s, "profile.g", format_value(p.g));
    append_kv(s, "profile.b", format_value(p.b));
    append_kv(s, "profile.e", format_value(p.e));
  }

  if (scn.command == Command::curve || scn.command == Command::sweep) {
    append_kv(s, "sweep.kind", to_string(scn.sweep_kind));
    append_kv(s, "sweep.lo", format_value(scn.sweep_range.lo));
    append_kv(s, "sweep.hi", format_value(scn.sweep_range.hi));
    append_kv(s, "sweep.steps", std::to_string(scn.sweep_range.steps));
    if (scn.sweep_kind == SweepKind::exclusion_vs_e)
      append_kv(s, "sweep.t_x", format_value(scn.sweep_observed_policy));
  }

  const SolverConfig& sc =
      scn.command == Command::sim ? scn.sim.solver : scn.solver;
  append_kv(s, "solver.grid_step", format_value(sc.grid_step));
  append_kv(s, "solver.tie_tolerance", format_value(sc.tie_tolerance));
  append_kv(s, "solver.refine", format_bool(sc.refine));
  append_kv(s, "solver.refine_tolerance", format_value(sc.refine_tolerance));
  return s;
}

SweepSpec make_sweep_spec(const Scenario& scn) {
  SweepSpec spec;
  spec.kind = scn.sweep_kind;
  spec.mech = scn.mech;
  spec.base = scn.profile;
  spec.range = scn.sweep_range;
  spec.solver = scn.solver;
  spec.observed_policy = scn.sweep_observed_policy;
  return spec;
}

void write_solve(const Scenario& scn, std::ostream& out) {
  const SolveResult res = solve(scn.mech, scn.profile, scn.solver);
  out << "status,t_star,u_star,argmax_lo,argmax_hi\n";
  double lo = std::numeric_limits<double>::quiet_NaN();
  double hi = std::numeric_limits<double>::quiet_NaN();
  if (res.status == SolveStatus::interior) {
    for (const Interval& iv : res.argmax_set) {
      if (iv.lo <= res.t_star && res.t_star <= iv.hi) {
        lo = iv.lo;
        hi = iv.hi;
        break;
      }
    }
  }
  out << to_string(res.status) << ',' << format_value(res.t_star) << ','
      << format_value(res.u_star) << ',' << format_value(lo) << ','
      << format_value(hi) << '\n';
}

void write_curve(const Scenario& scn, std::ostream& out) {
  const std::vector<CurvePoint> pts = utility_curve(make_sweep_spec(scn));
  out << "x,u,feasible\n";
  for (const CurvePoint& pt : pts)
    out << format_value(pt.x) << ',' << format_value(pt.u) << ','
        << (pt.feasible ? '1' : '0') << '\n';
}

void write_sweep(const Scenario& scn, std::ostream& out) {
  const SweepSpec spec = make_sweep_spec(scn);
  if (scn.sweep_kind == SweepKind::exclusion_vs_e) {
    out << "e,p_exclude\n";
    for (const CurvePoint& pt : exclusion_vs_e(spec))
      out << format_value(pt.x) << ',' << format_value(pt.u) << '\n';
    return;
  }
  const bool vs_m = scn.sweep_kind == SweepKind::policy_vs_m;
  out << (vs_m ? "m" : "g") << ",t_star,status\n";
  const std::vector<CurvePoint> pts =
      vs_m ? policy_vs_m(spec) : policy_vs_g(spec);
  for (const CurvePoint& pt : pts)
    out << format_value(pt.x) << ',' << format_value(pt.u) << ','
        << to_string(*pt.status) << '\n';
}

void write_sim(const Scenario& scn, std::ostream& out) {
  const SimResult result = run_simulation(scn.sim);
  out << "round,mean_policy,opted_out,delivered,offered\n";
  for (const RoundMetrics& m : result.rounds)
    out << m.round << ',' << format_value(m.mean_policy) << ','
        << m.opted_out_count << ',' << format_value(m.delivered) << ','
        << format_value(m.offered) << '\n';
}

}  // namespace

ScenarioError::ScenarioError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                  : message),
      line_(line) {}

Scenario parse_scenario(std::string_view text) {
  KeyTable kt(text);

  const auto command_name = kt.take_string("command");
  if (!command_name) throw ScenarioError(0, "missing required key 'command'");
  const int command_line = kt.line_of("command", 1);

  Scenario scn;
  if (*command_name == "solve") scn.command = Command::solve;
  else if (*command_name == "curve") scn.command = Command::curve;
  else if (*command_name == "sweep") scn.command = Command::sweep;
  else if (*command_name == "sim") scn.command = Command::sim;
  else throw ScenarioError(command_line, "unknown command '" + *command_name + "'");

  scn.mech = parse_mechanism(kt, command_line);
  scn.solver = parse_solver(kt);
  scn.output = kt.take_string("output");

  switch (scn.command) {
    case Command::solve: {
      scn.profile = parse_profile(kt, command_line, {});
      try {
        scn.profile.validate();
      } catch (const std::invalid_argument& ex) {
        throw ScenarioError(command_line, ex.what());
      }
      break;
    }
    case Command::curve:
    case Command::sweep: {
      if (scn.command == Command::curve) {
        scn.sweep_kind = SweepKind::utility_curve;
        if (auto kind = kt.take_string("sweep.kind")) {
          if (*kind != "utility_curve")
            fail_at(kt, "sweep.kind",
                    "command 'curve' only supports sweep.kind utility_curve");
        }
      } else {
        const auto kind_name = kt.take_string("sweep.kind");
        if (!kind_name)
          throw ScenarioError(command_line, "missing required key 'sweep.kind'");
        const auto kind = sweep_kind_from_string(*kind_name);
        if (!kind || *kind == SweepKind::utility_curve)
          fail_at(kt, "sweep.kind",
                  "sweep.kind must be policy_vs_m, policy_vs_g or exclusion_vs_e"
                  " (use command 'curve' for utility curves)");
        scn.sweep_kind = *kind;
      }

      ProfileNeeds needs;
      if (scn.sweep_kind == SweepKind::policy_vs_m) needs.transit = false;
      if (scn.sweep_kind == SweepKind::policy_vs_g) needs.g = false;
      if (scn.sweep_kind == SweepKind::exclusion_vs_e) {
        needs.s_xn = false;
        needs.g = false;
        needs.e_allowed = false;  // e is the swept variable
      }
      scn.profile = parse_profile(kt, command_line, needs);
      scn.sweep_range = parse_range(kt, command_line);
      if (scn.sweep_kind == SweepKind::exclusion_vs_e) {
        if (auto tx = kt.take_real("sweep.t_x")) {
          check_range(kt, "sweep.t_x", *tx, 0.0, 1.0, "must lie in [0, 1]");
          scn.sweep_observed_policy = *tx;
        }
      }
      try {
        make_sweep_spec(scn).validate();
      } catch (const std::invalid_argument& ex) {
        throw ScenarioError(command_line, ex.what());
      }
      break;
    }
    case Command::sim: {
      SimConfig& cfg = scn.sim;
      cfg.mech = scn.mech;
      cfg.solver = scn.solver;

      const auto n_nodes = kt.take_int("sim.n_nodes");
      if (!n_nodes)
        throw ScenarioError(command_line, "missing required key 'sim.n_nodes'");
      if (*n_nodes < 2 || *n_nodes > 1'000'000)
        fail_at(kt, "sim.n_nodes", "'sim.n_nodes' must be an integer >= 2");
      cfg.n_nodes = static_cast<int>(*n_nodes);
      cfg.demands = parse_demands(kt, command_line, cfg.n_nodes);

      cfg.g = require_real(kt, "profile.g", command_line);
      if (auto b = kt.take_real("profile.b")) cfg.b = *b;
      if (auto e = kt.take_real("profile.e")) {
        check_range(kt, "profile.e", *e, 0.0, 1.0, "must lie in [0, 1]");
        cfg.e = *e;
      }
      if (auto hop = kt.take_real("sim.hop_factor")) cfg.hop_factor = *hop;
      const auto rounds = kt.take_int("sim.rounds");
      if (!rounds)
        throw ScenarioError(command_line, "missing required key 'sim.rounds'");
      if (*rounds < 0 || *rounds > 1'000'000)
        fail_at(kt, "sim.rounds", "'sim.rounds' must be a non-negative integer");
      cfg.rounds = static_cast<int>(*rounds);
      if (auto seed = kt.take_int("sim.seed"))
        cfg.seed = static_cast<std::uint64_t>(*seed);

      try {
        cfg.validate();
      } catch (const std::invalid_argument& ex) {
        throw ScenarioError(command_line, ex.what());
      }
      break;
    }
  }

  kt.fail_unused(to_string(scn.command));
  return scn;
}

void run_scenario(const Scenario& scn, std::ostream& out) {
  out << header_comment(scn) << '\n';
  switch (scn.command) {
    case Command::solve: write_solve(scn, out); break;
    case Command::curve: write_curve(scn, out); break;
    case Command::sweep: write_sweep(scn, out); break;
    case Command::sim: write_sim(scn, out); break;
  }
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

const char* to_string(Command c) {
  switch (c) {
    case Command::solve: return "solve";
    case Command::curve: return "curve";
    case Command::sweep: return "sweep";
    case Command::sim: return "sim";
  }
  return "?";
}

}  // namespace coopnet
