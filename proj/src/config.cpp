#include "bsrd/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>

#include "bsrd/errors.hpp"
#include "bsrd/mesh.hpp"

namespace bsrd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

ConfigError value_error(const std::string& key, const std::string& value, const std::string& what,
                        int line) {
  std::string msg = "invalid value '" + value + "' for key '" + key + "': " + what;
  if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
  return ConfigError(msg, line);
}

double parse_decimal(const std::string& t, bool& ok) {
  ok = false;
  if (t.empty()) return 0.0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  ok = end == t.c_str() + t.size();
  return v;
}

long long parse_int(const std::string& key, const std::string& value, int line) {
  const std::string t = trim(value);
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &pos);
  } catch (const std::exception&) {
    throw value_error(key, value, "expected an integer", line);
  }
  if (pos != t.size()) throw value_error(key, value, "expected an integer", line);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
  const std::string t = trim(value);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw value_error(key, value, "expected true or false", line);
}

std::vector<double> parse_list(const std::string& key, const std::string& value, int line) {
  std::string t = trim(value);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    throw value_error(key, value, "expected a list like [1, 20]", line);
  t = trim(t.substr(1, t.size() - 2));
  std::vector<double> out;
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(trim(item), line));
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

struct KeyDef {
  ConfigKey doc;
  std::function<void(SimConfig&, const std::string&, int)> set;
  std::function<std::string(const SimConfig&)> get;
};


template <class Get>
KeyDef num(std::string name, std::string help, Get ref) {
  return {{name, std::move(help)},
          [ref](SimConfig& c, const std::string& v, int line) { ref(c) = parse_rational(trim(v), line); },
          [ref](const SimConfig& c) { return fmt(ref(const_cast<SimConfig&>(c))); }};
}

template <class Get>
KeyDef integer(std::string name, std::string help, Get ref) {
  return {{name, std::move(help)},
          [ref, name](SimConfig& c, const std::string& v, int line) {
            const long long x = parse_int(name, v, line);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
              throw value_error(name, v, "out of range", line);
            ref(c) = static_cast<int>(x);
          },
          [ref](const SimConfig& c) { return std::to_string(ref(const_cast<SimConfig&>(c))); }};
}

const std::vector<KeyDef>& registry() {
  static const std::vector<KeyDef> keys = [] {
    std::vector<KeyDef> k;
    k.push_back(num("kinetics.a", "source rate a (> 0)", [](SimConfig& c) -> double& { return c.model.kinetics.a; }));
    k.push_back(num("kinetics.b", "source rate b (> 0)", [](SimConfig& c) -> double& { return c.model.kinetics.b; }));
    k.push_back(num("kinetics.gamma_bulk", "bulk scale factor (> 0)", [](SimConfig& c) -> double& { return c.model.kinetics.gamma_bulk; }));
    k.push_back(num("kinetics.gamma_surf", "surface scale factor (> 0)", [](SimConfig& c) -> double& { return c.model.kinetics.gamma_surf; }));
    k.push_back(num("coupling.alpha1", "h1 coefficient of r", [](SimConfig& c) -> double& { return c.model.coupling.alpha1; }));
    k.push_back(num("coupling.beta1", "h1 coefficient of -u", [](SimConfig& c) -> double& { return c.model.coupling.beta1; }));
    k.push_back(num("coupling.kappa1", "h1 coefficient of -v", [](SimConfig& c) -> double& { return c.model.coupling.kappa1; }));
    k.push_back(num("coupling.alpha2", "h2 coefficient of s", [](SimConfig& c) -> double& { return c.model.coupling.alpha2; }));
    k.push_back(num("coupling.beta2", "h2 coefficient of -u", [](SimConfig& c) -> double& { return c.model.coupling.beta2; }));
    k.push_back(num("coupling.kappa2", "h2 coefficient of -v", [](SimConfig& c) -> double& { return c.model.coupling.kappa2; }));
    k.push_back(num("diffusion.d_bulk", "bulk diffusion ratio (> 0)", [](SimConfig& c) -> double& { return c.model.diffusion.d_bulk; }));
    k.push_back(num("diffusion.d_surf", "surface diffusion ratio (> 0)", [](SimConfig& c) -> double& { return c.model.diffusion.d_surf; }));
    k.push_back(integer("mesh.level", "ball mesh refinement level (0..7)", [](SimConfig& c) -> int& { return c.mesh_level; }));
    k.push_back(num("scheme.dt", "time step", [](SimConfig& c) -> double& { return c.scheme.dt; }));
    k.push_back(num("scheme.theta", "fractional-step theta in (0, 1/2)", [](SimConfig& c) -> double& { return c.scheme.theta; }));
    k.push_back(num("scheme.alpha", "implicitness weight in (1/2, 1]", [](SimConfig& c) -> double& { return c.scheme.alpha; }));
    k.push_back(num("scheme.newton_tol", "Newton tolerance on the mass-scaled residual", [](SimConfig& c) -> double& { return c.scheme.newton_tol; }));
    k.push_back(integer("scheme.newton_max", "Newton iteration cap", [](SimConfig& c) -> int& { return c.scheme.newton_max; }));
    k.push_back(num("scheme.linear_tol", "linear solve relative residual", [](SimConfig& c) -> double& { return c.scheme.linear_tol; }));
    k.push_back(integer("scheme.max_halvings", "dt halvings allowed after a solver failure", [](SimConfig& c) -> int& { return c.scheme.max_halvings; }));
    k.push_back({{"scheme.linear_solver", "bicgstab or lu"},
                 [](SimConfig& c, const std::string& v, int line) {
                   const auto t = unquote(trim(v));
                   if (t == "bicgstab") c.scheme.linear_solver = LinearSolverKind::BiCGStab;
                   else if (t == "lu") c.scheme.linear_solver = LinearSolverKind::SparseLU;
                   else throw value_error("scheme.linear_solver", v, "expected bicgstab or lu", line);
                 },
                 [](const SimConfig& c) {
                   return std::string(c.scheme.linear_solver == LinearSolverKind::SparseLU ? "\"lu\"" : "\"bicgstab\"");
                 }});
    k.push_back(num("run.t_end", "end time (> 0)", [](SimConfig& c) -> double& { return c.t_end; }));
    k.push_back(num("run.snapshot_interval", "time between VTK snapshots (0 disables)", [](SimConfig& c) -> double& { return c.snapshot_interval; }));
    k.push_back({{"run.seed", "RNG seed for the initial perturbation"},
                 [](SimConfig& c, const std::string& v, int line) {
                   const long long x = parse_int("run.seed", v, line);
                   if (x < 0) throw value_error("run.seed", v, "must be >= 0", line);
                   c.seed = static_cast<std::uint64_t>(x);
                 },
                 [](const SimConfig& c) { return std::to_string(c.seed); }});
    k.push_back(num("run.eps_ic", "relative perturbation amplitude (> 0)", [](SimConfig& c) -> double& { return c.eps_ic; }));
    k.push_back({{"run.output_dir", "directory for snapshots and metrics.csv (empty: none)"},
                 [](SimConfig& c, const std::string& v, int) { c.output_dir = unquote(trim(v)); },
                 [](const SimConfig& c) { return "\"" + c.output_dir + "\""; }});
    k.push_back({{"run.kinetics", "nonlinear, linearized or off"},
                 [](SimConfig& c, const std::string& v, int line) {
                   const auto t = unquote(trim(v));
                   if (t == "nonlinear") c.kinetics = KineticsMode::Nonlinear;
                   else if (t == "linearized") c.kinetics = KineticsMode::Linearized;
                   else if (t == "off") c.kinetics = KineticsMode::Off;
                   else throw value_error("run.kinetics", v, "expected nonlinear, linearized or off", line);
                 },
                 [](const SimConfig& c) {
                   switch (c.kinetics) {
                     case KineticsMode::Linearized: return std::string("\"linearized\"");
                     case KineticsMode::Off: return std::string("\"off\"");
                     default: return std::string("\"nonlinear\"");
                   }
                 }});
    k.push_back({{"run.lumped_mass", "lump the mass matrices (true/false)"},
                 [](SimConfig& c, const std::string& v, int line) { c.lumped_mass = parse_bool("run.lumped_mass", v, line); },
                 [](const SimConfig& c) { return std::string(c.lumped_mass ? "true" : "false"); }});
    k.push_back(num("run.early_stop_tol", "relative metric change that ends a run early", [](SimConfig& c) -> double& { return c.early_stop_tol; }));
    k.push_back(integer("run.early_stop_window", "steps between early-stop checks (0 disables)", [](SimConfig& c) -> int& { return c.early_stop_window; }));
    k.push_back(num("verdict.threshold", "relative L2 deviation counted as patterned", [](SimConfig& c) -> double& { return c.pattern_threshold; }));
    k.push_back(num("verdict.localization_ratio", "shell amplitude ratio for a boundary layer; also bulk/surface deviation ratio for BulkOnly", [](SimConfig& c) -> double& { return c.localization_ratio; }));
    k.push_back(integer("analysis.l_max", "highest spherical-harmonic degree in dispersion tables", [](SimConfig& c) -> int& { return c.l_max; }));
    k.push_back({{"scan.d_bulk", "bulk diffusion ratios, e.g. [1, 20]"},
                 [](SimConfig& c, const std::string& v, int line) { c.scan_d_bulk = parse_list("scan.d_bulk", v, line); },
                 [](const SimConfig& c) { return list_text(c.scan_d_bulk); }});
    k.push_back({{"scan.d_surf", "surface diffusion ratios, e.g. [1, 20]"},
                 [](SimConfig& c, const std::string& v, int line) { c.scan_d_surf = parse_list("scan.d_surf", v, line); },
                 [](const SimConfig& c) { return list_text(c.scan_d_surf); }});
    k.push_back({{"scan.simulate", "also run a simulation per grid point (true/false)"},
                 [](SimConfig& c, const std::string& v, int line) { c.scan_simulate = parse_bool("scan.simulate", v, line); },
                 [](const SimConfig& c) { return std::string(c.scan_simulate ? "true" : "false"); }});
    return k;
  }();
  return keys;
}

const KeyDef* lookup(const std::string& key) {
  for (const auto& k : registry())
    if (k.doc.name == key) return &k;
  return nullptr;
}

ConfigError unknown_key(const std::string& key, int line) {
  std::string msg = "unknown key '" + key + "'";
  if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
  return ConfigError(msg, line);
}

std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

}  // namespace

double parse_rational(const std::string& text, int line) {
  const std::string t = trim(text);
  auto fail = [&]() -> ConfigError {
    std::string msg = "malformed number '" + text + "'";
    if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
    return ConfigError(msg, line);
  };
  bool ok = false;
  const auto slash = t.find('/');
  double v;
  if (slash == std::string::npos) {
    v = parse_decimal(t, ok);
    if (!ok) throw fail();
  } else {
    bool ok2 = false;
    const double p = parse_decimal(trim(t.substr(0, slash)), ok);
    const double q = parse_decimal(trim(t.substr(slash + 1)), ok2);
    if (!ok || !ok2 || q == 0.0) throw fail();
    v = p / q;
  }
  if (!std::isfinite(v)) throw fail();
  return v;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> docs = [] {
    std::vector<ConfigKey> d;
    for (const auto& k : registry()) d.push_back(k.doc);
    return d;
  }();
  return docs;
}

std::string config_value(const SimConfig& cfg, const std::string& key) {
  const KeyDef* k = lookup(key);
  if (!k) throw unknown_key(key, 0);
  return k->get(cfg);
}

void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value, int line) {
  const KeyDef* k = lookup(key);
  if (!k) throw unknown_key(key, line);
  k->set(cfg, value, line);
}

void parse_config(std::istream& is, SimConfig& cfg) {
  std::string raw, section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3)
        throw ConfigError("line " + std::to_string(line) + ": malformed section header", line);
      section = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", line);
    const std::string key = trim(s.substr(0, eq));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line) + ": empty key", line);
    const std::string full = section.empty() ? key : section + "." + key;
    set_config_value(cfg, full, trim(s.substr(eq + 1)), line);
  }
}

SimConfig load_config_file(const std::string& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  parse_config(in, base);
  return base;
}

void apply_override(SimConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  set_config_value(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void write_config(std::ostream& os, const SimConfig& cfg) {
  std::string section;
  for (const auto& k : registry()) {
    const auto dot = k.doc.name.find('.');
    const std::string sec = k.doc.name.substr(0, dot);
    if (sec != section) {
      os << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
      section = sec;
    }
    os << k.doc.name.substr(dot + 1) << " = " << k.get(cfg) << '\n';
  }
}

void validate(const SimConfig& cfg) {
  validate(cfg.model);
  require_compatible(cfg.model.kinetics, cfg.model.coupling);
  validate(cfg.scheme);
  auto bad = [](const std::string& m) { throw ParameterError(m); };
  if (cfg.mesh_level < 0 || cfg.mesh_level > kMaxRefinement)
    bad("mesh.level must lie in 0.." + std::to_string(kMaxRefinement));
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) bad("run.t_end must be finite and > 0");
  if (!(cfg.eps_ic > 0.0) || !std::isfinite(cfg.eps_ic)) bad("run.eps_ic must be finite and > 0");
  if (!(cfg.snapshot_interval >= 0.0)) bad("run.snapshot_interval must be >= 0");
  if (!(cfg.early_stop_tol >= 0.0)) bad("run.early_stop_tol must be >= 0");
  if (cfg.early_stop_window < 0) bad("run.early_stop_window must be >= 0");
  if (!(cfg.pattern_threshold > 0.0)) bad("verdict.threshold must be > 0");
  if (!(cfg.localization_ratio > 0.0)) bad("verdict.localization_ratio must be > 0");
  if (cfg.l_max < 0) bad("analysis.l_max must be >= 0");
  for (double d : cfg.scan_d_bulk)
    if (!(d > 0.0)) bad("scan.d_bulk entries must be > 0");
  for (double d : cfg.scan_d_surf)
    if (!(d > 0.0)) bad("scan.d_surf entries must be > 0");
}

}  // namespace bsrd
