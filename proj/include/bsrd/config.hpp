#pragma once

// Simulation configuration and its plain-text key/value format:
//
//   [section]
//   key = value        # comment
//
// Numbers accept rational literals such as 5/12. Arrays use [1, 20].

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsrd/coupled_system.hpp"
#include "bsrd/kinetics.hpp"
#include "bsrd/timestep.hpp"

namespace bsrd {

struct SimConfig {
  ModelParams model = ModelParams::reference(1.0, 1.0);
  int mesh_level = 3;
  SchemeConfig scheme;
  double t_end = 2.0;
  double snapshot_interval = 0.25;  // 0 disables snapshots
  std::uint64_t seed = 1;
  double eps_ic = 0.01;
  std::string output_dir;  // empty: write nothing
  KineticsMode kinetics = KineticsMode::Nonlinear;
  bool lumped_mass = false;
  double early_stop_tol = 1e-6;
  int early_stop_window = 100;  // steps; 0 disables early stopping
  double pattern_threshold = 0.05;
  double localization_ratio = 5.0;
  int l_max = 50;
  std::vector<double> scan_d_bulk{1.0, 20.0};
  std::vector<double> scan_d_surf{1.0, 20.0};
  bool scan_simulate = false;
};

struct ConfigKey {
  std::string name;  // section.key
  std::string help;
};

/// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Current value of a key rendered as config text.
std::string config_value(const SimConfig& cfg, const std::string& key);

/// Sets one key from its textual value. Throws ConfigError naming the key
/// (and `line` when nonzero) on unknown keys or malformed values.
void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value,
                      int line = 0);

/// Applies a config text on top of `cfg`. Does not validate.
void parse_config(std::istream& is, SimConfig& cfg);
SimConfig load_config_file(const std::string& path, SimConfig base = {});

/// "section.key=value" override.
void apply_override(SimConfig& cfg, const std::string& assignment);

/// Full config text that parses back to `cfg`.
void write_config(std::ostream& os, const SimConfig& cfg);

/// Parses "p", "p/q" or a decimal; throws ConfigError on anything else.
double parse_rational(const std::string& text, int line = 0);

/// Parameter, scheme and run invariants plus the compatibility condition.
/// Throws ParameterError / CompatibilityError.
void validate(const SimConfig& cfg);

}  // namespace bsrd
