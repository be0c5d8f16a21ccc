#pragma once

// End-to-end runs: initial data, time loop, snapshots, pattern metrics and
// regime verdicts, and (d_bulk, d_surf) parameter scans.

#include <functional>
#include <iosfwd>
#include <vector>

#include "bsrd/config.hpp"
#include "bsrd/coupled_system.hpp"
#include "bsrd/fem.hpp"
#include "bsrd/mesh.hpp"
#include "bsrd/stability.hpp"

namespace bsrd {

/// steady * (1 + eps * xi), xi ~ U[-1, 1] from mt19937_64(seed), drawn field by
/// field (u, v, r, s) and node by node.
SystemState make_initial_condition(const SimConfig& cfg, const SteadyState& steady, int num_bulk,
                                   int num_surface);

struct VerdictRule {
  double threshold = 0.05;
  double localization_ratio = 5.0;
  double outer_radius = 0.8;
  double inner_radius = 0.5;
};

struct PatternMetrics {
  double rel_dev_bulk = 0.0;     // ||u - u*||_L2 / ||u*||_L2 over the ball
  double rel_dev_surf = 0.0;     // ||r - r*||_L2 / ||r*||_L2 over the sphere
  double amp_shell_outer = 0.0;  // RMS of u - u* over vertices with |x| > outer_radius
  double amp_shell_inner = 0.0;  // RMS of u - u* over vertices with |x| < inner_radius
  Regime verdict = Regime::NoPattern;
  bool boundary_layer = false;
};

/// Pure function of the four metric values. A field counts as patterned when
/// its relative deviation reaches `threshold`. SurfaceOnly: surface patterned
/// and the bulk deviation either small or confined to the outer shell
/// (outer >= ratio * inner). BulkOnly: bulk patterned and the surface
/// deviation either small or below rel_dev_bulk / ratio. Otherwise Both.
void apply_verdict(PatternMetrics& m, const VerdictRule& rule);

PatternMetrics compute_metrics(const BulkSurfaceMesh& mesh, const CoupledSystemOperators& ops,
                               const SystemState& state, const SteadyState& steady,
                               const VerdictRule& rule);

struct MetricsSample {
  double t = 0.0;
  int step = 0;
  PatternMetrics metrics;
};

struct RunResult {
  SystemState final_state;
  PatternMetrics metrics;
  int steps = 0;
  bool early_stopped = false;
  long long newton_iterations = 0;
  long long linear_iterations = 0;
  int max_halvings = 0;
  std::vector<MetricsSample> history;
};

using ProgressFn = std::function<void(const MetricsSample&)>;

/// Validates cfg, builds mesh and operators, integrates to t_end (or until the
/// early-stop criterion fires) and writes snapshots plus metrics.csv when
/// cfg.output_dir is set. Solver failures propagate as SolverError.
RunResult run(const SimConfig& cfg, const ProgressFn& progress = {});

struct ScanRow {
  double d_bulk = 0.0;
  double d_surf = 0.0;
  Regime predicted = Regime::NoPattern;            // coupled surface Jacobian
  Regime predicted_uncoupled = Regime::NoPattern;  // bare surface kinetics
  bool simulated = false;
  Regime observed = Regime::NoPattern;
  bool agrees = false;  // observed == predicted_uncoupled
};

/// One row per (d_bulk, d_surf) in the config grid; runs a simulation per
/// point when cfg.scan_simulate is set, each into output_dir/scan_<i>.
std::vector<ScanRow> parameter_scan(const SimConfig& cfg, const ProgressFn& progress = {});

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);

}  // namespace bsrd
