#include "bsrd/driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "bsrd/errors.hpp"
#include "bsrd/mesh_io.hpp"

namespace bsrd {

namespace fs = std::filesystem;

SystemState make_initial_condition(const SimConfig& cfg, const SteadyState& steady, int nb,
                                   int ns) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> xi(-1.0, 1.0);
  auto field = [&](double base, int n) {
    std::vector<double> f(static_cast<std::size_t>(n));
    for (auto& x : f) x = base * (1.0 + cfg.eps_ic * xi(rng));
    return f;
  };
  SystemState st;
  st.u = field(steady.u, nb);
  st.v = field(steady.v, nb);
  st.r = field(steady.r, ns);
  st.s = field(steady.s, ns);
  return st;
}

void apply_verdict(PatternMetrics& m, const VerdictRule& rule) {
  const bool pb = m.rel_dev_bulk >= rule.threshold;
  const bool ps = m.rel_dev_surf >= rule.threshold;
  const bool localized = m.amp_shell_outer >= rule.localization_ratio * m.amp_shell_inner;
  // Surface deviation small next to the bulk one: a response, not a pattern.
  const bool surf_induced = rule.localization_ratio * m.rel_dev_surf <= m.rel_dev_bulk;
  if (!pb && !ps) m.verdict = Regime::NoPattern;
  else if (ps && (!pb || localized)) m.verdict = Regime::SurfaceOnly;
  else if (pb && (!ps || surf_induced)) m.verdict = Regime::BulkOnly;
  else m.verdict = Regime::Both;
  m.boundary_layer = localized && (pb || ps);
}

PatternMetrics compute_metrics(const BulkSurfaceMesh& mesh, const CoupledSystemOperators& ops,
                               const SystemState& st, const SteadyState& steady,
                               const VerdictRule& rule) {
  auto rel_l2 = [](const CsrMatrix& mass, const std::vector<double>& f, double ref) {
    std::vector<double> e(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) e[i] = f[i] - ref;
    const auto me = multiply(mass, e);
    double num = 0.0, measure = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) num += e[i] * me[i];
    for (double w : row_sums(mass)) measure += w;
    return std::sqrt(std::max(num, 0.0)) / (std::abs(ref) * std::sqrt(measure));
  };
  PatternMetrics m;
  m.rel_dev_bulk = rel_l2(ops.mass_bulk, st.u, steady.u);
  m.rel_dev_surf = rel_l2(ops.mass_surf, st.r, steady.r);
  double so = 0.0, si = 0.0;
  int no = 0, ni = 0;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& x = mesh.vertices[i];
    const double rad = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double d = st.u[i] - steady.u;
    if (rad > rule.outer_radius) {
      so += d * d;
      ++no;
    } else if (rad < rule.inner_radius) {
      si += d * d;
      ++ni;
    }
  }
  m.amp_shell_outer = no ? std::sqrt(so / no) : 0.0;
  m.amp_shell_inner = ni ? std::sqrt(si / ni) : 0.0;
  apply_verdict(m, rule);
  return m;
}

namespace {

VerdictRule rule_from(const SimConfig& cfg) {
  VerdictRule r;
  r.threshold = cfg.pattern_threshold;
  r.localization_ratio = cfg.localization_ratio;
  return r;
}

void write_snapshot(const fs::path& dir, int index, const BulkSurfaceMesh& mesh,
                    const SystemState& st) {
  std::ostringstream stem;
  stem << "snap_" << std::setw(4) << std::setfill('0') << index;
  std::ofstream bulk(dir / (stem.str() + "_bulk.vtk"));
  write_vtk_bulk(bulk, mesh, {{"u", &st.u}, {"v", &st.v}}, "bulk t=" + std::to_string(st.t));
  std::ofstream surf(dir / (stem.str() + "_surface.vtk"));
  write_vtk_surface(surf, mesh, {{"r", &st.r}, {"s", &st.s}},
                    "surface t=" + std::to_string(st.t));
  if (!bulk || !surf) throw Error("failed writing snapshot " + stem.str() + " in " + dir.string());
}

void write_metrics_row(std::ostream& os, const MetricsSample& s) {
  const auto& m = s.metrics;
  os << s.step << ',' << s.t << ',' << m.rel_dev_bulk << ',' << m.rel_dev_surf << ','
     << m.amp_shell_outer << ',' << m.amp_shell_inner << ',' << to_string(m.verdict) << ','
     << (m.boundary_layer ? 1 : 0) << '\n';
}

double rel_change(double now, double before) {
  const double denom = std::max(std::abs(before), 1e-300);
  return std::abs(now - before) / denom;
}

}  // namespace

RunResult run(const SimConfig& cfg, const ProgressFn& progress) {
  validate(cfg);
  const auto mesh = generate_ball_mesh(cfg.mesh_level);
  const auto ops = assemble_operators(mesh);
  const auto steady = steady_state(cfg.model.kinetics);
  const auto rule = rule_from(cfg);

  SystemOptions opts;
  opts.kinetics = cfg.kinetics;
  opts.lumped_mass = cfg.lumped_mass;
  BulkSurfaceSystem system(ops, cfg.model, opts);
  FractionalStepTheta integrator(system, cfg.scheme);

  RunResult res;
  SystemState st = make_initial_condition(cfg, steady, system.num_bulk(), system.num_surface());
  auto y = pack(st);

  const bool files = !cfg.output_dir.empty();
  fs::path dir;
  std::ofstream metrics_csv;
  if (files) {
    dir = cfg.output_dir;
    fs::create_directories(dir);
    metrics_csv.open(dir / "metrics.csv");
    if (!metrics_csv) throw Error("cannot write " + (dir / "metrics.csv").string());
    metrics_csv << std::setprecision(10)
                << "step,t,rel_dev_bulk,rel_dev_surf,amp_shell_outer,amp_shell_inner,verdict,"
                   "boundary_layer\n";
    std::ofstream cfg_out(dir / "config.toml");
    write_config(cfg_out, cfg);
  }

  const double dt = cfg.scheme.dt;
  const long long total = std::max(1LL, static_cast<long long>(std::ceil(cfg.t_end / dt - 1e-9)));
  const long long snap_every =
      cfg.snapshot_interval > 0.0
          ? std::max(1LL, static_cast<long long>(std::llround(cfg.snapshot_interval / dt)))
          : 0;
  const int window = cfg.early_stop_window;
  const long long sample_every = window > 0 ? window : 100;
  int snap_index = 0;

  auto sample = [&](long long k) {
    unpack(y, system.num_bulk(), system.num_surface(), st);
    st.t = static_cast<double>(k) * dt;
    MetricsSample s{st.t, static_cast<int>(k), compute_metrics(mesh, ops, st, steady, rule)};
    res.history.push_back(s);
    if (files) write_metrics_row(metrics_csv, s);
    if (progress) progress(s);
    return s;
  };

  sample(0);
  if (files && snap_every) write_snapshot(dir, snap_index++, mesh, st);
  long long k = 0;
  while (k < total) {
    const auto rep = integrator.advance(y, dt);
    ++k;
    res.newton_iterations += rep.newton_iterations;
    res.linear_iterations += rep.linear_iterations;
    res.max_halvings = std::max(res.max_halvings, rep.halvings);
    const bool at_sample = k % sample_every == 0 || k == total;
    const bool at_snap = files && snap_every && (k % snap_every == 0 || k == total);
    if (!at_sample && !at_snap) continue;
    const auto before = res.history.back();
    const auto s = sample(k);
    if (at_snap) write_snapshot(dir, snap_index++, mesh, st);
    if (window > 0 && at_sample && k % window == 0 && before.step == k - window &&
        rel_change(s.metrics.rel_dev_bulk, before.metrics.rel_dev_bulk) < cfg.early_stop_tol &&
        rel_change(s.metrics.rel_dev_surf, before.metrics.rel_dev_surf) < cfg.early_stop_tol) {
      res.early_stopped = true;
      if (files && snap_every && !at_snap) write_snapshot(dir, snap_index++, mesh, st);
      break;
    }
  }
  unpack(y, system.num_bulk(), system.num_surface(), st);
  st.t = static_cast<double>(k) * dt;
  res.steps = static_cast<int>(k);
  res.final_state = st;
  res.metrics = res.history.back().metrics;
  return res;
}

std::vector<ScanRow> parameter_scan(const SimConfig& cfg, const ProgressFn& progress) {
  std::vector<ScanRow> rows;
  for (double db : cfg.scan_d_bulk)
    for (double ds : cfg.scan_d_surf) {
      ScanRow row;
      row.d_bulk = db;
      row.d_surf = ds;
      rows.push_back(row);
    }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    ModelParams m = cfg.model;
    m.diffusion = {row.d_bulk, row.d_surf};
    const auto report = classify_regime(m);
    row.predicted = report.regime;
    row.predicted_uncoupled = report.uncoupled.regime;
    if (cfg.scan_simulate) {
      SimConfig point = cfg;
      point.model = m;
      if (!cfg.output_dir.empty())
        point.output_dir = (fs::path(cfg.output_dir) / ("scan_" + std::to_string(i))).string();
      const auto result = run(point, progress);
      row.simulated = true;
      row.observed = result.metrics.verdict;
      row.agrees = row.observed == row.predicted_uncoupled;
    }
  }
  return rows;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
  os << "d_bulk,d_surf,predicted,predicted_uncoupled,observed,agrees\n";
  for (const auto& r : rows) {
    os << r.d_bulk << ',' << r.d_surf << ',' << to_string(r.predicted) << ','
       << to_string(r.predicted_uncoupled) << ',' << (r.simulated ? to_string(r.observed) : "")
       << ',' << (r.simulated ? (r.agrees ? "yes" : "no") : "") << '\n';
  }
}

}  // namespace bsrd
