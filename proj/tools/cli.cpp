#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "bsrd/config.hpp"
#include "bsrd/driver.hpp"
#include "bsrd/errors.hpp"
#include "bsrd/mesh_io.hpp"
#include "bsrd/stability.hpp"

namespace bsrd::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kUnset = std::numeric_limits<int>::min();

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "config file ([section] key = value)");
  sub->add_option("--set", c.overrides, "override KEY=VALUE, e.g. diffusion.d_surf=20")
      ->allow_extra_args(false);
  sub->add_option("--out", c.out_dir, "output directory");
  sub->add_flag("--quiet", c.quiet, "suppress progress and report text");
}

SimConfig load(const Common& c) {
  SimConfig cfg;
  if (!c.config_path.empty()) cfg = load_config_file(c.config_path, cfg);
  for (const auto& o : c.overrides) apply_override(cfg, o);
  return cfg;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream f(fs::path(dir) / name);
  if (!f) throw Error("cannot write " + (fs::path(dir) / name).string());
  return f;
}

std::string key_listing() {
  std::ostringstream os;
  os << "Config keys (file sections or --set section.key=value):\n";
  SimConfig defaults;
  for (const auto& k : config_keys())
    os << "  " << std::left << std::setw(28) << k.name << k.help << " [default "
       << config_value(defaults, k.name) << "]\n";
  os << "Numbers accept rational literals such as 5/12.\n"
        "Exit status: 0 success, 2 config or parameter error, 3 solver failure.";
  return os.str();
}

int cmd_analyze(const Common& c, bool csv, std::ostream& out) {
  SimConfig cfg = load(c);
  validate(cfg.model);
  const auto report = classify_regime(cfg.model);
  if (csv) write_report_csv(out, report);
  else if (!c.quiet) write_report_text(out, report);
  if (!c.out_dir.empty()) {
    auto f = open_out(c.out_dir, "analysis.csv");
    write_report_csv(f, report);
    auto t = open_out(c.out_dir, "analysis.txt");
    write_report_text(t, report);
  }
  return kExitOk;
}

int cmd_dispersion(const Common& c, int lmax, bool coupled, std::ostream& out) {
  SimConfig cfg = load(c);
  if (lmax != kUnset) cfg.l_max = lmax;
  validate(cfg.model);
  if (cfg.l_max < 0) throw ParameterError("--lmax must be >= 0");
  const auto j = reduced_jacobian(cfg.model.kinetics, cfg.model.coupling, coupled);
  const auto table = dispersion_scan(j, cfg.model.diffusion, cfg.model.kinetics, cfg.l_max);
  if (!c.quiet) write_dispersion_csv(out, table);
  if (!c.out_dir.empty()) {
    auto f = open_out(c.out_dir, "dispersion.csv");
    write_dispersion_csv(f, table);
  }
  return kExitOk;
}

int cmd_mesh(const Common& c, int level, std::ostream& out) {
  SimConfig cfg = load(c);
  if (level != kUnset) cfg.mesh_level = level;
  const auto mesh = generate_ball_mesh(cfg.mesh_level);
  validate_ball_mesh(mesh);
  const auto s = mesh_stats(mesh);
  if (!c.quiet) {
    out << "level " << cfg.mesh_level << ": " << s.num_vertices << " vertices, " << s.num_tets
        << " tets, " << s.num_surface_vertices << " surface vertices, " << s.num_surface_tris
        << " surface triangles\n"
        << std::setprecision(8) << "h_min = " << s.h_min << ", h_max = " << s.h_max
        << "\nvolume = " << s.volume << " (ball 4.1887902), area = " << s.area
        << " (sphere 12.566371)\n";
  }
  if (!c.out_dir.empty()) {
    auto t = open_out(c.out_dir, "mesh.txt");
    write_mesh_text(t, mesh);
    auto b = open_out(c.out_dir, "mesh_bulk.vtk");
    write_vtk_bulk(b, mesh, {});
    auto f = open_out(c.out_dir, "mesh_surface.vtk");
    write_vtk_surface(f, mesh, {});
  }
  return kExitOk;
}

void print_metrics(std::ostream& out, const MetricsSample& s) {
  const auto& m = s.metrics;
  out << "step " << s.step << "  t = " << std::setprecision(6) << s.t
      << "  rel_dev_bulk = " << m.rel_dev_bulk << "  rel_dev_surf = " << m.rel_dev_surf
      << "  shells outer/inner = " << m.amp_shell_outer << " / " << m.amp_shell_inner << '\n';
}

int cmd_simulate(const Common& c, long long seed, std::ostream& out) {
  SimConfig cfg = load(c);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  validate(cfg);
  ProgressFn progress;
  if (!c.quiet) progress = [&out](const MetricsSample& s) { print_metrics(out, s); };
  const auto res = run(cfg, progress);
  const auto& m = res.metrics;
  out << std::setprecision(6) << "finished at t = " << res.final_state.t << " after " << res.steps
      << " steps" << (res.early_stopped ? " (early stop)" : "") << '\n'
      << "rel_dev_bulk = " << m.rel_dev_bulk << ", rel_dev_surf = " << m.rel_dev_surf
      << ", amp_shell_outer = " << m.amp_shell_outer << ", amp_shell_inner = "
      << m.amp_shell_inner << '\n'
      << "verdict: " << to_string(m.verdict) << (m.boundary_layer ? " (boundary layer)" : "")
      << '\n';
  return kExitOk;
}

int cmd_scan(const Common& c, bool simulate, long long seed, std::ostream& out) {
  SimConfig cfg = load(c);
  if (simulate) cfg.scan_simulate = true;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  if (cfg.scan_simulate) validate(cfg);
  else validate(cfg.model);
  ProgressFn progress;
  if (!c.quiet && cfg.scan_simulate)
    progress = [&out](const MetricsSample& s) { print_metrics(out, s); };
  const auto rows = parameter_scan(cfg, progress);
  write_scan_csv(out, rows);
  if (!c.out_dir.empty()) {
    auto f = open_out(c.out_dir, "scan.csv");
    write_scan_csv(f, rows);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Turing instability analysis and simulation for coupled bulk-surface "
               "reaction-diffusion on the unit ball"};
  app.name("bsrd");
  app.footer(key_listing());
  app.require_subcommand(1);

  Common common;
  int lmax = kUnset, level = kUnset;
  long long seed = -1;
  bool csv = false, coupled = false, simulate = false;

  auto* analyze = app.add_subcommand("analyze", "stability report: conditions, eigenvalues, "
                                                "critical diffusions, predicted regime");
  add_common(analyze, common);
  analyze->add_flag("--csv", csv, "print the CSV report instead of text");

  auto* dispersion = app.add_subcommand("dispersion", "dispersion table over modes l = 0..lmax");
  add_common(dispersion, common);
  dispersion->add_option("--lmax", lmax, "highest mode (default analysis.l_max)");
  dispersion->add_flag("--coupled", coupled,
                       "use the coupled surface Jacobian instead of the bare surface kinetics");

  auto* mesh = app.add_subcommand("mesh", "generate and validate the ball mesh");
  add_common(mesh, common);
  mesh->add_option("--level", level, "refinement level (default mesh.level)");

  auto* sim = app.add_subcommand("simulate", "run one simulation");
  add_common(sim, common);
  sim->add_option("--seed", seed, "RNG seed (default run.seed)");

  auto* scan = app.add_subcommand("scan", "regime predictions over the scan.d_bulk x scan.d_surf grid");
  add_common(scan, common);
  scan->add_flag("--simulate", simulate, "also simulate every grid point");
  scan->add_option("--seed", seed, "RNG seed (default run.seed)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run 'bsrd --help' for usage\n";
    return kExitConfig;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(common, csv, out);
    if (dispersion->parsed()) return cmd_dispersion(common, lmax, coupled, out);
    if (mesh->parsed()) return cmd_mesh(common, level, out);
    if (sim->parsed()) return cmd_simulate(common, seed, out);
    if (scan->parsed()) return cmd_scan(common, simulate, seed, out);
  } catch (const CompatibilityError& e) {
    err << "compatibility error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MeshError& e) {
    err << "mesh error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << " (last residual " << e.last_residual() << ")\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace bsrd::cli
