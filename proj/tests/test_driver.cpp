#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bsrd/driver.hpp"
#include "bsrd/errors.hpp"

using namespace bsrd;
namespace fs = std::filesystem;

namespace {

PatternMetrics metrics(double bulk, double surf, double outer, double inner) {
  PatternMetrics m;
  m.rel_dev_bulk = bulk;
  m.rel_dev_surf = surf;
  m.amp_shell_outer = outer;
  m.amp_shell_inner = inner;
  return m;
}

double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

TEST_SUITE("driver") {
  TEST_CASE("initial condition") {
    SimConfig cfg;
    const auto steady = steady_state(cfg.model.kinetics);
    const auto a = make_initial_condition(cfg, steady, 3000, 1000);
    const auto b = make_initial_condition(cfg, steady, 3000, 1000);
    CHECK(a.u == b.u);
    CHECK(a.s == b.s);
    CHECK(a.u.size() == 3000);
    CHECK(a.r.size() == 1000);
    for (double x : a.v) {
      CHECK(x >= steady.v * (1 - cfg.eps_ic));
      CHECK(x <= steady.v * (1 + cfg.eps_ic));
    }
    // U[-1, 1]: mean 0, variance 1/3.
    std::vector<double> xi(a.u.size());
    for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = (a.u[i] / steady.u - 1.0) / cfg.eps_ic;
    CHECK(std::abs(mean(xi)) < 0.05);
    double var = 0.0;
    for (double x : xi) var += x * x;
    CHECK(var / static_cast<double>(xi.size()) == doctest::Approx(1.0 / 3.0).epsilon(0.06));

    cfg.seed = 2;
    CHECK(make_initial_condition(cfg, steady, 3000, 1000).u != a.u);
    cfg.eps_ic = 0.0;
    const auto flat = make_initial_condition(cfg, steady, 10, 5);
    for (double x : flat.u) CHECK(x == steady.u);
    for (double x : flat.s) CHECK(x == steady.s);
  }

  TEST_CASE("verdict table") {
    const VerdictRule rule;
    struct Row {
      PatternMetrics m;
      Regime verdict;
      bool layer;
    };
    const std::vector<Row> rows{
        {metrics(0.01, 0.01, 0.01, 0.001), Regime::NoPattern, false},
        {metrics(0.0, 0.0, 0.0, 0.0), Regime::NoPattern, false},
        {metrics(0.01, 0.3, 0.02, 0.001), Regime::SurfaceOnly, true},
        {metrics(0.2, 0.6, 0.6, 0.0001), Regime::SurfaceOnly, true},
        {metrics(0.01, 0.3, 0.01, 0.01), Regime::SurfaceOnly, false},
        {metrics(0.8, 0.3, 1.0, 1.0), Regime::Both, false},
        {metrics(0.8, 0.04, 1.0, 1.0), Regime::BulkOnly, false},
        {metrics(0.8, 0.01, 1.0, 0.1), Regime::BulkOnly, true},
        {metrics(0.8, 0.12, 1.0, 1.0), Regime::BulkOnly, false},
        {metrics(0.5, 0.12, 1.0, 1.0), Regime::Both, false},
        {metrics(0.65, 0.65, 0.98, 0.97), Regime::Both, false},
    };
    for (const auto& r : rows) {
      auto m = r.m;
      apply_verdict(m, rule);
      CHECK(m.verdict == r.verdict);
      CHECK(m.boundary_layer == r.layer);
      auto again = r.m;
      apply_verdict(again, rule);
      CHECK(again.verdict == m.verdict);
    }
    auto edge = metrics(0.05, 0.0, 1.0, 1.0);
    apply_verdict(edge, rule);
    CHECK(edge.verdict == Regime::BulkOnly);
  }

  TEST_CASE("metrics of known fields") {
    const auto mesh = generate_ball_mesh(2);
    const auto ops = assemble_operators(mesh);
    const SteadyState steady{2.0, 0.5, 2.0, 0.5};
    SystemState st;
    st.u.assign(static_cast<std::size_t>(mesh.num_bulk()), 2.2);
    st.v.assign(st.u.size(), 0.5);
    st.r.assign(static_cast<std::size_t>(mesh.num_surface()), 1.0);
    st.s.assign(st.r.size(), 0.5);
    const auto m = compute_metrics(mesh, ops, st, steady, VerdictRule{});
    CHECK(m.rel_dev_bulk == doctest::Approx(0.1));
    CHECK(m.rel_dev_surf == doctest::Approx(0.5));
    CHECK(m.amp_shell_outer == doctest::Approx(0.2));
    CHECK(m.amp_shell_inner == doctest::Approx(0.2));
    CHECK(m.verdict == Regime::Both);
    CHECK_FALSE(m.boundary_layer);
  }

  TEST_CASE("steady state is preserved") {
    SimConfig cfg;
    cfg.mesh_level = 2;
    const auto mesh = generate_ball_mesh(cfg.mesh_level);
    const auto ops = assemble_operators(mesh);
    const auto steady = steady_state(cfg.model.kinetics);
    BulkSurfaceSystem sys(ops, cfg.model);
    FractionalStepTheta ts(sys, cfg.scheme);
    cfg.eps_ic = 0.0;
    auto st = make_initial_condition(cfg, steady, sys.num_bulk(), sys.num_surface());
    auto y = pack(st);
    for (int k = 0; k < 100; ++k) ts.advance(y, cfg.scheme.dt);
    unpack(y, sys.num_bulk(), sys.num_surface(), st);
    const auto m = compute_metrics(mesh, ops, st, steady, VerdictRule{});
    CHECK(m.rel_dev_bulk < 1e-8);
    CHECK(m.rel_dev_surf < 1e-8);
    CHECK(m.verdict == Regime::NoPattern);
  }

  TEST_CASE("short run writes its outputs") {
    const fs::path dir = fs::temp_directory_path() / "bsrd_driver_test";
    fs::remove_all(dir);
    SimConfig cfg;
    cfg.mesh_level = 1;
    cfg.scheme.dt = 1e-3;
    cfg.t_end = 0.02;
    cfg.snapshot_interval = 0.01;
    cfg.early_stop_window = 5;
    cfg.output_dir = dir.string();
    int calls = 0;
    const auto res = run(cfg, [&](const MetricsSample&) { ++calls; });
    CHECK(res.steps == 20);
    CHECK_FALSE(res.early_stopped);
    CHECK(res.final_state.t == doctest::Approx(0.02));
    CHECK(res.history.size() == 5);
    CHECK(calls == 5);
    CHECK(res.newton_iterations > 0);
    CHECK(fs::exists(dir / "metrics.csv"));
    CHECK(fs::exists(dir / "config.toml"));
    for (const char* f : {"snap_0000_bulk.vtk", "snap_0001_surface.vtk", "snap_0002_bulk.vtk"})
      CHECK_MESSAGE(fs::exists(dir / f), f);
    CHECK_FALSE(fs::exists(dir / "snap_0003_bulk.vtk"));
    std::ifstream csv(dir / "metrics.csv");
    std::string line;
    int n = 0;
    while (std::getline(csv, line)) ++n;
    CHECK(n == 6);
    CHECK(load_config_file((dir / "config.toml").string()).t_end == cfg.t_end);

    // Same config, same result.
    cfg.output_dir.clear();
    const auto again = run(cfg);
    CHECK(again.final_state.u == res.final_state.u);
    CHECK(again.metrics.rel_dev_surf == res.metrics.rel_dev_surf);
    fs::remove_all(dir);
  }

  TEST_CASE("early stop on a decaying run") {
    SimConfig cfg;
    cfg.mesh_level = 1;
    cfg.scheme.dt = 1e-3;
    cfg.t_end = 5.0;
    cfg.early_stop_window = 50;
    const auto res = run(cfg);
    CHECK(res.early_stopped);
    CHECK(res.steps < 5000);
    CHECK(res.metrics.verdict == Regime::NoPattern);
  }

  TEST_CASE("run validates its config") {
    SimConfig cfg;
    cfg.model.coupling.alpha2 = 1.0;
    CHECK_THROWS_AS(run(cfg), CompatibilityError);
    cfg = SimConfig{};
    cfg.t_end = -1.0;
    CHECK_THROWS_AS(run(cfg), ParameterError);
  }

  TEST_CASE("parameter scan predictions") {
    SimConfig cfg;
    auto rows = parameter_scan(cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].d_bulk == 1.0);
    CHECK(rows[0].d_surf == 1.0);
    CHECK(rows[0].predicted_uncoupled == Regime::NoPattern);
    CHECK(rows[1].predicted_uncoupled == Regime::SurfaceOnly);
    CHECK(rows[2].predicted_uncoupled == Regime::BulkOnly);
    CHECK(rows[3].predicted_uncoupled == Regime::Both);
    for (const auto& r : rows) {
      CHECK_FALSE(r.simulated);
      CHECK(r.predicted == Regime::HomogeneousUnstable);
    }
    // Both ratios below the critical value 8.57.
    cfg.scan_d_bulk = {8.0};
    cfg.scan_d_surf = {2.0, 8.5};
    rows = parameter_scan(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) CHECK(r.predicted_uncoupled == Regime::NoPattern);
    cfg.scan_d_bulk.clear();
    CHECK(parameter_scan(cfg).empty());

    std::ostringstream os;
    write_scan_csv(os, parameter_scan(SimConfig{}));
    const std::string csv = os.str();
    CHECK(csv.rfind("d_bulk,d_surf,predicted,predicted_uncoupled,observed,agrees\n", 0) == 0);
    CHECK(csv.find("20,20,HomogeneousUnstable,Both,,\n") != std::string::npos);
  }

  TEST_CASE("scan with simulation") {
    SimConfig cfg;
    cfg.mesh_level = 1;
    cfg.scheme.dt = 1e-3;
    cfg.t_end = 0.01;
    cfg.scan_d_bulk = {1.0};
    cfg.scan_d_surf = {1.0};
    cfg.scan_simulate = true;
    const auto rows = parameter_scan(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].simulated);
    CHECK(rows[0].observed == Regime::NoPattern);
    CHECK(rows[0].agrees);
  }
}
