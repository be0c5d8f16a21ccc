#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using bsrd::cli::run_cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help lists subcommands and keys") {
    const auto r = call({"--help"});
    CHECK(r.code == bsrd::cli::kExitOk);
    for (const char* s : {"analyze", "dispersion", "mesh", "simulate", "scan", "coupling.alpha1",
                          "diffusion.d_surf", "scheme.newton_tol", "run.eps_ic", "5/12"})
      CHECK_MESSAGE(contains(r.out, s), s);
  }

  TEST_CASE("usage errors") {
    CHECK(call({}).code == bsrd::cli::kExitConfig);
    CHECK(call({"frobnicate"}).code == bsrd::cli::kExitConfig);
    CHECK(call({"analyze", "--bogus"}).code == bsrd::cli::kExitConfig);
    const auto r = call({"analyze", "--set", "diffusion.d_sruf=3"});
    CHECK(r.code == bsrd::cli::kExitConfig);
    CHECK(contains(r.err, "diffusion.d_sruf"));
    CHECK(call({"analyze", "--set", "diffusion.d_surf"}).code == bsrd::cli::kExitConfig);
    CHECK(call({"analyze", "--config", "/nonexistent/x.toml"}).code == bsrd::cli::kExitConfig);
  }

  TEST_CASE("analyze") {
    auto r = call({"analyze"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "8.5676"));
    CHECK(contains(r.out, "regime"));
    r = call({"analyze", "--csv", "--set", "diffusion.d_bulk=20", "--set", "diffusion.d_surf=20"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "evaluation,quantity,value,status"));
    CHECK(contains(r.out, "uncoupled,regime,,Both"));
  }

  TEST_CASE("parameter and compatibility errors exit with 2") {
    auto r = call({"analyze", "--set", "coupling.beta1=1"});
    CHECK(r.code == bsrd::cli::kExitConfig);
    CHECK(contains(r.err, "compatibility"));
    r = call({"analyze", "--set", "kinetics.gamma_surf=0"});
    CHECK(r.code == bsrd::cli::kExitConfig);
    CHECK(call({"mesh", "--level", "9"}).code == bsrd::cli::kExitConfig);
    CHECK(call({"dispersion", "--lmax", "-3"}).code == bsrd::cli::kExitConfig);
  }

  TEST_CASE("files are written to --out") {
    const fs::path dir = fs::temp_directory_path() / "bsrd_cli_test";
    fs::remove_all(dir);
    CHECK(call({"dispersion", "--lmax", "12", "--set", "diffusion.d_surf=20", "--quiet", "--out",
                dir.string()})
              .code == 0);
    std::ifstream f(dir / "dispersion.csv");
    std::string line;
    int n = 0;
    while (std::getline(f, line)) ++n;
    CHECK(n == 14);

    const auto m = call({"mesh", "--level", "1", "--out", dir.string()});
    CHECK(m.code == 0);
    CHECK(contains(m.out, "level 1: 55 vertices, 160 tets"));
    for (const char* name : {"mesh.txt", "mesh_bulk.vtk", "mesh_surface.vtk"})
      CHECK_MESSAGE(fs::exists(dir / name), name);

    CHECK(call({"analyze", "--quiet", "--out", dir.string()}).code == 0);
    CHECK(fs::exists(dir / "analysis.csv"));
    CHECK(fs::exists(dir / "analysis.txt"));

    const auto s = call({"scan", "--out", dir.string()});
    CHECK(s.code == 0);
    CHECK(fs::exists(dir / "scan.csv"));
    fs::remove_all(dir);
  }

  TEST_CASE("short simulation") {
    const auto r = call({"simulate", "--seed", "4", "--set", "mesh.level=1", "--set", "scheme.dt=1e-3",
                         "--set", "run.t_end=0.005"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "verdict: NoPattern"));
  }

  TEST_CASE("config file with overrides on top") {
    const fs::path path = fs::temp_directory_path() / "bsrd_cli_cfg.toml";
    {
      std::ofstream f(path);
      f << "[diffusion]\nd_bulk = 20\nd_surf = 1\n";
    }
    auto r = call({"analyze", "--csv", "--config", path.string()});
    CHECK(contains(r.out, "uncoupled,regime,,BulkOnly"));
    r = call({"analyze", "--csv", "--config", path.string(), "--set", "diffusion.d_bulk=1"});
    CHECK(contains(r.out, "uncoupled,regime,,NoPattern"));
    fs::remove(path);
  }
}
