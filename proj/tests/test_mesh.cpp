#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "bsrd/errors.hpp"
#include "bsrd/mesh.hpp"
#include "bsrd/mesh_io.hpp"

using namespace bsrd;

namespace {

constexpr double kBallVolume = 4.0 * std::numbers::pi / 3.0;
constexpr double kSphereArea = 4.0 * std::numbers::pi;

std::vector<Vec3> regular_tet() {
  const double s = 1.0 / std::sqrt(8.0);
  return {{s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
}

}  // namespace

TEST_SUITE("mesh") {
  TEST_CASE("seed mesh") {
    const auto m = generate_ball_mesh(0);
    CHECK(m.num_bulk() == 13);
    CHECK(m.tets.size() == 20);
    CHECK(m.num_surface() == 12);
    CHECK(m.surface_tris.size() == 20);
    CHECK_NOTHROW(validate_ball_mesh(m));
    const auto s = mesh_stats(m);
    CHECK(s.num_tets == 20);
    CHECK(s.num_surface_tris == 20);
  }

  TEST_CASE("refinement counts and invariants") {
    double prev_h = 1e9;
    for (int level = 0; level <= 3; ++level) {
      const auto m = generate_ball_mesh(level);
      const auto s = mesh_stats(m);
      CHECK(s.num_surface_tris == 20 * (1 << (2 * level)));
      CHECK(s.num_tets == 20 * (1 << (3 * level)));
      // Closed triangulated sphere: V = F/2 + 2.
      CHECK(s.num_surface_vertices == s.num_surface_tris / 2 + 2);
      CHECK_NOTHROW(validate_ball_mesh(m));
      CHECK(s.h_max < prev_h);
      prev_h = s.h_max;
      std::set<int> ids(m.surface_vertex_ids.begin(), m.surface_vertex_ids.end());
      for (const auto& f : m.surface_tris)
        for (int v : f) CHECK(ids.count(v) == 1);
      for (std::size_t i = 0; i < m.bulk_to_surface.size(); ++i) {
        const int j = m.bulk_to_surface[i];
        if (j >= 0) CHECK(m.surface_vertex_ids[static_cast<std::size_t>(j)] == static_cast<int>(i));
      }
    }
  }

  TEST_CASE("geometric convergence to the ball") {
    const auto s = mesh_stats(generate_ball_mesh(3));
    CHECK(std::abs(s.volume - kBallVolume) / kBallVolume < 0.02);
    CHECK(std::abs(s.area - kSphereArea) / kSphereArea < 0.02);
    const auto s4 = mesh_stats(generate_ball_mesh(4));
    CHECK(std::abs(s4.volume - kBallVolume) < std::abs(s.volume - kBallVolume) / 3.0);
  }

  TEST_CASE("refinement guard") {
    CHECK_THROWS_AS(generate_ball_mesh(-1), MeshError);
    CHECK_THROWS_AS(generate_ball_mesh(kMaxRefinement + 1), MeshError);
  }

  TEST_CASE("regular tet volume") {
    const auto v = regular_tet();
    // Edge length of this tet is 1.
    CHECK(std::hypot(v[0][0] - v[1][0], v[0][1] - v[1][1], v[0][2] - v[1][2]) ==
          doctest::Approx(1.0));
    CHECK(std::abs(tet_volume(v[0], v[1], v[2], v[3])) == doctest::Approx(std::sqrt(2.0) / 12.0));
    const auto m = build_mesh(v, {{0, 1, 2, 3}});
    CHECK(mesh_stats(m).volume == doctest::Approx(0.11785113));
  }

  TEST_CASE("surface extraction") {
    auto v = regular_tet();
    CHECK(extract_surface(v, {{0, 1, 2, 3}}).size() == 4);
    v.push_back({-v[0][0], -v[0][1], -v[0][2]});
    const auto faces = extract_surface(v, {{0, 1, 2, 3}, {4, 1, 2, 3}});
    CHECK(faces.size() == 6);
    for (auto f : faces) {
      std::sort(f.begin(), f.end());
      CHECK(f != Tri{1, 2, 3});
    }
    v.push_back({2.0 * v[0][0], 2.0 * v[0][1], 2.0 * v[0][2]});
    try {
      extract_surface(v, {{0, 1, 2, 3}, {4, 1, 2, 3}, {5, 1, 2, 3}});
      FAIL("expected a non-manifold error");
    } catch (const MeshError& e) {
      CHECK(std::string(e.what()).find("(1,2,3)") != std::string::npos);
    }
  }

  TEST_CASE("surface normals point outward and match extraction") {
    const auto m = generate_ball_mesh(2);
    const auto again = extract_surface(m.vertices, m.tets);
    CHECK(again == m.surface_tris);
  }

  TEST_CASE("validation reports violations") {
    auto m = generate_ball_mesh(1);
    auto moved = m;
    moved.vertices[static_cast<std::size_t>(moved.surface_vertex_ids[0])][0] *= 1.01;
    CHECK_THROWS_AS(validate_ball_mesh(moved), MeshError);
    auto flipped = m;
    std::swap(flipped.tets[0][0], flipped.tets[0][1]);
    CHECK_THROWS_AS(validate_ball_mesh(flipped), MeshError);
    auto inward = m;
    std::swap(inward.surface_tris[0][1], inward.surface_tris[0][2]);
    CHECK_THROWS_AS(validate_ball_mesh(inward), MeshError);
  }

  TEST_CASE("trace gathers surface values") {
    const auto m = generate_ball_mesh(1);
    std::vector<double> f(m.vertices.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(i);
    const auto t = trace(m, f);
    REQUIRE(t.size() == m.surface_vertex_ids.size());
    for (std::size_t j = 0; j < t.size(); ++j) CHECK(t[j] == m.surface_vertex_ids[j]);
  }

  TEST_CASE("text format round trip") {
    const auto m = generate_ball_mesh(2);
    std::stringstream ss;
    write_mesh_text(ss, m);
    const auto back = read_mesh_text(ss);
    CHECK(back.vertices == m.vertices);
    CHECK(back.tets == m.tets);
    CHECK(back.surface_vertex_ids == m.surface_vertex_ids);
    CHECK(back.surface_tris.size() == m.surface_tris.size());
  }

  TEST_CASE("text format rejects malformed and invalid meshes") {
    std::istringstream truncated("vertices 2\n0 0 0\n");
    CHECK_THROWS_AS(read_mesh_text(truncated), MeshError);
    std::istringstream bad_index("vertices 1\n0 0 1\ntets 1\n0 1 2 3\n");
    try {
      read_mesh_text(bad_index);
      FAIL("expected an error");
    } catch (const MeshError& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    // A single tet is a valid tet mesh but its boundary is not on the unit sphere.
    std::stringstream single;
    write_mesh_text(single, build_mesh(regular_tet(), {{0, 1, 2, 3}}));
    CHECK_THROWS_AS(read_mesh_text(single), MeshError);
  }

  TEST_CASE("vtk output") {
    const auto m = generate_ball_mesh(1);
    std::vector<double> u(m.vertices.size(), 1.0), r(m.surface_vertex_ids.size(), 2.0);
    std::ostringstream bulk, surf;
    write_vtk_bulk(bulk, m, {{"u", &u}});
    write_vtk_surface(surf, m, {{"r", &r}});
    CHECK(bulk.str().find("CELLS 160 800") != std::string::npos);
    CHECK(bulk.str().find("POINT_DATA " + std::to_string(m.vertices.size())) != std::string::npos);
    CHECK(surf.str().find("CELLS 80 320") != std::string::npos);
    CHECK(surf.str().find("SCALARS r double 1") != std::string::npos);
    std::ostringstream bad;
    CHECK_THROWS_AS(write_vtk_surface(bad, m, {{"u", &u}}), PreconditionError);
  }
}
