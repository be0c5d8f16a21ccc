#include "bsrd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <unordered_map>

#include "bsrd/errors.hpp"

namespace bsrd {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

struct FaceKeyHash {
  std::size_t operator()(const Tri& f) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (int v : f) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

Tri sorted(Tri f) {
  std::sort(f.begin(), f.end());
  return f;
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Icosahedral seed: 12 vertices on the unit sphere plus the centre (index 12).
void icosahedral_seed(std::vector<Vec3>& verts, std::vector<Tet>& tets,
                      std::vector<Vec3>& face_normals, double& inradius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) {
    const double n = norm(v);
    for (auto& x : v) x /= n;
  }
  const int centre = static_cast<int>(verts.size());
  verts.push_back({0.0, 0.0, 0.0});

  constexpr int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  tets.clear();
  face_normals.clear();
  for (const auto& f : faces) {
    tets.push_back({centre, f[0], f[1], f[2]});
    Vec3 n = cross(sub(verts[f[1]], verts[f[0]]), sub(verts[f[2]], verts[f[0]]));
    const double len = norm(n);
    for (auto& x : n) x /= len;
    if (dot(n, verts[f[0]]) < 0.0)
      for (auto& x : n) x = -x;
    face_normals.push_back(n);
  }
  inradius = dot(face_normals[0], verts[faces[0][0]]);
}

// Red refinement: 4 corner tets plus the inner octahedron cut along its
// shortest diagonal.
void refine(std::vector<Vec3>& verts, std::vector<Tet>& tets) {
  std::unordered_map<std::uint64_t, int> midpoint;
  midpoint.reserve(tets.size() * 2);
  auto mid = [&](int a, int b) {
    const auto key = edge_key(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Vec3& p = verts[a];
    const Vec3& q = verts[b];
    const int id = static_cast<int>(verts.size());
    verts.push_back({0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]), 0.5 * (p[2] + q[2])});
    midpoint.emplace(key, id);
    return id;
  };

  std::vector<Tet> out;
  out.reserve(tets.size() * 8);
  for (const Tet& t : tets) {
    const int v0 = t[0], v1 = t[1], v2 = t[2], v3 = t[3];
    const int m01 = mid(v0, v1), m02 = mid(v0, v2), m03 = mid(v0, v3);
    const int m12 = mid(v1, v2), m13 = mid(v1, v3), m23 = mid(v2, v3);
    out.push_back({v0, m01, m02, m03});
    out.push_back({m01, v1, m12, m13});
    out.push_back({m02, m12, v2, m23});
    out.push_back({m03, m13, m23, v3});

    // Diagonals of the inner octahedron and the 4-cycle of vertices around each.
    const std::array<std::array<int, 6>, 3> diag = {{{m01, m23, m02, m12, m13, m03},
                                                     {m02, m13, m01, m12, m23, m03},
                                                     {m03, m12, m01, m02, m23, m13}}};
    int best = 0;
    double best_len = norm(sub(verts[diag[0][0]], verts[diag[0][1]]));
    for (int k = 1; k < 3; ++k) {
      const double len = norm(sub(verts[diag[k][0]], verts[diag[k][1]]));
      if (len < best_len - 1e-14) {
        best = k;
        best_len = len;
      }
    }
    const auto& d = diag[best];
    // Ring order: d[2], d[3], d[4], d[5] must form a cycle around the diagonal.
    std::array<int, 4> ring = {d[2], d[3], d[4], d[5]};
    for (int k = 0; k < 4; ++k) out.push_back({d[0], d[1], ring[k], ring[(k + 1) % 4]});
  }
  tets = std::move(out);
}

double signed_volume(const std::vector<Vec3>& v, const Tet& t) {
  return dot(sub(v[t[1]], v[t[0]]), cross(sub(v[t[2]], v[t[0]]), sub(v[t[3]], v[t[0]]))) / 6.0;
}

}  // namespace

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) noexcept {
  return dot(sub(b, a), cross(sub(c, a), sub(d, a))) / 6.0;
}

double tri_area(const Vec3& a, const Vec3& b, const Vec3& c) noexcept {
  return 0.5 * norm(cross(sub(b, a), sub(c, a)));
}

std::vector<Tri> extract_surface(const std::vector<Vec3>& vertices,
                                 const std::vector<Tet>& tets) {
  struct Entry {
    int count = 0;
    Tri face{};
    int opposite = -1;
  };
  std::unordered_map<Tri, Entry, FaceKeyHash> faces;
  faces.reserve(tets.size() * 3);
  constexpr int local[4][4] = {{1, 2, 3, 0}, {0, 2, 3, 1}, {0, 1, 3, 2}, {0, 1, 2, 3}};
  for (const Tet& t : tets) {
    for (const auto& l : local) {
      const Tri f = {t[l[0]], t[l[1]], t[l[2]]};
      Entry& e = faces[sorted(f)];
      ++e.count;
      e.face = f;
      e.opposite = t[l[3]];
    }
  }

  std::vector<Tri> boundary;
  std::vector<Tri> bad;
  for (const auto& [key, e] : faces) {
    if (e.count == 1) {
      Tri f = e.face;
      const Vec3 n = cross(sub(vertices[f[1]], vertices[f[0]]), sub(vertices[f[2]], vertices[f[0]]));
      if (dot(n, sub(vertices[e.opposite], vertices[f[0]])) > 0.0) std::swap(f[1], f[2]);
      boundary.push_back(f);
    } else if (e.count > 2) {
      bad.push_back(key);
    }
  }
  if (!bad.empty()) {
    std::sort(bad.begin(), bad.end());
    std::ostringstream os;
    os << "non-manifold mesh: " << bad.size() << " face(s) shared by more than two tets:";
    for (const auto& f : bad) os << " (" << f[0] << ',' << f[1] << ',' << f[2] << ')';
    throw MeshError(os.str());
  }
  // Deterministic order independent of hashing.
  std::sort(boundary.begin(), boundary.end(),
            [](const Tri& a, const Tri& b) { return sorted(a) < sorted(b); });
  return boundary;
}

BulkSurfaceMesh build_mesh(std::vector<Vec3> vertices, std::vector<Tet> tets) {
  const int n = static_cast<int>(vertices.size());
  for (Tet& t : tets) {
    for (int v : t) {
      if (v < 0 || v >= n) throw MeshError("tet references vertex " + std::to_string(v) +
                                           " outside 0.." + std::to_string(n - 1));
    }
    if (signed_volume(vertices, t) < 0.0) std::swap(t[2], t[3]);
  }
  BulkSurfaceMesh m;
  m.surface_tris = extract_surface(vertices, tets);
  m.bulk_to_surface.assign(vertices.size(), -1);
  std::vector<char> on_surface(vertices.size(), 0);
  for (const Tri& f : m.surface_tris)
    for (int v : f) on_surface[static_cast<std::size_t>(v)] = 1;
  for (int i = 0; i < n; ++i) {
    if (on_surface[static_cast<std::size_t>(i)]) {
      m.bulk_to_surface[static_cast<std::size_t>(i)] = static_cast<int>(m.surface_vertex_ids.size());
      m.surface_vertex_ids.push_back(i);
    }
  }
  m.vertices = std::move(vertices);
  m.tets = std::move(tets);
  return m;
}

BulkSurfaceMesh generate_ball_mesh(int level) {
  if (level < 0 || level > kMaxRefinement) {
    throw MeshError("refinement level " + std::to_string(level) + " outside 0.." +
                    std::to_string(kMaxRefinement));
  }
  std::vector<Vec3> ref;
  std::vector<Tet> tets;
  std::vector<Vec3> normals;
  double inradius = 0.0;
  icosahedral_seed(ref, tets, normals, inradius);
  for (int l = 0; l < level; ++l) refine(ref, tets);

  // Reference points live in the flat icosahedron; the gauge map sends the
  // level set {gauge = c} to the sphere of radius c.
  std::vector<Vec3> phys(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const Vec3& x = ref[i];
    const double r = norm(x);
    if (r == 0.0) {
      phys[i] = x;
      continue;
    }
    double gauge = 0.0;
    for (const Vec3& n : normals) gauge = std::max(gauge, dot(n, x) / inradius);
    const double s = gauge / r;
    phys[i] = {x[0] * s, x[1] * s, x[2] * s};
  }

  BulkSurfaceMesh m = build_mesh(std::move(phys), std::move(tets));
  for (int id : m.surface_vertex_ids) {
    Vec3& x = m.vertices[static_cast<std::size_t>(id)];
    const double r = norm(x);
    for (auto& c : x) c /= r;
  }
  return m;
}

void validate_ball_mesh(const BulkSurfaceMesh& m, double eps_geom) {
  std::vector<std::string> problems;
  auto report = [&](const std::string& s) {
    if (problems.size() < 20) problems.push_back(s);
  };
  const int nv = m.num_bulk();

  for (std::size_t k = 0; k < m.tets.size(); ++k) {
    const Tet& t = m.tets[k];
    bool ok = true;
    for (int v : t) ok = ok && v >= 0 && v < nv;
    if (!ok) {
      report("tet " + std::to_string(k) + " has an out-of-range vertex");
      continue;
    }
    if (!(signed_volume(m.vertices, t) > 0.0))
      report("tet " + std::to_string(k) + " has non-positive volume");
  }
  if (!problems.empty()) goto done;

  {
    // Surface must coincide with the boundary faces of the tets.
    auto expected = extract_surface(m.vertices, m.tets);
    std::vector<Tri> a, b;
    for (const auto& f : expected) a.push_back(sorted(f));
    for (const auto& f : m.surface_tris) b.push_back(sorted(f));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) report("surface_tris differ from the boundary faces of the tets");

    // Surface maps.
    if (m.bulk_to_surface.size() != m.vertices.size())
      report("bulk_to_surface has wrong length");
    if (!std::is_sorted(m.surface_vertex_ids.begin(), m.surface_vertex_ids.end()))
      report("surface_vertex_ids not sorted");
    std::vector<char> listed(m.vertices.size(), 0);
    for (std::size_t j = 0; j < m.surface_vertex_ids.size(); ++j) {
      const int id = m.surface_vertex_ids[j];
      if (id < 0 || id >= nv) {
        report("surface vertex id out of range");
        continue;
      }
      listed[static_cast<std::size_t>(id)] = 1;
      if (m.bulk_to_surface.size() == m.vertices.size() &&
          m.bulk_to_surface[static_cast<std::size_t>(id)] != static_cast<int>(j))
        report("bulk_to_surface is not the inverse of surface_vertex_ids at " +
               std::to_string(id));
      const double r = norm(m.vertices[static_cast<std::size_t>(id)]);
      if (std::abs(r - 1.0) > eps_geom)
        report("surface vertex " + std::to_string(id) + " at radius " + std::to_string(r));
    }
    std::size_t mapped = 0;
    for (int s : m.bulk_to_surface) mapped += (s >= 0);
    if (mapped != m.surface_vertex_ids.size()) report("bulk_to_surface is not a bijection");

    std::map<std::pair<int, int>, int> directed;
    for (std::size_t k = 0; k < m.surface_tris.size(); ++k) {
      const Tri& f = m.surface_tris[k];
      for (int v : f)
        if (v < 0 || v >= nv || !listed[static_cast<std::size_t>(v)])
          report("surface triangle " + std::to_string(k) + " uses a non-surface vertex");
      for (int e = 0; e < 3; ++e) ++directed[{f[e], f[(e + 1) % 3]}];
      const Vec3& p0 = m.vertices[static_cast<std::size_t>(f[0])];
      const Vec3& p1 = m.vertices[static_cast<std::size_t>(f[1])];
      const Vec3& p2 = m.vertices[static_cast<std::size_t>(f[2])];
      const Vec3 n = cross(sub(p1, p0), sub(p2, p0));
      const Vec3 c = {(p0[0] + p1[0] + p2[0]) / 3, (p0[1] + p1[1] + p2[1]) / 3,
                      (p0[2] + p1[2] + p2[2]) / 3};
      if (!(dot(n, c) > 0.0)) report("surface triangle " + std::to_string(k) + " points inward");
    }
    std::size_t edges = 0;
    for (const auto& [e, count] : directed) {
      if (count != 1) report("directed surface edge repeated: inconsistent orientation");
      if (e.first < e.second) {
        ++edges;
        if (!directed.count({e.second, e.first}))
          report("surface edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                 ") is not shared by exactly two triangles");
      } else if (!directed.count({e.second, e.first})) {
        report("surface edge (" + std::to_string(e.second) + "," + std::to_string(e.first) +
               ") is not shared by exactly two triangles");
      }
    }
    const long long euler = static_cast<long long>(m.surface_vertex_ids.size()) -
                            static_cast<long long>(edges) +
                            static_cast<long long>(m.surface_tris.size());
    if (euler != 2) report("surface Euler characteristic " + std::to_string(euler) + " != 2");
  }

done:
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid bulk-surface mesh:";
    for (const auto& p : problems) os << "\n  " << p;
    throw MeshError(os.str());
  }
}

MeshStats mesh_stats(const BulkSurfaceMesh& m) {
  MeshStats s;
  s.num_vertices = m.num_bulk();
  s.num_tets = static_cast<int>(m.tets.size());
  s.num_surface_vertices = m.num_surface();
  s.num_surface_tris = static_cast<int>(m.surface_tris.size());
  s.h_min = std::numeric_limits<double>::infinity();
  s.h_max = 0.0;
  for (const Tet& t : m.tets) {
    s.volume += std::abs(signed_volume(m.vertices, t));
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double h = norm(sub(m.vertices[static_cast<std::size_t>(t[i])],
                                  m.vertices[static_cast<std::size_t>(t[j])]));
        s.h_min = std::min(s.h_min, h);
        s.h_max = std::max(s.h_max, h);
      }
  }
  for (const Tri& f : m.surface_tris)
    s.area += tri_area(m.vertices[static_cast<std::size_t>(f[0])],
                       m.vertices[static_cast<std::size_t>(f[1])],
                       m.vertices[static_cast<std::size_t>(f[2])]);
  if (m.tets.empty()) s.h_min = 0.0;
  return s;
}

std::vector<double> trace(const BulkSurfaceMesh& m, const std::vector<double>& bulk) {
  std::vector<double> out(m.surface_vertex_ids.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = bulk[static_cast<std::size_t>(m.surface_vertex_ids[j])];
  return out;
}

}  // namespace bsrd
