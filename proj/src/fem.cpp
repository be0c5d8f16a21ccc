#include "bsrd/fem.hpp"

#include <algorithm>
#include <cmath>

#include "bsrd/errors.hpp"

namespace bsrd {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Row pattern: sorted unique neighbours of each vertex through the elements.
template <std::size_t N>
CsrMatrix pattern_from_elements(int n, const std::vector<std::array<int, N>>& elems) {
  std::vector<std::vector<int>> cols(static_cast<std::size_t>(n));
  for (const auto& e : elems)
    for (int a : e)
      for (int b : e) cols[static_cast<std::size_t>(a)].push_back(b);
  CsrMatrix m;
  m.rows = m.cols = n;
  m.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    auto& c = cols[static_cast<std::size_t>(i)];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<int>(c.size());
    m.col_idx.insert(m.col_idx.end(), c.begin(), c.end());
  }
  m.values.assign(m.col_idx.size(), 0.0);
  return m;
}

template <std::size_t N, class LocalFn>
void scatter_serial(CsrMatrix& m, const std::vector<std::array<int, N>>& elems, LocalFn local) {
  for (std::size_t e = 0; e < elems.size(); ++e) {
    const auto k = local(e);
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b)
        m.values[m.find(elems[e][a], elems[e][b])] += k[a][b];
  }
}

// Each row sums its incident elements in increasing element order, which is
// the order the serial scatter uses, so both paths agree bit for bit.
template <std::size_t N, class LocalFn>
void gather_omp(CsrMatrix& m, const std::vector<std::array<int, N>>& elems, LocalFn local) {
  const int n = m.rows;
  std::vector<int> start(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& e : elems)
    for (int a : e) ++start[static_cast<std::size_t>(a) + 1];
  for (int i = 0; i < n; ++i) start[i + 1] += start[i];
  std::vector<int> incident(static_cast<std::size_t>(start[n]));
  std::vector<int> fill(start.begin(), start.end() - 1);
  for (std::size_t e = 0; e < elems.size(); ++e)
    for (int a : elems[e]) incident[fill[a]++] = static_cast<int>(e);

#pragma omp parallel for schedule(dynamic, 64)
  for (int i = 0; i < n; ++i) {
    for (int q = start[i]; q < start[i + 1]; ++q) {
      const auto& el = elems[static_cast<std::size_t>(incident[q])];
      const auto k = local(static_cast<std::size_t>(incident[q]));
      std::size_t a = 0;
      while (el[a] != i) ++a;
      for (std::size_t b = 0; b < N; ++b) m.values[m.find(i, el[b])] += k[a][b];
    }
  }
}

template <std::size_t N, class LocalFn>
CsrMatrix assemble(int n, const std::vector<std::array<int, N>>& elems, LocalFn local,
                   AssemblyMode mode) {
  CsrMatrix m = pattern_from_elements(n, elems);
  if (mode == AssemblyMode::Serial) scatter_serial(m, elems, local);
  else gather_omp(m, elems, local);
  return m;
}

void require_sizes(const std::vector<double>& x, int n, const char* name) {
  if (static_cast<int>(x.size()) != n)
    throw PreconditionError(std::string("apply_coupling: ") + name + " has " +
                            std::to_string(x.size()) + " entries, expected " + std::to_string(n));
}

}  // namespace

Local4 tet_mass(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const double vol = std::abs(tet_volume(a, b, c, d));
  Local4 m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = vol / 20.0 * (i == j ? 2.0 : 1.0);
  return m;
}

Local4 tet_stiffness(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  // Barycentric gradients from the rows of the inverse edge matrix.
  const Vec3 e1 = sub(b, a), e2 = sub(c, a), e3 = sub(d, a);
  const double det = dot(e1, cross(e2, e3));
  std::array<Vec3, 4> g;
  g[1] = cross(e2, e3);
  g[2] = cross(e3, e1);
  g[3] = cross(e1, e2);
  for (int k = 1; k < 4; ++k)
    for (auto& x : g[k]) x /= det;
  g[0] = {-(g[1][0] + g[2][0] + g[3][0]), -(g[1][1] + g[2][1] + g[3][1]),
          -(g[1][2] + g[2][2] + g[3][2])};
  const double vol = std::abs(det) / 6.0;
  Local4 k{};
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) k[i][j] = k[j][i] = vol * dot(g[i], g[j]);
  return k;
}

Local3 tri_mass(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double area = tri_area(a, b, c);
  Local3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
  return m;
}

Local3 tri_stiffness(const Vec3& a, const Vec3& b, const Vec3& c) {
  // Edge opposite vertex i; grad(lambda_i) . grad(lambda_j) = e_i . e_j / (4 A^2).
  const std::array<Vec3, 3> e = {sub(c, b), sub(a, c), sub(b, a)};
  const double area = tri_area(a, b, c);
  Local3 k{};
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) k[i][j] = k[j][i] = dot(e[i], e[j]) / (4.0 * area);
  return k;
}

CoupledSystemOperators assemble_operators(const BulkSurfaceMesh& mesh, AssemblyMode mode) {
  const auto& x = mesh.vertices;
  for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
    const auto& t = mesh.tets[e];
    if (!(tet_volume(x[t[0]], x[t[1]], x[t[2]], x[t[3]]) > 0.0))
      throw MeshError("degenerate or inverted tet " + std::to_string(e));
  }
  // Surface elements on surface DOF numbering.
  std::vector<Tri> tris(mesh.surface_tris.size());
  for (std::size_t e = 0; e < tris.size(); ++e) {
    const auto& f = mesh.surface_tris[e];
    if (!(tri_area(x[f[0]], x[f[1]], x[f[2]]) > 0.0))
      throw MeshError("degenerate surface triangle " + std::to_string(e));
    for (int k = 0; k < 3; ++k) {
      const int s = mesh.bulk_to_surface.at(static_cast<std::size_t>(f[k]));
      if (s < 0) throw MeshError("surface triangle " + std::to_string(e) + " uses interior vertex");
      tris[e][k] = s;
    }
  }

  const int nb = mesh.num_bulk();
  const int ns = mesh.num_surface();
  auto tet_pts = [&](std::size_t e) {
    const auto& t = mesh.tets[e];
    return std::array<const Vec3*, 4>{&x[t[0]], &x[t[1]], &x[t[2]], &x[t[3]]};
  };
  auto tri_pts = [&](std::size_t e) {
    const auto& f = mesh.surface_tris[e];
    return std::array<const Vec3*, 3>{&x[f[0]], &x[f[1]], &x[f[2]]};
  };

  CoupledSystemOperators ops;
  ops.mass_bulk = assemble(nb, mesh.tets, [&](std::size_t e) {
    const auto p = tet_pts(e);
    return tet_mass(*p[0], *p[1], *p[2], *p[3]);
  }, mode);
  ops.stiffness_bulk = assemble(nb, mesh.tets, [&](std::size_t e) {
    const auto p = tet_pts(e);
    return tet_stiffness(*p[0], *p[1], *p[2], *p[3]);
  }, mode);
  ops.mass_surf = assemble(ns, tris, [&](std::size_t e) {
    const auto p = tri_pts(e);
    return tri_mass(*p[0], *p[1], *p[2]);
  }, mode);
  ops.stiffness_surf = assemble(ns, tris, [&](std::size_t e) {
    const auto p = tri_pts(e);
    return tri_stiffness(*p[0], *p[1], *p[2]);
  }, mode);

  // Boundary mass from the boundary faces of the tets: each tet face that
  // lies on Gamma_h contributes its face mass on the traces of its vertices.
  std::vector<Tri> trace_faces;
  {
    std::vector<Tri> boundary;
    for (const auto& f : mesh.surface_tris) {
      Tri s = f;
      std::sort(s.begin(), s.end());
      boundary.push_back(s);
    }
    std::sort(boundary.begin(), boundary.end());
    constexpr int local[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (const auto& t : mesh.tets) {
      for (const auto& l : local) {
        Tri f = {t[l[0]], t[l[1]], t[l[2]]};
        std::sort(f.begin(), f.end());
        if (std::binary_search(boundary.begin(), boundary.end(), f)) trace_faces.push_back(f);
      }
    }
  }
  std::vector<Tri> trace_tris(trace_faces.size());
  for (std::size_t e = 0; e < trace_faces.size(); ++e)
    for (int k = 0; k < 3; ++k)
      trace_tris[e][k] = mesh.bulk_to_surface[static_cast<std::size_t>(trace_faces[e][k])];
  ops.mass_trace = assemble(ns, trace_tris, [&](std::size_t e) {
    const auto& f = trace_faces[e];
    return tri_mass(x[f[0]], x[f[1]], x[f[2]]);
  }, mode);

  ops.surface_vertex_ids = mesh.surface_vertex_ids;
  return ops;
}

CouplingLoads apply_coupling(const CoupledSystemOperators& ops, const CouplingParams& c,
                             double gamma_surf, const std::vector<double>& u,
                             const std::vector<double>& v, const std::vector<double>& r,
                             const std::vector<double>& s) {
  const int nb = ops.num_bulk();
  const int ns = ops.num_surface();
  require_sizes(u, nb, "u");
  require_sizes(v, nb, "v");
  require_sizes(r, ns, "r");
  require_sizes(s, ns, "s");

  std::vector<double> h1(static_cast<std::size_t>(ns)), h2(static_cast<std::size_t>(ns));
  for (int j = 0; j < ns; ++j) {
    const auto id = static_cast<std::size_t>(ops.surface_vertex_ids[j]);
    const auto h = eval_coupling(c, Species{u[id], v[id], r[j], s[j]});
    h1[j] = gamma_surf * h[0];
    h2[j] = gamma_surf * h[1];
  }
  const auto trace1 = multiply(ops.mass_trace, h1);
  const auto trace2 = multiply(ops.mass_trace, h2);
  const auto surf1 = multiply(ops.mass_surf, h1);
  const auto surf2 = multiply(ops.mass_surf, h2);

  CouplingLoads out;
  out.u.assign(static_cast<std::size_t>(nb), 0.0);
  out.v.assign(static_cast<std::size_t>(nb), 0.0);
  out.r.resize(static_cast<std::size_t>(ns));
  out.s.resize(static_cast<std::size_t>(ns));
  for (int j = 0; j < ns; ++j) {
    const auto id = static_cast<std::size_t>(ops.surface_vertex_ids[j]);
    out.u[id] += trace1[j];
    out.v[id] += trace2[j];
    out.r[j] = -surf1[j];
    out.s[j] = -surf2[j];
  }
  return out;
}

}  // namespace bsrd
