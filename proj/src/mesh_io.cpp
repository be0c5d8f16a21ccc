#include "bsrd/mesh_io.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "bsrd/errors.hpp"

namespace bsrd {

namespace {

void check_field(const PointField& f, std::size_t n) {
  if (f.second == nullptr || f.second->size() != n)
    throw PreconditionError("point field '" + f.first + "' has " +
                            std::to_string(f.second ? f.second->size() : 0) +
                            " values, expected " + std::to_string(n));
}

void write_points(std::ostream& os, const std::vector<Vec3>& pts) {
  os << "POINTS " << pts.size() << " double\n";
  for (const auto& p : pts) os << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
}

void write_fields(std::ostream& os, const std::vector<PointField>& fields, std::size_t n) {
  if (fields.empty()) return;
  os << "POINT_DATA " << n << '\n';
  for (const auto& f : fields) {
    os << "SCALARS " << f.first << " double 1\nLOOKUP_TABLE default\n";
    for (double v : *f.second) os << v << '\n';
  }
}

}  // namespace

void write_vtk_bulk(std::ostream& os, const BulkSurfaceMesh& m,
                    const std::vector<PointField>& fields, const std::string& title) {
  for (const auto& f : fields) check_field(f, m.vertices.size());
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  write_points(os, m.vertices);
  os << "CELLS " << m.tets.size() << ' ' << m.tets.size() * 5 << '\n';
  for (const auto& t : m.tets) os << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  os << "CELL_TYPES " << m.tets.size() << '\n';
  for (std::size_t i = 0; i < m.tets.size(); ++i) os << "10\n";
  write_fields(os, fields, m.vertices.size());
  os.precision(prec);
}

void write_vtk_surface(std::ostream& os, const BulkSurfaceMesh& m,
                       const std::vector<PointField>& fields, const std::string& title) {
  const std::size_t ns = m.surface_vertex_ids.size();
  for (const auto& f : fields) check_field(f, ns);
  std::vector<Vec3> pts(ns);
  for (std::size_t j = 0; j < ns; ++j)
    pts[j] = m.vertices[static_cast<std::size_t>(m.surface_vertex_ids[j])];
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  write_points(os, pts);
  os << "CELLS " << m.surface_tris.size() << ' ' << m.surface_tris.size() * 4 << '\n';
  for (const auto& f : m.surface_tris) {
    os << '3';
    for (int v : f) os << ' ' << m.bulk_to_surface[static_cast<std::size_t>(v)];
    os << '\n';
  }
  os << "CELL_TYPES " << m.surface_tris.size() << '\n';
  for (std::size_t i = 0; i < m.surface_tris.size(); ++i) os << "5\n";
  write_fields(os, fields, ns);
  os.precision(prec);
}

void write_mesh_text(std::ostream& os, const BulkSurfaceMesh& m) {
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "# bsrd ball mesh\nvertices " << m.vertices.size() << '\n';
  for (const auto& p : m.vertices) os << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
  os << "tets " << m.tets.size() << '\n';
  for (const auto& t : m.tets) os << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  os.precision(prec);
}

BulkSurfaceMesh read_mesh_text(std::istream& is, double eps_geom) {
  int line_no = 0;
  std::string line;
  auto fail = [&](const std::string& msg) -> MeshError {
    return MeshError("mesh file line " + std::to_string(line_no) + ": " + msg);
  };
  auto next = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      return true;
    }
    return false;
  };
  auto header = [&](const char* keyword) -> std::size_t {
    if (!next()) throw fail(std::string("expected '") + keyword + " N', got end of file");
    std::istringstream ss(line);
    std::string kw;
    long long n = -1;
    if (!(ss >> kw >> n) || kw != keyword || n < 0)
      throw fail(std::string("expected '") + keyword + " N'");
    return static_cast<std::size_t>(n);
  };

  std::vector<Vec3> verts(header("vertices"));
  for (auto& p : verts) {
    if (!next()) throw fail("unexpected end of file in vertex block");
    std::istringstream ss(line);
    if (!(ss >> p[0] >> p[1] >> p[2])) throw fail("expected three coordinates");
  }
  std::vector<Tet> tets(header("tets"));
  for (auto& t : tets) {
    if (!next()) throw fail("unexpected end of file in tet block");
    std::istringstream ss(line);
    if (!(ss >> t[0] >> t[1] >> t[2] >> t[3])) throw fail("expected four vertex indices");
    for (int v : t)
      if (v < 0 || static_cast<std::size_t>(v) >= verts.size())
        throw fail("vertex index " + std::to_string(v) + " out of range");
  }
  if (next()) throw fail("trailing content");
  BulkSurfaceMesh m = build_mesh(std::move(verts), std::move(tets));
  validate_ball_mesh(m, eps_geom);
  return m;
}

}  // namespace bsrd
