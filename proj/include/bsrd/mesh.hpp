#pragma once

// Tetrahedral triangulation of the unit ball together with the surface
// triangulation it induces on its boundary.

#include <array>
#include <vector>

namespace bsrd {

using Vec3 = std::array<double, 3>;
using Tet = std::array<int, 4>;
using Tri = std::array<int, 3>;

inline constexpr double kGeomTol = 1e-12;
inline constexpr int kMaxRefinement = 7;

struct BulkSurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<Tet> tets;
  /// Boundary faces, outward oriented, indexing into `vertices`.
  std::vector<Tri> surface_tris;
  /// Sorted bulk indices of the vertices on the boundary.
  std::vector<int> surface_vertex_ids;
  /// Surface DOF index per bulk vertex, -1 for interior vertices.
  std::vector<int> bulk_to_surface;

  int num_bulk() const noexcept { return static_cast<int>(vertices.size()); }
  int num_surface() const noexcept { return static_cast<int>(surface_vertex_ids.size()); }
};

/// Faces that belong to exactly one tet, oriented so the normal points away
/// from the tet's fourth vertex. Throws MeshError when a face is shared by
/// more than two tets.
std::vector<Tri> extract_surface(const std::vector<Vec3>& vertices, const std::vector<Tet>& tets);

/// Orients tets positively and derives the surface data. Does not validate.
BulkSurfaceMesh build_mesh(std::vector<Vec3> vertices, std::vector<Tet> tets);

/// Nested red refinement of an icosahedral seed (12 boundary vertices, centre,
/// 20 tets); `level` refinements give 20*8^level tets and 20*4^level surface
/// triangles. Throws MeshError for level < 0 or level > kMaxRefinement.
BulkSurfaceMesh generate_ball_mesh(int level);

/// Checks every mesh invariant for a ball mesh (positive volumes, closed
/// orientable boundary with Euler characteristic 2, outward normals, boundary
/// vertices on the unit sphere to `eps_geom`, consistent surface maps).
/// Throws MeshError describing the first violations found.
void validate_ball_mesh(const BulkSurfaceMesh& mesh, double eps_geom = kGeomTol);

double tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) noexcept;
double tri_area(const Vec3& a, const Vec3& b, const Vec3& c) noexcept;

struct MeshStats {
  int num_vertices = 0;
  int num_tets = 0;
  int num_surface_vertices = 0;
  int num_surface_tris = 0;
  double h_min = 0.0;
  double h_max = 0.0;
  double volume = 0.0;
  double area = 0.0;
};

MeshStats mesh_stats(const BulkSurfaceMesh& mesh);

/// Gathers bulk nodal values onto surface DOFs.
std::vector<double> trace(const BulkSurfaceMesh& mesh, const std::vector<double>& bulk);

}  // namespace bsrd
