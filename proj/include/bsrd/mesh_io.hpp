#pragma once

// Legacy VTK export and a plain-text node/element format for ball meshes.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bsrd/mesh.hpp"

namespace bsrd {

/// Named nodal field; values are indexed like the mesh entity being written.
using PointField = std::pair<std::string, const std::vector<double>*>;

/// Tets with point data over bulk vertices.
void write_vtk_bulk(std::ostream& os, const BulkSurfaceMesh& mesh,
                    const std::vector<PointField>& fields, const std::string& title = "bulk");

/// Surface triangles on the re-indexed surface vertices; fields are over surface DOFs.
void write_vtk_surface(std::ostream& os, const BulkSurfaceMesh& mesh,
                       const std::vector<PointField>& fields,
                       const std::string& title = "surface");

/// Format:
///   vertices N            followed by N lines "x y z"
///   tets M                followed by M lines "i j k l" (0-based)
/// Lines starting with '#' are comments.
void write_mesh_text(std::ostream& os, const BulkSurfaceMesh& mesh);

/// Parses the text format, rebuilds the surface data and validates every
/// ball-mesh invariant. Throws MeshError with a line number on malformed input.
BulkSurfaceMesh read_mesh_text(std::istream& is, double eps_geom = kGeomTol);

}  // namespace bsrd
