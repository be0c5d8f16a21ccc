#pragma once

// Piecewise-linear bulk and surface finite element operators on a
// BulkSurfaceMesh, and the Robin exchange loads between the two.

#include <vector>

#include "bsrd/kinetics.hpp"
#include "bsrd/mesh.hpp"
#include "bsrd/sparse.hpp"

namespace bsrd {

enum class AssemblyMode {
  Serial,  // element loop scattering into rows
  OpenMP,  // rows gathered in parallel from their incident elements
};

struct CoupledSystemOperators {
  CsrMatrix mass_bulk;       // over bulk vertices
  CsrMatrix stiffness_bulk;  // over bulk vertices
  CsrMatrix mass_surf;       // over surface DOFs
  CsrMatrix stiffness_surf;  // Laplace-Beltrami, over surface DOFs
  CsrMatrix mass_trace;      // boundary mass on Gamma_h, over surface DOFs
  std::vector<int> surface_vertex_ids;  // surface DOF -> bulk vertex

  int num_bulk() const noexcept { return mass_bulk.rows; }
  int num_surface() const noexcept { return mass_surf.rows; }
};

/// Throws MeshError naming the first element with non-positive volume or area.
CoupledSystemOperators assemble_operators(const BulkSurfaceMesh& mesh,
                                          AssemblyMode mode = AssemblyMode::OpenMP);

/// Per-element matrices, exposed for testing.
using Local4 = std::array<std::array<double, 4>, 4>;
using Local3 = std::array<std::array<double, 3>, 3>;
Local4 tet_mass(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
Local4 tet_stiffness(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
Local3 tri_mass(const Vec3& a, const Vec3& b, const Vec3& c);
Local3 tri_stiffness(const Vec3& a, const Vec3& b, const Vec3& c);

struct CouplingLoads {
  std::vector<double> u, v, r, s;
};

/// u-load = P^T (gamma_surf M_trace h1), r-load = -gamma_surf M_surf h1, and the
/// same with h2 for v and s, where P gathers bulk traces. Throws
/// PreconditionError on size mismatch.
CouplingLoads apply_coupling(const CoupledSystemOperators& ops, const CouplingParams& c,
                             double gamma_surf, const std::vector<double>& u,
                             const std::vector<double>& v, const std::vector<double>& r,
                             const std::vector<double>& s);

}  // namespace bsrd
