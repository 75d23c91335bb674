#pragma once

#include <Eigen/Dense>

#include "tdbem/mesh.hpp"
#include "tdbem/time_grid.hpp"

namespace tdbem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class SpatialBasis { LinearVertex, ConstantTriangle };

/// Exact mass matrix of piecewise polynomial products, assembled per
/// triangle in closed form. Index sets are all vertices (linear) or all
/// triangles (constant). With contact_only, integration is restricted to G.
Matrix spatial_mass(const SurfaceMesh& mesh, SpatialBasis trial, SpatialBasis test,
                    bool contact_only = false);

/// Dof bookkeeping for the contact solvers. Trace dofs are the unpinned
/// vertices strictly inside G; density dofs are all vertices; multiplier
/// dofs follow the configured basis (vertex set = trace dofs for the linear
/// choice, contact triangles for the constant one).
struct DofMaps {
  std::vector<int> trace_vertices;     // global vertex id per trace dof
  std::vector<int> trace_index;        // vertex id -> trace dof or -1
  SpatialBasis multiplier_basis = SpatialBasis::LinearVertex;
  std::vector<int> multiplier_support; // vertex ids (linear) or triangle ids (constant)

  int n_trace() const { return static_cast<int>(trace_vertices.size()); }
  int n_density(const SurfaceMesh& mesh) const { return mesh.n_vertices(); }
  int n_multiplier() const { return static_cast<int>(multiplier_support.size()); }
};

DofMaps make_dof_maps(const SurfaceMesh& mesh, SpatialBasis multiplier_basis);

/// The small mass matrices coupling trace, density and multiplier bases
/// over the contact region.
struct MassMatrices {
  Matrix I_rhs;    // trace x trace, over G
  Matrix I_mixed;  // trace x multiplier, over G
  Matrix I_tilde;  // multiplier x multiplier, over G
  Matrix I_hat;    // (dt/2) * I_mixed
  Matrix I_lin;    // trace x density, over the whole surface
};

MassMatrices build_mass_matrices(const SurfaceMesh& mesh, const DofMaps& dofs, double dt);

}  // namespace tdbem
