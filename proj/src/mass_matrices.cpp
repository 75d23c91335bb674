#include "tdbem/mass_matrices.hpp"

namespace tdbem {

Matrix spatial_mass(const SurfaceMesh& mesh, SpatialBasis trial, SpatialBasis test,
                    bool contact_only) {
  auto dim = [&](SpatialBasis b) {
    return b == SpatialBasis::LinearVertex ? mesh.n_vertices() : mesh.n_triangles();
  };
  Matrix M = Matrix::Zero(dim(test), dim(trial));
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (contact_only && !mesh.contact_flag[t]) continue;
    double A = mesh.triangle_area(t);
    const auto& tri = mesh.triangles[t];
    if (trial == SpatialBasis::LinearVertex && test == SpatialBasis::LinearVertex) {
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) M(tri[a], tri[b]) += (a == b) ? A / 6.0 : A / 12.0;
    } else if (trial == SpatialBasis::ConstantTriangle && test == SpatialBasis::ConstantTriangle) {
      M(t, t) += A;
    } else if (trial == SpatialBasis::LinearVertex) {  // constant test
      for (int a = 0; a < 3; ++a) M(t, tri[a]) += A / 3.0;
    } else {  // linear test, constant trial
      for (int a = 0; a < 3; ++a) M(tri[a], t) += A / 3.0;
    }
  }
  return M;
}

DofMaps make_dof_maps(const SurfaceMesh& mesh, SpatialBasis multiplier_basis) {
  DofMaps d;
  d.multiplier_basis = multiplier_basis;
  d.trace_vertices = mesh.free_vertices();
  d.trace_index.assign(mesh.n_vertices(), -1);
  for (int i = 0; i < d.n_trace(); ++i) d.trace_index[d.trace_vertices[i]] = i;
  if (multiplier_basis == SpatialBasis::LinearVertex)
    d.multiplier_support = d.trace_vertices;
  else
    d.multiplier_support = mesh.contact_triangles();
  return d;
}

MassMatrices build_mass_matrices(const SurfaceMesh& mesh, const DofMaps& dofs, double dt) {
  MassMatrices mm;
  Matrix lin_lin_G = spatial_mass(mesh, SpatialBasis::LinearVertex, SpatialBasis::LinearVertex, true);
  Matrix lin_lin = spatial_mass(mesh, SpatialBasis::LinearVertex, SpatialBasis::LinearVertex, false);

  int nt = dofs.n_trace();
  mm.I_rhs = Matrix::Zero(nt, nt);
  for (int a = 0; a < nt; ++a)
    for (int b = 0; b < nt; ++b)
      mm.I_rhs(a, b) = lin_lin_G(dofs.trace_vertices[a], dofs.trace_vertices[b]);

  mm.I_lin = Matrix::Zero(nt, mesh.n_vertices());
  for (int a = 0; a < nt; ++a) mm.I_lin.row(a) = lin_lin.row(dofs.trace_vertices[a]);

  int nm = dofs.n_multiplier();
  mm.I_mixed = Matrix::Zero(nt, nm);
  mm.I_tilde = Matrix::Zero(nm, nm);
  if (dofs.multiplier_basis == SpatialBasis::LinearVertex) {
    for (int a = 0; a < nt; ++a)
      for (int i = 0; i < nm; ++i)
        mm.I_mixed(a, i) = lin_lin_G(dofs.trace_vertices[a], dofs.multiplier_support[i]);
    for (int i = 0; i < nm; ++i)
      for (int j = 0; j < nm; ++j)
        mm.I_tilde(i, j) = lin_lin_G(dofs.multiplier_support[i], dofs.multiplier_support[j]);
  } else {
    Matrix lin_const_G =
        spatial_mass(mesh, SpatialBasis::ConstantTriangle, SpatialBasis::LinearVertex, true);
    for (int a = 0; a < nt; ++a)
      for (int i = 0; i < nm; ++i)
        mm.I_mixed(a, i) = lin_const_G(dofs.trace_vertices[a], dofs.multiplier_support[i]);
    for (int i = 0; i < nm; ++i)
      mm.I_tilde(i, i) = mesh.triangle_area(dofs.multiplier_support[i]);
  }
  mm.I_hat = 0.5 * dt * mm.I_mixed;
  return mm;
}

}  // namespace tdbem
