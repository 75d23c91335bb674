#pragma once

#include <string>
#include <vector>

#include "tdbem/mot.hpp"

namespace tdbem {

/// Closed-form trace and Neumann datum of the radially symmetric wave on
/// the unit sphere; both vanish outside (0, 4).
double sphere_exact_u(double t);
double sphere_exact_h(double t);

/// Built-in right-hand sides of the contact and punch experiments. Cube
/// variants use face-local coordinates centered at each face midpoint.
double builtin_forcing(const std::string& name, double t, const Vec3& x);
SpaceTimeForcing make_forcing(const std::string& name);

/// sqrt(c^T M c) for a nodal coefficient vector.
double l2_gamma(const Vector& coeffs, const Matrix& mass);

/// L2([0,T] x Gamma) distance between two nodal trace histories (piecewise
/// linear in time), integrated exactly in time.
double l2_spacetime_error(const std::vector<Vector>& numeric, const std::vector<Vector>& reference,
                          const Matrix& mass, const TimeGrid& grid);

/// Quadratic form of the single-layer block series over a coefficient
/// history: sum_n x_n . (sum_j A^j x_{n-j}).
double energy_norm(const std::vector<Vector>& history, const BlockSeries& series);

/// Experimental convergence rate between two runs; positive for errors
/// decreasing with increasing dof count.
double convergence_rate(double e1, double dof1, double e2, double dof2);

/// Nodal space-time prolongation of a coarse trace history onto the
/// vertices and time nodes of a finer discretization of the same surface.
std::vector<Vector> prolong(const std::vector<Vector>& coarse_history,
                            const SurfaceMesh& coarse_mesh, const DofMaps& coarse_dofs,
                            const TimeGrid& coarse_grid, const SurfaceMesh& fine_mesh,
                            const DofMaps& fine_dofs, const TimeGrid& fine_grid);

/// Trace-history view of a MotState restricted to trace dofs.
std::vector<Vector> trace_history(const MotState& state, const TimeGrid& grid);

}  // namespace tdbem
