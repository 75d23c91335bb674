#include "tdbem/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace tdbem {

double l2_gamma(const Vector& coeffs, const Matrix& mass) {
  return std::sqrt(std::max(0.0, coeffs.dot(mass * coeffs)));
}

double l2_spacetime_error(const std::vector<Vector>& numeric, const std::vector<Vector>& reference,
                          const Matrix& mass, const TimeGrid& grid) {
  if (numeric.size() != static_cast<size_t>(grid.n_steps + 1) ||
      reference.size() != numeric.size())
    throw std::invalid_argument("l2_spacetime_error: history length mismatch");
  double acc = 0;
  Vector e0 = numeric[0] - reference[0];
  Vector Me0 = mass * e0;
  for (int n = 1; n <= grid.n_steps; ++n) {
    Vector e1 = numeric[n] - reference[n];
    Vector Me1 = mass * e1;
    // exact time integral of the squared piecewise-linear interpolant
    acc += grid.dt / 3.0 * (e0.dot(Me0) + e0.dot(Me1) + e1.dot(Me1));
    e0 = std::move(e1);
    Me0 = std::move(Me1);
  }
  return std::sqrt(std::max(0.0, acc));
}

double energy_norm(const std::vector<Vector>& history, const BlockSeries& series) {
  int nt = static_cast<int>(history.size()) - 1;
  if (nt < 0) return 0.0;
  for (const auto& v : history)
    if (v.size() != series.n_cols)
      throw std::invalid_argument("energy_norm: history dimension does not match the series");
  double acc = 0;
  int L = series.lag_bound();
  for (int n = 1; n <= nt; ++n) {
    Vector s = Vector::Zero(series.n_rows);
    for (int m = std::max(1, n - L); m <= n; ++m) s += series.block(n - m) * history[m];
    acc += history[n].dot(s);
  }
  return acc;
}

double convergence_rate(double e1, double dof1, double e2, double dof2) {
  if (e1 <= 0 || e2 <= 0 || dof1 <= 0 || dof2 <= 0)
    throw std::invalid_argument("convergence_rate: inputs must be positive");
  if (dof1 == dof2) throw std::invalid_argument("convergence_rate: equal dof counts");
  return (std::log(e1) - std::log(e2)) / (std::log(dof2) - std::log(dof1));
}

std::vector<Vector> trace_history(const MotState& state, const TimeGrid& grid) {
  std::vector<Vector> out(grid.n_steps + 1);
  for (int n = 0; n <= grid.n_steps; ++n) out[n] = state.x[n].head(state.n_trace);
  return out;
}

namespace {

struct Location {
  int triangle = -1;
  double b1 = 0, b2 = 0;
};

Location locate(const SurfaceMesh& mesh, const Vec3& p, double tol) {
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Vec3& a = mesh.vertices[tri[0]];
    Vec3 e1 = mesh.vertices[tri[1]] - a, e2 = mesh.vertices[tri[2]] - a;
    Vec3 n = cross(e1, e2);
    double n2 = dot(n, n);
    Vec3 d = p - a;
    double z = dot(d, n) / std::sqrt(n2);
    if (std::abs(z) > tol) continue;
    // solve d = b1 e1 + b2 e2 in the plane
    double e11 = dot(e1, e1), e12 = dot(e1, e2), e22 = dot(e2, e2);
    double d1 = dot(d, e1), d2 = dot(d, e2);
    double det = e11 * e22 - e12 * e12;
    double b1 = (e22 * d1 - e12 * d2) / det;
    double b2 = (e11 * d2 - e12 * d1) / det;
    double eps = 1e-9;
    if (b1 >= -eps && b2 >= -eps && b1 + b2 <= 1 + eps) return {t, b1, b2};
  }
  return {};
}

}  // namespace

std::vector<Vector> prolong(const std::vector<Vector>& coarse_history,
                            const SurfaceMesh& coarse_mesh, const DofMaps& coarse_dofs,
                            const TimeGrid& coarse_grid, const SurfaceMesh& fine_mesh,
                            const DofMaps& fine_dofs, const TimeGrid& fine_grid) {
  if (coarse_history.size() != static_cast<size_t>(coarse_grid.n_steps + 1))
    throw std::invalid_argument("prolong: coarse history length mismatch");
  double scale = mesh_stats(coarse_mesh).h_max;

  // spatial interpolation data for every fine trace vertex
  int nf = fine_dofs.n_trace();
  std::vector<Location> loc(nf);
  for (int i = 0; i < nf; ++i) {
    const Vec3& p = fine_mesh.vertices[fine_dofs.trace_vertices[i]];
    loc[i] = locate(coarse_mesh, p, 1e-8 * scale);
    if (loc[i].triangle < 0)
      throw std::invalid_argument(
          "prolong: fine vertex does not lie on the coarse surface (geometry mismatch)");
  }

  auto coarse_nodal = [&](int n, const Location& l) {
    const auto& tri = coarse_mesh.triangles[l.triangle];
    double b0 = 1.0 - l.b1 - l.b2;
    double val = 0;
    const double b[3] = {b0, l.b1, l.b2};
    for (int k = 0; k < 3; ++k) {
      int dof = coarse_dofs.trace_index[tri[k]];
      if (dof >= 0) val += b[k] * coarse_history[n][dof];
    }
    return val;
  };

  std::vector<Vector> out(fine_grid.n_steps + 1, Vector::Zero(nf));
  double T = coarse_grid.horizon();
  for (int n = 0; n <= fine_grid.n_steps; ++n) {
    double t = std::min(fine_grid.node(n), T);
    double s = t / coarse_grid.dt;
    int m0 = std::min(static_cast<int>(std::floor(s)), coarse_grid.n_steps - 1);
    double w = s - m0;
    for (int i = 0; i < nf; ++i)
      out[n][i] = (1.0 - w) * coarse_nodal(m0, loc[i]) + w * coarse_nodal(m0 + 1, loc[i]);
  }
  return out;
}

}  // namespace tdbem
