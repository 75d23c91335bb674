#include "tdbem/mot.hpp"

#include <cmath>
#include <stdexcept>

namespace tdbem {

RhsTrace project_rhs(const SpaceTimeForcing& forcing, const SurfaceMesh& mesh,
                     const DofMaps& dofs, const TimeGrid& grid) {
  RhsTrace out;
  out.h.resize(grid.n_steps + 1);
  for (int n = 0; n <= grid.n_steps; ++n) {
    double t = grid.node(n);
    Vector v(dofs.n_trace());
    for (int i = 0; i < dofs.n_trace(); ++i) {
      double val = forcing(t, mesh.vertices[dofs.trace_vertices[i]]);
      if (!std::isfinite(val)) {
        const Vec3& p = mesh.vertices[dofs.trace_vertices[i]];
        throw std::runtime_error("project_rhs: non-finite forcing at t=" + std::to_string(t) +
                                 ", x=(" + std::to_string(p[0]) + "," + std::to_string(p[1]) +
                                 "," + std::to_string(p[2]) + ")");
      }
      v[i] = val;
    }
    out.h[n] = v;
  }
  return out;
}

double rhs_factor(const CoupledSystem& sys) { return sys.M.n_density > 0 ? -2.0 : 1.0; }
double multiplier_factor(const CoupledSystem& sys) { return sys.M.n_density > 0 ? -1.0 : 1.0; }

MotSolver::MotSolver(const CoupledSystem& sys, const TimeGrid& grid)
    : sys_(&sys), grid_(grid), dim_(sys.M.n_rows), lu_(sys.M.block(0)) {
  // a silently singular M^0 produces non-finite entries downstream;
  // detect it here and advise
  Vector probe = lu_.solve(Vector::Ones(dim_));
  if (!probe.allFinite())
    throw std::runtime_error(
        "M^0 is numerically singular; decrease the CFL ratio (smaller dt)");
}

Vector MotSolver::step_load(const RhsTrace& rhs, int n) const {
  Vector b = Vector::Zero(dim_);
  b.head(sys_->M.n_trace) = rhs_factor(*sys_) * 0.5 * grid_.dt *
                            (sys_->mass.I_rhs * (rhs.h[n - 1] + rhs.h[n]));
  return b;
}

Vector MotSolver::history_term(const std::vector<Vector>& x, int n) const {
  Vector acc = Vector::Zero(dim_);
  int L = sys_->M.lag_bound();
  for (int m = std::max(1, n - L); m <= n - 1; ++m) acc += sys_->M.block(n - m) * x[m];
  return acc;
}

Vector MotSolver::solve_step(const Vector& b) const { return lu_.solve(b); }

MotState MotSolver::solve_equality(const RhsTrace& rhs) const {
  MotState st;
  st.n_trace = sys_->M.n_trace;
  st.x.assign(grid_.n_steps + 1, Vector::Zero(dim_));
  for (int n = 1; n <= grid_.n_steps; ++n) {
    Vector b = step_load(rhs, n) - history_term(st.x, n);
    st.x[n] = lu_.solve(b);
    if (!st.x[n].allFinite())
      throw std::runtime_error("marching solution lost finiteness at step " + std::to_string(n) +
                               "; the scheme is unstable at this CFL ratio");
  }
  return st;
}

Matrix MotSolver::multiplier_response() const {
  int nm = static_cast<int>(sys_->mass.I_mixed.cols());
  Matrix rhs = Matrix::Zero(dim_, nm);
  rhs.topRows(sys_->M.n_trace) = sys_->mass.I_mixed;
  return lu_.solve(rhs);
}

double evaluate_trace(const MotState& state, const TimeGrid& grid, const DofMaps& dofs,
                      double t, int vertex) {
  if (t < 0 || t > grid.horizon() + 1e-12)
    throw std::invalid_argument("evaluate_trace: t outside [0, T]");
  int dof = dofs.trace_index[vertex];
  if (dof < 0) return 0.0;  // pinned
  double s = t / grid.dt;
  int n0 = std::min(static_cast<int>(std::floor(s)), grid.n_steps - 1);
  double w = s - n0;
  double c0 = state.x[n0][dof];
  double c1 = state.x[n0 + 1][dof];
  return (1.0 - w) * c0 + w * c1;
}

double evaluate_trace(const MotState& state, const TimeGrid& grid, const DofMaps& dofs,
                      const SurfaceMesh& mesh, double t, int triangle, double b1, double b2) {
  const auto& tri = mesh.triangles[triangle];
  double b0 = 1.0 - b1 - b2;
  return b0 * evaluate_trace(state, grid, dofs, t, tri[0]) +
         b1 * evaluate_trace(state, grid, dofs, t, tri[1]) +
         b2 * evaluate_trace(state, grid, dofs, t, tri[2]);
}

}  // namespace tdbem
