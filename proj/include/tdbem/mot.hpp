#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "tdbem/assembly.hpp"

namespace tdbem {

using SpaceTimeForcing = std::function<double(double, const Vec3&)>;

/// Forcing sampled at the trace vertices for every time node: h[n][i],
/// n = 0..N_t. The mass matrix is applied at solve time.
struct RhsTrace {
  std::vector<Vector> h;
};

RhsTrace project_rhs(const SpaceTimeForcing& forcing, const SurfaceMesh& mesh,
                     const DofMaps& dofs, const TimeGrid& grid);

/// Per-step coefficient history. x[m] is the full solution vector of step m
/// (trace dofs first, then density dofs); x[0] = 0 by causal initial data.
struct MotState {
  std::vector<Vector> x;
  int n_trace = 0;

  Eigen::VectorBlock<const Vector> trace(int m) const { return x[m].head(n_trace); }
  Eigen::VectorBlock<const Vector> density(int m) const {
    return x[m].tail(x[m].size() - n_trace);
  }
};

/// Marching-on-in-time driver: factorizes the lag-0 block once and steps
/// through the block lower triangular system.
class MotSolver {
 public:
  MotSolver(const CoupledSystem& sys, const TimeGrid& grid);

  /// Trace-row load of step n from the sampled forcing, including the
  /// system's right-hand-side orientation factor.
  Vector step_load(const RhsTrace& rhs, int n) const;

  /// History term sum_{m=1}^{n-1} M^{n-m} x^m.
  Vector history_term(const std::vector<Vector>& x, int n) const;

  /// Solve M^0 x = b.
  Vector solve_step(const Vector& b) const;

  /// March the variational equality over all steps.
  MotState solve_equality(const RhsTrace& rhs) const;

  /// Columns of M^0^{-1} [I_mixed; 0], used for fast multiplier updates.
  Matrix multiplier_response() const;

  const CoupledSystem& system() const { return *sys_; }
  const TimeGrid& grid() const { return grid_; }
  int dim() const { return dim_; }

 private:
  const CoupledSystem* sys_;
  TimeGrid grid_;
  int dim_;
  Eigen::PartialPivLU<Matrix> lu_;
};

/// Right-hand-side orientation factors of a system produced by
/// assemble_coupled (symmetric DtN representation; rows negated and the
/// operator pair carries an extra factor 2) or assemble_punch.
double rhs_factor(const CoupledSystem& sys);
double multiplier_factor(const CoupledSystem& sys);

/// Space-time interpolant of the trace at time t and a vertex (or a point
/// of a triangle in barycentric coordinates).
double evaluate_trace(const MotState& state, const TimeGrid& grid, const DofMaps& dofs,
                      double t, int vertex);
double evaluate_trace(const MotState& state, const TimeGrid& grid, const DofMaps& dofs,
                      const SurfaceMesh& mesh, double t, int triangle, double b1, double b2);

}  // namespace tdbem
