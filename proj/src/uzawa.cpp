#include "tdbem/uzawa.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tdbem {

Vector project_nonneg(Vector v) {
  for (int i = 0; i < v.size(); ++i) v[i] = std::max(v[i], 0.0);
  return v;
}

namespace {

int active_size(const Vector& y) {
  int n = 0;
  for (int i = 0; i < y.size(); ++i)
    if (y[i] > 0) ++n;
  return n;
}

[[noreturn]] void diverged(double rho, int step) {
  std::string where = step > 0 ? " at step " + std::to_string(step) : "";
  throw std::runtime_error("Uzawa residual grew for 10 consecutive iterates" + where +
                           " (rho=" + std::to_string(rho) +
                           "); choose a smaller step parameter rho");
}

}  // namespace

ContactSolution uzawa_space_time(const CoupledSystem& sys, const RhsTrace& rhs,
                                 const TimeGrid& grid, const UzawaConfig& cfg) {
  if (cfg.rho <= 0) throw std::invalid_argument("uzawa: rho must be positive");
  MotSolver solver(sys, grid);
  int nt = grid.n_steps;
  int nm = static_cast<int>(sys.mass.I_mixed.cols());
  int ntr = sys.M.n_trace;
  double aug = multiplier_factor(sys) * grid.dt;
  double upd = cfg.flip_update_sign ? cfg.rho : -cfg.rho;

  ContactSolution sol;
  sol.y.assign(nt + 1, Vector::Zero(nm));
  std::vector<Vector> loads(nt + 1);
  for (int n = 1; n <= nt; ++n) loads[n] = solver.step_load(rhs, n);

  double prev_res = std::numeric_limits<double>::infinity();
  int growth = 0;
  for (int k = 0; k < cfg.max_iter; ++k) {
    // full march with the current multiplier iterate
    MotState st;
    st.n_trace = ntr;
    st.x.assign(nt + 1, Vector::Zero(solver.dim()));
    for (int n = 1; n <= nt; ++n) {
      Vector b = loads[n] - solver.history_term(st.x, n);
      b.head(ntr) += aug * (sys.mass.I_mixed * sol.y[n]);
      st.x[n] = solver.solve_step(b);
      if (!st.x[n].allFinite())
        throw std::runtime_error("space-time Uzawa: non-finite solution at step " +
                                 std::to_string(n));
    }

    double diff2 = 0, norm2 = 0;
    std::vector<Vector> ynew(nt + 1, Vector::Zero(nm));
    int active = 0;
    for (int n = 1; n <= nt; ++n) {
      Vector g = sys.mass.I_hat.transpose() * (st.x[n].head(ntr) + st.x[n - 1].head(ntr));
      ynew[n] = project_nonneg(sol.y[n] + upd * g);
      diff2 += (ynew[n] - sol.y[n]).squaredNorm();
      norm2 += ynew[n].squaredNorm();
      active += active_size(ynew[n]);
    }
    double res = std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-300);
    sol.log.push_back({0, k, res, active});
    sol.y = std::move(ynew);
    sol.state = std::move(st);
    sol.total_iterations = k + 1;
    if (std::sqrt(diff2) == 0.0 || res < cfg.tol_rel) {
      sol.converged = true;
      break;
    }
    growth = res > prev_res ? growth + 1 : 0;
    if (growth >= 10) diverged(cfg.rho, 0);
    prev_res = res;
  }
  // the stored state corresponds to the previous multiplier iterate; one
  // final march with the converged multiplier keeps the pair consistent
  if (sol.converged) {
    MotState st;
    st.n_trace = ntr;
    st.x.assign(nt + 1, Vector::Zero(solver.dim()));
    for (int n = 1; n <= nt; ++n) {
      Vector b = loads[n] - solver.history_term(st.x, n);
      b.head(ntr) += aug * (sys.mass.I_mixed * sol.y[n]);
      st.x[n] = solver.solve_step(b);
    }
    sol.state = std::move(st);
  }
  sol.report = complementarity_report(sol, sys, grid);
  return sol;
}

ContactSolution uzawa_time_step(const CoupledSystem& sys, const RhsTrace& rhs,
                                const TimeGrid& grid, const UzawaConfig& cfg) {
  if (cfg.rho <= 0) throw std::invalid_argument("uzawa: rho must be positive");
  MotSolver solver(sys, grid);
  int nt = grid.n_steps;
  int nm = static_cast<int>(sys.mass.I_mixed.cols());
  int ntr = sys.M.n_trace;
  double aug = multiplier_factor(sys) * grid.dt;
  double upd = cfg.flip_update_sign ? cfg.rho : -cfg.rho;

  // response of one solve to a unit multiplier coefficient
  Matrix Z = solver.multiplier_response();  // dim x nm

  ContactSolution sol;
  sol.y.assign(nt + 1, Vector::Zero(nm));
  sol.state.n_trace = ntr;
  sol.state.x.assign(nt + 1, Vector::Zero(solver.dim()));
  sol.converged = true;

  for (int n = 1; n <= nt; ++n) {
    Vector b0 = solver.step_load(rhs, n) - solver.history_term(sol.state.x, n);
    Vector x0 = solver.solve_step(b0);
    if (!x0.allFinite())
      throw std::runtime_error("time-step Uzawa: non-finite solution at step " +
                               std::to_string(n));
    Vector y = Vector::Zero(nm);
    Vector x = x0;
    const Vector cprev = sol.state.x[n - 1].head(ntr);
    double prev_res = std::numeric_limits<double>::infinity();
    int growth = 0;
    bool step_converged = false;
    for (int k = 0; k < cfg.max_iter; ++k) {
      Vector g = sys.mass.I_hat.transpose() * (x.head(ntr) + cprev);
      Vector ynew = project_nonneg(y + upd * g);
      double diff = (ynew - y).norm();
      double diff_inf = (ynew - y).lpNorm<Eigen::Infinity>();
      double rel = diff / std::max(ynew.norm(), 1e-300);
      sol.log.push_back({n, k, rel, active_size(ynew)});
      y = std::move(ynew);
      x = x0 + aug * (Z * y);
      ++sol.total_iterations;
      if (diff == 0.0 || rel < cfg.tol_rel_step || diff_inf < cfg.tol_inf) {
        step_converged = true;
        break;
      }
      growth = rel > prev_res ? growth + 1 : 0;
      if (growth >= 10) diverged(cfg.rho, n);
      prev_res = rel;
    }
    if (!step_converged) sol.converged = false;
    sol.state.x[n] = x;
    sol.y[n] = y;
  }
  sol.report = complementarity_report(sol, sys, grid);
  return sol;
}

ContactSolution punch_uzawa(const CoupledSystem& v_system, const RhsTrace& rhs,
                            const TimeGrid& grid, const UzawaConfig& cfg, UzawaVariant variant) {
  return variant == UzawaVariant::SpaceTime ? uzawa_space_time(v_system, rhs, grid, cfg)
                                            : uzawa_time_step(v_system, rhs, grid, cfg);
}

ComplementarityReport complementarity_report(const ContactSolution& sol, const CoupledSystem& sys,
                                             const TimeGrid& grid) {
  ComplementarityReport r;
  int ntr = sys.M.n_trace;
  double pairing = 0, nu2 = 0, ny2 = 0;
  double min_y = std::numeric_limits<double>::infinity();
  double min_c = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= grid.n_steps; ++n) {
    Vector g = sys.mass.I_hat.transpose() *
               (sol.state.x[n].head(ntr) + sol.state.x[n - 1].head(ntr));
    pairing += sol.y[n].dot(g);
    nu2 += sol.state.x[n].head(ntr).squaredNorm();
    ny2 += sol.y[n].squaredNorm();
    min_y = std::min(min_y, sol.y[n].size() ? sol.y[n].minCoeff() : 0.0);
    min_c = std::min(min_c, ntr ? sol.state.x[n].head(ntr).minCoeff() : 0.0);
  }
  r.pairing_uy = pairing;
  r.min_multiplier = std::isfinite(min_y) ? min_y : 0.0;
  r.min_trace_at_nodes = std::isfinite(min_c) ? min_c : 0.0;
  r.norm_u = std::sqrt(nu2);
  r.norm_y = std::sqrt(ny2);
  return r;
}

void write_iteration_log_csv(const std::vector<IterationLogEntry>& log, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "step,iterate,residual,active_set_size\n";
  os.precision(12);
  for (const auto& e : log)
    os << e.step << "," << e.iterate << "," << e.residual << "," << e.active_set_size << "\n";
}

}  // namespace tdbem
