#pragma once

#include <string>
#include <vector>

#include "tdbem/mot.hpp"

namespace tdbem {

struct UzawaConfig {
  double rho = 1.0;
  double tol_rel = 1e-11;       // space-time stopping tolerance
  double tol_rel_step = 1e-12;  // time-step stopping tolerance
  double tol_inf = 1e-10;       // extra l-inf stop for the time-step variant
  int max_iter = 2000;
  // The multiplier update direction: by default y <- max(0, y - rho*g) with
  // g the pairing of the trace against the multiplier basis. The two
  // algorithm listings disagree on this sign; the flag flips it.
  bool flip_update_sign = false;
};

struct IterationLogEntry {
  int step;      // time step (0 for the space-time variant)
  int iterate;
  double residual;
  int active_set_size;
};

struct ComplementarityReport {
  double pairing_uy = 0;          // discrete <u, y> through the I_hat coupling
  double min_multiplier = 0;
  double min_trace_at_nodes = 0;  // minimal nodal trace value over all steps
  double norm_u = 0, norm_y = 0;
};

struct ContactSolution {
  MotState state;
  std::vector<Vector> y;  // multiplier per step, y[0] unused (zero)
  bool converged = false;
  int total_iterations = 0;
  std::vector<IterationLogEntry> log;
  ComplementarityReport report;
};

enum class UzawaVariant { SpaceTime, TimeStep };

Vector project_nonneg(Vector v);

ContactSolution uzawa_space_time(const CoupledSystem& sys, const RhsTrace& rhs,
                                 const TimeGrid& grid, const UzawaConfig& cfg);
ContactSolution uzawa_time_step(const CoupledSystem& sys, const RhsTrace& rhs,
                                const TimeGrid& grid, const UzawaConfig& cfg);

/// Punch problem driver: identical machinery over the single-layer system
/// from assemble_punch.
ContactSolution punch_uzawa(const CoupledSystem& v_system, const RhsTrace& rhs,
                            const TimeGrid& grid, const UzawaConfig& cfg, UzawaVariant variant);

ComplementarityReport complementarity_report(const ContactSolution& sol, const CoupledSystem& sys,
                                             const TimeGrid& grid);

void write_iteration_log_csv(const std::vector<IterationLogEntry>& log, const std::string& path);

}  // namespace tdbem
