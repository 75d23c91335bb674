#pragma once

#include <string>
#include <vector>

#include "tdbem/mass_matrices.hpp"
#include "tdbem/mesh.hpp"
#include "tdbem/quadrature.hpp"
#include "tdbem/time_grid.hpp"

namespace tdbem {

/// The four retarded layer operators of the wave equation.
enum class OperatorKind { SingleLayer, DoubleLayer, AdjointDoubleLayer, Hypersingular };

/// Temporal test family of a Galerkin row: piecewise constants gamma^n or
/// their distributional derivatives (point evaluations at the step ends).
enum class TemporalTest { Constant, ConstantDerivative };

TemporalTest default_test(OperatorKind kind);
std::string kind_name(OperatorKind kind);

struct QuadratureConfig {
  int outer_order = 5;       // polynomial degree of the test-triangle rule
  int inner_order = 6;       // radial Gauss points per light-cone segment
  int subdivision_depth = 2; // extra angular refinement for near pairs
  double nearfield_threshold = 1.5;  // centroid distance / h_max triggering near rules
  bool use_subdivision_fallback = false;  // uniform-subdivision cross-check rule

  bool operator==(const QuadratureConfig&) const = default;
};

/// Lag-indexed Galerkin matrices A^j, j = 0..lag_bound(). Blocks beyond the
/// stored range are identically zero by causality.
struct BlockSeries {
  std::string kind;
  double dt = 0;
  int n_rows = 0, n_cols = 0;
  int n_trace = 0, n_density = 0;  // coupled layout; 0 otherwise
  std::vector<Matrix> blocks;

  int lag_bound() const { return static_cast<int>(blocks.size()) - 1; }
  const Matrix& block(int j) const { return blocks.at(j); }
};

/// One lag of the paper-literal Galerkin pairing for a single operator.
Matrix assemble_block(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind, int j,
                      const QuadratureConfig& quad);

/// All lags of one operator, rows/cols over all mesh vertices. test_family
/// defaults to the pairing used in the coupled system.
BlockSeries assemble_series(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind,
                            const QuadratureConfig& quad);
BlockSeries assemble_series(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind,
                            const QuadratureConfig& quad, TemporalTest test_family);

/// Coupled blocks of the marching scheme, trace dofs first then density
/// dofs. The system is oriented so that the diagonal operator blocks act
/// positively; the right-hand side convention lives in the mot module.
struct CoupledSystem {
  BlockSeries M;
  DofMaps dofs;
  MassMatrices mass;
};

CoupledSystem assemble_coupled(const SurfaceMesh& mesh, const TimeGrid& grid,
                               const QuadratureConfig& quad,
                               SpatialBasis multiplier_basis = SpatialBasis::LinearVertex);

/// Single-layer system for the punch problem: V tested with constants in
/// time, rows/cols over the unpinned vertices of G.
CoupledSystem assemble_punch(const SurfaceMesh& mesh, const TimeGrid& grid,
                             const QuadratureConfig& quad,
                             SpatialBasis multiplier_basis = SpatialBasis::LinearVertex);

/// Brute-force evaluation of one Galerkin entry (vertex hat x vertex hat)
/// by dense tensor quadrature with the analytic temporal weights. Test-only.
double oracle_entry(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind, int j,
                    int test_vertex, int trial_vertex, int dense_order);

/// Same entry through the production light-cone quadrature.
double galerkin_entry(const SurfaceMesh& mesh, const TimeGrid& grid, OperatorKind kind, int j,
                      int test_vertex, int trial_vertex, const QuadratureConfig& quad);

int causal_lag_bound(const SurfaceMesh& mesh, const TimeGrid& grid);

/// Worker-count cap honoring the TDBEM_THREADS environment variable.
int worker_count();

}  // namespace tdbem
