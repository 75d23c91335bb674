#include <random>

#include "doctest.h"
#include "tdbem/analysis.hpp"
#include "tdbem/assembly.hpp"
#include "tdbem/block_cache.hpp"
#include "tdbem/mesh.hpp"

using namespace tdbem;

namespace {

// Two separated umbrella patches; the center-vertex hats vanish on their
// patch rims, which the regularized hypersingular route requires.
SurfaceMesh umbrella_pair(const Vec3& offset, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.08, 0.08);
  SurfaceMesh m;
  auto add_patch = [&](const Vec3& base) {
    int c = m.n_vertices();
    m.vertices.push_back(base + Vec3{0.5 + u(rng), 0.5 + u(rng), u(rng)});
    Vec3 corner[4] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
    for (auto& q : corner) m.vertices.push_back(base + q + Vec3{u(rng), u(rng), u(rng)});
    for (int k = 0; k < 4; ++k) {
      m.triangles.push_back({c, c + 1 + k, c + 1 + (k + 1) % 4});
      m.contact_flag.push_back(true);
    }
    return c;
  };
  add_patch({0, 0, 0});
  add_patch(offset);
  m.dirichlet_vertex_mask.assign(m.n_vertices(), false);
  return m;
}

// pick a time step and lag so that the patch pair's whole r-range falls
// inside one polynomial piece of the temporal weights; both quadratures
// then converge fast to the same value
bool smooth_piece(const SurfaceMesh& m, double& dt, int& j) {
  double rmin = 1e300, rmax = 0;
  for (int t = 0; t < 4; ++t)
    for (int s = 4; s < 8; ++s)
      for (int i = 0; i <= 4; ++i)
        for (int jj = 0; i + jj <= 4; ++jj) {
          double a1 = i / 4.0, a2 = jj / 4.0;
          const auto& T = m.triangles[t];
          const auto& S = m.triangles[s];
          Vec3 x = (1 - a1 - a2) * m.vertices[T[0]] + a1 * m.vertices[T[1]] +
                   a2 * m.vertices[T[2]];
          for (int p = 0; p <= 4; ++p)
            for (int q = 0; p + q <= 4; ++q) {
              double b1 = p / 4.0, b2 = q / 4.0;
              Vec3 y = (1 - b1 - b2) * m.vertices[S[0]] + b1 * m.vertices[S[1]] +
                       b2 * m.vertices[S[2]];
              double r = norm(x - y);
              rmin = std::min(rmin, r);
              rmax = std::max(rmax, r);
            }
        }
  double margin = 0.05 * (rmax - rmin);
  rmin -= margin;
  rmax += margin;
  double spread = rmax - rmin;
  int kmax = static_cast<int>(std::floor(rmin / spread));
  if (kmax < 1) return false;
  int k = std::min(kmax, 3);
  dt = 0.5 * (rmax / (k + 1) + rmin / k);
  j = k + 2;  // weights at lags k, k+1, k+2 are all smooth on the piece
  return true;
}

}  // namespace

TEST_CASE("oracle equivalence on well-separated panel pairs") {
  QuadratureConfig quad;
  int tested = 0;
  for (unsigned seed = 1; tested < 20 && seed < 200; ++seed) {
    std::mt19937 rng(seed * 977);
    std::uniform_real_distribution<double> u(4.5, 7.0);
    Vec3 off{u(rng), u(rng) * 0.3, u(rng) * 0.25};
    auto m = umbrella_pair(off, seed);
    double dt = 0;
    int j = 0;
    if (!smooth_piece(m, dt, j)) continue;
    TimeGrid grid{dt, 64};
    ++tested;
    for (auto kind : {OperatorKind::SingleLayer, OperatorKind::DoubleLayer,
                      OperatorKind::AdjointDoubleLayer, OperatorKind::Hypersingular}) {
      for (int dj : {0, 1, 2}) {
        double oracle = oracle_entry(m, grid, kind, j - dj, 0, 5, 12);
        double prod = galerkin_entry(m, grid, kind, j - dj, 0, 5, quad);
        INFO("kind=", kind_name(kind), " seed=", seed, " lag=", j - dj, " oracle=", oracle,
             " prod=", prod);
        if (std::abs(oracle) > 1e-14)
          CHECK(std::abs(prod - oracle) / std::abs(oracle) < 1e-6);
        else
          CHECK(std::abs(prod - oracle) < 1e-12);
      }
    }
  }
  CHECK(tested == 20);
}

TEST_CASE("oracle scaling: single layer homogeneity under mesh dilation") {
  auto m = umbrella_pair({5.0, 1.0, 0.8}, 7);
  double dt = 0.9;
  int j = 5;
  TimeGrid grid{dt, 32};
  double base = oracle_entry(m, grid, OperatorKind::SingleLayer, j, 0, 5, 10);
  double s = 2.0;
  SurfaceMesh ms = m;
  for (auto& v : ms.vertices) v = s * v;
  TimeGrid gs{dt * s, 32};
  double scaled = oracle_entry(ms, gs, OperatorKind::SingleLayer, j, 0, 5, 10);
  CHECK(scaled == doctest::Approx(s * s * s * base).epsilon(1e-9));
}

TEST_CASE("empty light cone gives exactly zero") {
  auto m = umbrella_pair({5.0, 0.0, 0.0}, 3);
  TimeGrid grid{0.05, 400};
  // lag far beyond the pair separation: support (j-2)dt > diameter
  auto s = mesh_stats(m);
  int j = static_cast<int>(std::ceil(s.diameter / grid.dt)) + 3;
  CHECK(oracle_entry(m, grid, OperatorKind::SingleLayer, j, 0, 5, 8) == 0.0);
  CHECK(galerkin_entry(m, grid, OperatorKind::SingleLayer, j, 0, 5, QuadratureConfig{}) == 0.0);
  // and on the near side: the patches are farther apart than (0+1)dt
  CHECK(galerkin_entry(m, grid, OperatorKind::Hypersingular, 0, 0, 5, QuadratureConfig{}) == 0.0);
}

TEST_CASE("causality bound over a whole series") {
  auto m = gen_icosphere(0);
  TimeGrid grid{0.8, 16};
  QuadratureConfig quad;
  quad.outer_order = 2;
  quad.inner_order = 3;
  auto series = assemble_series(m, grid, OperatorKind::SingleLayer, quad);
  double diam = mesh_stats(m).diameter;
  for (int j = 0; j <= series.lag_bound(); ++j) {
    double lo = (j - 2) * grid.dt;
    if (lo > diam) CHECK(series.block(j).cwiseAbs().maxCoeff() == 0.0);
  }
  // with dt > diameter only lags 0..2 survive
  TimeGrid big{2.5, 8};
  auto s2 = assemble_series(m, big, OperatorKind::SingleLayer, quad);
  for (int j = 0; j <= s2.lag_bound(); ++j) {
    double mx = s2.block(j).cwiseAbs().maxCoeff();
    if (j <= 2)
      CHECK(mx > 0.0);
    else
      CHECK(mx == 0.0);
  }
}

TEST_CASE("flat screen: double layer operators vanish") {
  auto m = gen_screen(1, 4, 1);
  TimeGrid grid{0.35, 16};
  QuadratureConfig quad;
  quad.outer_order = 3;
  quad.inner_order = 3;
  auto V = assemble_series(m, grid, OperatorKind::SingleLayer, quad);
  auto K = assemble_series(m, grid, OperatorKind::DoubleLayer, quad);
  auto Kp = assemble_series(m, grid, OperatorKind::AdjointDoubleLayer, quad);
  double vmax = 0, kmax = 0, kpmax = 0;
  for (int j = 0; j <= V.lag_bound(); ++j) {
    vmax = std::max(vmax, V.block(j).cwiseAbs().maxCoeff());
    if (j <= K.lag_bound()) kmax = std::max(kmax, K.block(j).cwiseAbs().maxCoeff());
    if (j <= Kp.lag_bound()) kpmax = std::max(kpmax, Kp.block(j).cwiseAbs().maxCoeff());
  }
  CHECK(vmax > 0);
  CHECK(kmax <= 1e-10 * vmax);
  CHECK(kpmax <= 1e-10 * vmax);
}

TEST_CASE("deterministic reassembly is bitwise identical") {
  auto m = gen_icosphere(0);
  TimeGrid grid{0.7, 8};
  QuadratureConfig quad;
  quad.outer_order = 2;
  quad.inner_order = 2;
  auto a = assemble_series(m, grid, OperatorKind::Hypersingular, quad);
  auto b = assemble_series(m, grid, OperatorKind::Hypersingular, quad);
  REQUIRE(a.blocks.size() == b.blocks.size());
  for (size_t j = 0; j < a.blocks.size(); ++j)
    CHECK((a.blocks[j].array() == b.blocks[j].array()).all());
}

TEST_CASE("polar rule agrees with the subdivision fallback") {
  auto m = gen_icosphere(0);
  TimeGrid grid{0.9, 8};
  QuadratureConfig polar;
  polar.outer_order = 4;
  polar.inner_order = 6;
  QuadratureConfig fallback = polar;
  fallback.use_subdivision_fallback = true;
  fallback.subdivision_depth = 5;
  // far-field entry: vertices 0 and 3 of the icosahedron are not neighbors
  double a = galerkin_entry(m, grid, OperatorKind::SingleLayer, 2, 0, 3, polar);
  double b = galerkin_entry(m, grid, OperatorKind::SingleLayer, 2, 0, 3, fallback);
  CHECK(a == doctest::Approx(b).epsilon(5e-4));
}

TEST_CASE("coupled blocks: mass couplings and trace layout") {
  auto m = gen_screen(1, 4, 1);  // flat: K and K' drop out
  TimeGrid grid{0.3, 10};
  QuadratureConfig quad;
  quad.outer_order = 3;
  quad.inner_order = 3;
  auto sys = assemble_coupled(m, grid, quad);
  int ntr = sys.M.n_trace;
  int nde = sys.M.n_density;
  REQUIRE(ntr == sys.dofs.n_trace());
  REQUIRE(nde == m.n_vertices());

  // off-diagonal blocks at lags 0 and 1 are the mass couplings (the
  // double-layer parts vanish on the screen)
  auto off1 = [&](int j) { return sys.M.block(j).block(0, ntr, ntr, nde); };
  auto off2 = [&](int j) { return sys.M.block(j).block(ntr, 0, nde, ntr); };
  Matrix Ilin = sys.mass.I_lin;
  double tol = 1e-9 * Ilin.cwiseAbs().maxCoeff();
  CHECK((off1(0) - 0.5 * grid.dt * Ilin).cwiseAbs().maxCoeff() < tol);
  CHECK((off1(1) - 0.5 * grid.dt * Ilin).cwiseAbs().maxCoeff() < tol);
  CHECK((off2(0) + Ilin.transpose()).cwiseAbs().maxCoeff() < tol);
  CHECK((off2(1) - Ilin.transpose()).cwiseAbs().maxCoeff() < tol);
  for (int j = 2; j <= sys.M.lag_bound(); ++j) {
    CHECK(off1(j).cwiseAbs().maxCoeff() < tol);
    CHECK(off2(j).cwiseAbs().maxCoeff() < tol);
  }
}

TEST_CASE("block series cache round trip") {
  auto m = gen_icosphere(0);
  TimeGrid grid{0.9, 6};
  QuadratureConfig quad;
  quad.outer_order = 2;
  quad.inner_order = 2;
  auto s = assemble_series(m, grid, OperatorKind::SingleLayer, quad);
  write_block_series(s, "cache_test.bin");
  auto r = read_block_series("cache_test.bin");
  REQUIRE(r.blocks.size() == s.blocks.size());
  CHECK(r.kind == s.kind);
  CHECK(r.dt == s.dt);
  for (size_t j = 0; j < s.blocks.size(); ++j)
    CHECK((r.blocks[j].array() == s.blocks[j].array()).all());
  std::remove("cache_test.bin");

  CHECK(cache_key(mesh_hash(m), grid.dt, grid.n_steps, "V", quad) !=
        cache_key(mesh_hash(m), grid.dt, grid.n_steps, "W", quad));
}
