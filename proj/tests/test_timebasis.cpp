#include "doctest.h"
#include "tdbem/mass_matrices.hpp"
#include "tdbem/mesh.hpp"
#include "tdbem/quadrature.hpp"
#include "tdbem/time_grid.hpp"

using namespace tdbem;

TEST_CASE("time grid construction") {
  CHECK(build_time_grid(5, 0.1).n_steps == 50);
  CHECK(build_time_grid(6, 0.075).n_steps == 80);
  CHECK(build_time_grid(6, 0.1).n_steps == 60);
  CHECK(build_time_grid(6, 0.1).horizon() == doctest::Approx(6.0));
  CHECK_THROWS(build_time_grid(0.01, 0.1));
  CHECK_THROWS(build_time_grid(-1, 0.1));
}

TEST_CASE("temporal basis pointwise properties") {
  double dt = 0.25;
  // nodal property of the hats
  for (int n = 0; n < 5; ++n)
    for (int k = 0; k < 5; ++k)
      CHECK(hat((k - n) * dt, dt) == doctest::Approx(n == k ? 1.0 : 0.0));
  // partition of unity of the hats on a fine sampling
  for (double t = 0; t <= 1.0; t += 0.013) {
    double s = 0;
    for (int m = -1; m <= 6; ++m) s += hat(t - m * dt, dt);
    CHECK(s == doctest::Approx(1.0));
  }
  // primitive consistency with a fine Riemann sum
  for (double s : {-0.9 * dt, -0.3 * dt, 0.0, 0.4 * dt, 0.9 * dt, 2.0 * dt}) {
    double acc = 0;
    int N = 20000;
    double lo = -2 * dt;
    for (int i = 0; i < N; ++i) {
      double u = lo + (s - lo) * (i + 0.5) / N;
      acc += hat(u, dt) * (s - lo) / N;
    }
    CHECK(hat_primitive(s, dt) == doctest::Approx(acc).epsilon(1e-6));
  }
}

TEST_CASE("temporal pairing formula") {
  double dt = 0.1;
  CHECK(temporal_pairing(3, 3, dt) == doctest::Approx(dt / 2));
  CHECK(temporal_pairing(2, 3, dt) == doctest::Approx(dt / 2));
  CHECK(temporal_pairing(5, 3, dt) == 0.0);
  CHECK(temporal_pairing(3, 5, dt) == 0.0);
}

TEST_CASE("spatial mass matrices in closed form") {
  SurfaceMesh tri;
  tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  tri.triangles = {{0, 1, 2}};
  tri.contact_flag = {true};
  tri.dirichlet_vertex_mask = {false, false, false};

  auto cc = spatial_mass(tri, SpatialBasis::ConstantTriangle, SpatialBasis::ConstantTriangle);
  REQUIRE(cc.rows() == 1);
  CHECK(cc(0, 0) == doctest::Approx(0.5));

  auto ll = spatial_mass(tri, SpatialBasis::LinearVertex, SpatialBasis::LinearVertex);
  for (int i = 0; i < 3; ++i) CHECK(ll(i, i) == doctest::Approx(1.0 / 12));
  CHECK(ll(0, 1) == doctest::Approx(1.0 / 24));

  auto lc = spatial_mass(tri, SpatialBasis::LinearVertex, SpatialBasis::ConstantTriangle);
  for (int i = 0; i < 3; ++i) CHECK(lc(0, i) == doctest::Approx(0.5 / 3));
}

TEST_CASE("mass matrices match a quadrature oracle") {
  auto m = gen_icosphere(1);
  auto ll = spatial_mass(m, SpatialBasis::LinearVertex, SpatialBasis::LinearVertex);
  // quadrature oracle: degree-5 rule is exact for quadratics, so compare
  // against an independent midpoint-refined rule
  const auto& rule = triangle_rule(5);
  Matrix oracle = Matrix::Zero(m.n_vertices(), m.n_vertices());
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    double A = m.triangle_area(t);
    for (const auto& q : rule) {
      double xi[3] = {1 - q.a - q.b, q.a, q.b};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) oracle(tri[a], tri[b]) += q.w * A * xi[a] * xi[b];
    }
  }
  CHECK((ll - oracle).cwiseAbs().maxCoeff() < 1e-12);

  // symmetric positive definite
  Eigen::SelfAdjointEigenSolver<Matrix> es(ll);
  CHECK(es.eigenvalues().minCoeff() > 0);
}

TEST_CASE("multiplier mass row sums recover triangle areas") {
  auto m = gen_screen(2, 4, 1);
  auto dofs = make_dof_maps(m, SpatialBasis::ConstantTriangle);
  auto mm = build_mass_matrices(m, dofs, 0.1);
  // I_tilde for piecewise constants is diagonal with the triangle areas
  for (int i = 0; i < dofs.n_multiplier(); ++i) {
    double area = m.triangle_area(dofs.multiplier_support[i]);
    CHECK(mm.I_tilde(i, i) == doctest::Approx(area));
    CHECK(mm.I_tilde.row(i).sum() == doctest::Approx(area));
  }
  // I_hat = (dt/2) I_mixed entrywise
  CHECK((mm.I_hat - 0.05 * mm.I_mixed).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dof maps") {
  auto m = gen_screen(2, 8, 1);
  auto lin = make_dof_maps(m, SpatialBasis::LinearVertex);
  CHECK(lin.n_trace() == 9);
  CHECK(lin.n_multiplier() == 9);
  auto con = make_dof_maps(m, SpatialBasis::ConstantTriangle);
  CHECK(con.n_multiplier() == 32);
  auto sphere = gen_icosphere(0);
  auto sd = make_dof_maps(sphere, SpatialBasis::LinearVertex);
  CHECK(sd.n_trace() == 12);
}
