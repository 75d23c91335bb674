#include <cstdio>
#include <random>
#include "tdbem/assembly.hpp"
#include "tdbem/mesh.hpp"
using namespace tdbem;

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

int main() {
  std::mt19937 rng(15 * 977);
  std::uniform_real_distribution<double> u(4.5, 7.0);
  Vec3 off{u(rng), u(rng) * 0.3, u(rng) * 0.25};
  auto m = umbrella_pair(off, 15);
  double dt = 1.4;  // representative
  // find the k window roughly like the test does
  double rmin = 1e300, rmax = 0;
  for (int a = 0; a < 5; ++a) for (int b = 5; b < 10; ++b) {
    double r = norm(m.vertices[a]-m.vertices[b]); rmin = std::min(rmin,r); rmax = std::max(rmax,r);
  }
  int k = std::min((int)std::floor(rmin/(rmax-rmin)), 3);
  dt = 0.5*(rmax/(k+1)+rmin/k);
  TimeGrid grid{dt, 32};
  double oracle = oracle_entry(m, grid, OperatorKind::AdjointDoubleLayer, k+1, 0, 5, 14);
  for (int outer : {4, 5}) for (int inner : {4, 5, 6, 8}) {
    QuadratureConfig q; q.outer_order = outer; q.inner_order = inner;
    double p = galerkin_entry(m, grid, OperatorKind::AdjointDoubleLayer, k+1, 0, 5, q);
    printf("outer=%d inner=%d rel=%.3e\n", outer, inner, std::abs(p-oracle)/std::abs(oracle));
  }
  return 0;
}
