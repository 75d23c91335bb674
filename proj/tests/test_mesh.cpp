#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "tdbem/mesh.hpp"

using namespace tdbem;

namespace {

// every edge of a closed mesh appears twice, once per direction
void check_watertight(const SurfaceMesh& m) {
  std::map<std::pair<int, int>, int> directed;
  for (const auto& tri : m.triangles)
    for (int k = 0; k < 3; ++k) directed[{tri[k], tri[(k + 1) % 3]}]++;
  for (const auto& [e, c] : directed) {
    CHECK(c == 1);
    CHECK(directed.count({e.second, e.first}) == 1);
  }
}

int count_edges(const SurfaceMesh& m) {
  std::set<std::pair<int, int>> edges;
  for (const auto& tri : m.triangles)
    for (int k = 0; k < 3; ++k) edges.insert(std::minmax(tri[k], tri[(k + 1) % 3]));
  return static_cast<int>(edges.size());
}

}  // namespace

TEST_CASE("screen generator matches the reported triangle counts") {
  CHECK(gen_screen(2, 40, 1).n_triangles() == 3200);
  CHECK(gen_screen(2, 80, 1).n_triangles() == 12800);
  auto tiny = gen_screen(2, 1, 2);
  CHECK(tiny.n_triangles() == 2);
  CHECK(tiny.contact_flag[0]);
  CHECK(tiny.contact_flag[1]);
}

TEST_CASE("screen contact flags and dirichlet mask") {
  auto m = gen_screen(2, 8, 1);
  int flagged = 0;
  for (int t = 0; t < m.n_triangles(); ++t)
    if (m.contact_flag[t]) {
      ++flagged;
      for (int k = 0; k < 3; ++k) {
        const Vec3& p = m.vertices[m.triangles[t][k]];
        CHECK(std::abs(p[0]) <= 1 + 1e-12);
        CHECK(std::abs(p[1]) <= 1 + 1e-12);
      }
    }
  CHECK(flagged == 2 * 4 * 4);  // 4x4 cells inside [-1,1]^2
  int free = 0;
  for (int v = 0; v < m.n_vertices(); ++v)
    if (!m.dirichlet_vertex_mask[v]) {
      ++free;
      CHECK(std::abs(m.vertices[v][0]) < 1);
      CHECK(std::abs(m.vertices[v][1]) < 1);
    }
  CHECK(free == 3 * 3);
  CHECK_THROWS(gen_screen(2, 8, 0.7));   // not cell aligned
  CHECK_THROWS(gen_screen(2, 8, 2.5));   // larger than the screen
}

TEST_CASE("cube generator") {
  auto all = std::set<CubeFace>{CubeFace::MinusX, CubeFace::PlusX, CubeFace::MinusY,
                                CubeFace::PlusY, CubeFace::MinusZ, CubeFace::PlusZ};
  auto m40 = gen_cube(2, 40, all);
  CHECK(m40.n_triangles() == 19200);

  auto m1 = gen_cube(2, 1, {CubeFace::PlusZ});
  CHECK(m1.n_triangles() == 12);
  int flagged = 0;
  for (bool f : m1.contact_flag) flagged += f;
  CHECK(flagged == 2);

  auto m2 = gen_cube(2, 2, {CubeFace::PlusZ, CubeFace::MinusY, CubeFace::PlusX});
  CHECK(m2.n_triangles() == 48);
  flagged = 0;
  for (bool f : m2.contact_flag) flagged += f;
  CHECK(flagged == 24);

  check_watertight(m2);
  // V - E + F = 2 for the closed surface
  CHECK(m2.n_vertices() - count_edges(m2) + m2.n_triangles() == 2);

  // with all faces in contact there is no boundary to pin
  auto mall = gen_cube(2, 2, all);
  for (int v = 0; v < mall.n_vertices(); ++v) CHECK(!mall.dirichlet_vertex_mask[v]);
  // with three contact faces, vertices adjacent to any free face are pinned
  int pinned = 0;
  for (int v = 0; v < m2.n_vertices(); ++v) pinned += m2.dirichlet_vertex_mask[v];
  CHECK(pinned > 0);
  for (int t = 0; t < m2.n_triangles(); ++t)
    if (m2.contact_flag[t]) {
      // a flagged triangle has all vertices in the closure of G
      // (a vertex of a non-contact face would violate compatibility)
      for (int k = 0; k < 3; ++k) {
        const Vec3& p = m2.vertices[m2.triangles[t][k]];
        bool on_contact_face = (std::abs(p[2] - 2) < 1e-12) || (std::abs(p[1] + 2) < 1e-12) ||
                               (std::abs(p[0] - 2) < 1e-12);
        CHECK(on_contact_face);
      }
    }
}

TEST_CASE("icosphere refinement") {
  CHECK(gen_icosphere(0).n_triangles() == 20);
  CHECK(gen_icosphere(2).n_triangles() == 320);
  auto m = gen_icosphere(3);
  CHECK(m.n_triangles() == 20 * 4 * 4 * 4);
  for (const auto& v : m.vertices) CHECK(std::abs(norm(v) - 1.0) < 1e-12);
  check_watertight(m);
  CHECK(m.n_vertices() - count_edges(m) + m.n_triangles() == 2);

  // positive orientation: cone volumes from the centroid sum positive
  double vol = 0;
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    vol += dot(m.vertices[tri[0]], cross(m.vertices[tri[1]], m.vertices[tri[2]])) / 6.0;
  }
  CHECK(vol > 0);
  CHECK(vol < 4.0 / 3.0 * M_PI);  // inscribed polyhedron volume
}

TEST_CASE("mesh stats") {
  auto m = gen_screen(2, 40, 1);
  auto s = mesh_stats(m);
  CHECK(s.h_max == doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(s.quasi_uniformity_ratio == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  auto m80 = gen_screen(2, 80, 1);
  double h = mesh_stats(m80).h_max;
  CHECK(h == doctest::Approx(0.05 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(0.075 / h == doctest::Approx(1.06).epsilon(0.01));  // reported CFL ratio

  SurfaceMesh tri;
  tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  tri.triangles = {{0, 1, 2}};
  tri.contact_flag = {true};
  tri.dirichlet_vertex_mask = {false, false, false};
  CHECK(mesh_stats(tri).h_max == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("mesh file round trip") {
  auto m = gen_icosphere(1);
  std::string path = "roundtrip_mesh.txt";
  write_mesh(m, path);
  auto r = read_mesh(path);
  REQUIRE(r.n_vertices() == m.n_vertices());
  REQUIRE(r.n_triangles() == m.n_triangles());
  for (int v = 0; v < m.n_vertices(); ++v)
    for (int k = 0; k < 3; ++k) CHECK(r.vertices[v][k] == m.vertices[v][k]);
  for (int t = 0; t < m.n_triangles(); ++t) {
    CHECK(r.triangles[t] == m.triangles[t]);
    CHECK(r.contact_flag[t] == m.contact_flag[t]);
  }
  // derived mask must agree with the generator's for all three shapes
  for (int v = 0; v < m.n_vertices(); ++v)
    CHECK(r.dirichlet_vertex_mask[v] == m.dirichlet_vertex_mask[v]);

  auto s = gen_screen(2, 8, 1);
  write_mesh(s, path);
  auto rs = read_mesh(path);
  for (int v = 0; v < s.n_vertices(); ++v)
    CHECK(rs.dirichlet_vertex_mask[v] == s.dirichlet_vertex_mask[v]);

  auto c = gen_cube(2, 2, {CubeFace::PlusZ, CubeFace::MinusY, CubeFace::PlusX});
  write_mesh(c, path);
  auto rc = read_mesh(path);
  for (int v = 0; v < c.n_vertices(); ++v)
    CHECK(rc.dirichlet_vertex_mask[v] == c.dirichlet_vertex_mask[v]);
  std::remove(path.c_str());
}

TEST_CASE("mesh file error paths") {
  auto write_file = [](const std::string& path, const std::string& content) {
    FILE* f = fopen(path.c_str(), "w");
    fputs(content.c_str(), f);
    fclose(f);
  };
  write_file("bad1.txt", "TDBEM-MESH 1\n3 1\n0 0 0\n1 0 0\n0 1 0\n0 1 5 1\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(read_mesh("bad1.txt")),
                       doctest::Contains("index out of range"), std::runtime_error);
  write_file("bad2.txt", "TDBEM-MESH 1\n3 0\n0 0 0\n1 0 0\n0 1 0\n");
  CHECK_THROWS_WITH_AS(static_cast<void>(read_mesh("bad2.txt")), doctest::Contains("empty mesh"),
                       std::runtime_error);
  write_file("bad3.txt", "NOT-A-MESH\n");
  CHECK_THROWS(static_cast<void>(read_mesh("bad3.txt")));
  std::remove("bad1.txt");
  std::remove("bad2.txt");
  std::remove("bad3.txt");
}
