#include "tdbem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace tdbem {

Vec3 SurfaceMesh::triangle_normal(int t) const {
  const auto& tri = triangles[t];
  Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
  Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
  return normalized(cross(e1, e2));
}

double SurfaceMesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  Vec3 e1 = vertices[tri[1]] - vertices[tri[0]];
  Vec3 e2 = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * norm(cross(e1, e2));
}

Vec3 SurfaceMesh::centroid(int t) const {
  const auto& tri = triangles[t];
  return (1.0 / 3.0) * (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]);
}

std::vector<int> SurfaceMesh::free_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < n_vertices(); ++v)
    if (!dirichlet_vertex_mask[v]) out.push_back(v);
  return out;
}

std::vector<int> SurfaceMesh::contact_triangles() const {
  std::vector<int> out;
  for (int t = 0; t < n_triangles(); ++t)
    if (contact_flag[t]) out.push_back(t);
  return out;
}

std::vector<int> SurfaceMesh::contact_closure_vertices() const {
  std::vector<bool> seen(n_vertices(), false);
  for (int t = 0; t < n_triangles(); ++t)
    if (contact_flag[t])
      for (int k = 0; k < 3; ++k) seen[triangles[t][k]] = true;
  std::vector<int> out;
  for (int v = 0; v < n_vertices(); ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

void SurfaceMesh::validate() const {
  if (n_triangles() == 0) throw std::runtime_error("empty mesh");
  if (contact_flag.size() != triangles.size() || dirichlet_vertex_mask.size() != vertices.size())
    throw std::runtime_error("mesh flag arrays have inconsistent sizes");
  for (int t = 0; t < n_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      int v = triangles[t][k];
      if (v < 0 || v >= n_vertices()) throw std::runtime_error("triangle vertex index out of range");
    }
    if (triangle_area(t) <= 0) throw std::runtime_error("degenerate triangle (area <= 0)");
  }
}

SurfaceMesh gen_screen(double half_width, int n, double contact_half_width) {
  if (n < 1) throw std::invalid_argument("gen_screen: n must be >= 1");
  if (contact_half_width > half_width)
    throw std::invalid_argument("gen_screen: contact_half_width exceeds half_width");
  double cells = n * contact_half_width / half_width;
  double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 || (n - static_cast<int>(rounded)) % 2 != 0)
    throw std::invalid_argument(
        "gen_screen: contact square is not aligned with the cell grid "
        "(n*contact_half_width/half_width must be an integer of the same parity as n)");
  int nc = static_cast<int>(rounded);  // contact cells across the full width

  SurfaceMesh m;
  double hcell = 2.0 * half_width / n;
  auto vid = [&](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      m.vertices.push_back({-half_width + i * hcell, -half_width + j * hcell, 0.0});

  // cell (i,j) spans [x_i, x_{i+1}] x [y_j, y_{j+1}]; both triangles share the
  // same diagonal direction so refined meshes are deterministic.
  int lo = (n - nc) / 2, hi = lo + nc;  // contact cells: lo <= i,j < hi
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      bool in_contact = (i >= lo && i < hi && j >= lo && j < hi);
      int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
      m.contact_flag.push_back(in_contact);
      m.contact_flag.push_back(in_contact);
    }
  }

  m.dirichlet_vertex_mask.assign(m.vertices.size(), true);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      bool strictly_inside = (i > lo && i < hi && j > lo && j < hi);
      m.dirichlet_vertex_mask[vid(i, j)] = !strictly_inside;
    }
  // contact region may cover the whole screen; then only the outer rim of
  // the open screen stays pinned (trace functions vanish on dG = screen rim)
  return m;
}

CubeFace cube_face_from_name(const std::string& name) {
  if (name == "left") return CubeFace::MinusX;
  if (name == "right") return CubeFace::PlusX;
  if (name == "front") return CubeFace::MinusY;
  if (name == "back") return CubeFace::PlusY;
  if (name == "bottom") return CubeFace::MinusZ;
  if (name == "top") return CubeFace::PlusZ;
  throw std::invalid_argument("unknown cube face: " + name);
}

std::string cube_face_name(CubeFace f) {
  switch (f) {
    case CubeFace::MinusX: return "left";
    case CubeFace::PlusX: return "right";
    case CubeFace::MinusY: return "front";
    case CubeFace::PlusY: return "back";
    case CubeFace::MinusZ: return "bottom";
    case CubeFace::PlusZ: return "top";
  }
  return "?";
}

SurfaceMesh gen_cube(double half_width, int n, const std::set<CubeFace>& contact_faces) {
  if (n < 1) throw std::invalid_argument("gen_cube: n must be >= 1");
  SurfaceMesh m;

  // Merge shared vertices through an integer lattice key on the cube surface.
  std::map<std::array<int, 3>, int> lut;
  auto vertex_at = [&](int ix, int iy, int iz) {
    auto it = lut.find({ix, iy, iz});
    if (it != lut.end()) return it->second;
    double s = 2.0 * half_width / n;
    int id = m.n_vertices();
    m.vertices.push_back({-half_width + ix * s, -half_width + iy * s, -half_width + iz * s});
    lut[{ix, iy, iz}] = id;
    return id;
  };

  struct FaceFrame {
    CubeFace face;
    // lattice(u,v) -> (ix,iy,iz); chosen so (axis_u x axis_v) points outward
    std::array<int, 3> origin, du, dv;
  };
  std::vector<FaceFrame> frames = {
      {CubeFace::MinusX, {0, n, 0}, {0, -1, 0}, {0, 0, 1}},
      {CubeFace::PlusX, {n, 0, 0}, {0, 1, 0}, {0, 0, 1}},
      {CubeFace::MinusY, {0, 0, 0}, {1, 0, 0}, {0, 0, 1}},
      {CubeFace::PlusY, {n, n, 0}, {-1, 0, 0}, {0, 0, 1}},
      {CubeFace::MinusZ, {0, n, 0}, {1, 0, 0}, {0, -1, 0}},
      {CubeFace::PlusZ, {0, 0, n}, {1, 0, 0}, {0, 1, 0}},
  };

  // track, per vertex id, which faces it belongs to
  std::vector<std::set<int>> faces_of_vertex;
  auto note_face = [&](int vid, int face) {
    if (static_cast<size_t>(vid) >= faces_of_vertex.size()) faces_of_vertex.resize(vid + 1);
    faces_of_vertex[vid].insert(face);
  };

  for (const auto& fr : frames) {
    bool in_contact = contact_faces.count(fr.face) > 0;
    auto lat = [&](int u, int v) {
      return std::array<int, 3>{fr.origin[0] + u * fr.du[0] + v * fr.dv[0],
                                fr.origin[1] + u * fr.du[1] + v * fr.dv[1],
                                fr.origin[2] + u * fr.du[2] + v * fr.dv[2]};
    };
    for (int u = 0; u <= n; ++u)
      for (int v = 0; v <= n; ++v) {
        auto p = lat(u, v);
        note_face(vertex_at(p[0], p[1], p[2]), static_cast<int>(fr.face));
      }
    for (int u = 0; u < n; ++u) {
      for (int v = 0; v < n; ++v) {
        auto p00 = lat(u, v), p10 = lat(u + 1, v), p01 = lat(u, v + 1), p11 = lat(u + 1, v + 1);
        int v00 = vertex_at(p00[0], p00[1], p00[2]);
        int v10 = vertex_at(p10[0], p10[1], p10[2]);
        int v01 = vertex_at(p01[0], p01[1], p01[2]);
        int v11 = vertex_at(p11[0], p11[1], p11[2]);
        m.triangles.push_back({v00, v10, v11});
        m.triangles.push_back({v00, v11, v01});
        m.contact_flag.push_back(in_contact);
        m.contact_flag.push_back(in_contact);
      }
    }
  }

  m.dirichlet_vertex_mask.assign(m.vertices.size(), true);
  for (int v = 0; v < m.n_vertices(); ++v) {
    bool all_contact = true;
    for (int f : faces_of_vertex[v])
      if (!contact_faces.count(static_cast<CubeFace>(f))) all_contact = false;
    m.dirichlet_vertex_mask[v] = !all_contact;
  }
  return m;
}

SurfaceMesh gen_icosphere(int level) {
  if (level < 0) throw std::invalid_argument("gen_icosphere: level must be >= 0");
  SurfaceMesh m;
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                         {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                         {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& p : v) m.vertices.push_back(normalized(p));
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  m.triangles = f;

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int id = m.n_vertices();
      m.vertices.push_back(normalized(0.5 * (m.vertices[a] + m.vertices[b])));
      midpoint[key] = id;
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.triangles.size() * 4);
    for (auto& tri : m.triangles) {
      int ab = mid(tri[0], tri[1]), bc = mid(tri[1], tri[2]), ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }

  m.contact_flag.assign(m.triangles.size(), true);
  m.dirichlet_vertex_mask.assign(m.vertices.size(), false);
  return m;
}

MeshStats mesh_stats(const SurfaceMesh& mesh) {
  MeshStats s;
  s.n_triangles = mesh.n_triangles();
  s.h_max = 0;
  s.h_min = std::numeric_limits<double>::max();
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      double e = norm(mesh.vertices[tri[k]] - mesh.vertices[tri[(k + 1) % 3]]);
      s.h_max = std::max(s.h_max, e);
      s.h_min = std::min(s.h_min, e);
    }
  }
  s.quasi_uniformity_ratio = s.h_max / s.h_min;
  s.diameter = 0;
  for (int a = 0; a < mesh.n_vertices(); ++a)
    for (int b = a + 1; b < mesh.n_vertices(); ++b)
      s.diameter = std::max(s.diameter, norm(mesh.vertices[a] - mesh.vertices[b]));
  return s;
}

std::uint64_t mesh_hash(const SurfaceMesh& mesh) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& v : mesh.vertices) mix(v.data(), sizeof(double) * 3);
  for (const auto& t : mesh.triangles) mix(t.data(), sizeof(int) * 3);
  for (bool b : mesh.contact_flag) {
    unsigned char c = b ? 1 : 0;
    mix(&c, 1);
  }
  for (bool b : mesh.dirichlet_vertex_mask) {
    unsigned char c = b ? 1 : 0;
    mix(&c, 1);
  }
  return h;
}

}  // namespace tdbem
