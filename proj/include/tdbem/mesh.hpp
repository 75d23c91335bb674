#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "tdbem/geometry.hpp"

namespace tdbem {

/// Triangulated surface with a flagged contact subregion G.
///
/// Triangles are counterclockwise with respect to the outward normal.
/// contact_flag[t] marks triangles whose interior lies in G;
/// dirichlet_vertex_mask[v] marks vertices on the boundary of G or outside
/// of it, where trace unknowns are pinned to zero.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<bool> contact_flag;
  std::vector<bool> dirichlet_vertex_mask;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }

  Vec3 triangle_normal(int t) const;    // unit outward normal
  double triangle_area(int t) const;
  Vec3 centroid(int t) const;

  /// Vertices with dirichlet_vertex_mask == false, in ascending index order.
  std::vector<int> free_vertices() const;
  /// Indices of triangles with contact_flag == true.
  std::vector<int> contact_triangles() const;
  /// Vertices incident to at least one contact triangle.
  std::vector<int> contact_closure_vertices() const;

  void validate() const;  // throws std::runtime_error on a broken invariant
};

struct MeshStats {
  int n_triangles = 0;
  double h_max = 0;
  double h_min = 0;
  double quasi_uniformity_ratio = 0;
  double diameter = 0;
};

enum class CubeFace : int { MinusX = 0, PlusX = 1, MinusY = 2, PlusY = 3, MinusZ = 4, PlusZ = 5 };

// Geometry naming used by the CLI: left/right = -x/+x, front/back = -y/+y,
// bottom/top = -z/+z.
CubeFace cube_face_from_name(const std::string& name);
std::string cube_face_name(CubeFace f);

SurfaceMesh gen_screen(double half_width, int n, double contact_half_width);
SurfaceMesh gen_cube(double half_width, int n, const std::set<CubeFace>& contact_faces);
SurfaceMesh gen_icosphere(int level);

MeshStats mesh_stats(const SurfaceMesh& mesh);

void write_mesh(const SurfaceMesh& mesh, const std::string& path);
SurfaceMesh read_mesh(const std::string& path);

/// 64-bit FNV-1a hash over the mesh arrays; used as a cache key component.
std::uint64_t mesh_hash(const SurfaceMesh& mesh);

}  // namespace tdbem
