#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tdbem/mesh.hpp"

namespace tdbem {

namespace {
[[noreturn]] void parse_error(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

// A vertex carries a trace dof iff it lies strictly inside G: every incident
// triangle is a contact triangle and the vertex is not on an open boundary.
void derive_dirichlet_mask(SurfaceMesh& m) {
  std::vector<bool> all_contact(m.n_vertices(), true);
  std::vector<bool> touched(m.n_vertices(), false);
  std::map<std::pair<int, int>, int> edge_count;
  for (int t = 0; t < m.n_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      int a = m.triangles[t][k], b = m.triangles[t][(k + 1) % 3];
      edge_count[std::minmax(a, b)]++;
      touched[a] = true;
      if (!m.contact_flag[t]) all_contact[a] = false;
    }
  }
  std::vector<bool> on_rim(m.n_vertices(), false);
  for (const auto& [e, c] : edge_count)
    if (c == 1) on_rim[e.first] = on_rim[e.second] = true;
  m.dirichlet_vertex_mask.assign(m.n_vertices(), true);
  for (int v = 0; v < m.n_vertices(); ++v)
    m.dirichlet_vertex_mask[v] = !(touched[v] && all_contact[v] && !on_rim[v]);
}
}  // namespace

void write_mesh(const SurfaceMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << "TDBEM-MESH 1\n";
  os << mesh.n_vertices() << " " << mesh.n_triangles() << "\n";
  os.precision(17);
  for (const auto& v : mesh.vertices) os << v[0] << " " << v[1] << " " << v[2] << "\n";
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    os << tri[0] << " " << tri[1] << " " << tri[2] << " " << (mesh.contact_flag[t] ? 1 : 0) << "\n";
  }
}

SurfaceMesh read_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  int lineno = 0;
  std::string line;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(is, line)) parse_error(path, lineno + 1, "unexpected end of file");
    ++lineno;
    return line;
  };

  if (next_line() != "TDBEM-MESH 1") parse_error(path, lineno, "bad header, expected 'TDBEM-MESH 1'");
  int nv = 0, nt = 0;
  {
    std::istringstream ss(next_line());
    if (!(ss >> nv >> nt)) parse_error(path, lineno, "expected '<n_vertices> <n_triangles>'");
  }
  if (nt <= 0) parse_error(path, 2, "empty mesh");
  if (nv <= 0) parse_error(path, 2, "no vertices");

  SurfaceMesh m;
  m.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    std::istringstream ss(next_line());
    Vec3 p;
    if (!(ss >> p[0] >> p[1] >> p[2])) parse_error(path, lineno, "expected 'x y z'");
    m.vertices.push_back(p);
  }
  m.triangles.reserve(nt);
  m.contact_flag.reserve(nt);
  for (int i = 0; i < nt; ++i) {
    std::istringstream ss(next_line());
    std::array<int, 3> tri;
    int flag;
    if (!(ss >> tri[0] >> tri[1] >> tri[2] >> flag)) parse_error(path, lineno, "expected 'i j k flag'");
    for (int k = 0; k < 3; ++k)
      if (tri[k] < 0 || tri[k] >= nv) parse_error(path, lineno, "triangle index out of range");
    if (flag != 0 && flag != 1) parse_error(path, lineno, "flag must be 0 or 1");
    m.triangles.push_back(tri);
    m.contact_flag.push_back(flag == 1);
  }
  derive_dirichlet_mask(m);
  m.validate();
  return m;
}

}  // namespace tdbem
