#include "tdbem/block_cache.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tdbem {

namespace {
constexpr char kMagic[6] = {'T', 'D', 'B', 'L', 'K', '1'};

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("block cache: truncated file");
  return v;
}
}  // namespace

void write_block_series(const BlockSeries& series, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(os, series.blocks.size());
  put<std::uint64_t>(os, series.n_rows);
  put<std::uint64_t>(os, series.n_cols);
  put<std::uint64_t>(os, series.n_trace);
  put<std::uint64_t>(os, series.n_density);
  put<double>(os, series.dt);
  std::uint64_t klen = series.kind.size();
  put<std::uint64_t>(os, klen);
  os.write(series.kind.data(), klen);
  for (const auto& b : series.blocks)
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) put<double>(os, b(i, j));
}

BlockSeries read_block_series(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[6];
  is.read(magic, 6);
  if (!is || std::memcmp(magic, kMagic, 6) != 0)
    throw std::runtime_error("block cache: bad magic in " + path);
  BlockSeries s;
  std::uint64_t lags = get<std::uint64_t>(is);
  s.n_rows = static_cast<int>(get<std::uint64_t>(is));
  s.n_cols = static_cast<int>(get<std::uint64_t>(is));
  s.n_trace = static_cast<int>(get<std::uint64_t>(is));
  s.n_density = static_cast<int>(get<std::uint64_t>(is));
  s.dt = get<double>(is);
  std::uint64_t klen = get<std::uint64_t>(is);
  s.kind.resize(klen);
  is.read(s.kind.data(), klen);
  if (!is) throw std::runtime_error("block cache: truncated file");
  s.blocks.assign(lags, Matrix::Zero(s.n_rows, s.n_cols));
  for (auto& b : s.blocks)
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) b(i, j) = get<double>(is);
  return s;
}

std::uint64_t cache_key(std::uint64_t mesh_h, double dt, int n_steps, const std::string& kind,
                        const QuadratureConfig& quad) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  mix(&mesh_h, sizeof(mesh_h));
  mix(&dt, sizeof(dt));
  mix(&n_steps, sizeof(n_steps));
  mix(kind.data(), kind.size());
  mix(&quad.outer_order, sizeof(int));
  mix(&quad.inner_order, sizeof(int));
  mix(&quad.subdivision_depth, sizeof(int));
  mix(&quad.nearfield_threshold, sizeof(double));
  char f = quad.use_subdivision_fallback ? 1 : 0;
  mix(&f, 1);
  return h;
}

std::string cache_file_name(std::uint64_t key) {
  std::ostringstream ss;
  ss << "tdblk_" << std::hex << key << ".bin";
  return ss.str();
}

}  // namespace tdbem
