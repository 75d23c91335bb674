#pragma once

#include <cstdint>
#include <string>

#include "tdbem/assembly.hpp"

namespace tdbem {

void write_block_series(const BlockSeries& series, const std::string& path);
BlockSeries read_block_series(const std::string& path);

/// Cache key from the inputs that determine an assembled series bit for bit.
std::uint64_t cache_key(std::uint64_t mesh_h, double dt, int n_steps, const std::string& kind,
                        const QuadratureConfig& quad);
std::string cache_file_name(std::uint64_t key);

}  // namespace tdbem
