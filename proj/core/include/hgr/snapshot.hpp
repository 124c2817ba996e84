#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hgr/grid.hpp"

namespace hgr {

/// A named set of fields on one grid, stored as
///
///   HGR-SNAPSHOT 1
///   n <n>
///   half_width <L>
///   components <count>
///   time <t>
///   names <name_0> ... <name_{count-1}>
///   encoding float64-le
///   end
///
/// followed by count * n^3 little-endian doubles, component-major.
struct Snapshot {
  Grid3 grid;
  double time = 0.0;
  std::vector<std::string> names;
  std::vector<ScalarField> fields;
};

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
Snapshot read_snapshot(const std::filesystem::path& path);

/// CSV with columns x,y,z,<names...>; refuses grids above max_n per axis.
void write_csv(const std::filesystem::path& path, const Snapshot& snap, int max_n = 64);

}  // namespace hgr
