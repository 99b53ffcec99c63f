#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "labelgrid/label_grid.hpp"

namespace labelgrid {

/*
 * LGRID1 binary snapshot, little-endian:
 *   "LGRID1\n"
 *   resolution f64, num_labels u32, clamp f64, roi flag u8, [roi min xyz, max xyz: 6 x f64],
 *   cell count u64,
 *   per cell: ix, iy, iz i32, then num_labels x f32 log-odds.
 * Cells are written in ascending (ix, iy, iz) order so equal grids give equal bytes.
 */
inline constexpr char kSnapshotMagic[] = "LGRID1\n";

void write_snapshot(const LabelOccupancyGrid& grid, std::ostream& out);
LabelOccupancyGrid read_snapshot(std::istream& in);

std::string encode_snapshot(const LabelOccupancyGrid& grid);
LabelOccupancyGrid decode_snapshot(const std::string& bytes);

void save_snapshot(const LabelOccupancyGrid& grid, const std::filesystem::path& path);
LabelOccupancyGrid load_snapshot(const std::filesystem::path& path);

} // namespace labelgrid
