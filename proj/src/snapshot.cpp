#include "labelgrid/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace labelgrid {
namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot codec assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value)
{
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in)
{
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T)))
        throw std::runtime_error("LGRID1: truncated snapshot");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

constexpr std::size_t kMagicLen = sizeof(kSnapshotMagic) - 1;

} // namespace

void write_snapshot(const LabelOccupancyGrid& grid, std::ostream& out)
{
    out.write(kSnapshotMagic, kMagicLen);
    put<double>(out, grid.resolution());
    put<std::uint32_t>(out, grid.num_labels());
    put<double>(out, grid.clamp());
    put<std::uint8_t>(out, grid.roi() ? 1 : 0);
    if (const auto& roi = grid.roi()) {
        for (int a = 0; a < 3; ++a) put<double>(out, roi->min[a]);
        for (int a = 0; a < 3; ++a) put<double>(out, roi->max[a]);
    }
    const auto keys = grid.sorted_keys();
    put<std::uint64_t>(out, keys.size());
    for (const auto& key : keys) {
        put<std::int32_t>(out, key.ix);
        put<std::int32_t>(out, key.iy);
        put<std::int32_t>(out, key.iz);
        for (double v : grid.cell(key)) put<float>(out, static_cast<float>(v));
    }
    if (!out) throw std::runtime_error("LGRID1: write failed");
}

LabelOccupancyGrid read_snapshot(std::istream& in)
{
    char magic[kMagicLen];
    if (!in.read(magic, kMagicLen) || std::memcmp(magic, kSnapshotMagic, kMagicLen) != 0)
        throw std::runtime_error("LGRID1: bad magic");

    GridConfig cfg;
    cfg.resolution = get<double>(in);
    cfg.num_labels = get<std::uint32_t>(in);
    cfg.clamp = get<double>(in);
    const auto has_roi = get<std::uint8_t>(in);
    if (has_roi > 1) throw std::runtime_error("LGRID1: bad roi flag");
    if (has_roi) {
        Vec3 lo, hi;
        for (int a = 0; a < 3; ++a) lo[a] = get<double>(in);
        for (int a = 0; a < 3; ++a) hi[a] = get<double>(in);
        cfg.roi = Box3(lo, hi);
    }
    LabelOccupancyGrid grid(cfg);

    const auto count = get<std::uint64_t>(in);
    std::vector<double> values(cfg.num_labels);
    for (std::uint64_t i = 0; i < count; ++i) {
        VoxelKey key;
        key.ix = get<std::int32_t>(in);
        key.iy = get<std::int32_t>(in);
        key.iz = get<std::int32_t>(in);
        for (auto& v : values) v = get<float>(in);
        grid.set_cell(key, values);
    }
    if (grid.size() != count) throw std::runtime_error("LGRID1: duplicate cell keys");
    return grid;
}

std::string encode_snapshot(const LabelOccupancyGrid& grid)
{
    std::ostringstream out(std::ios::binary);
    write_snapshot(grid, out);
    return std::move(out).str();
}

LabelOccupancyGrid decode_snapshot(const std::string& bytes)
{
    std::istringstream in(bytes, std::ios::binary);
    return read_snapshot(in);
}

void save_snapshot(const LabelOccupancyGrid& grid, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_snapshot(grid, out);
}

LabelOccupancyGrid load_snapshot(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_snapshot(in);
}

} // namespace labelgrid
