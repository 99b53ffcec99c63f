#include "labelgrid/types.hpp"

#include <algorithm>

namespace labelgrid {

VoxelKey key_from_point(const Vec3& p, double resolution)
{
    return VoxelKey{static_cast<std::int32_t>(std::floor(p.x() / resolution)),
                    static_cast<std::int32_t>(std::floor(p.y() / resolution)),
                    static_cast<std::int32_t>(std::floor(p.z() / resolution))};
}

Vec3 voxel_min_corner(const VoxelKey& key, double resolution)
{
    return Vec3(key.ix * resolution, key.iy * resolution, key.iz * resolution);
}

Vec3 voxel_center(const VoxelKey& key, double resolution)
{
    return Vec3((key.ix + 0.5) * resolution, (key.iy + 0.5) * resolution,
                (key.iz + 0.5) * resolution);
}

Box3::Box3(const Vec3& lo, const Vec3& hi) : min(lo), max(hi)
{
    if (!lo.allFinite() || !hi.allFinite())
        throw std::invalid_argument("Box3: non-finite corner");
    if ((hi.array() <= lo.array()).any())
        throw std::invalid_argument("Box3: min must be < max on every axis");
}

bool Box3::contains(const Vec3& p) const
{
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
}

double Box3::overlap_volume(const Box3& other) const
{
    double v = 1.0;
    for (int a = 0; a < 3; ++a) {
        const double lo = std::max(min[a], other.min[a]);
        const double hi = std::min(max[a], other.max[a]);
        if (hi <= lo) return 0.0;
        v *= hi - lo;
    }
    return v;
}

bool operator==(const Box3& a, const Box3& b)
{
    return a.min == b.min && a.max == b.max;
}

} // namespace labelgrid
