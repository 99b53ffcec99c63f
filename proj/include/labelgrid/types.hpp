#pragma once

#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include <Eigen/Core>

namespace labelgrid {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Integer voxel index. Key k covers [k*res, (k+1)*res) on each axis.
struct VoxelKey {
    std::int32_t ix = 0;
    std::int32_t iy = 0;
    std::int32_t iz = 0;

    auto operator<=>(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
    std::size_t operator()(const VoxelKey& k) const noexcept
    {
        // Teschner et al. spatial hash primes
        const auto x = static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.ix));
        const auto y = static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.iy));
        const auto z = static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.iz));
        return static_cast<std::size_t>((x * 73856093u) ^ (y * 19349663u) ^ (z * 83492791u));
    }
};

// Label 0 is background, 1..N are objects.
struct LabelId {
    std::uint32_t value = 0;

    constexpr bool is_background() const { return value == 0; }
    auto operator<=>(const LabelId&) const = default;
};

inline constexpr LabelId kBackground{0};

VoxelKey key_from_point(const Vec3& p, double resolution);
Vec3 voxel_min_corner(const VoxelKey& key, double resolution);
Vec3 voxel_center(const VoxelKey& key, double resolution);

// Axis-aligned box, min < max on every axis.
struct Box3 {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Ones();

    Box3() = default;
    Box3(const Vec3& lo, const Vec3& hi);

    double volume() const { return (max - min).prod(); }
    Vec3 center() const { return 0.5 * (min + max); }
    bool contains(const Vec3& p) const;
    // Volume of the intersection with other (0 when disjoint).
    double overlap_volume(const Box3& other) const;
};

bool operator==(const Box3& a, const Box3& b);

} // namespace labelgrid
