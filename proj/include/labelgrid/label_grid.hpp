#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "labelgrid/types.hpp"

namespace labelgrid {

struct GridConfig {
    double resolution = 0.005;
    std::uint32_t num_labels = 40;
    double clamp = 3.5;  // symmetric log-odds bound; +inf disables saturation
    std::optional<Box3> roi;
};

/*
 * Sparse label occupancy grid. Every touched voxel owns a dense vector of
 * num_labels log-odds values; each label channel is an independent binary
 * occupancy recursion with a uniform prior (log-odds 0). Absent voxels read
 * as all-zero log-odds.
 *
 * Single writer. Concurrent const access is fine between updates.
 */
class LabelOccupancyGrid {
public:
    explicit LabelOccupancyGrid(const GridConfig& config);

    double resolution() const { return resolution_; }
    std::uint32_t num_labels() const { return num_labels_; }
    double clamp() const { return clamp_; }
    const std::optional<Box3>& roi() const { return roi_; }

    std::size_t size() const { return index_.size(); }
    bool empty() const { return index_.empty(); }
    bool contains(const VoxelKey& key) const { return index_.contains(key); }

    // A voxel is inside the roi iff its center is (always true without roi).
    bool in_roi(const VoxelKey& key) const;

    // Adds logit(measurement_p) to the (key, label) channel and saturates at
    // +-clamp. Returns false (and counts it) when key lies outside the roi.
    bool update(const VoxelKey& key, LabelId label, double measurement_p);

    // Adds a raw log-odds increment; same roi and clamp rules as update().
    bool add_log_odds(const VoxelKey& key, LabelId label, double delta);

    double log_odds(const VoxelKey& key, LabelId label) const;
    double voxel_probability(const VoxelKey& key, LabelId label) const;

    // Stored vector for key, empty span for absent voxels.
    std::span<const double> cell(const VoxelKey& key) const;

    // Keys whose label probability exceeds 0.5 (log-odds > 0), sorted.
    std::vector<VoxelKey> segment(LabelId label) const;

    // Mean voxel-center position of segment(label).
    std::optional<Vec3> centroid(LabelId label) const;

    // All stored keys in ascending (ix, iy, iz) order.
    std::vector<VoxelKey> sorted_keys() const;

    std::uint64_t discarded_updates() const { return discarded_; }

    // Replaces the whole vector of key. Values are clamped; used by the
    // snapshot loader.
    void set_cell(const VoxelKey& key, std::span<const double> values);

    friend bool operator==(const LabelOccupancyGrid& a, const LabelOccupancyGrid& b);

private:
    double* cell_for_write(const VoxelKey& key);
    void check_label(LabelId label) const;

    double resolution_;
    std::uint32_t num_labels_;
    double clamp_;
    std::optional<Box3> roi_;

    std::unordered_map<VoxelKey, std::uint32_t, VoxelKeyHash> index_;
    std::vector<double> values_;  // size() * num_labels_, slot-major
    std::uint64_t discarded_ = 0;
};

} // namespace labelgrid
