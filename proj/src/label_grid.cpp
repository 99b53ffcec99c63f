#include "labelgrid/label_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "labelgrid/log_odds.hpp"

namespace labelgrid {

LabelOccupancyGrid::LabelOccupancyGrid(const GridConfig& config)
    : resolution_(config.resolution),
      num_labels_(config.num_labels),
      clamp_(config.clamp),
      roi_(config.roi)
{
    if (!(resolution_ > 0.0) || !std::isfinite(resolution_))
        throw std::invalid_argument("grid resolution must be a positive finite number");
    if (num_labels_ < 2)
        throw std::invalid_argument("grid needs at least 2 labels (background + one object)");
    if (!(clamp_ > 0.0))
        throw std::invalid_argument("log-odds clamp must be > 0");
}

bool LabelOccupancyGrid::in_roi(const VoxelKey& key) const
{
    return !roi_ || roi_->contains(voxel_center(key, resolution_));
}

void LabelOccupancyGrid::check_label(LabelId label) const
{
    if (label.value >= num_labels_)
        throw std::out_of_range("label " + std::to_string(label.value) +
                                " out of range for grid with " +
                                std::to_string(num_labels_) + " labels");
}

double* LabelOccupancyGrid::cell_for_write(const VoxelKey& key)
{
    auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(index_.size()));
    if (inserted) values_.resize(values_.size() + num_labels_, 0.0);
    return values_.data() + static_cast<std::size_t>(it->second) * num_labels_;
}

bool LabelOccupancyGrid::update(const VoxelKey& key, LabelId label, double measurement_p)
{
    return add_log_odds(key, label, logit(measurement_p));
}

bool LabelOccupancyGrid::add_log_odds(const VoxelKey& key, LabelId label, double delta)
{
    check_label(label);
    if (!in_roi(key)) {
        ++discarded_;
        return false;
    }
    double* cell = cell_for_write(key);
    cell[label.value] = clamp_log_odds(cell[label.value] + delta, clamp_);
    return true;
}

double LabelOccupancyGrid::log_odds(const VoxelKey& key, LabelId label) const
{
    check_label(label);
    auto it = index_.find(key);
    if (it == index_.end()) return 0.0;
    return values_[static_cast<std::size_t>(it->second) * num_labels_ + label.value];
}

double LabelOccupancyGrid::voxel_probability(const VoxelKey& key, LabelId label) const
{
    return probability(log_odds(key, label));
}

std::span<const double> LabelOccupancyGrid::cell(const VoxelKey& key) const
{
    auto it = index_.find(key);
    if (it == index_.end()) return {};
    return {values_.data() + static_cast<std::size_t>(it->second) * num_labels_, num_labels_};
}

std::vector<VoxelKey> LabelOccupancyGrid::segment(LabelId label) const
{
    check_label(label);
    std::vector<VoxelKey> out;
    for (const auto& [key, slot] : index_) {
        if (values_[static_cast<std::size_t>(slot) * num_labels_ + label.value] > 0.0)
            out.push_back(key);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<Vec3> LabelOccupancyGrid::centroid(LabelId label) const
{
    const auto keys = segment(label);
    if (keys.empty()) return std::nullopt;
    Vec3 sum = Vec3::Zero();
    for (const auto& k : keys) sum += voxel_center(k, resolution_);
    return sum / static_cast<double>(keys.size());
}

std::vector<VoxelKey> LabelOccupancyGrid::sorted_keys() const
{
    std::vector<VoxelKey> keys;
    keys.reserve(index_.size());
    for (const auto& entry : index_) keys.push_back(entry.first);
    std::sort(keys.begin(), keys.end());
    return keys;
}

void LabelOccupancyGrid::set_cell(const VoxelKey& key, std::span<const double> values)
{
    if (values.size() != num_labels_)
        throw std::invalid_argument("set_cell: vector length must equal num_labels");
    double* cell = cell_for_write(key);
    for (std::size_t i = 0; i < values.size(); ++i)
        cell[i] = clamp_log_odds(values[i], clamp_);
}

bool operator==(const LabelOccupancyGrid& a, const LabelOccupancyGrid& b)
{
    if (a.resolution_ != b.resolution_ || a.num_labels_ != b.num_labels_ ||
        a.clamp_ != b.clamp_ || a.roi_ != b.roi_)
        return false;

    // Absent voxels equal all-zero voxels.
    auto covered = [](const LabelOccupancyGrid& x, const LabelOccupancyGrid& y) {
        for (const auto& [key, slot] : x.index_) {
            const auto other = y.cell(key);
            for (std::uint32_t l = 0; l < x.num_labels_; ++l) {
                const double v = x.values_[static_cast<std::size_t>(slot) * x.num_labels_ + l];
                const double w = other.empty() ? 0.0 : other[l];
                if (v != w) return false;
            }
        }
        return true;
    };
    return covered(a, b) && covered(b, a);
}

} // namespace labelgrid
