#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "labelgrid/image.hpp"
#include "labelgrid/types.hpp"

namespace labelgrid {

struct IouReport {
    double v_tp = 0.0;
    double v_fp = 0.0;
    double v_fn = 0.0;
    double iou = 0.0;
};

// Volumetric IoU between a voxel set and a ground-truth box. v_tp sums the
// exact cube/box overlap of each voxel; iou is 0 when the union is empty.
// Keys are assumed unique.
IouReport iou_3d(std::span<const VoxelKey> voxels, double resolution, const Box3& gt);

// counts(i, j) = pixels of true class i predicted as class j.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::uint32_t num_labels);

    std::uint32_t num_labels() const { return n_; }
    std::uint64_t& operator()(std::uint32_t truth, std::uint32_t pred) { return counts_[truth * n_ + pred]; }
    std::uint64_t operator()(std::uint32_t truth, std::uint32_t pred) const
    {
        return counts_[truth * n_ + pred];
    }

    std::uint64_t total() const;
    std::uint64_t trace() const;
    std::uint64_t row_sum(std::uint32_t truth) const;
    std::uint64_t col_sum(std::uint32_t pred) const;

    static ConfusionMatrix from_rows(const std::vector<std::vector<std::uint64_t>>& rows);

private:
    std::uint32_t n_;
    std::vector<std::uint64_t> counts_;
};

// Throws std::invalid_argument on shape mismatch or an out-of-range label
// (message carries the pixel coordinates).
ConfusionMatrix confusion(const LabelImage& pred, const LabelImage& truth, std::uint32_t num_labels);

// sum_i n_ii / sum_i t_i. Throws std::domain_error on an empty matrix.
double pixelwise_accuracy(const ConfusionMatrix& cm);

// Class-averaged n_ii / (t_i + sum_j n_ji - n_ii); classes with a zero
// denominator are left out of the mean. Throws std::domain_error when no
// class is left.
double mean_iu(const ConfusionMatrix& cm);

} // namespace labelgrid
