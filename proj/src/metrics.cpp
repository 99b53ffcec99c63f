#include "labelgrid/metrics.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace labelgrid {

IouReport iou_3d(std::span<const VoxelKey> voxels, double resolution, const Box3& gt)
{
    if (!(resolution > 0.0)) throw std::invalid_argument("iou_3d: resolution must be > 0");
    IouReport r;
    const Vec3 edge = Vec3::Constant(resolution);
    for (const auto& key : voxels) {
        const Vec3 lo = voxel_min_corner(key, resolution);
        r.v_tp += gt.overlap_volume(Box3(lo, lo + edge));
    }
    const double voxel_volume = resolution * resolution * resolution;
    r.v_fp = std::max(0.0, static_cast<double>(voxels.size()) * voxel_volume - r.v_tp);
    r.v_fn = std::max(0.0, gt.volume() - r.v_tp);
    const double denom = r.v_tp + r.v_fp + r.v_fn;
    r.iou = denom > 0.0 ? r.v_tp / denom : 0.0;
    return r;
}

ConfusionMatrix::ConfusionMatrix(std::uint32_t num_labels)
    : n_(num_labels), counts_(static_cast<std::size_t>(num_labels) * num_labels, 0)
{
    if (num_labels == 0) throw std::invalid_argument("confusion matrix needs at least one class");
}

std::uint64_t ConfusionMatrix::total() const
{
    std::uint64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
}

std::uint64_t ConfusionMatrix::trace() const
{
    std::uint64_t s = 0;
    for (std::uint32_t i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
}

std::uint64_t ConfusionMatrix::row_sum(std::uint32_t truth) const
{
    std::uint64_t s = 0;
    for (std::uint32_t j = 0; j < n_; ++j) s += (*this)(truth, j);
    return s;
}

std::uint64_t ConfusionMatrix::col_sum(std::uint32_t pred) const
{
    std::uint64_t s = 0;
    for (std::uint32_t i = 0; i < n_; ++i) s += (*this)(i, pred);
    return s;
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<std::uint64_t>>& rows)
{
    ConfusionMatrix cm(static_cast<std::uint32_t>(rows.size()));
    for (std::uint32_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw std::invalid_argument("confusion matrix must be square");
        for (std::uint32_t j = 0; j < rows.size(); ++j) cm(i, j) = rows[i][j];
    }
    return cm;
}

ConfusionMatrix confusion(const LabelImage& pred, const LabelImage& truth, std::uint32_t num_labels)
{
    if (pred.height() != truth.height() || pred.width() != truth.width())
        throw std::invalid_argument("confusion: prediction and truth images differ in shape");
    ConfusionMatrix cm(num_labels);
    for (int v = 0; v < pred.height(); ++v) {
        for (int u = 0; u < pred.width(); ++u) {
            const auto p = pred(v, u);
            const auto t = truth(v, u);
            if (p >= num_labels || t >= num_labels)
                throw std::invalid_argument("confusion: label out of range at pixel (v=" +
                                            std::to_string(v) + ", u=" + std::to_string(u) + ")");
            ++cm(t, p);
        }
    }
    return cm;
}

double pixelwise_accuracy(const ConfusionMatrix& cm)
{
    const auto total = cm.total();
    if (total == 0) throw std::domain_error("pixelwise_accuracy: empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double mean_iu(const ConfusionMatrix& cm)
{
    double sum = 0.0;
    std::uint32_t classes = 0;
    for (std::uint32_t i = 0; i < cm.num_labels(); ++i) {
        const auto denom = cm.row_sum(i) + cm.col_sum(i) - cm(i, i);
        if (denom == 0) continue;
        sum += static_cast<double>(cm(i, i)) / static_cast<double>(denom);
        ++classes;
    }
    if (classes == 0) throw std::domain_error("mean_iu: every class has an empty union");
    return sum / classes;
}

} // namespace labelgrid
