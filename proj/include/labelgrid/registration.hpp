#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "labelgrid/camera.hpp"
#include "labelgrid/image.hpp"
#include "labelgrid/types.hpp"

namespace labelgrid {

enum class ScoreKind { Probability, Logit };

// One measurement z_t: depth, per-pixel class scores, pose and intrinsics.
struct SensorFrame {
    double timestamp = 0.0;
    DepthImage depth;
    ClassImage scores;  // probabilities or raw logits, see kind
    ScoreKind kind = ScoreKind::Probability;
    Pose pose;
    CameraIntrinsics intrinsics;
};

// Throws std::invalid_argument when shapes disagree or a probability pixel is
// off the simplex by more than 1e-5.
void validate_frame(const SensorFrame& frame);

struct VoxelMeasurement {
    VoxelKey key;
    std::vector<double> label_p;  // mean probability per label over the pixels in key

    bool operator==(const VoxelMeasurement&) const = default;
};

struct Registration {
    std::vector<VoxelMeasurement> measurements;  // unique keys, ascending
    std::uint64_t pixels_used = 0;
    std::uint64_t pixels_skipped_depth = 0;
    std::uint64_t pixels_skipped_roi = 0;
};

// Max-subtracted per-pixel softmax. Throws std::invalid_argument naming the
// first pixel (v, u) holding a non-finite score.
ClassImage softmax_image(const ClassImage& logits);

// Bins every valid-depth pixel into the world voxel it lands in and averages
// the probability vectors of pixels sharing a voxel. Voxels whose center lies
// outside roi are dropped.
Registration register_frame(const SensorFrame& frame, double resolution,
                            const std::optional<Box3>& roi);

// Single-threaded reference versions; results are bit-identical.
namespace serial {
ClassImage softmax_image(const ClassImage& logits);
Registration register_frame(const SensorFrame& frame, double resolution,
                            const std::optional<Box3>& roi);
} // namespace serial

} // namespace labelgrid
