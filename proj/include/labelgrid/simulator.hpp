#pragma once

#include <cstdint>
#include <vector>

#include "labelgrid/camera.hpp"
#include "labelgrid/image.hpp"
#include "labelgrid/registration.hpp"
#include "labelgrid/types.hpp"

namespace labelgrid {

struct SceneObject {
    LabelId label;
    Box3 box;
};

// Axis-aligned box world standing in for a shelf bin. Occluders render as
// background (label 0).
struct Scene {
    std::vector<SceneObject> objects;
    std::vector<Box3> occluders;
    Box3 roi;

    void validate(std::uint32_t num_labels) const;
    const SceneObject* find(LabelId label) const;
};

// Synthetic classifier: the rendered label (or, with probability flip_rate, a
// uniformly drawn wrong label) gets `confidence`, the rest share the remainder.
struct NoiseModel {
    double confidence = 0.8;
    double flip_rate = 0.05;
    std::uint64_t seed = 42;

    void validate() const;
};

struct Waypoint {
    Pose pose;
    int hold_frames = 1;
};

struct Trajectory {
    std::vector<Waypoint> waypoints;
    int transition_frames = 0;  // interpolated moving frames between waypoints
    double frame_interval = 0.1;  // seconds between consecutive frames
    double start_time = 0.0;

    void validate() const;
};

struct TrajectoryStep {
    Pose pose;
    double timestamp = 0.0;
    int view = 0;             // waypoint index (for transitions: the waypoint being approached)
    bool transition = false;
    std::uint64_t capture_id = 0;  // noise stream key, independent of transition count
};

std::vector<TrajectoryStep> expand_trajectory(const Trajectory& trajectory);

struct RenderedView {
    DepthImage depth;
    LabelImage labels;
};

// Nearest slab-method hit per pixel ray through (u, v); depth is camera z,
// 0 (label 0) where nothing is hit.
RenderedView render(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr);
DepthImage render_depth(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr);
LabelImage render_labels(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr);

// Per-pixel probability vectors built so every pixel sums to exactly 1.
// Randomness is a pure function of (seed, capture_id, pixel index).
ClassImage render_proba(const LabelImage& truth, const NoiseModel& noise,
                        std::uint32_t num_labels, std::uint64_t capture_id);

struct SimulatedFrame {
    SensorFrame frame;
    LabelImage truth;
    int view = 0;
    bool transition = false;
};

// Depth is quantized to whole millimeters, matching the 16-bit PGM encoding,
// so in-memory frames equal what a disk round trip yields.
std::vector<SimulatedFrame> simulate(const Scene& scene, const Trajectory& trajectory,
                                     const CameraIntrinsics& intr, const NoiseModel& noise,
                                     std::uint32_t num_labels);

namespace serial {
RenderedView render(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr);
ClassImage render_proba(const LabelImage& truth, const NoiseModel& noise,
                        std::uint32_t num_labels, std::uint64_t capture_id);
} // namespace serial

} // namespace labelgrid
