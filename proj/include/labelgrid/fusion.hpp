#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "labelgrid/label_grid.hpp"
#include "labelgrid/registration.hpp"

namespace labelgrid {

struct GateConfig {
    double linear_eps = 1e-3;   // m/s
    double angular_eps = 1e-3;  // rad/s
    int settle_frames = 2;

    void validate() const;
    static GateConfig disabled()
    {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, 1};
    }
};

struct CameraVelocity {
    double linear = 0.0;   // m/s
    double angular = 0.0;  // rad/s
};

// Finite-difference camera speed between two timestamped poses. The angular
// part is the axis-angle magnitude of prev.R^T * curr.R over dt. Throws
// std::invalid_argument unless t_curr > t_prev.
CameraVelocity camera_velocity(const Pose& prev, double t_prev, const Pose& curr, double t_curr);

enum class FrameDisposition : std::uint8_t { Fused, Gated };

/*
 * Suspends map updates while the camera moves. A frame is stationary when
 * both velocities against the previous frame are <= their eps (the first
 * frame is stationary); it is fused once settle_frames consecutive frames,
 * itself included, have been stationary.
 */
class VelocityGate {
public:
    explicit VelocityGate(const GateConfig& config);

    // Throws std::invalid_argument naming the frame index when timestamps
    // are not strictly increasing.
    FrameDisposition step(const Pose& pose, double timestamp);

    std::uint64_t frames_seen() const { return frames_seen_; }

private:
    GateConfig config_;
    std::optional<std::pair<Pose, double>> previous_;
    int stationary_run_ = 0;
    std::uint64_t frames_seen_ = 0;
};

struct FusionStats {
    std::uint64_t frames_total = 0;
    std::uint64_t frames_fused = 0;
    std::uint64_t frames_gated = 0;
    std::uint64_t pixels_skipped_depth = 0;
    std::uint64_t pixels_skipped_roi = 0;
    std::uint64_t voxel_measurements = 0;
    std::uint64_t updates_discarded = 0;

    bool operator==(const FusionStats&) const = default;
};

struct FusionConfig {
    GateConfig gate;
    double p_min = 0.001;
};

// Applies one registered frame to the grid: one log-odds update per
// (voxel, label) with probabilities clamped to [p_min, 1 - p_min].
void integrate_registration(LabelOccupancyGrid& grid, const Registration& reg, double p_min,
                            FusionStats& stats);

/*
 * Incremental M_t = g(M_{t-1}, I_t, C_t). admit() runs the gate on pose and
 * timestamp only, so callers can skip loading images of gated frames.
 */
class FusionPipeline {
public:
    FusionPipeline(LabelOccupancyGrid& grid, const FusionConfig& config);

    FrameDisposition admit(const Pose& pose, double timestamp);
    void integrate(const SensorFrame& frame);

    // admit() followed by integrate() when fused.
    FrameDisposition process(const SensorFrame& frame);

    const FusionStats& stats() const { return stats_; }
    const LabelOccupancyGrid& grid() const { return grid_; }

private:
    LabelOccupancyGrid& grid_;
    FusionConfig config_;
    VelocityGate gate_;
    FusionStats stats_;
};

// Gates the whole stream, registers the fused frames in parallel, then applies
// their updates in timestamp order.
FusionStats fuse_stream(LabelOccupancyGrid& grid, std::span<const SensorFrame> frames,
                        const FusionConfig& config);

// Gate dispositions for a pose/timestamp sequence.
std::vector<FrameDisposition> gate_dispositions(std::span<const SensorFrame> frames,
                                                const GateConfig& gate);

} // namespace labelgrid
