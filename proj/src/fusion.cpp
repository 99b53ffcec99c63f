#include "labelgrid/fusion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

#include "labelgrid/log_odds.hpp"

namespace labelgrid {

void GateConfig::validate() const
{
    if (!(linear_eps >= 0.0) || !(angular_eps >= 0.0))
        throw std::invalid_argument("gate: velocity thresholds must be >= 0");
    if (settle_frames < 1) throw std::invalid_argument("gate: settle_frames must be >= 1");
}

CameraVelocity camera_velocity(const Pose& prev, double t_prev, const Pose& curr, double t_curr)
{
    if (!(t_curr > t_prev))
        throw std::invalid_argument("camera_velocity: timestamps must be strictly increasing");
    const double dt = t_curr - t_prev;
    const Mat3 delta = prev.rotation.transpose() * curr.rotation;
    const double angle = Eigen::AngleAxisd(delta).angle();
    return {(curr.translation - prev.translation).norm() / dt, std::abs(angle) / dt};
}

VelocityGate::VelocityGate(const GateConfig& config) : config_(config)
{
    config_.validate();
}

FrameDisposition VelocityGate::step(const Pose& pose, double timestamp)
{
    const auto index = frames_seen_;
    bool stationary = true;
    if (previous_) {
        if (!(timestamp > previous_->second))
            throw std::invalid_argument("frame " + std::to_string(index) +
                                        ": timestamp is not strictly after the previous frame");
        const auto vel = camera_velocity(previous_->first, previous_->second, pose, timestamp);
        stationary = vel.linear <= config_.linear_eps && vel.angular <= config_.angular_eps;
    }
    ++frames_seen_;
    previous_.emplace(pose, timestamp);
    stationary_run_ = stationary ? stationary_run_ + 1 : 0;
    return stationary_run_ >= config_.settle_frames ? FrameDisposition::Fused
                                                    : FrameDisposition::Gated;
}

void integrate_registration(LabelOccupancyGrid& grid, const Registration& reg, double p_min,
                            FusionStats& stats)
{
    stats.pixels_skipped_depth += reg.pixels_skipped_depth;
    stats.pixels_skipped_roi += reg.pixels_skipped_roi;
    const auto before = grid.discarded_updates();
    for (const auto& m : reg.measurements) {
        if (m.label_p.size() != grid.num_labels())
            throw std::invalid_argument("frame has " + std::to_string(m.label_p.size()) +
                                        " classes but the grid has " +
                                        std::to_string(grid.num_labels()));
        for (std::uint32_t l = 0; l < grid.num_labels(); ++l)
            grid.update(m.key, LabelId{l}, clamp_probability(m.label_p[l], p_min));
        ++stats.voxel_measurements;
    }
    stats.updates_discarded += grid.discarded_updates() - before;
}

FusionPipeline::FusionPipeline(LabelOccupancyGrid& grid, const FusionConfig& config)
    : grid_(grid), config_(config), gate_(config.gate)
{
    if (!(config.p_min > 0.0 && config.p_min < 0.5))
        throw std::invalid_argument("p_min must lie in (0, 0.5)");
}

FrameDisposition FusionPipeline::admit(const Pose& pose, double timestamp)
{
    const auto d = gate_.step(pose, timestamp);
    ++stats_.frames_total;
    if (d == FrameDisposition::Fused)
        ++stats_.frames_fused;
    else
        ++stats_.frames_gated;
    return d;
}

void FusionPipeline::integrate(const SensorFrame& frame)
{
    validate_frame(frame);
    integrate_registration(grid_, register_frame(frame, grid_.resolution(), grid_.roi()),
                           config_.p_min, stats_);
}

FrameDisposition FusionPipeline::process(const SensorFrame& frame)
{
    const auto d = admit(frame.pose, frame.timestamp);
    if (d == FrameDisposition::Fused) integrate(frame);
    return d;
}

std::vector<FrameDisposition> gate_dispositions(std::span<const SensorFrame> frames,
                                                const GateConfig& gate)
{
    VelocityGate g(gate);
    std::vector<FrameDisposition> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(g.step(f.pose, f.timestamp));
    return out;
}

FusionStats fuse_stream(LabelOccupancyGrid& grid, std::span<const SensorFrame> frames,
                        const FusionConfig& config)
{
    FusionPipeline pipeline(grid, config);
    std::vector<std::size_t> fused;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (pipeline.admit(frames[i].pose, frames[i].timestamp) == FrameDisposition::Fused)
            fused.push_back(i);
    }
    for (auto i : fused) validate_frame(frames[i]);

    std::vector<Registration> regs(fused.size());
    const auto n = static_cast<std::int64_t>(fused.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < n; ++k)
        regs[k] = register_frame(frames[fused[k]], grid.resolution(), grid.roi());

    FusionStats stats = pipeline.stats();
    for (const auto& reg : regs) integrate_registration(grid, reg, config.p_min, stats);
    return stats;
}

} // namespace labelgrid
