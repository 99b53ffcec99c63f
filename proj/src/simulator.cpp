#include "labelgrid/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace labelgrid {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double unit_double(std::uint64_t h)
{
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Entry distance of the ray into box, +inf on a miss or when the origin is
// inside the box.
double slab_entry(const Vec3& origin, const Vec3& dir, const Box3& box)
{
    double t_enter = -kInf;
    double t_exit = kInf;
    for (int a = 0; a < 3; ++a) {
        if (dir[a] == 0.0) {
            if (origin[a] < box.min[a] || origin[a] > box.max[a]) return kInf;
            continue;
        }
        double t1 = (box.min[a] - origin[a]) / dir[a];
        double t2 = (box.max[a] - origin[a]) / dir[a];
        if (t1 > t2) std::swap(t1, t2);
        t_enter = std::max(t_enter, t1);
        t_exit = std::min(t_exit, t2);
    }
    if (t_enter > t_exit || t_enter <= 0.0) return kInf;
    return t_enter;
}

struct Hit {
    double depth = 0.0;
    std::uint32_t label = 0;
};

// Ray direction has camera-z component 1, so the ray parameter is the depth.
Hit trace_pixel(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr, int v, int u)
{
    const Vec3 dir_cam((u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0);
    const Vec3 dir = pose.rotation * dir_cam;
    const Vec3& origin = pose.translation;

    double best = kInf;
    std::uint32_t label = 0;
    for (const auto& obj : scene.objects) {
        const double t = slab_entry(origin, dir, obj.box);
        if (t < best) {
            best = t;
            label = obj.label.value;
        }
    }
    for (const auto& occ : scene.occluders) {
        const double t = slab_entry(origin, dir, occ);
        if (t < best) {
            best = t;
            label = 0;
        }
    }
    if (best == kInf) return {};
    return {best, label};
}

// Off-label mass on a 2^-24 grid, so top + N * other is exactly 1 in float
// and double arithmetic regardless of summation order.
struct PixelMass {
    double top;
    double other;
};

PixelMass pixel_mass(double confidence, std::uint32_t num_labels)
{
    const double others = static_cast<double>(num_labels - 1);
    const double other = std::round((1.0 - confidence) / others * 0x1.0p24) * 0x1.0p-24;
    return {1.0 - others * other, other};
}

void proba_pixel(std::uint32_t truth, std::size_t index, const NoiseModel& noise,
                 std::uint32_t num_labels, std::uint64_t capture_id, const PixelMass& mass,
                 std::span<double> out)
{
    std::uint32_t top = truth;
    const std::uint64_t h = mix64(mix64(mix64(noise.seed) ^ capture_id) ^ index);
    if (unit_double(h) < noise.flip_rate) {
        const auto r = static_cast<std::uint32_t>(mix64(h ^ 0xa0761d6478bd642full) % (num_labels - 1));
        top = r < truth ? r : r + 1;
    }
    for (std::uint32_t c = 0; c < num_labels; ++c) out[c] = c == top ? mass.top : mass.other;
}

void check_truth(const LabelImage& truth, std::uint32_t num_labels)
{
    for (auto l : truth.data()) {
        if (l >= num_labels) throw std::invalid_argument("render_proba: label out of range");
    }
}

} // namespace

void Scene::validate(std::uint32_t num_labels) const
{
    std::unordered_set<std::uint32_t> seen;
    for (const auto& obj : objects) {
        if (obj.label.value == 0 || obj.label.value >= num_labels)
            throw std::invalid_argument("scene: object label " + std::to_string(obj.label.value) +
                                        " outside 1.." + std::to_string(num_labels - 1));
        if (!seen.insert(obj.label.value).second)
            throw std::invalid_argument("scene: duplicate object label " +
                                        std::to_string(obj.label.value));
    }
}

const SceneObject* Scene::find(LabelId label) const
{
    for (const auto& obj : objects) {
        if (obj.label == label) return &obj;
    }
    return nullptr;
}

void NoiseModel::validate() const
{
    if (!(confidence > 0.5 && confidence < 1.0))
        throw std::invalid_argument("noise: confidence must lie in (0.5, 1)");
    if (!(flip_rate >= 0.0 && flip_rate < 0.5))
        throw std::invalid_argument("noise: flip_rate must lie in [0, 0.5)");
}

void Trajectory::validate() const
{
    if (waypoints.empty()) throw std::invalid_argument("trajectory: no waypoints");
    for (const auto& wp : waypoints) {
        wp.pose.validate();
        if (wp.hold_frames < 1) throw std::invalid_argument("trajectory: hold_frames must be >= 1");
    }
    if (transition_frames < 0) throw std::invalid_argument("trajectory: negative transition_frames");
    if (!(frame_interval > 0.0)) throw std::invalid_argument("trajectory: frame_interval must be > 0");
}

std::vector<TrajectoryStep> expand_trajectory(const Trajectory& trajectory)
{
    trajectory.validate();
    constexpr std::uint64_t kTransitionBit = 1ull << 62;
    std::vector<TrajectoryStep> steps;
    auto push = [&](const Pose& pose, int view, bool transition, std::uint64_t id) {
        const double t = trajectory.start_time +
                         static_cast<double>(steps.size()) * trajectory.frame_interval;
        steps.push_back({pose, t, view, transition, id});
    };
    for (std::size_t w = 0; w < trajectory.waypoints.size(); ++w) {
        const auto& wp = trajectory.waypoints[w];
        const int view = static_cast<int>(w);
        if (w > 0) {
            const auto& from = trajectory.waypoints[w - 1].pose;
            const int n = trajectory.transition_frames;
            for (int j = 1; j <= n; ++j)
                push(Pose::interpolate(from, wp.pose, static_cast<double>(j) / (n + 1)), view, true,
                     kTransitionBit | (static_cast<std::uint64_t>(w) << 32) | static_cast<std::uint64_t>(j));
        }
        for (int k = 0; k < wp.hold_frames; ++k)
            push(wp.pose, view, false, (static_cast<std::uint64_t>(w) << 32) | static_cast<std::uint64_t>(k));
    }
    return steps;
}

RenderedView render(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr)
{
    RenderedView out{DepthImage(intr.height, intr.width), LabelImage(intr.height, intr.width)};
    const auto n = static_cast<std::int64_t>(intr.height) * intr.width;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const int v = static_cast<int>(i / intr.width);
        const int u = static_cast<int>(i % intr.width);
        const Hit hit = trace_pixel(scene, pose, intr, v, u);
        out.depth(v, u) = hit.depth;
        out.labels(v, u) = hit.label;
    }
    return out;
}

DepthImage render_depth(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr)
{
    return render(scene, pose, intr).depth;
}

LabelImage render_labels(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr)
{
    return render(scene, pose, intr).labels;
}

ClassImage render_proba(const LabelImage& truth, const NoiseModel& noise,
                        std::uint32_t num_labels, std::uint64_t capture_id)
{
    noise.validate();
    check_truth(truth, num_labels);
    const PixelMass mass = pixel_mass(noise.confidence, num_labels);
    ClassImage out(truth.height(), truth.width(), static_cast<int>(num_labels));
    const auto labels = truth.data();
    const auto n = static_cast<std::int64_t>(labels.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        proba_pixel(labels[i], static_cast<std::size_t>(i), noise, num_labels, capture_id, mass,
                    out.pixel(static_cast<std::size_t>(i)));
    return out;
}

std::vector<SimulatedFrame> simulate(const Scene& scene, const Trajectory& trajectory,
                                     const CameraIntrinsics& intr, const NoiseModel& noise,
                                     std::uint32_t num_labels)
{
    scene.validate(num_labels);
    intr.validate();
    noise.validate();
    const auto steps = expand_trajectory(trajectory);

    std::vector<SimulatedFrame> frames(steps.size());
    const auto n = static_cast<std::int64_t>(steps.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < n; ++k) {
        const auto& step = steps[k];
        RenderedView view = render(scene, step.pose, intr);
        for (auto& d : view.depth.data()) {
            const double mm = std::round(d * 1000.0);
            d = mm <= 65535.0 ? mm / 1000.0 : 0.0;
        }
        auto& f = frames[k];
        f.frame.timestamp = step.timestamp;
        f.frame.pose = step.pose;
        f.frame.intrinsics = intr;
        f.frame.kind = ScoreKind::Probability;
        f.frame.scores = render_proba(view.labels, noise, num_labels, step.capture_id);
        f.frame.depth = std::move(view.depth);
        f.truth = std::move(view.labels);
        f.view = step.view;
        f.transition = step.transition;
    }
    return frames;
}

namespace serial {

RenderedView render(const Scene& scene, const Pose& pose, const CameraIntrinsics& intr)
{
    RenderedView out{DepthImage(intr.height, intr.width), LabelImage(intr.height, intr.width)};
    for (int v = 0; v < intr.height; ++v) {
        for (int u = 0; u < intr.width; ++u) {
            const Hit hit = trace_pixel(scene, pose, intr, v, u);
            out.depth(v, u) = hit.depth;
            out.labels(v, u) = hit.label;
        }
    }
    return out;
}

ClassImage render_proba(const LabelImage& truth, const NoiseModel& noise,
                        std::uint32_t num_labels, std::uint64_t capture_id)
{
    noise.validate();
    check_truth(truth, num_labels);
    const PixelMass mass = pixel_mass(noise.confidence, num_labels);
    ClassImage out(truth.height(), truth.width(), static_cast<int>(num_labels));
    for (std::size_t i = 0; i < truth.pixel_count(); ++i)
        proba_pixel(truth.data()[i], i, noise, num_labels, capture_id, mass, out.pixel(i));
    return out;
}

} // namespace serial
} // namespace labelgrid
