#include "labelgrid/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace labelgrid {
namespace {

void check_finite_scores(const ClassImage& logits, std::size_t bad)
{
    if (bad == std::numeric_limits<std::size_t>::max()) return;
    const auto v = bad / static_cast<std::size_t>(logits.width());
    const auto u = bad % static_cast<std::size_t>(logits.width());
    throw std::invalid_argument("softmax: non-finite score at pixel (v=" + std::to_string(v) +
                                ", u=" + std::to_string(u) + ")");
}

bool pixel_finite(std::span<const double> px)
{
    return std::all_of(px.begin(), px.end(), [](double s) { return std::isfinite(s); });
}

void softmax_pixel(std::span<const double> in, std::span<double> out)
{
    const double peak = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
        out[c] = std::exp(in[c] - peak);
        sum += out[c];
    }
    for (auto& p : out) p /= sum;
}

enum class PixelStatus : std::uint8_t { Used, NoDepth, OutsideRoi };

struct Binned {
    PixelStatus status;
    VoxelKey key;
};

Binned bin_pixel(const SensorFrame& frame, int v, int u, double resolution,
                 const std::optional<Box3>& roi)
{
    const auto p_cam = deproject(u, v, frame.depth(v, u), frame.intrinsics);
    if (!p_cam) return {PixelStatus::NoDepth, {}};
    const VoxelKey key = key_from_point(frame.pose.to_world(*p_cam), resolution);
    if (roi && !roi->contains(voxel_center(key, resolution))) return {PixelStatus::OutsideRoi, key};
    return {PixelStatus::Used, key};
}

const ClassImage& probabilities_of(const SensorFrame& frame, ClassImage& scratch, bool parallel)
{
    if (frame.kind == ScoreKind::Probability) return frame.scores;
    scratch = parallel ? labelgrid::softmax_image(frame.scores)
                       : serial::softmax_image(frame.scores);
    return scratch;
}

void count_status(Registration& out, PixelStatus s)
{
    switch (s) {
    case PixelStatus::Used: ++out.pixels_used; break;
    case PixelStatus::NoDepth: ++out.pixels_skipped_depth; break;
    case PixelStatus::OutsideRoi: ++out.pixels_skipped_roi; break;
    }
}

} // namespace

void validate_frame(const SensorFrame& frame)
{
    frame.intrinsics.validate();
    frame.pose.validate();
    const int h = frame.intrinsics.height;
    const int w = frame.intrinsics.width;
    if (frame.depth.height() != h || frame.depth.width() != w)
        throw std::invalid_argument("frame: depth image size does not match intrinsics");
    if (frame.scores.height() != h || frame.scores.width() != w)
        throw std::invalid_argument("frame: score image size does not match intrinsics");
    if (frame.scores.channels() < 2)
        throw std::invalid_argument("frame: score image needs at least 2 channels");
    if (frame.kind != ScoreKind::Probability) return;
    for (std::size_t i = 0; i < frame.scores.pixel_count(); ++i) {
        const auto px = frame.scores.pixel(i);
        double sum = 0.0;
        for (double p : px) {
            if (!(p >= 0.0 && p <= 1.0))
                throw std::invalid_argument("frame: probability outside [0, 1] at pixel " +
                                            std::to_string(i));
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-5)
            throw std::invalid_argument("frame: probabilities do not sum to 1 at pixel " +
                                        std::to_string(i));
    }
}

ClassImage softmax_image(const ClassImage& logits)
{
    const auto n = static_cast<std::int64_t>(logits.pixel_count());
    std::int64_t bad = n;
#pragma omp parallel for reduction(min : bad) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        if (!pixel_finite(logits.pixel(static_cast<std::size_t>(i)))) bad = std::min(bad, i);
    }
    if (bad < n) check_finite_scores(logits, static_cast<std::size_t>(bad));

    ClassImage out(logits.height(), logits.width(), logits.channels());
    if (logits.channels() == 0) return out;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        softmax_pixel(logits.pixel(static_cast<std::size_t>(i)),
                      out.pixel(static_cast<std::size_t>(i)));
    return out;
}

Registration register_frame(const SensorFrame& frame, double resolution,
                            const std::optional<Box3>& roi)
{
    ClassImage scratch;
    const ClassImage& proba = probabilities_of(frame, scratch, true);
    const int w = frame.depth.width();
    const auto n = static_cast<std::int64_t>(frame.depth.pixel_count());
    const auto channels = static_cast<std::size_t>(proba.channels());

    std::vector<Binned> binned(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        binned[i] = bin_pixel(frame, static_cast<int>(i / w), static_cast<int>(i % w), resolution, roi);

    Registration out;
    std::vector<std::pair<VoxelKey, std::uint32_t>> contributors;
    contributors.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        count_status(out, binned[i].status);
        if (binned[i].status == PixelStatus::Used)
            contributors.emplace_back(binned[i].key, static_cast<std::uint32_t>(i));
    }
    // Pixel index breaks ties, so each voxel's contributors stay in pixel order.
    std::sort(contributors.begin(), contributors.end());

    std::vector<std::size_t> run_start;
    for (std::size_t i = 0; i < contributors.size(); ++i) {
        if (i == 0 || contributors[i].first != contributors[i - 1].first) run_start.push_back(i);
    }
    run_start.push_back(contributors.size());

    const auto runs = static_cast<std::int64_t>(run_start.size()) - 1;
    out.measurements.resize(static_cast<std::size_t>(std::max<std::int64_t>(runs, 0)));
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t r = 0; r < runs; ++r) {
        auto& m = out.measurements[r];
        m.key = contributors[run_start[r]].first;
        m.label_p.assign(channels, 0.0);
        for (std::size_t i = run_start[r]; i < run_start[r + 1]; ++i) {
            const auto px = proba.pixel(contributors[i].second);
            for (std::size_t c = 0; c < channels; ++c) m.label_p[c] += px[c];
        }
        const auto count = static_cast<double>(run_start[r + 1] - run_start[r]);
        for (auto& p : m.label_p) p /= count;
    }
    return out;
}

namespace serial {

ClassImage softmax_image(const ClassImage& logits)
{
    for (std::size_t i = 0; i < logits.pixel_count(); ++i) {
        if (!pixel_finite(logits.pixel(i))) check_finite_scores(logits, i);
    }
    ClassImage out(logits.height(), logits.width(), logits.channels());
    if (logits.channels() == 0) return out;
    for (std::size_t i = 0; i < logits.pixel_count(); ++i) softmax_pixel(logits.pixel(i), out.pixel(i));
    return out;
}

Registration register_frame(const SensorFrame& frame, double resolution,
                            const std::optional<Box3>& roi)
{
    ClassImage scratch;
    const ClassImage& proba = probabilities_of(frame, scratch, false);
    const auto channels = static_cast<std::size_t>(proba.channels());

    struct Accum {
        std::vector<double> sum;
        std::size_t count = 0;
    };
    std::map<VoxelKey, Accum> bins;
    Registration out;
    for (int v = 0; v < frame.depth.height(); ++v) {
        for (int u = 0; u < frame.depth.width(); ++u) {
            const Binned b = bin_pixel(frame, v, u, resolution, roi);
            count_status(out, b.status);
            if (b.status != PixelStatus::Used) continue;
            auto& acc = bins[b.key];
            if (acc.sum.empty()) acc.sum.assign(channels, 0.0);
            const auto px = proba.pixel(v, u);
            for (std::size_t c = 0; c < channels; ++c) acc.sum[c] += px[c];
            ++acc.count;
        }
    }
    out.measurements.reserve(bins.size());
    for (auto& [key, acc] : bins) {
        for (auto& s : acc.sum) s /= static_cast<double>(acc.count);
        out.measurements.push_back({key, std::move(acc.sum)});
    }
    return out;
}

} // namespace serial
} // namespace labelgrid
