#include "labelgrid/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "labelgrid/io.hpp"
#include "labelgrid/log_odds.hpp"
#include "labelgrid/metrics.hpp"
#include "labelgrid/snapshot.hpp"

namespace labelgrid {

using nlohmann::json;

namespace {

// JSON has no infinity; keep it readable in provenance output.
json number_or_inf(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

template <typename F>
auto with_file_context(const fs::path& path, F&& fn)
{
    try {
        return fn();
    } catch (const FormatError&) {
        throw;
    } catch (const json::exception& e) {
        throw FormatError(path.string(), 0, e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(path.string(), 0, e.what());
    }
}

} // namespace

json RunConfig::to_json() const
{
    return json{{"resolution", grid.resolution},
                {"num_labels", grid.num_labels},
                {"clamp", number_or_inf(grid.clamp)},
                {"p_min", fusion.p_min},
                {"linear_eps", number_or_inf(fusion.gate.linear_eps)},
                {"angular_eps", number_or_inf(fusion.gate.angular_eps)},
                {"settle_frames", fusion.gate.settle_frames},
                {"roi", grid.roi ? box_to_json(*grid.roi) : json(nullptr)}};
}

std::string view_snapshot_name(int view)
{
    std::ostringstream s;
    s << "view_" << std::setw(3) << std::setfill('0') << view << ".lgrid";
    return s.str();
}

std::size_t run_simulate(const SimulateOptions& opts)
{
    const Scene scene = with_file_context(opts.scene, [&] {
        Scene s = scene_from_json(read_json_file(opts.scene));
        s.validate(opts.num_labels);
        return s;
    });
    const json traj_doc = read_json_file(opts.trajectory);
    const Trajectory trajectory =
        with_file_context(opts.trajectory, [&] { return trajectory_from_json(traj_doc); });
    const CameraIntrinsics intr = with_file_context(opts.trajectory, [&] {
        return trajectory_intrinsics(traj_doc).value_or(CameraIntrinsics{});
    });

    const auto frames = simulate(scene, trajectory, intr, opts.noise, opts.num_labels);
    write_simulation(opts.out_dir, frames);
    return frames.size();
}

json run_fuse(const FuseOptions& opts)
{
    const auto records = read_manifest(opts.manifest);
    LabelOccupancyGrid grid(opts.config.grid);
    FusionPipeline pipeline(grid, opts.config.fusion);
    if (opts.view_snapshot_dir) fs::create_directories(*opts.view_snapshot_dir);

    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (pipeline.admit(rec.pose, rec.timestamp) == FrameDisposition::Fused)
            pipeline.integrate(with_file_context(rec.depth_file, [&] { return load_frame(rec); }));

        const bool view_ends = i + 1 == records.size() || records[i + 1].view != rec.view;
        if (opts.view_snapshot_dir && rec.view && view_ends)
            save_snapshot(grid, *opts.view_snapshot_dir / view_snapshot_name(*rec.view));
    }
    save_snapshot(grid, opts.out_snapshot);

    const auto& s = pipeline.stats();
    return json{{"frames_total", s.frames_total},
                {"frames_fused", s.frames_fused},
                {"frames_gated", s.frames_gated},
                {"pixels_skipped_depth", s.pixels_skipped_depth},
                {"pixels_skipped_roi", s.pixels_skipped_roi},
                {"voxel_measurements", s.voxel_measurements},
                {"updates_discarded", s.updates_discarded},
                {"voxels", grid.size()},
                {"config", opts.config.to_json()}};
}

json evaluate_grid(const LabelOccupancyGrid& grid, const Box3& gt, LabelId label)
{
    const auto voxels = grid.segment(label);
    return eval_report_json(label, iou_3d(voxels, grid.resolution(), gt), grid.centroid(label),
                            voxels.size());
}

json run_eval(const EvalOptions& opts)
{
    const auto boxes =
        with_file_context(opts.gt_boxes, [&] { return gt_boxes_from_json(read_json_file(opts.gt_boxes)); });
    const auto it = std::find_if(boxes.begin(), boxes.end(),
                                 [&](const GroundTruthBox& b) { return b.label == opts.label; });
    if (it == boxes.end())
        throw FormatError(opts.gt_boxes.string(), 0,
                          "no ground-truth box for label " + std::to_string(opts.label.value));

    json report = evaluate_grid(load_snapshot(opts.snapshot), it->box, opts.label);
    if (!opts.curve_dir) return report;

    std::vector<fs::path> snapshots;
    for (const auto& entry : fs::directory_iterator(*opts.curve_dir)) {
        const auto name = entry.path().filename().string();
        if (name.starts_with("view_") && entry.path().extension() == ".lgrid")
            snapshots.push_back(entry.path());
    }
    std::sort(snapshots.begin(), snapshots.end());

    json curve = json::array();
    std::ostringstream csv;
    csv << std::setprecision(17) << "view,voxel_count,v_tp,v_fp,v_fn,iou\n";
    for (const auto& path : snapshots) {
        json row = evaluate_grid(load_snapshot(path), it->box, opts.label);
        const int view = std::stoi(path.stem().string().substr(5));
        row["view"] = view;
        csv << view << ',' << row["voxel_count"].get<std::size_t>() << ',' << row["v_tp"].get<double>()
            << ',' << row["v_fp"].get<double>() << ',' << row["v_fn"].get<double>() << ','
            << row["iou"].get<double>() << '\n';
        curve.push_back(std::move(row));
    }
    report["curve"] = std::move(curve);
    if (opts.curve_csv) write_text_file(*opts.curve_csv, csv.str());
    return report;
}

std::size_t run_export(const ExportOptions& opts)
{
    const auto grid = load_snapshot(opts.snapshot);
    const std::string ply = export_ply(grid, opts.label, opts.threshold);
    write_text_file(opts.out, ply);
    const double cut = logit(opts.threshold);
    std::size_t vertices = 0;
    for (const auto& key : grid.sorted_keys())
        vertices += grid.log_odds(key, opts.label) > cut ? 1 : 0;
    return vertices;
}

} // namespace labelgrid
