#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "labelgrid/fusion.hpp"
#include "labelgrid/label_grid.hpp"
#include "labelgrid/simulator.hpp"

namespace labelgrid {

// Every tunable of a fuse run; serialized into the stats output.
struct RunConfig {
    GridConfig grid;
    FusionConfig fusion;

    nlohmann::json to_json() const;
};

struct SimulateOptions {
    std::filesystem::path scene;
    std::filesystem::path trajectory;
    std::filesystem::path out_dir;
    NoiseModel noise;
    std::uint32_t num_labels = 40;
};

// Returns the number of frames written.
std::size_t run_simulate(const SimulateOptions& opts);

struct FuseOptions {
    std::filesystem::path manifest;
    std::filesystem::path out_snapshot;
    RunConfig config;
    // When set, a snapshot is written after the last frame of every view.
    std::optional<std::filesystem::path> view_snapshot_dir;
};

// Returns {stats..., config} as written to stdout by the CLI.
nlohmann::json run_fuse(const FuseOptions& opts);

struct EvalOptions {
    std::filesystem::path snapshot;
    std::filesystem::path gt_boxes;
    LabelId label{1};
    std::optional<std::filesystem::path> curve_dir;
    std::optional<std::filesystem::path> curve_csv;
};

nlohmann::json evaluate_grid(const LabelOccupancyGrid& grid, const Box3& gt, LabelId label);
nlohmann::json run_eval(const EvalOptions& opts);

struct ExportOptions {
    std::filesystem::path snapshot;
    std::filesystem::path out;
    LabelId label{1};
    double threshold = 0.5;
};

// Returns the number of vertices written.
std::size_t run_export(const ExportOptions& opts);

std::string view_snapshot_name(int view);

} // namespace labelgrid
