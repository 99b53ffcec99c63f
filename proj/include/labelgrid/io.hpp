#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "labelgrid/camera.hpp"
#include "labelgrid/image.hpp"
#include "labelgrid/label_grid.hpp"
#include "labelgrid/metrics.hpp"
#include "labelgrid/registration.hpp"
#include "labelgrid/simulator.hpp"

namespace labelgrid {

namespace fs = std::filesystem;

// Malformed or invalid input file. line is 1-based, 0 when unknown.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& file, std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

nlohmann::json read_json_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);

// 16-bit big-endian binary PGM ("P5", maxval 65535).
Image<std::uint16_t> read_pgm16(const fs::path& path);
void write_pgm16(const fs::path& path, const Image<std::uint16_t>& image);

// Depth in meters <-> PGM millimeters (0 = no return).
DepthImage read_depth_pgm(const fs::path& path);
void write_depth_pgm(const fs::path& path, const DepthImage& depth);

LabelImage read_label_pgm(const fs::path& path);
void write_label_pgm(const fs::path& path, const LabelImage& labels);

// "PROBIMG1 <H> <W> <C>\n" then H*W*C little-endian f32, (v, u, c) order.
ClassImage read_probimg(const fs::path& path);
void write_probimg(const fs::path& path, const ClassImage& image);

// {timestamp, fx, fy, cx, cy, width, height, rotation[9] row-major, translation[3]}
nlohmann::json frame_meta_to_json(double timestamp, const Pose& pose, const CameraIntrinsics& intr);
void frame_meta_from_json(const nlohmann::json& j, double& timestamp, Pose& pose,
                          CameraIntrinsics& intr);

struct FrameRecord {
    fs::path depth_file;
    fs::path scores_file;
    ScoreKind kind = ScoreKind::Probability;
    std::optional<fs::path> labels_file;
    double timestamp = 0.0;
    Pose pose;
    CameraIntrinsics intrinsics;
    std::optional<int> view;
    bool transition = false;
};

// Relative paths in the manifest resolve against its directory.
std::vector<FrameRecord> read_manifest(const fs::path& path);
SensorFrame load_frame(const FrameRecord& record);

// Writes depth/proba/label files plus manifest.json into dir.
void write_simulation(const fs::path& dir, const std::vector<SimulatedFrame>& frames);

Scene scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const Scene& scene);

// Waypoints are {eye, look_at, up?, hold} or {rotation[9], translation[3], hold}.
Trajectory trajectory_from_json(const nlohmann::json& j);
std::optional<CameraIntrinsics> trajectory_intrinsics(const nlohmann::json& j);

struct GroundTruthBox {
    LabelId label;
    Box3 box;
};
std::vector<GroundTruthBox> gt_boxes_from_json(const nlohmann::json& j);

nlohmann::json box_to_json(const Box3& box);
Box3 box_from_json(const nlohmann::json& j);

nlohmann::json eval_report_json(LabelId label, const IouReport& report,
                                const std::optional<Vec3>& centroid, std::size_t voxel_count);

// ASCII PLY of voxel centers with probability > threshold for label.
std::string export_ply(const LabelOccupancyGrid& grid, LabelId label, double threshold);

} // namespace labelgrid
