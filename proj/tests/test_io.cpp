#include "doctest.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "labelgrid/io.hpp"
#include "labelgrid/log_odds.hpp"

using namespace labelgrid;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("labelgrid_test_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("pgm16 round trip and byte layout")
{
    const auto dir = scratch("pgm");
    Image<std::uint16_t> img(2, 3);
    const std::uint16_t values[] = {0, 1, 256, 65535, 1000, 4660};
    std::copy(std::begin(values), std::end(values), img.data().begin());
    write_pgm16(dir / "a.pgm", img);
    const std::string bytes = slurp(dir / "a.pgm");
    const std::string header = "P5\n3 2\n65535\n";
    REQUIRE(bytes.size() == header.size() + 12);
    CHECK(bytes.substr(0, header.size()) == header);
    // big-endian 0x1234
    CHECK(static_cast<unsigned char>(bytes[header.size() + 10]) == 0x12);
    CHECK(static_cast<unsigned char>(bytes[header.size() + 11]) == 0x34);
    CHECK(read_pgm16(dir / "a.pgm") == img);
}

TEST_CASE("pgm16 reader accepts comments and rejects bad files")
{
    const auto dir = scratch("pgm_bad");
    write_text_file(dir / "c.pgm", std::string("P5\n# made by hand\n1 1\n65535\n") + '\x01' + '\x02');
    CHECK(read_pgm16(dir / "c.pgm")(0, 0) == 0x0102);
    write_text_file(dir / "p2.pgm", "P2\n1 1\n65535\n7\n");
    CHECK_THROWS_AS(read_pgm16(dir / "p2.pgm"), FormatError);
    write_text_file(dir / "8bit.pgm", std::string("P5\n1 1\n255\n") + '\x07');
    CHECK_THROWS_AS(read_pgm16(dir / "8bit.pgm"), FormatError);
    write_text_file(dir / "short.pgm", std::string("P5\n2 2\n65535\n") + "abc");
    CHECK_THROWS_AS(read_pgm16(dir / "short.pgm"), FormatError);
    CHECK_THROWS_AS(read_pgm16(dir / "missing.pgm"), FormatError);
}

TEST_CASE("depth pgm stores millimeters")
{
    const auto dir = scratch("depth");
    DepthImage d(1, 4);
    d(0, 0) = 0.0;
    d(0, 1) = 0.5;
    d(0, 2) = 1.2344;
    d(0, 3) = 70.0;  // beyond the 16-bit mm range: no return
    write_depth_pgm(dir / "d.pgm", d);
    const auto back = read_depth_pgm(dir / "d.pgm");
    CHECK(back(0, 0) == 0.0);
    CHECK(back(0, 1) == 0.5);
    CHECK(back(0, 2) == 1.234);
    CHECK(back(0, 3) == 0.0);
}

TEST_CASE("probimg round trip at f32 precision")
{
    const auto dir = scratch("prob");
    ClassImage img(2, 2, 3);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        auto px = img.pixel(i);
        px[0] = 0.1 * static_cast<double>(i);
        px[1] = 0.25;
        px[2] = 1.0 / 3.0;
    }
    write_probimg(dir / "p.bin", img);
    const std::string bytes = slurp(dir / "p.bin");
    const std::string header = "PROBIMG1 2 2 3\n";
    REQUIRE(bytes.size() == header.size() + 12 * 4);
    CHECK(bytes.substr(0, header.size()) == header);
    float second;
    std::memcpy(&second, bytes.data() + header.size() + 4, 4);
    CHECK(second == 0.25f);

    const auto back = read_probimg(dir / "p.bin");
    REQUIRE(back.channels() == 3);
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        for (int c = 0; c < 3; ++c)
            CHECK(back.pixel(i)[c] == static_cast<double>(static_cast<float>(img.pixel(i)[c])));

    write_text_file(dir / "bad.bin", "PROBIMG1 2 2\n");
    CHECK_THROWS_AS(read_probimg(dir / "bad.bin"), FormatError);
    write_text_file(dir / "short.bin", "PROBIMG1 1 1 2\nabc");
    CHECK_THROWS_AS(read_probimg(dir / "short.bin"), FormatError);
}

TEST_CASE("malformed json reports the line")
{
    const auto dir = scratch("json");
    write_text_file(dir / "bad.json", "{\n  \"a\": 1,\n  \"b\": ]\n}\n");
    try {
        read_json_file(dir / "bad.json");
        FAIL("expected a FormatError");
    } catch (const FormatError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
    }
}

TEST_CASE("frame metadata round trip")
{
    const Pose pose = Pose::look_at(Vec3(0.1, -0.3, 0.2), Vec3(0, 0.3, 0.05));
    const CameraIntrinsics intr{60.0, 61.0, 31.5, 30.0, 64, 48};
    const auto j = frame_meta_to_json(1.25, pose, intr);
    CHECK(j.at("rotation").size() == 9);
    CHECK(j.at("rotation")[1].get<double>() == pose.rotation(0, 1));
    double t = 0.0;
    Pose p2;
    CameraIntrinsics i2;
    frame_meta_from_json(j, t, p2, i2);
    CHECK(t == 1.25);
    CHECK(p2 == pose);
    CHECK(i2 == intr);
}

TEST_CASE("manifest parsing resolves relative paths")
{
    const auto dir = scratch("manifest");
    const auto meta = frame_meta_to_json(0.5, Pose{}, CameraIntrinsics{});
    nlohmann::json doc = nlohmann::json::array();
    doc.push_back({{"depth_file", "d0.pgm"}, {"proba_file", "p0.bin"}, {"timestamp", 0.5}, {"pose", meta}, {"view", 2}});
    doc.push_back({{"depth_file", "/abs/d1.pgm"}, {"logits_file", "l1.bin"}, {"pose", meta}, {"transition", true}});
    write_text_file(dir / "manifest.json", doc.dump());
    const auto recs = read_manifest(dir / "manifest.json");
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].depth_file == dir / "d0.pgm");
    CHECK(recs[0].kind == ScoreKind::Probability);
    CHECK(recs[0].view == 2);
    CHECK_FALSE(recs[0].transition);
    CHECK(recs[1].depth_file == fs::path("/abs/d1.pgm"));
    CHECK(recs[1].kind == ScoreKind::Logit);
    CHECK(recs[1].timestamp == 0.5);
    CHECK(recs[1].transition);

    write_text_file(dir / "m2.json", R"([{"proba_file": "p.bin"}])");
    CHECK_THROWS_AS(read_manifest(dir / "m2.json"), FormatError);
    write_text_file(dir / "m3.json", R"({"frames": []})");
    CHECK_THROWS_AS(read_manifest(dir / "m3.json"), FormatError);
}

TEST_CASE("scene, trajectory and ground truth parsing")
{
    const auto scene = scene_from_json(nlohmann::json::parse(R"({
        "objects": [{"label": 5, "min": [0, 0, 0], "max": [1, 1, 1]}],
        "occluders": [{"min": [-1, -1, -1], "max": [2, 2, -0.5]}],
        "roi": {"min": [-1, -1, -1], "max": [2, 2, 2]}})"));
    REQUIRE(scene.objects.size() == 1);
    CHECK(scene.objects[0].label == LabelId{5});
    CHECK(scene.occluders.size() == 1);
    CHECK(scene_from_json(scene_to_json(scene)).roi == scene.roi);

    const auto tj = nlohmann::json::parse(R"({
        "frame_interval": 0.2, "transition_frames": 1,
        "intrinsics": {"fx": 32, "fy": 32, "cx": 16, "cy": 16, "width": 32, "height": 32},
        "waypoints": [
            {"eye": [0, -1, 0], "look_at": [0, 0, 0], "hold": 2},
            {"rotation": [1, 0, 0, 0, 1, 0, 0, 0, 1], "translation": [0, 0, -1], "hold": 1}]})");
    const auto traj = trajectory_from_json(tj);
    CHECK(traj.waypoints.size() == 2);
    CHECK(traj.transition_frames == 1);
    CHECK(traj.frame_interval == 0.2);
    CHECK(traj.waypoints[0].pose == Pose::look_at(Vec3(0, -1, 0), Vec3(0, 0, 0)));
    CHECK(traj.waypoints[1].pose.translation == Vec3(0, 0, -1));
    REQUIRE(trajectory_intrinsics(tj).has_value());
    CHECK(trajectory_intrinsics(tj)->width == 32);

    const auto gt = gt_boxes_from_json(nlohmann::json::parse(R"([{"label": 3, "min": [0, 0, 0], "max": [1, 2, 3]}])"));
    REQUIRE(gt.size() == 1);
    CHECK(gt[0].box.volume() == 6.0);
    CHECK_THROWS(box_from_json(nlohmann::json::parse(R"({"min": [1, 0, 0], "max": [0, 1, 1]})")));
}

TEST_CASE("ply export")
{
    GridConfig cfg;
    cfg.resolution = 0.5;
    cfg.num_labels = 3;
    LabelOccupancyGrid grid(cfg);
    const std::string empty = export_ply(grid, LabelId{1}, 0.5);
    CHECK(empty.rfind("ply\nformat ascii 1.0\nelement vertex 0\n", 0) == 0);
    CHECK(empty.find("property float probability\nend_header\n") != std::string::npos);

    grid.update(VoxelKey{1, 0, -1}, LabelId{1}, 0.9);
    grid.update(VoxelKey{2, 0, 0}, LabelId{1}, 0.6);
    grid.update(VoxelKey{3, 0, 0}, LabelId{1}, 0.5);
    const std::string one = export_ply(grid, LabelId{1}, 0.7);
    CHECK(one.find("element vertex 1\n") != std::string::npos);
    CHECK(one.find("\n0.75 0.25 -0.25 0.9\n") != std::string::npos);
    CHECK(export_ply(grid, LabelId{1}, 0.5).find("element vertex 2\n") != std::string::npos);
    CHECK_THROWS_AS(export_ply(grid, LabelId{1}, 1.0), std::invalid_argument);
}

TEST_CASE("eval report fields")
{
    const auto j = eval_report_json(LabelId{4}, IouReport{1, 2, 3, 1.0 / 6.0}, std::nullopt, 0);
    CHECK(j.at("label") == 4);
    CHECK(j.at("centroid").is_null());
    CHECK(j.at("v_fn") == 3.0);
    CHECK(j.at("voxel_count") == 0);
}

TEST_CASE("write_simulation writes a loadable stream")
{
    const auto dir = scratch("sim");
    Scene s{{}, {}, Box3(Vec3(-1, -1, 0), Vec3(1, 1, 3))};
    s.objects.push_back({LabelId{1}, Box3(Vec3(-0.3, -0.3, 1.0), Vec3(0.3, 0.3, 1.5))});
    const CameraIntrinsics intr{8, 8, 4, 4, 8, 8};
    const auto frames = simulate(s, Trajectory{{{Pose{}, 2}}, 0, 0.1, 0.0}, intr, NoiseModel{}, 3);
    write_simulation(dir, frames);
    const auto recs = read_manifest(dir / "manifest.json");
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].labels_file.has_value());
    CHECK(read_label_pgm(*recs[1].labels_file) == frames[1].truth);
    const auto f = load_frame(recs[1]);
    CHECK(f.depth == frames[1].frame.depth);
    CHECK(f.pose == frames[1].frame.pose);
    CHECK(f.timestamp == frames[1].frame.timestamp);
    for (std::size_t i = 0; i < f.scores.pixel_count(); ++i)
        for (int c = 0; c < 3; ++c)
            CHECK(f.scores.pixel(i)[c] == static_cast<double>(static_cast<float>(frames[1].frame.scores.pixel(i)[c])));
}
