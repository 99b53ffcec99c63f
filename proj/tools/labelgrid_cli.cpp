// labelgrid: simulate | fuse | eval | export

#include <cstdlib>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "labelgrid/commands.hpp"
#include "labelgrid/io.hpp"

namespace {

using namespace labelgrid;

constexpr int kExitBadInput = 2;

double parse_double(const std::string& s)
{
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("not a number: " + s);
    return v;
}

Box3 parse_roi(const std::string& text)
{
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(parse_double(item));
    if (v.size() != 6) throw std::invalid_argument("--roi expects xmin,ymin,zmin,xmax,ymax,zmax");
    return Box3(Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-view label occupancy grid fusion toolkit"};
    app.require_subcommand(1);

    // simulate
    SimulateOptions sim;
    std::string confidence = "0.8", flip_rate = "0.05";
    auto* simulate = app.add_subcommand("simulate", "Render a synthetic frame stream");
    simulate->add_option("--scene", sim.scene, "Scene JSON")->required();
    simulate->add_option("--trajectory", sim.trajectory, "Trajectory JSON")->required();
    simulate->add_option("--out", sim.out_dir, "Output directory")->required();
    simulate->add_option("--seed", sim.noise.seed, "Noise seed")->capture_default_str();
    simulate->add_option("--confidence", confidence, "Probability of the top label")->capture_default_str();
    simulate->add_option("--flip-rate", flip_rate, "Chance a pixel's top label is wrong")->capture_default_str();
    simulate->add_option("--num-labels", sim.num_labels, "Classes including background")->capture_default_str();

    // fuse
    FuseOptions fuse;
    std::string clamp = "3.5", p_min = "0.001", linear_eps = "1e-3", angular_eps = "1e-3", roi,
                roi_scene, view_dir;
    auto* fuse_cmd = app.add_subcommand("fuse", "Fuse a frame stream into an LGRID1 snapshot");
    fuse_cmd->add_option("manifest", fuse.manifest, "Stream manifest JSON")->required();
    fuse_cmd->add_option("--out", fuse.out_snapshot, "Output snapshot")->required();
    fuse_cmd->add_option("--resolution", fuse.config.grid.resolution, "Voxel edge (m)")->capture_default_str();
    fuse_cmd->add_option("--num-labels", fuse.config.grid.num_labels, "Classes including background")
        ->capture_default_str();
    fuse_cmd->add_option("--clamp", clamp, "Log-odds bound, or inf")->capture_default_str();
    fuse_cmd->add_option("--p-min", p_min, "Measurement probability clamp")->capture_default_str();
    fuse_cmd->add_option("--linear-eps", linear_eps, "Stationary linear speed (m/s), or inf")
        ->capture_default_str();
    fuse_cmd->add_option("--angular-eps", angular_eps, "Stationary angular speed (rad/s), or inf")
        ->capture_default_str();
    fuse_cmd->add_option("--settle-frames", fuse.config.fusion.gate.settle_frames,
                         "Consecutive stationary frames before fusing")
        ->capture_default_str();
    fuse_cmd->add_option("--roi", roi, "xmin,ymin,zmin,xmax,ymax,zmax");
    fuse_cmd->add_option("--roi-from-scene", roi_scene, "Take the roi from a scene JSON");
    fuse_cmd->add_option("--view-snapshots", view_dir, "Write a snapshot after every view");

    // eval
    EvalOptions eval;
    std::uint32_t eval_label = 1;
    std::string curve_dir, curve_csv;
    auto* eval_cmd = app.add_subcommand("eval", "IoU / centroid report for one label");
    eval_cmd->add_option("snapshot", eval.snapshot, "LGRID1 snapshot")->required();
    eval_cmd->add_option("--gt", eval.gt_boxes, "Ground-truth boxes JSON")->required();
    eval_cmd->add_option("--label", eval_label, "Label to evaluate")->capture_default_str();
    eval_cmd->add_option("--curve-dir", curve_dir, "Directory of per-view snapshots");
    eval_cmd->add_option("--curve-csv", curve_csv, "Write the per-view curve as CSV");

    // export
    ExportOptions exp;
    std::uint32_t export_label = 1;
    auto* export_cmd = app.add_subcommand("export", "Voxel centers of a label as ASCII PLY");
    export_cmd->add_option("snapshot", exp.snapshot, "LGRID1 snapshot")->required();
    export_cmd->add_option("--label", export_label, "Label")->capture_default_str();
    export_cmd->add_option("--threshold", exp.threshold, "Probability threshold")->capture_default_str();
    export_cmd->add_option("--out", exp.out, "Output PLY")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            sim.noise.confidence = parse_double(confidence);
            sim.noise.flip_rate = parse_double(flip_rate);
            const auto n = run_simulate(sim);
            std::cout << nlohmann::json{{"frames", n}, {"out", sim.out_dir.string()}}.dump() << '\n';
        } else if (*fuse_cmd) {
            fuse.config.grid.clamp = parse_double(clamp);
            fuse.config.fusion.p_min = parse_double(p_min);
            fuse.config.fusion.gate.linear_eps = parse_double(linear_eps);
            fuse.config.fusion.gate.angular_eps = parse_double(angular_eps);
            if (!roi.empty()) fuse.config.grid.roi = parse_roi(roi);
            if (!roi_scene.empty())
                fuse.config.grid.roi = box_from_json(read_json_file(roi_scene).at("roi"));
            if (!view_dir.empty()) fuse.view_snapshot_dir = view_dir;
            std::cout << run_fuse(fuse).dump(2) << '\n';
        } else if (*eval_cmd) {
            eval.label = LabelId{eval_label};
            if (!curve_dir.empty()) eval.curve_dir = curve_dir;
            if (!curve_csv.empty()) eval.curve_csv = curve_csv;
            std::cout << run_eval(eval).dump(2) << '\n';
        } else if (*export_cmd) {
            exp.label = LabelId{export_label};
            const auto n = run_export(exp);
            std::cout << nlohmann::json{{"vertices", n}, {"out", exp.out.string()}}.dump() << '\n';
        }
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}
