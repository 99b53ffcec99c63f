#include "labelgrid/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "labelgrid/log_odds.hpp"

namespace labelgrid {

using nlohmann::json;

namespace {

std::string read_all(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path.string(), 0, "cannot open file");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

Vec3 vec3_from_json(const json& j, const char* what)
{
    if (!j.is_array() || j.size() != 3)
        throw std::invalid_argument(std::string(what) + ": expected an array of 3 numbers");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec3_to_json(const Vec3& v)
{
    return json::array({v.x(), v.y(), v.z()});
}

// Reads the next whitespace-delimited PGM header token, skipping comments.
std::string pgm_token(const std::string& data, std::size_t& pos)
{
    while (pos < data.size()) {
        if (data[pos] == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
            ++pos;
        } else {
            break;
        }
    }
    const auto start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
}

int positive_int(const std::string& token, const fs::path& path, const char* what)
{
    try {
        std::size_t used = 0;
        const int v = std::stoi(token, &used);
        if (used == token.size() && v > 0) return v;
    } catch (const std::exception&) {
    }
    throw FormatError(path.string(), 1, std::string("bad ") + what + " '" + token + "'");
}

} // namespace

FormatError::FormatError(const std::string& file, std::size_t line, const std::string& what)
    : std::runtime_error(line > 0 ? file + ":" + std::to_string(line) + ": " + what
                                  : file + ": " + what),
      line_(line)
{
}

json read_json_file(const fs::path& path)
{
    const std::string text = read_all(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const auto offset = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + static_cast<std::size_t>(std::count(
                                  text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
        throw FormatError(path.string(), line, "malformed JSON");
    }
}

void write_text_file(const fs::path& path, const std::string& text)
{
    auto out = open_out(path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Image<std::uint16_t> read_pgm16(const fs::path& path)
{
    const std::string data = read_all(path);
    std::size_t pos = 0;
    if (pgm_token(data, pos) != "P5") throw FormatError(path.string(), 1, "not a binary PGM (P5)");
    const int width = positive_int(pgm_token(data, pos), path, "width");
    const int height = positive_int(pgm_token(data, pos), path, "height");
    if (pgm_token(data, pos) != "65535")
        throw FormatError(path.string(), 1, "expected 16-bit PGM (maxval 65535)");
    ++pos;  // single whitespace before the raster

    const std::size_t count = static_cast<std::size_t>(width) * height;
    if (data.size() < pos + 2 * count) throw FormatError(path.string(), 0, "truncated raster");
    Image<std::uint16_t> img(height, width);
    auto px = img.data();
    for (std::size_t i = 0; i < count; ++i) {
        const auto hi = static_cast<unsigned char>(data[pos + 2 * i]);
        const auto lo = static_cast<unsigned char>(data[pos + 2 * i + 1]);
        px[i] = static_cast<std::uint16_t>((hi << 8) | lo);
    }
    return img;
}

void write_pgm16(const fs::path& path, const Image<std::uint16_t>& image)
{
    auto out = open_out(path);
    out << "P5\n" << image.width() << ' ' << image.height() << "\n65535\n";
    std::string raster(image.pixel_count() * 2, '\0');
    const auto px = image.data();
    for (std::size_t i = 0; i < px.size(); ++i) {
        raster[2 * i] = static_cast<char>(px[i] >> 8);
        raster[2 * i + 1] = static_cast<char>(px[i] & 0xff);
    }
    out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

DepthImage read_depth_pgm(const fs::path& path)
{
    const auto mm = read_pgm16(path);
    DepthImage depth(mm.height(), mm.width());
    std::transform(mm.data().begin(), mm.data().end(), depth.data().begin(),
                   [](std::uint16_t v) { return static_cast<double>(v) / 1000.0; });
    return depth;
}

void write_depth_pgm(const fs::path& path, const DepthImage& depth)
{
    Image<std::uint16_t> mm(depth.height(), depth.width());
    std::transform(depth.data().begin(), depth.data().end(), mm.data().begin(), [](double d) {
        if (!std::isfinite(d) || d <= 0.0) return std::uint16_t{0};
        const double v = std::round(d * 1000.0);
        return v > 65535.0 ? std::uint16_t{0} : static_cast<std::uint16_t>(v);
    });
    write_pgm16(path, mm);
}

LabelImage read_label_pgm(const fs::path& path)
{
    const auto raw = read_pgm16(path);
    LabelImage labels(raw.height(), raw.width());
    std::copy(raw.data().begin(), raw.data().end(), labels.data().begin());
    return labels;
}

void write_label_pgm(const fs::path& path, const LabelImage& labels)
{
    Image<std::uint16_t> raw(labels.height(), labels.width());
    std::transform(labels.data().begin(), labels.data().end(), raw.data().begin(), [](std::uint32_t l) {
        if (l > 65535) throw std::invalid_argument("label does not fit a 16-bit PGM");
        return static_cast<std::uint16_t>(l);
    });
    write_pgm16(path, raw);
}

ClassImage read_probimg(const fs::path& path)
{
    static_assert(std::endian::native == std::endian::little);
    const std::string data = read_all(path);
    const auto eol = data.find('\n');
    if (eol == std::string::npos) throw FormatError(path.string(), 1, "missing PROBIMG1 header");
    std::istringstream header(data.substr(0, eol));
    std::string magic;
    long long h = -1, w = -1, c = -1;
    header >> magic >> h >> w >> c;
    if (magic != "PROBIMG1" || !header || h < 0 || w < 0 || c <= 0)
        throw FormatError(path.string(), 1, "bad PROBIMG1 header");
    const std::size_t count = static_cast<std::size_t>(h) * w * c;
    if (data.size() - eol - 1 != count * sizeof(float))
        throw FormatError(path.string(), 0, "payload size does not match header");

    ClassImage img(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    auto values = img.data();
    const char* src = data.data() + eol + 1;
    for (std::size_t i = 0; i < count; ++i) {
        float f;
        std::memcpy(&f, src + i * sizeof(float), sizeof(float));
        values[i] = f;
    }
    return img;
}

void write_probimg(const fs::path& path, const ClassImage& image)
{
    auto out = open_out(path);
    out << "PROBIMG1 " << image.height() << ' ' << image.width() << ' ' << image.channels() << '\n';
    const auto values = image.data();
    std::string payload(values.size() * sizeof(float), '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto f = static_cast<float>(values[i]);
        std::memcpy(payload.data() + i * sizeof(float), &f, sizeof(float));
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

json frame_meta_to_json(double timestamp, const Pose& pose, const CameraIntrinsics& intr)
{
    json rot = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) rot.push_back(pose.rotation(r, c));
    return json{{"timestamp", timestamp},
                {"fx", intr.fx},
                {"fy", intr.fy},
                {"cx", intr.cx},
                {"cy", intr.cy},
                {"width", intr.width},
                {"height", intr.height},
                {"rotation", rot},
                {"translation", vec3_to_json(pose.translation)}};
}

void frame_meta_from_json(const json& j, double& timestamp, Pose& pose, CameraIntrinsics& intr)
{
    timestamp = j.at("timestamp").get<double>();
    intr.fx = j.at("fx").get<double>();
    intr.fy = j.at("fy").get<double>();
    intr.cx = j.at("cx").get<double>();
    intr.cy = j.at("cy").get<double>();
    intr.width = j.at("width").get<int>();
    intr.height = j.at("height").get<int>();
    const auto& rot = j.at("rotation");
    if (!rot.is_array() || rot.size() != 9)
        throw std::invalid_argument("rotation: expected 9 row-major numbers");
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) pose.rotation(r, c) = rot[3 * r + c].get<double>();
    pose.translation = vec3_from_json(j.at("translation"), "translation");
    intr.validate();
    pose.validate();
}

std::vector<FrameRecord> read_manifest(const fs::path& path)
{
    const json doc = read_json_file(path);
    const fs::path base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        const fs::path f(p);
        return f.is_absolute() ? f : base / f;
    };
    if (!doc.is_array()) throw FormatError(path.string(), 1, "manifest must be a JSON array");

    std::vector<FrameRecord> records;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& r = doc[i];
        try {
            FrameRecord rec;
            rec.depth_file = resolve(r.at("depth_file").get<std::string>());
            if (r.contains("proba_file")) {
                rec.scores_file = resolve(r.at("proba_file").get<std::string>());
                rec.kind = ScoreKind::Probability;
            } else {
                rec.scores_file = resolve(r.at("logits_file").get<std::string>());
                rec.kind = ScoreKind::Logit;
            }
            if (r.contains("labels_file")) rec.labels_file = resolve(r.at("labels_file").get<std::string>());
            double meta_time = 0.0;
            frame_meta_from_json(r.at("pose"), meta_time, rec.pose, rec.intrinsics);
            rec.timestamp = r.contains("timestamp") ? r.at("timestamp").get<double>() : meta_time;
            if (r.contains("view")) rec.view = r.at("view").get<int>();
            rec.transition = r.value("transition", false);
            records.push_back(std::move(rec));
        } catch (const std::exception& e) {
            throw FormatError(path.string(), 0, "frame record " + std::to_string(i) + ": " + e.what());
        }
    }
    return records;
}

SensorFrame load_frame(const FrameRecord& record)
{
    SensorFrame f;
    f.timestamp = record.timestamp;
    f.pose = record.pose;
    f.intrinsics = record.intrinsics;
    f.depth = read_depth_pgm(record.depth_file);
    f.scores = read_probimg(record.scores_file);
    f.kind = record.kind;
    return f;
}

void write_simulation(const fs::path& dir, const std::vector<SimulatedFrame>& frames)
{
    fs::create_directories(dir);
    json manifest = json::array();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        std::ostringstream stem;
        stem << std::setw(5) << std::setfill('0') << i;
        const std::string depth = "depth_" + stem.str() + ".pgm";
        const std::string proba = "proba_" + stem.str() + ".bin";
        const std::string labels = "labels_" + stem.str() + ".pgm";
        const auto& sim = frames[i];
        write_depth_pgm(dir / depth, sim.frame.depth);
        write_probimg(dir / proba, sim.frame.scores);
        write_label_pgm(dir / labels, sim.truth);
        manifest.push_back(json{
            {"depth_file", depth},
            {"proba_file", proba},
            {"labels_file", labels},
            {"timestamp", sim.frame.timestamp},
            {"pose", frame_meta_to_json(sim.frame.timestamp, sim.frame.pose, sim.frame.intrinsics)},
            {"view", sim.view},
            {"transition", sim.transition}});
    }
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

json box_to_json(const Box3& box)
{
    return json{{"min", vec3_to_json(box.min)}, {"max", vec3_to_json(box.max)}};
}

Box3 box_from_json(const json& j)
{
    return Box3(vec3_from_json(j.at("min"), "min"), vec3_from_json(j.at("max"), "max"));
}

Scene scene_from_json(const json& j)
{
    Scene s;
    for (const auto& o : j.at("objects"))
        s.objects.push_back({LabelId{o.at("label").get<std::uint32_t>()}, box_from_json(o)});
    if (j.contains("occluders"))
        for (const auto& o : j.at("occluders")) s.occluders.push_back(box_from_json(o));
    s.roi = box_from_json(j.at("roi"));
    return s;
}

json scene_to_json(const Scene& scene)
{
    json objects = json::array();
    for (const auto& o : scene.objects) {
        json b = box_to_json(o.box);
        b["label"] = o.label.value;
        objects.push_back(b);
    }
    json occluders = json::array();
    for (const auto& o : scene.occluders) occluders.push_back(box_to_json(o));
    return json{{"objects", objects}, {"occluders", occluders}, {"roi", box_to_json(scene.roi)}};
}

Trajectory trajectory_from_json(const json& j)
{
    Trajectory t;
    t.frame_interval = j.value("frame_interval", t.frame_interval);
    t.transition_frames = j.value("transition_frames", t.transition_frames);
    t.start_time = j.value("start_time", t.start_time);
    for (const auto& w : j.at("waypoints")) {
        Waypoint wp;
        wp.hold_frames = w.value("hold", 1);
        if (w.contains("eye")) {
            const Vec3 up = w.contains("up") ? vec3_from_json(w.at("up"), "up") : Vec3::UnitZ();
            wp.pose = Pose::look_at(vec3_from_json(w.at("eye"), "eye"),
                                    vec3_from_json(w.at("look_at"), "look_at"), up);
        } else {
            CameraIntrinsics unused;
            double ts = 0.0;
            json meta = w;
            meta["timestamp"] = 0.0;
            for (const char* k : {"fx", "fy", "cx", "cy"}) meta[k] = 1.0;
            meta["width"] = 2;
            meta["height"] = 2;
            frame_meta_from_json(meta, ts, wp.pose, unused);
        }
        t.waypoints.push_back(wp);
    }
    t.validate();
    return t;
}

std::optional<CameraIntrinsics> trajectory_intrinsics(const json& j)
{
    if (!j.contains("intrinsics")) return std::nullopt;
    const auto& i = j.at("intrinsics");
    CameraIntrinsics intr;
    intr.fx = i.at("fx").get<double>();
    intr.fy = i.at("fy").get<double>();
    intr.cx = i.at("cx").get<double>();
    intr.cy = i.at("cy").get<double>();
    intr.width = i.at("width").get<int>();
    intr.height = i.at("height").get<int>();
    intr.validate();
    return intr;
}

std::vector<GroundTruthBox> gt_boxes_from_json(const json& j)
{
    if (!j.is_array()) throw std::invalid_argument("ground truth must be a JSON array");
    std::vector<GroundTruthBox> out;
    for (const auto& b : j) out.push_back({LabelId{b.at("label").get<std::uint32_t>()}, box_from_json(b)});
    return out;
}

json eval_report_json(LabelId label, const IouReport& report, const std::optional<Vec3>& centroid,
                      std::size_t voxel_count)
{
    return json{{"label", label.value},
                {"v_tp", report.v_tp},
                {"v_fp", report.v_fp},
                {"v_fn", report.v_fn},
                {"iou", report.iou},
                {"centroid", centroid ? vec3_to_json(*centroid) : json(nullptr)},
                {"voxel_count", voxel_count}};
}

std::string export_ply(const LabelOccupancyGrid& grid, LabelId label, double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("export threshold must lie in (0, 1)");
    // Compare in log-odds so threshold 0.5 selects exactly segment(label).
    const double cut = logit(threshold);
    std::vector<std::pair<VoxelKey, double>> points;
    for (const auto& key : grid.sorted_keys()) {
        const double l = grid.log_odds(key, label);
        if (l > cut) points.emplace_back(key, probability(l));
    }
    std::ostringstream out;
    out << std::setprecision(9);
    out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
        << "\nproperty float x\nproperty float y\nproperty float z\nproperty float probability\nend_header\n";
    for (const auto& [key, p] : points) {
        const Vec3 c = voxel_center(key, grid.resolution());
        out << c.x() << ' ' << c.y() << ' ' << c.z() << ' ' << p << '\n';
    }
    return out.str();
}

} // namespace labelgrid
