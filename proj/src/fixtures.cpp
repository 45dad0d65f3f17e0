#include <bg2/fixtures.hpp>
#include <bg2/image_io.hpp>
#include <bg2/mesh_io.hpp>

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numbers>

namespace bg2::fixtures {

TriMesh capsule_mesh(const Vector3d& a, const Vector3d& b, double radius, int segments, int cap_rings, int body_rings)
{
    const Vector3d axis = (b - a).normalized();
    const Vector3d u = axis.unitOrthogonal();
    const Vector3d v = axis.cross(u);
    constexpr double kHalfPi = 0.5 * std::numbers::pi;

    // Ring centres and radii from the bottom pole to the top pole (poles excluded).
    std::vector<std::pair<Vector3d, double>> rings;
    for (int k = 1; k <= cap_rings; ++k) {
        const double phi = -kHalfPi + k * kHalfPi / cap_rings;
        rings.emplace_back(a + radius * std::sin(phi) * axis, radius * std::cos(phi));
    }
    for (int k = 1; k <= body_rings; ++k)
        rings.emplace_back(a + (b - a) * (static_cast<double>(k) / body_rings), radius);
    for (int k = 1; k < cap_rings; ++k) {
        const double phi = k * kHalfPi / cap_rings;
        rings.emplace_back(b + radius * std::sin(phi) * axis, radius * std::cos(phi));
    }

    const int ringCount = static_cast<int>(rings.size());
    TriMesh mesh;
    mesh.vertices.resize(3, 2 + ringCount * segments);
    mesh.vertices.col(0) = a - radius * axis;
    for (int r = 0; r < ringCount; ++r)
        for (int s = 0; s < segments; ++s) {
            const double theta = 2.0 * std::numbers::pi * s / segments;
            mesh.vertices.col(1 + r * segments + s) =
                rings[r].first + rings[r].second * (std::cos(theta) * u + std::sin(theta) * v);
        }
    const int top = 1 + ringCount * segments;
    mesh.vertices.col(top) = b + radius * axis;

    auto ring = [segments](int r, int s) { return 1 + r * segments + (s % segments); };
    std::vector<Eigen::Vector3i> tris;
    for (int s = 0; s < segments; ++s)
        tris.emplace_back(0, ring(0, s + 1), ring(0, s));
    for (int r = 0; r + 1 < ringCount; ++r)
        for (int s = 0; s < segments; ++s) {
            tris.emplace_back(ring(r, s), ring(r, s + 1), ring(r + 1, s + 1));
            tris.emplace_back(ring(r, s), ring(r + 1, s + 1), ring(r + 1, s));
        }
    for (int s = 0; s < segments; ++s)
        tris.emplace_back(top, ring(ringCount - 1, s), ring(ringCount - 1, s + 1));

    mesh.triangles.resize(3, static_cast<Eigen::Index>(tris.size()));
    for (std::size_t i = 0; i < tris.size(); ++i)
        mesh.triangles.col(static_cast<Eigen::Index>(i)) = tris[i];
    return mesh;
}

JointSet capsule_joints(const Vector3d& feet, const Vector3d& head, const Vector3d& facing, double radius)
{
    const double length = (head - feet).norm();
    const Vector3d up = (head - feet) / length;
    const Vector3d lateral = up.cross(facing).normalized(); // subject's left
    auto at = [&](double h, double side) -> Vector3d { return feet + h * length * up + side * radius * lateral; };

    JointSet j;
    const std::vector<std::pair<std::string, Vector3d>> layout = {
        {"pelvis", at(0.50, 0.0)},          {"right_hip", at(0.48, -0.55)},    {"right_knee", at(0.27, -0.5)},
        {"right_ankle", at(0.06, -0.45)},   {"left_hip", at(0.48, 0.55)},      {"left_knee", at(0.27, 0.5)},
        {"left_ankle", at(0.06, 0.45)},     {"spine", at(0.62, 0.0)},          {"thorax", at(0.78, 0.0)},
        {"neck", at(0.84, 0.0)},            {"head", at(0.93, 0.0)},           {"left_shoulder", at(0.78, 0.75)},
        {"left_elbow", at(0.62, 0.8)},      {"left_wrist", at(0.48, 0.8)},     {"right_shoulder", at(0.78, -0.75)},
        {"right_elbow", at(0.62, -0.8)},    {"right_wrist", at(0.48, -0.8)},
    };
    j.positions.resize(3, static_cast<Eigen::Index>(layout.size()));
    for (std::size_t i = 0; i < layout.size(); ++i) {
        j.names.push_back(layout[i].first);
        j.positions.col(static_cast<Eigen::Index>(i)) = layout[i].second;
    }
    return j;
}

MeshSequence lying_sequence(std::size_t frames, double fps, const std::function<Vector3d(std::size_t)>& offset,
                            const LyingPerson& person)
{
    const double z = person.bed_top + person.radius;
    const Vector3d feet(-0.5 * person.length, 0.0, z);
    const Vector3d head(0.5 * person.length, 0.0, z);
    const TriMesh body = capsule_mesh(feet + person.radius * Vector3d::UnitX(), head - person.radius * Vector3d::UnitX(),
                                      person.radius);
    const JointSet joints = capsule_joints(feet, head, Vector3d::UnitZ(), person.radius);

    MeshSequence seq;
    seq.topology = body;
    seq.fps = fps;
    seq.joint_names = joints.names;
    for (std::size_t f = 0; f < frames; ++f) {
        const Vector3d d = offset(f);
        seq.frames.push_back(body.vertices.colwise() + d);
        seq.joints.push_back(joints.positions.colwise() + d);
    }
    if (frames > 0)
        seq.topology.vertices = seq.frames.front();
    return seq;
}

BedBox fixture_bed(const LyingPerson& person)
{
    BedBox bed;
    bed.half_extents = Vector3d(0.5 * person.length + 0.3, 0.5, 0.5 * person.bed_top);
    bed.center = Vector3d(0.0, 0.0, 0.5 * person.bed_top);
    return bed;
}

std::vector<Camera> fixture_cameras(int width, int height)
{
    std::vector<Camera> cams;
    const Vector3d target(0.0, 0.0, 0.6);
    const Vector3d eyes[4] = {{1.6, 1.2, 2.0}, {-1.6, 1.2, 2.0}, {-1.6, -1.2, 2.0}, {1.6, -1.2, 2.0}};
    for (int i = 0; i < 4; ++i) {
        Camera c = Camera::look_at(eyes[i], target, Vector3d::UnitZ(), 0.8 * width, width, height);
        c.id = fmt::format("cam{}", i);
        cams.push_back(c);
    }
    return cams;
}

std::vector<AreaLight> fixture_lights()
{
    std::vector<AreaLight> lights;
    for (const double x : {-1.0, 1.0})
        for (const double y : {-1.0, 1.0}) {
            AreaLight l;
            l.center = Vector3d(x, y, 2.6);
            l.u_axis = Vector3d(0.5, 0.0, 0.0);
            l.v_axis = Vector3d(0.0, 0.5, 0.0);
            l.radiance = Vector3d::Constant(10.0);
            l.samples = 4;
            lights.push_back(l);
        }
    return lights;
}

Vector3d walking_offset(std::size_t f)
{
    constexpr std::size_t kRest = 10;
    return f < kRest ? Vector3d::Zero() : Vector3d(0.0, 0.03 * static_cast<double>(f - kRest), 0.0);
}

namespace {

Image8 source_frame(int size, int cam, std::size_t frame)
{
    Image8 img;
    img.width = img.height = size;
    img.channels = 3;
    img.data.resize(static_cast<std::size_t>(size) * size * 3);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const bool tile = ((x / 8) + (y / 8) + cam) % 2 == 0;
            img.at(x, y, 0) = static_cast<std::uint8_t>(90 + (y * 100) / size + (tile ? 20 : 0));
            img.at(x, y, 1) = static_cast<std::uint8_t>(80 + (x * 60) / size + static_cast<int>(frame % 16));
            img.at(x, y, 2) = static_cast<std::uint8_t>(70 + cam * 25);
        }
    return img;
}

} // namespace

std::filesystem::path write_demo_dataset(const std::filesystem::path& root, const DemoOptions& options)
{
    namespace fs = std::filesystem;
    const fs::path data = root / "data";
    fs::create_directories(data);
    const auto cams = fixture_cameras(options.image_size, options.image_size);
    const auto lights = fixture_lights();
    const BedBox bed = fixture_bed();

    JobManifest m;
    m.dataset_root = data;
    m.output_root = root / "out";
    m.seed = options.seed;

    for (int vi = 0; vi < options.videos; ++vi) {
        const bool walking = options.walking && vi > 0;
        VideoEntry e;
        e.video_id = fmt::format("v{:03}", vi);
        e.category = SequenceCategory::Lying;
        e.subject = fmt::format("s{:02}", vi % 2 + 1);
        e.exercise = walking ? "slide_off" : "rest";
        const MeshSequence seq = walking ? lying_sequence(options.frames, 50.0, walking_offset)
                                         : lying_sequence(options.frames, 50.0, [](std::size_t) { return Vector3d::Zero(); });
        e.sequence = data / (e.video_id + ".bgms");
        save_bgms(e.sequence, seq);
        e.source_frames = "frames/{video}/{cam}/{frame:06}.png";
        e.cameras = cams;
        e.scene.lights = lights;
        e.scene.bed = bed;
        e.scene.floor_up = Vector3d::UnitZ();
        for (std::size_t c = 0; c < cams.size(); ++c)
            for (std::size_t f = 0; f < options.frames; ++f)
                write_png(data / expand_pattern(e.source_frames, e.video_id, cams[c].id, static_cast<std::uint32_t>(f)),
                          source_frame(options.image_size, static_cast<int>(c), f));
        m.videos.push_back(std::move(e));
    }

    nlohmann::json j = to_json(m);
    // Keep the manifest relocatable.
    j["datasetRoot"] = "data";
    j["outputRoot"] = "out";
    for (auto& v : j["videos"])
        v["sequence"] = fs::path(v["sequence"].get<std::string>()).filename().string();
    const fs::path manifestPath = root / "manifest.json";
    std::ofstream(manifestPath) << j.dump(2) << "\n";
    return manifestPath;
}

} // namespace bg2::fixtures
