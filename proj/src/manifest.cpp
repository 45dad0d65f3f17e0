#include <bg2/manifest.hpp>

#include <fmt/format.h>

#include <fstream>
#include <regex>
#include <set>

namespace bg2 {

namespace {

using nlohmann::json;

Vector3d vec3(const json& j)
{
    if (!j.is_array() || j.size() != 3)
        throw Error(ErrorCode::FormatError, "expected a 3-vector, got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec_json(const Vector3d& v)
{
    return json::array({v.x(), v.y(), v.z()});
}

Matrix3d mat3(const json& j)
{
    if (!j.is_array() || j.size() != 3)
        throw Error(ErrorCode::FormatError, "expected a 3x3 row-major matrix");
    Matrix3d m;
    for (int r = 0; r < 3; ++r)
        m.row(r) = vec3(j[r]).transpose();
    return m;
}

json mat_json(const Matrix3d& m)
{
    json rows = json::array();
    for (int r = 0; r < 3; ++r)
        rows.push_back(vec_json(m.row(r).transpose()));
    return rows;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

} // namespace

json to_json(const Camera& c)
{
    return {{"id", c.id}, {"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy},
            {"rotation", mat_json(c.rotation)}, {"translation", vec_json(c.translation)},
            {"width", c.width}, {"height", c.height}};
}

Camera camera_from_json(const json& j)
{
    Camera c;
    c.id = j.at("id").get<std::string>();
    c.fx = j.at("fx").get<double>();
    c.fy = j.at("fy").get<double>();
    c.cx = j.at("cx").get<double>();
    c.cy = j.at("cy").get<double>();
    c.rotation = mat3(j.at("rotation"));
    c.translation = vec3(j.at("translation"));
    c.width = j.at("width").get<int>();
    c.height = j.at("height").get<int>();
    c.validate();
    return c;
}

json to_json(const AreaLight& l)
{
    return {{"center", vec_json(l.center)}, {"uAxis", vec_json(l.u_axis)}, {"vAxis", vec_json(l.v_axis)},
            {"radiance", vec_json(l.radiance)}, {"samples", l.samples}};
}

AreaLight light_from_json(const json& j)
{
    AreaLight l;
    l.center = vec3(j.at("center"));
    l.u_axis = vec3(j.at("uAxis"));
    l.v_axis = vec3(j.at("vAxis"));
    l.radiance = vec3(j.at("radiance"));
    l.samples = j.value("samples", 1);
    l.validate();
    return l;
}

json to_json(const BedBox& b)
{
    return {{"center", vec_json(b.center)}, {"halfExtents", vec_json(b.half_extents)},
            {"orientation", mat_json(b.orientation)}};
}

BedBox bed_from_json(const json& j)
{
    BedBox b;
    b.center = vec3(j.at("center"));
    b.half_extents = vec3(j.at("halfExtents"));
    if (j.contains("orientation"))
        b.orientation = mat3(j["orientation"]);
    b.validate();
    return b;
}

json to_json(const ClothParams& p)
{
    return {{"stretchCompliance", p.stretch_compliance}, {"shearCompliance", p.shear_compliance},
            {"bendCompliance", p.bend_compliance},       {"thickness", p.thickness},
            {"friction", p.friction},                    {"substeps", p.substeps},
            {"solverIterations", p.solver_iterations},   {"gravityMagnitude", p.gravity_magnitude},
            {"totalMass", p.total_mass}};
}

ClothParams cloth_params_from_json(const json& j)
{
    ClothParams p;
    p.stretch_compliance = j.value("stretchCompliance", p.stretch_compliance);
    p.shear_compliance = j.value("shearCompliance", p.shear_compliance);
    p.bend_compliance = j.value("bendCompliance", p.bend_compliance);
    p.thickness = j.value("thickness", p.thickness);
    p.friction = j.value("friction", p.friction);
    p.substeps = j.value("substeps", p.substeps);
    p.solver_iterations = j.value("solverIterations", p.solver_iterations);
    p.gravity_magnitude = j.value("gravityMagnitude", p.gravity_magnitude);
    p.total_mass = j.value("totalMass", p.total_mass);
    p.validate();
    return p;
}

json to_json(const GridSpec& g)
{
    return {{"resolution", g.resolution}, {"coverage", g.coverage}, {"nx", g.nx}, {"ny", g.ny}, {"spacing", g.spacing}};
}

GridSpec grid_from_json(const json& j)
{
    GridSpec g;
    g.resolution = j.value("resolution", g.resolution);
    g.coverage = j.value("coverage", g.coverage);
    g.nx = j.value("nx", g.nx);
    g.ny = j.value("ny", g.ny);
    g.spacing = j.value("spacing", g.spacing);
    return g;
}

JobManifest parse_manifest(const json& j, const std::filesystem::path& base_dir)
{
    JobManifest m;
    m.dataset_root = resolve(base_dir, j.value("datasetRoot", std::string(".")));
    m.output_root = resolve(base_dir, j.at("outputRoot").get<std::string>());
    m.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("clothParams"))
        m.cloth = cloth_params_from_json(j["clothParams"]);
    if (j.contains("grid"))
        m.grid = grid_from_json(j["grid"]);
    if (j.contains("falloff")) {
        m.falloff.fraction = j["falloff"].value("fraction", m.falloff.fraction);
        m.falloff.margin = j["falloff"].value("margin", m.falloff.margin);
    }
    if (j.contains("torsoJoints")) {
        const auto& t = j["torsoJoints"];
        m.torso.pelvis = t.value("pelvis", m.torso.pelvis);
        m.torso.neck = t.value("neck", m.torso.neck);
        m.torso.left_hip = t.value("leftHip", m.torso.left_hip);
        m.torso.right_hip = t.value("rightHip", m.torso.right_hip);
    }
    if (j.contains("textureRanges"))
        m.texture_ranges = j["textureRanges"].get<TextureRanges>();

    std::vector<std::string> mixed;
    std::set<std::string> ids;
    for (const auto& v : j.value("videos", json::array())) {
        VideoEntry e;
        e.video_id = v.at("videoId").get<std::string>();
        if (!ids.insert(e.video_id).second)
            throw Error(ErrorCode::InconsistentManifest, "duplicate videoId '" + e.video_id + "'");
        e.category = parse_category(v.at("category").get<std::string>());
        if (e.category == SequenceCategory::Mixed) {
            mixed.push_back(e.video_id);
            continue;
        }
        e.subject = v.value("subject", std::string{});
        e.exercise = v.value("exercise", std::string{});
        e.sequence = resolve(m.dataset_root, v.at("sequence").get<std::string>());
        e.source_frames = v.value("sourceFrames", std::string("{video}/{cam}/{frame:06}.png"));
        for (const auto& c : v.at("cameras"))
            e.cameras.push_back(camera_from_json(c));
        if (e.cameras.empty())
            throw Error(ErrorCode::InconsistentManifest, e.video_id + ": at least one camera required");
        const json scene = v.value("scene", json::object());
        if (scene.contains("floorUp"))
            e.scene.floor_up = vec3(scene["floorUp"]).normalized();
        if (scene.contains("bedDirection"))
            e.scene.bed_direction = vec3(scene["bedDirection"]).normalized();
        if (scene.contains("bed"))
            e.scene.bed = bed_from_json(scene["bed"]);
        for (const auto& l : scene.value("lights", json::array()))
            e.scene.lights.push_back(light_from_json(l));
        m.videos.push_back(std::move(e));
    }
    if (!mixed.empty()) {
        std::string list;
        for (const auto& id : mixed)
            list += (list.empty() ? "" : ", ") + id;
        throw Error(ErrorCode::MixedExcluded, "manifest lists mixed-category videos: " + list);
    }
    return m;
}

JobManifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open manifest " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, path.string() + ": " + e.what());
    }
    return parse_manifest(j, std::filesystem::absolute(path).parent_path());
}

json to_json(const JobManifest& m)
{
    json videos = json::array();
    for (const auto& v : m.videos) {
        json cams = json::array();
        for (const auto& c : v.cameras)
            cams.push_back(to_json(c));
        json lights = json::array();
        for (const auto& l : v.scene.lights)
            lights.push_back(to_json(l));
        json scene{{"floorUp", vec_json(v.scene.floor_up)}, {"lights", lights}};
        if (v.scene.bed)
            scene["bed"] = to_json(*v.scene.bed);
        if (v.scene.bed_direction)
            scene["bedDirection"] = vec_json(*v.scene.bed_direction);
        videos.push_back({{"videoId", v.video_id},
                          {"category", to_string(v.category)},
                          {"subject", v.subject},
                          {"exercise", v.exercise},
                          {"sequence", v.sequence.string()},
                          {"sourceFrames", v.source_frames},
                          {"cameras", cams},
                          {"scene", scene}});
    }
    return {{"datasetRoot", m.dataset_root.string()},
            {"outputRoot", m.output_root.string()},
            {"seed", m.seed},
            {"clothParams", to_json(m.cloth)},
            {"grid", to_json(m.grid)},
            {"falloff", {{"fraction", m.falloff.fraction}, {"margin", m.falloff.margin}}},
            {"torsoJoints",
             {{"pelvis", m.torso.pelvis}, {"neck", m.torso.neck}, {"leftHip", m.torso.left_hip}, {"rightHip", m.torso.right_hip}}},
            {"textureRanges", m.texture_ranges},
            {"videos", videos}};
}

std::string expand_pattern(const std::string& pattern, const std::string& video, const std::string& cam,
                           std::uint32_t frame)
{
    static const std::regex token(R"(\{(video|cam|frame)(?::0?(\d+))?\})");
    std::string out;
    auto begin = std::sregex_iterator(pattern.begin(), pattern.end(), token);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        out += pattern.substr(last, static_cast<std::size_t>(m.position()) - last);
        const std::string key = m[1].str();
        if (key == "video")
            out += video;
        else if (key == "cam")
            out += cam;
        else if (m[2].matched)
            out += fmt::format("{:0{}}", frame, std::stoi(m[2].str()));
        else
            out += std::to_string(frame);
        last = static_cast<std::size_t>(m.position() + m.length());
    }
    out += pattern.substr(last);
    return out;
}

} // namespace bg2
