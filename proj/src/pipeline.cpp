#include <bg2/pipeline.hpp>

#include <bg2/composite.hpp>
#include <bg2/eval.hpp>
#include <bg2/hash.hpp>
#include <bg2/image_io.hpp>
#include <bg2/mesh_io.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <tuple>

namespace bg2 {

namespace fs = std::filesystem;
using nlohmann::json;

void apply_env_overrides(JobManifest& manifest)
{
    if (const char* s = std::getenv("BG2_SEED"); s && *s) {
        try {
            std::size_t used = 0;
            manifest.seed = std::stoull(s, &used, 0);
            if (used != std::string(s).size())
                throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, fmt::format("BG2_SEED '{}' is not an unsigned integer", s));
        }
    }
}

std::uint64_t texture_seed(std::uint64_t seed, const std::string& video_id, std::uint32_t segment, int index)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ fnv1a64(video_id));
    h = splitmix64(h ^ segment);
    return splitmix64(h ^ static_cast<std::uint64_t>(index));
}

namespace layout {

fs::path segments_manifest(const fs::path& out, const std::string& video)
{
    return out / "bakes" / (video + ".segments.json");
}

fs::path bake_file(const fs::path& out, const std::string& video, std::uint32_t segment)
{
    return out / "bakes" / fmt::format("{}_{:03}.bgk", video, segment);
}

static std::string frame_name(const std::string& video, std::uint32_t segment, std::uint32_t frame,
                              const std::string& cam)
{
    return fmt::format("{}_{:03}_{:06}_{}", video, segment, frame, cam);
}

fs::path layer_png(const fs::path& out, int texture, const std::string& video, std::uint32_t segment,
                   std::uint32_t frame, const std::string& cam)
{
    return out / "layers" / fmt::format("tex{}", texture) / (frame_name(video, segment, frame, cam) + ".png");
}

fs::path layer_depth(const fs::path& out, int texture, const std::string& video, std::uint32_t segment,
                     std::uint32_t frame, const std::string& cam)
{
    return out / "layers" / fmt::format("tex{}", texture) / (frame_name(video, segment, frame, cam) + ".depth");
}

fs::path composited_png(const fs::path& out, int texture, const std::string& video, std::uint32_t segment,
                        std::uint32_t frame, const std::string& cam)
{
    return out / "composited" / fmt::format("tex{}", texture) / (frame_name(video, segment, frame, cam) + ".png");
}

fs::path job_marker(const fs::path& out, const std::string& video, std::uint32_t segment, const std::string& cam,
                    int texture)
{
    return out / "layers" / "jobs" / fmt::format("{}_{:03}_{}_tex{}.json", video, segment, cam, texture);
}

fs::path annotations(const fs::path& out)
{
    return out / "annotations.jsonl";
}

} // namespace layout

namespace {

json read_json(const fs::path& path)
{
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::FormatError, path.string() + ": " + e.what());
    }
}

void write_json_atomic(const fs::path& path, const json& j)
{
    write_file_atomic(path, j.dump(2) + "\n");
}

bool file_matches(const fs::path& path, const std::string& sha)
{
    std::error_code ec;
    return fs::is_regular_file(path, ec) && sha256_file(path) == sha;
}

std::string bake_input_hash(const JobManifest& m, const VideoEntry& v, const std::string& sequence_sha)
{
    json scene{{"floorUp", {v.scene.floor_up.x(), v.scene.floor_up.y(), v.scene.floor_up.z()}}};
    if (v.scene.bed)
        scene["bed"] = to_json(*v.scene.bed);
    if (v.scene.bed_direction)
        scene["bedDirection"] = {v.scene.bed_direction->x(), v.scene.bed_direction->y(), v.scene.bed_direction->z()};
    const json key{{"format", "bake-v1"},
                   {"sequence", sequence_sha},
                   {"category", to_string(v.category)},
                   {"scene", scene},
                   {"cloth", to_json(m.cloth)},
                   {"grid", to_json(m.grid)},
                   {"falloff", {m.falloff.fraction, m.falloff.margin}},
                   {"torso", {m.torso.pelvis, m.torso.neck, m.torso.left_hip, m.torso.right_hip}}};
    return sha256_hex(key.dump());
}

/// True when the segments manifest was produced from the same inputs and every bake is intact.
bool bake_up_to_date(const fs::path& out, const VideoEntry& v, const std::string& input_hash)
{
    const fs::path path = layout::segments_manifest(out, v.video_id);
    if (!fs::exists(path))
        return false;
    try {
        const json j = read_json(path);
        if (j.value("inputHash", std::string{}) != input_hash)
            return false;
        for (const auto& s : j.at("segments"))
            if (!file_matches(out / "bakes" / s.at("file").get<std::string>(), s.at("sha256").get<std::string>()))
                return false;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

struct SegmentInfo {
    std::uint32_t segment_id = 0;
    std::uint32_t first_frame = 0;
    std::uint32_t last_frame = 0;
    std::string file;
    std::string sha256;
};

std::vector<SegmentInfo> read_segments(const fs::path& out, const std::string& video)
{
    const fs::path path = layout::segments_manifest(out, video);
    if (!fs::exists(path))
        throw Error(ErrorCode::MissingBake, fmt::format("{}: no bakes found at {}", video, path.string()));
    const json j = read_json(path);
    std::vector<SegmentInfo> segs;
    for (const auto& s : j.at("segments"))
        segs.push_back({s.at("segmentId").get<std::uint32_t>(), s.at("firstFrame").get<std::uint32_t>(),
                        s.at("lastFrame").get<std::uint32_t>(), s.at("file").get<std::string>(),
                        s.at("sha256").get<std::string>()});
    return segs;
}

const VideoEntry* find_video(const JobManifest& m, const std::string& id)
{
    for (const auto& v : m.videos)
        if (v.video_id == id)
            return &v;
    return nullptr;
}

const Camera* find_camera(const VideoEntry& v, const std::string& id)
{
    for (const auto& c : v.cameras)
        if (c.id == id)
            return &c;
    return nullptr;
}

} // namespace

StageReport cmd_bake(const JobManifest& m, int workers)
{
    StageReport report;
    std::mutex mutex;
    const fs::path out = m.output_root;
    fs::create_directories(out / "bakes");

    parallel_for(m.videos.size(), workers, [&](std::size_t vi) {
        const VideoEntry& v = m.videos[vi];
        try {
            const std::string sequenceSha = sha256_file(v.sequence);
            const std::string inputHash = bake_input_hash(m, v, sequenceSha);
            if (bake_up_to_date(out, v, inputHash)) {
                std::lock_guard lock(mutex);
                ++report.skipped;
                return;
            }
            const MeshSequence seq = load_bgms(v.sequence);
            SimScene scene;
            scene.bed = v.scene.bed;
            scene.floor_up = v.scene.floor_up;
            scene.bed_direction = v.scene.bed_direction;
            scene.torso = m.torso;
            const BakeOutput baked = bake_video(seq, v.category, scene, m.cloth, m.grid, m.falloff, v.video_id);

            json segments = json::array();
            for (std::size_t s = 0; s < baked.bakes.size(); ++s) {
                const SimSegment& seg = baked.segments[s];
                const std::string bytes = encode_bake(baked.bakes[s]);
                const fs::path file = layout::bake_file(out, v.video_id, seg.segment_id);
                write_file_atomic(file, bytes);
                segments.push_back({{"segmentId", seg.segment_id},
                                    {"firstFrame", seg.first_frame},
                                    {"lastFrame", seg.last_frame},
                                    {"resetReason", to_string(seg.reset_reason)},
                                    {"file", file.filename().string()},
                                    {"sha256", sha256_hex(bytes)}});
            }
            json cams = json::array();
            for (const auto& c : v.cameras)
                cams.push_back(c.id);
            const Camera& c0 = v.cameras.front();
            // The segments manifest is the commit point for this video.
            write_json_atomic(layout::segments_manifest(out, v.video_id),
                              {{"videoId", v.video_id},
                               {"category", to_string(v.category)},
                               {"subject", v.subject},
                               {"exercise", v.exercise},
                               {"frameCount", seq.frame_count()},
                               {"fps", seq.fps},
                               {"resolution", {c0.width, c0.height}},
                               {"cameras", cams},
                               {"inputHash", inputHash},
                               {"gravity", {baked.gravity.x(), baked.gravity.y(), baked.gravity.z()}},
                               {"clothTooSmall", baked.cloth_too_small},
                               {"segments", segments}});
            std::lock_guard lock(mutex);
            ++report.written;
            report.files += baked.bakes.size();
        } catch (const std::exception& e) {
            std::lock_guard lock(mutex);
            report.errors.push_back(fmt::format("{}: {}", v.video_id, e.what()));
        }
    });
    std::sort(report.errors.begin(), report.errors.end());
    return report;
}

namespace {

struct RenderJob {
    const VideoEntry* video = nullptr;
    std::size_t video_index = 0;
    SegmentInfo segment;
    const Camera* camera = nullptr;
    int texture = 0;
};

json camera_lights_key(const Camera& c, const std::vector<AreaLight>& lights)
{
    json l = json::array();
    for (const auto& light : lights)
        l.push_back(to_json(light));
    return {{"camera", to_json(c)}, {"lights", l}};
}

} // namespace

StageReport cmd_render(const JobManifest& m, int textures, int workers)
{
    if (textures < 0)
        throw Error(ErrorCode::InvalidArgument, "texture count must be >= 0");
    StageReport report;
    const fs::path out = m.output_root;

    // Bodies are loaded once per video and shared read-only by the workers.
    std::vector<std::optional<MeshSequence>> bodies(m.videos.size());
    std::vector<std::string> bodyShas(m.videos.size());
    std::vector<RenderJob> jobs;
    for (std::size_t vi = 0; vi < m.videos.size() && textures > 0; ++vi) {
        const VideoEntry& v = m.videos[vi];
        try {
            const auto segs = read_segments(out, v.video_id);
            bodies[vi] = load_bgms(v.sequence);
            bodyShas[vi] = sha256_file(v.sequence);
            for (const auto& s : segs)
                for (const auto& c : v.cameras)
                    for (int t = 0; t < textures; ++t)
                        jobs.push_back({&v, vi, s, &c, t});
        } catch (const std::exception& e) {
            report.errors.push_back(fmt::format("{}: {}", v.video_id, e.what()));
        }
    }

    std::mutex mutex;
    parallel_for(jobs.size(), workers, [&](std::size_t ji) {
        const RenderJob& job = jobs[ji];
        const VideoEntry& v = *job.video;
        const Camera& cam = *job.camera;
        const SegmentInfo& seg = job.segment;
        const std::string label = fmt::format("{} segment {} {} tex{}", v.video_id, seg.segment_id, cam.id, job.texture);
        try {
            const std::uint64_t texSeed = texture_seed(m.seed, v.video_id, seg.segment_id, job.texture);
            const TextureParams params = sample_params(texSeed, m.texture_ranges);
            const json key{{"format", "layer-v1"},
                           {"bake", seg.sha256},
                           {"body", bodyShas[job.video_index]},
                           {"texture", params},
                           {"view", camera_lights_key(cam, v.scene.lights)}};
            const std::string jobHash = sha256_hex(key.dump());
            const fs::path marker = layout::job_marker(out, v.video_id, seg.segment_id, cam.id, job.texture);

            if (fs::exists(marker)) {
                try {
                    const json j = read_json(marker);
                    bool complete = j.value("jobHash", std::string{}) == jobHash;
                    for (const auto& l : j.value("layers", json::array())) {
                        if (!complete)
                            break;
                        complete = file_matches(out / l.at("file").get<std::string>(), l.at("sha256").get<std::string>());
                    }
                    if (complete) {
                        std::lock_guard lock(mutex);
                        ++report.skipped;
                        return;
                    }
                } catch (const std::exception&) {
                    // Unreadable marker: render the job again.
                }
            }

            const BakeFile bake = load_bake(out / "bakes" / seg.file);
            const MeshSequence& body = *bodies[job.video_index];
            if (bake.first_frame != seg.first_frame || bake.last_frame() != seg.last_frame ||
                bake.last_frame() >= body.frame_count())
                throw Error(ErrorCode::InconsistentManifest, "bake frame range disagrees with the segments manifest");

            json layers = json::array();
            RenderTarget target(cam.width, cam.height);
            for (std::size_t k = 0; k < bake.frames.size(); ++k) {
                const std::uint32_t frame = bake.first_frame + static_cast<std::uint32_t>(k);
                render_layer_into(target, bake.frames[k], bake.nx, bake.ny, body.frame_mesh(frame), cam,
                                  v.scene.lights, params);
                const std::string png = encode_png(layer_to_image(target));
                const fs::path pngPath = layout::layer_png(out, job.texture, v.video_id, seg.segment_id, frame, cam.id);
                write_file_atomic(pngPath, png);
                write_file_atomic(layout::layer_depth(out, job.texture, v.video_id, seg.segment_id, frame, cam.id),
                                  encode_depth(target));
                layers.push_back({{"frame", frame},
                                  {"file", fs::relative(pngPath, out).generic_string()},
                                  {"sha256", sha256_hex(png)}});
            }
            write_json_atomic(marker, {{"videoId", v.video_id},
                                       {"segmentId", seg.segment_id},
                                       {"camId", cam.id},
                                       {"texture", job.texture},
                                       {"textureSeed", texSeed},
                                       {"params", params},
                                       {"firstFrame", seg.first_frame},
                                       {"lastFrame", seg.last_frame},
                                       {"jobHash", jobHash},
                                       {"layers", layers}});
            std::lock_guard lock(mutex);
            ++report.written;
            report.files += bake.frames.size();
        } catch (const std::exception& e) {
            std::lock_guard lock(mutex);
            report.errors.push_back(fmt::format("{}: {}", label, e.what()));
        }
    });
    std::sort(report.errors.begin(), report.errors.end());
    return report;
}

namespace {

std::vector<fs::path> list_files(const fs::path& dir, const std::string& extension)
{
    std::vector<fs::path> files;
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        return files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == extension)
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

struct AnnotatedFrame {
    std::tuple<std::string, std::uint32_t, std::uint32_t, std::string, int> key;
    json record;
};

} // namespace

StageReport cmd_composite(const JobManifest& m, int workers)
{
    StageReport report;
    const fs::path out = m.output_root;
    const auto markers = list_files(out / "layers" / "jobs", ".json");

    std::vector<std::optional<MeshSequence>> bodies(m.videos.size());
    std::vector<std::vector<AnnotatedFrame>> results(markers.size());
    std::vector<std::vector<std::string>> errors(markers.size());
    std::mutex loadMutex;

    parallel_for(markers.size(), workers, [&](std::size_t mi) {
        try {
            const json j = read_json(markers[mi]);
            const std::string videoId = j.at("videoId").get<std::string>();
            const VideoEntry* v = find_video(m, videoId);
            if (!v)
                throw Error(ErrorCode::InconsistentManifest, "layer job for unknown video " + videoId);
            const Camera* cam = find_camera(*v, j.at("camId").get<std::string>());
            if (!cam)
                throw Error(ErrorCode::InconsistentManifest, "layer job for unknown camera " + j.at("camId").dump());
            const auto segment = j.at("segmentId").get<std::uint32_t>();
            const int texture = j.at("texture").get<int>();
            const auto texSeed = j.at("textureSeed").get<std::uint64_t>();

            const MeshSequence* body = nullptr;
            {
                const auto vi = static_cast<std::size_t>(v - m.videos.data());
                std::lock_guard lock(loadMutex);
                if (!bodies[vi])
                    bodies[vi] = load_bgms(v->sequence);
                body = &*bodies[vi];
            }

            for (const auto& l : j.at("layers")) {
                const auto frame = l.at("frame").get<std::uint32_t>();
                const std::string where = fmt::format("{} segment {} frame {} {} tex{}", videoId, segment, frame, cam->id, texture);
                try {
                    const fs::path source = m.dataset_root / expand_pattern(v->source_frames, videoId, cam->id, frame);
                    if (!fs::exists(source))
                        throw Error(ErrorCode::MissingSourceFrame, source.string());
                    if (frame >= body->frame_count())
                        throw Error(ErrorCode::InconsistentManifest, "frame beyond the body sequence");

                    RenderTarget layer = image_to_layer(decode_png(read_file(out / l.at("file").get<std::string>())));
                    decode_depth(read_file(layout::layer_depth(out, texture, videoId, segment, frame, cam->id)), layer);
                    const Image8 src = read_image(source);
                    const Image8 composite = to_srgb8(alpha_over(layer, to_linear(src)));
                    write_file_atomic(layout::composited_png(out, texture, videoId, segment, frame, cam->id),
                                      encode_png(composite));

                    AnnotationRecord rec;
                    rec.video_id = videoId;
                    rec.segment_id = segment;
                    rec.frame_idx = frame;
                    rec.cam_id = cam->id;
                    rec.texture_seed = texSeed;
                    rec.joints = annotate(body->frame_joints(frame), *cam, layer);
                    Matrix2Xd projected(2, 0);
                    for (const auto& kp : rec.joints)
                        if (!(kp.x == -1.0 && kp.y == -1.0 && kp.state == KeypointState::OutOfFrame)) {
                            projected.conservativeResize(Eigen::NoChange, projected.cols() + 1);
                            projected.col(projected.cols() - 1) << kp.x, kp.y;
                        }
                    if (projected.cols() > 0) {
                        const BBox b = bbox_from_joints(projected);
                        rec.bbox = {b.xmin, b.ymin, b.xmax, b.ymax};
                    }
                    json record = to_json(rec);
                    record["texture"] = texture;
                    record["image"] = fs::relative(layout::composited_png(out, texture, videoId, segment, frame, cam->id), out)
                                          .generic_string();
                    results[mi].push_back({{videoId, segment, frame, cam->id, texture}, std::move(record)});
                } catch (const std::exception& e) {
                    errors[mi].push_back(fmt::format("{}: {}", where, e.what()));
                }
            }
        } catch (const std::exception& e) {
            errors[mi].push_back(fmt::format("{}: {}", markers[mi].filename().string(), e.what()));
        }
    });

    std::vector<AnnotatedFrame> all;
    for (std::size_t mi = 0; mi < markers.size(); ++mi) {
        if (!results[mi].empty())
            ++report.written;
        for (auto& r : results[mi])
            all.push_back(std::move(r));
        for (auto& e : errors[mi])
            report.errors.push_back(std::move(e));
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
    std::string jsonl;
    for (const auto& r : all)
        jsonl += r.record.dump() + "\n";
    fs::create_directories(out);
    write_file_atomic(layout::annotations(out), jsonl);
    report.files = all.size();
    std::sort(report.errors.begin(), report.errors.end());
    return report;
}

CategoryCounts DatasetSummary::total() const
{
    CategoryCounts t;
    for (const auto& [name, c] : categories) {
        t.subjects.insert(c.subjects.begin(), c.subjects.end());
        t.exercises.insert(c.exercises.begin(), c.exercises.end());
        t.videos += c.videos;
        t.segments += c.segments;
        t.frames += c.frames;
        t.layers += c.layers;
        t.composited += c.composited;
        t.resolutions.insert(c.resolutions.begin(), c.resolutions.end());
        t.framerates.insert(c.framerates.begin(), c.framerates.end());
    }
    return t;
}

bool DatasetSummary::empty() const
{
    return total().videos == 0;
}

namespace {

std::string join_set(const std::set<std::string>& s)
{
    if (s.empty())
        return "-";
    std::string out;
    for (const auto& x : s)
        out += (out.empty() ? "" : ", ") + x;
    return out;
}

std::string join_rates(const std::set<double>& s)
{
    std::set<std::string> names;
    for (const double r : s)
        names.insert(fmt::format("{:g} fps", r));
    return join_set(names);
}

const std::vector<std::string> kColumns = {"Standing", "Lying", "Alternating"};

} // namespace

std::string DatasetSummary::to_table() const
{
    std::vector<const CategoryCounts*> cols;
    static const CategoryCounts kEmpty;
    for (const auto& name : kColumns) {
        const auto it = categories.find(name);
        cols.push_back(it == categories.end() ? &kEmpty : &it->second);
    }
    const CategoryCounts t = total();
    cols.push_back(&t);

    using Getter = std::string (*)(const CategoryCounts&);
    const std::vector<std::pair<std::string, Getter>> rows = {
        {"Subjects", [](const CategoryCounts& c) { return std::to_string(c.subjects.size()); }},
        {"Exercise Types", [](const CategoryCounts& c) { return std::to_string(c.exercises.size()); }},
        {"Videos", [](const CategoryCounts& c) { return std::to_string(c.videos); }},
        {"Segments", [](const CategoryCounts& c) { return std::to_string(c.segments); }},
        {"Frames", [](const CategoryCounts& c) { return std::to_string(c.frames); }},
        {"Layers", [](const CategoryCounts& c) { return std::to_string(c.layers); }},
        {"Composited", [](const CategoryCounts& c) { return std::to_string(c.composited); }},
        {"Resolution", [](const CategoryCounts& c) { return join_set(c.resolutions); }},
        {"Framerate", [](const CategoryCounts& c) { return join_rates(c.framerates); }},
    };

    std::vector<std::string> header = {""};
    header.insert(header.end(), kColumns.begin(), kColumns.end());
    header.push_back("Total");
    std::vector<std::vector<std::string>> cells = {header};
    for (const auto& [name, get] : rows) {
        std::vector<std::string> line = {name};
        for (const auto* c : cols)
            line.push_back(get(*c));
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> widths(header.size(), 0);
    for (const auto& line : cells)
        for (std::size_t i = 0; i < line.size(); ++i)
            widths[i] = std::max(widths[i], line[i].size());
    std::string out;
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i)
            out += i == 0 ? fmt::format("{:<{}}", line[i], widths[i]) : fmt::format("  {:>{}}", line[i], widths[i]);
        out += "\n";
    }
    return out;
}

DatasetSummary summarize_output(const fs::path& out)
{
    DatasetSummary summary;
    for (const auto& name : kColumns)
        summary.categories[name];

    std::map<std::string, std::string> videoCategory;
    std::map<std::string, std::set<std::uint32_t>> videoSegments;
    for (const auto& path : list_files(out / "bakes", ".json")) {
        try {
            const json j = read_json(path);
            const std::string id = j.at("videoId").get<std::string>();
            std::string category = j.at("category").get<std::string>();
            if (category == "Mixed")
                category = "Alternating";
            videoCategory[id] = category;
            CategoryCounts& c = summary.categories[category];
            const auto frameCount = j.at("frameCount").get<std::size_t>();
            const auto cameras = j.at("cameras").size();
            c.videos += 1;
            c.frames += frameCount * cameras;
            c.subjects.insert(j.value("subject", std::string{}));
            c.exercises.insert(j.value("exercise", std::string{}));
            c.resolutions.insert(fmt::format("{}x{}", j.at("resolution")[0].get<int>(), j.at("resolution")[1].get<int>()));
            c.framerates.insert(j.at("fps").get<double>());

            std::vector<SimSegment> segs;
            for (const auto& s : j.at("segments")) {
                SimSegment seg;
                seg.segment_id = s.at("segmentId").get<std::uint32_t>();
                seg.first_frame = s.at("firstFrame").get<std::uint32_t>();
                seg.last_frame = s.at("lastFrame").get<std::uint32_t>();
                seg.source_video_id = id;
                segs.push_back(seg);
                videoSegments[id].insert(seg.segment_id);
                if (!file_matches(out / "bakes" / s.at("file").get<std::string>(), s.at("sha256").get<std::string>()))
                    summary.problems.push_back(fmt::format("{}: bake {} missing or modified", id, s.at("file").get<std::string>()));
            }
            c.segments += segs.size();
            check_segment_tiling(segs, frameCount);
        } catch (const std::exception& e) {
            summary.problems.push_back(fmt::format("{}: {}", path.filename().string(), e.what()));
        }
    }

    for (const auto& path : list_files(out / "layers" / "jobs", ".json")) {
        try {
            const json j = read_json(path);
            const std::string id = j.at("videoId").get<std::string>();
            const auto it = videoCategory.find(id);
            if (it == videoCategory.end() || !videoSegments[id].count(j.at("segmentId").get<std::uint32_t>()))
                throw Error(ErrorCode::InconsistentManifest, "layer job without a matching bake segment");
            CategoryCounts& c = summary.categories[it->second];
            const auto first = j.at("firstFrame").get<std::uint32_t>();
            const auto last = j.at("lastFrame").get<std::uint32_t>();
            if (j.at("layers").size() != last - first + 1)
                throw Error(ErrorCode::InconsistentManifest, "layer count differs from the segment frame span");
            for (const auto& l : j.at("layers")) {
                if (!fs::exists(out / l.at("file").get<std::string>()))
                    throw Error(ErrorCode::InconsistentManifest, "missing layer " + l.at("file").get<std::string>());
                ++c.layers;
                const auto frame = l.at("frame").get<std::uint32_t>();
                if (fs::exists(layout::composited_png(out, j.at("texture").get<int>(), id, j.at("segmentId").get<std::uint32_t>(),
                                                      frame, j.at("camId").get<std::string>())))
                    ++c.composited;
            }
        } catch (const std::exception& e) {
            summary.problems.push_back(fmt::format("{}: {}", path.filename().string(), e.what()));
        }
    }

    if (fs::exists(layout::annotations(out))) {
        std::ifstream in(layout::annotations(out));
        std::string line;
        while (std::getline(in, line))
            if (!line.empty())
                ++summary.annotation_records;
        const auto composited = summary.total().composited;
        if (summary.annotation_records != composited)
            summary.problems.push_back(fmt::format("{} annotation records for {} composited frames",
                                                   summary.annotation_records, composited));
    }
    return summary;
}

int cmd_validate(const fs::path& output_root, std::ostream& out)
{
    const DatasetSummary s = summarize_output(output_root);
    out << s.to_table();
    out << fmt::format("Annotation records: {}\n", s.annotation_records);
    for (const auto& p : s.problems)
        out << "inconsistent: " << p << "\n";
    if (s.empty())
        out << "no baked videos found under " << output_root.string() << "\n";
    return s.problems.empty() && !s.empty() ? 0 : 1;
}

} // namespace bg2
