#pragma once

#include <bg2/bake.hpp>
#include <bg2/render.hpp>
#include <bg2/texture.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bg2 {

struct VideoScene {
    std::vector<AreaLight> lights;
    std::optional<BedBox> bed;
    Vector3d floor_up = Vector3d::UnitZ();
    std::optional<Vector3d> bed_direction;
};

struct VideoEntry {
    std::string video_id;
    SequenceCategory category = SequenceCategory::Standing;
    std::string subject;
    std::string exercise;
    std::filesystem::path sequence;   // BGMS file, absolute after loading
    std::string source_frames;        // pattern with {video}, {cam}, {frame} / {frame:06}
    std::vector<Camera> cameras;
    VideoScene scene;
};

/// Everything both pipeline stages need; paths are resolved against the manifest directory.
struct JobManifest {
    std::filesystem::path dataset_root;
    std::filesystem::path output_root;
    std::vector<VideoEntry> videos;
    ClothParams cloth;
    GridSpec grid;
    FalloffConfig falloff;
    TorsoJoints torso;
    TextureRanges texture_ranges;
    std::uint64_t seed = 0;
};

/// Parses and validates a manifest. Mixed-category videos are rejected with MixedExcluded.
JobManifest parse_manifest(const nlohmann::json& j, const std::filesystem::path& base_dir);
JobManifest load_manifest(const std::filesystem::path& path);
nlohmann::json to_json(const JobManifest& m);

nlohmann::json to_json(const Camera& c);
Camera camera_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AreaLight& l);
AreaLight light_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BedBox& b);
BedBox bed_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ClothParams& p);
ClothParams cloth_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GridSpec& g);
GridSpec grid_from_json(const nlohmann::json& j);

/// Expands {video}, {cam}, {frame} and {frame:0N} placeholders.
std::string expand_pattern(const std::string& pattern, const std::string& video, const std::string& cam,
                           std::uint32_t frame);

} // namespace bg2
