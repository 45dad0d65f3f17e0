#pragma once

#include <bg2/cloth.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bg2 {

/// Persisted per-frame cloth positions of one simulation segment ("BGK2" v1).
struct BakeFile {
    std::uint32_t segment_id = 0;
    int nx = 0;
    int ny = 0;
    double spacing = 0.0;
    double fps = 0.0;
    std::uint32_t first_frame = 0;
    Vector3d gravity = Vector3d::UnitZ();
    std::vector<Matrix3Xd> frames;

    std::uint32_t last_frame() const { return first_frame + static_cast<std::uint32_t>(frames.size()) - 1; }
    void validate() const;
};

void write_bake(std::ostream& os, const BakeFile& bake);
BakeFile read_bake(std::istream& is);
std::string encode_bake(const BakeFile& bake);
BakeFile load_bake(const std::filesystem::path& path);

enum class ResetReason { None, FallOff };

const char* to_string(ResetReason r);
ResetReason parse_reset_reason(const std::string& s);

struct SimSegment {
    std::uint32_t segment_id = 0;
    std::string source_video_id;
    std::uint32_t first_frame = 0;
    std::uint32_t last_frame = 0;
    ResetReason reset_reason = ResetReason::None;

    std::uint32_t frame_span() const { return last_frame - first_frame + 1; }
};

/// Segments of one video must tile [0, frameCount) in order without gaps.
void check_segment_tiling(const std::vector<SimSegment>& segments, std::size_t frame_count);

struct FalloffConfig {
    double fraction = 0.6;
    double margin = 0.3;
};

/// Collision and gravity inputs of the simulated scene.
struct SimScene {
    std::optional<BedBox> bed;
    Vector3d floor_up = Vector3d::UnitZ();
    std::optional<Vector3d> bed_direction; // defaults to -facing for standing sequences
    TorsoJoints torso;
};

struct BakeOutput {
    std::vector<BakeFile> bakes;
    std::vector<SimSegment> segments;
    Vector3d gravity = Vector3d::Zero();
    bool cloth_too_small = false;
};

/// Stage-1 simulation of a whole video. Starts a new segment with a fresh drape whenever the
/// cloth falls off the body. Deterministic for identical inputs.
BakeOutput bake_video(const MeshSequence& sequence, SequenceCategory category, const SimScene& scene,
                      const ClothParams& params, const GridSpec& grid, const FalloffConfig& falloff,
                      const std::string& video_id);

} // namespace bg2
