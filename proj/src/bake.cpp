#include <bg2/bake.hpp>

#include "binary_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace bg2 {

namespace {
constexpr std::uint32_t kBakeVersion = 1;
}

void BakeFile::validate() const
{
    if (nx < 2 || ny < 2 || nx > 65535 || ny > 65535)
        throw Error(ErrorCode::FormatError, "bake grid dimensions out of range");
    if (std::abs(gravity.norm() - 1.0) > 1e-6)
        throw Error(ErrorCode::FormatError, "bake gravity is not unit length");
    const Eigen::Index n = static_cast<Eigen::Index>(nx) * ny;
    for (const auto& f : frames)
        if (f.cols() != n)
            throw Error(ErrorCode::FormatError, "bake frame vertex count differs from nx*ny");
}

void write_bake(std::ostream& os, const BakeFile& bake)
{
    bake.validate();
    detail::LeWriter w(os);
    w.bytes("BGK2", 4);
    w.u32(kBakeVersion);
    w.u32(bake.segment_id);
    w.u16(static_cast<std::uint16_t>(bake.nx));
    w.u16(static_cast<std::uint16_t>(bake.ny));
    w.f32(bake.spacing);
    w.f32(bake.fps);
    w.u32(bake.first_frame);
    w.u32(static_cast<std::uint32_t>(bake.frames.size()));
    for (int k = 0; k < 3; ++k)
        w.f32(bake.gravity[k]);
    for (const auto& f : bake.frames)
        for (Eigen::Index i = 0; i < f.cols(); ++i)
            for (int k = 0; k < 3; ++k)
                w.f32(f(k, i));
    w.check();
}

BakeFile read_bake(std::istream& is)
{
    detail::LeReader r(is);
    r.magic("BGK2");
    if (const auto version = r.u32(); version != kBakeVersion)
        throw Error(ErrorCode::FormatError, "unsupported BGK2 version " + std::to_string(version));
    BakeFile b;
    b.segment_id = r.u32();
    b.nx = r.u16();
    b.ny = r.u16();
    b.spacing = r.f32();
    b.fps = r.f32();
    b.first_frame = r.u32();
    const std::uint32_t frameCount = r.u32();
    if (frameCount > (1u << 24))
        throw Error(ErrorCode::FormatError, "bake frame count out of range");
    for (int k = 0; k < 3; ++k)
        b.gravity[k] = r.f32();
    const Eigen::Index n = static_cast<Eigen::Index>(b.nx) * b.ny;
    b.frames.resize(frameCount);
    for (auto& f : b.frames) {
        f.resize(3, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int k = 0; k < 3; ++k)
                f(k, i) = r.f32();
    }
    b.validate();
    return b;
}

std::string encode_bake(const BakeFile& bake)
{
    std::ostringstream os(std::ios::binary);
    write_bake(os, bake);
    return std::move(os).str();
}

BakeFile load_bake(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorCode::MissingBake, path.string());
    return read_bake(is);
}

const char* to_string(ResetReason r)
{
    return r == ResetReason::FallOff ? "FallOff" : "None";
}

ResetReason parse_reset_reason(const std::string& s)
{
    if (s == "None")
        return ResetReason::None;
    if (s == "FallOff")
        return ResetReason::FallOff;
    throw Error(ErrorCode::FormatError, "unknown reset reason '" + s + "'");
}

void check_segment_tiling(const std::vector<SimSegment>& segments, std::size_t frame_count)
{
    std::uint32_t expected = 0;
    for (const auto& s : segments) {
        if (s.last_frame < s.first_frame)
            throw Error(ErrorCode::InconsistentManifest, "segment " + std::to_string(s.segment_id) + " has negative span");
        if (s.first_frame != expected)
            throw Error(ErrorCode::InconsistentManifest,
                        "segment " + std::to_string(s.segment_id) + " starts at frame " + std::to_string(s.first_frame) +
                            ", expected " + std::to_string(expected));
        expected = s.last_frame + 1;
    }
    if (expected != frame_count)
        throw Error(ErrorCode::InconsistentManifest,
                    "segments cover " + std::to_string(expected) + " of " + std::to_string(frame_count) + " frames");
}

BakeOutput bake_video(const MeshSequence& sequence, SequenceCategory category, const SimScene& scene,
                      const ClothParams& params, const GridSpec& grid, const FalloffConfig& falloff,
                      const std::string& video_id)
{
    if (category == SequenceCategory::Mixed)
        throw Error(ErrorCode::MixedExcluded, video_id + ": mixed sequences are excluded");
    params.validate();
    if (scene.bed)
        scene.bed->validate();
    BakeOutput out;
    if (sequence.frame_count() == 0)
        return out;

    const JointSet joints0 = sequence.frame_joints(0);
    Vector3d bedDir = scene.bed_direction.value_or(Vector3d::Zero());
    if (category == SequenceCategory::Standing && !scene.bed_direction)
        bedDir = -torso_frame(joints0, scene.torso).facing;
    out.gravity = gravity_direction(category, joints0, scene.floor_up.normalized(), bedDir, scene.torso);

    const double dt = 1.0 / sequence.fps;
    const std::size_t frameCount = sequence.frame_count();

    auto open_segment = [&](std::size_t frame, ResetReason reason) {
        Drape drape = drape_init(grid, sequence.frames[frame], out.gravity, params);
        out.cloth_too_small = out.cloth_too_small || drape.cloth_too_small;
        SimSegment seg;
        seg.segment_id = static_cast<std::uint32_t>(out.segments.size());
        seg.source_video_id = video_id;
        seg.first_frame = static_cast<std::uint32_t>(frame);
        seg.last_frame = seg.first_frame;
        seg.reset_reason = reason;
        out.segments.push_back(seg);

        BakeFile bake;
        bake.segment_id = seg.segment_id;
        bake.nx = drape.cloth.nx;
        bake.ny = drape.cloth.ny;
        bake.spacing = drape.cloth.spacing;
        bake.fps = sequence.fps;
        bake.first_frame = seg.first_frame;
        bake.gravity = out.gravity;
        out.bakes.push_back(std::move(bake));
        return std::move(drape.cloth);
    };

    ClothGrid cloth = open_segment(0, ResetReason::None);
    for (std::size_t f = 0; f < frameCount; ++f) {
        const MeshBvh body(sequence.frame_mesh(f));
        Colliders colliders;
        colliders.body = body.empty() ? nullptr : &body;
        colliders.bed = scene.bed ? &*scene.bed : nullptr;
        try {
            step(cloth, colliders, params, out.gravity, dt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NumericalBlowup)
                throw;
            throw Error(ErrorCode::NumericalBlowup, video_id + " segment " + std::to_string(out.segments.back().segment_id) +
                                                        " frame " + std::to_string(f) + ": " + e.what());
        }
        out.bakes.back().frames.push_back(cloth.positions);
        out.segments.back().last_frame = static_cast<std::uint32_t>(f);

        if (f + 1 < frameCount &&
            detect_falloff(cloth, bounding_box(sequence.frames[f]), falloff.fraction, falloff.margin))
            cloth = open_segment(f + 1, ResetReason::FallOff);
    }
    return out;
}

} // namespace bg2
