#pragma once

#include <bg2/image_io.hpp>
#include <bg2/mesh.hpp>
#include <bg2/render.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace bg2 {

/// Linear RGB image, row-major pixels.
struct LinearImage {
    int width = 0;
    int height = 0;
    Matrix3Xd rgb;
};

LinearImage to_linear(const Image8& image);
Image8 to_srgb8(const LinearImage& image);

/// Straight-alpha "over" of one pixel.
template <typename Fg, typename Bg>
Vector3d over(const Eigen::MatrixBase<Fg>& fg_rgba, const Eigen::MatrixBase<Bg>& bg_rgb)
{
    const double a = fg_rgba[3];
    return a * fg_rgba.template head<3>() + (1.0 - a) * bg_rgb;
}

/// out = a * fg + (1 - a) * bg per pixel; throws DimensionMismatch on size mismatch.
LinearImage alpha_over(const RenderTarget& fg, const LinearImage& bg);

enum class KeypointState { Visible, BlanketOccluded, OutOfFrame };

const char* to_string(KeypointState s);

struct Keypoint2D {
    std::string name;
    double x = 0.0;
    double y = 0.0;
    KeypointState state = KeypointState::Visible;
};

/// Projects every joint and flags the ones hidden behind an opaque cloth pixel.
std::vector<Keypoint2D> annotate(const JointSet& joints, const Camera& camera, const RenderTarget& layer);

/// One JSON-lines annotation record.
struct AnnotationRecord {
    std::string video_id;
    std::uint32_t segment_id = 0;
    std::uint32_t frame_idx = 0;
    std::string cam_id;
    std::array<double, 4> bbox{};
    std::vector<Keypoint2D> joints;
    std::uint64_t texture_seed = 0;
};

nlohmann::json to_json(const AnnotationRecord& rec);

} // namespace bg2
