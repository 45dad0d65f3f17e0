#include <bg2/composite.hpp>
#include <bg2/eval.hpp>

#include <cmath>

namespace bg2 {

LinearImage to_linear(const Image8& image)
{
    LinearImage out;
    out.width = image.width;
    out.height = image.height;
    out.rgb.resize(3, static_cast<Eigen::Index>(image.width) * image.height);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int k = 0; k < 3; ++k)
                out.rgb(k, static_cast<Eigen::Index>(y) * image.width + x) = srgb_decode(image.at(x, y, k));
    return out;
}

Image8 to_srgb8(const LinearImage& image)
{
    Image8 out;
    out.width = image.width;
    out.height = image.height;
    out.channels = 3;
    out.data.resize(static_cast<std::size_t>(image.width) * image.height * 3);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            for (int k = 0; k < 3; ++k)
                out.at(x, y, k) = srgb_encode(image.rgb(k, static_cast<Eigen::Index>(y) * image.width + x));
    return out;
}

LinearImage alpha_over(const RenderTarget& fg, const LinearImage& bg)
{
    if (fg.width != bg.width || fg.height != bg.height)
        throw Error(ErrorCode::DimensionMismatch, "layer and source frame sizes differ");
    LinearImage out = bg;
    const auto alpha = fg.color.row(3).array();
    out.rgb.array() = fg.color.topRows<3>().array().rowwise() * alpha +
                      bg.rgb.array().rowwise() * (1.0 - alpha);
    return out;
}

const char* to_string(KeypointState s)
{
    switch (s) {
    case KeypointState::Visible: return "Visible";
    case KeypointState::BlanketOccluded: return "BlanketOccluded";
    case KeypointState::OutOfFrame: return "OutOfFrame";
    }
    return "Visible";
}

std::vector<Keypoint2D> annotate(const JointSet& joints, const Camera& camera, const RenderTarget& layer)
{
    if (layer.width != camera.width || layer.height != camera.height)
        throw Error(ErrorCode::DimensionMismatch, "layer size differs from camera image size");
    std::vector<Keypoint2D> out;
    out.reserve(joints.names.size());
    for (std::size_t i = 0; i < joints.names.size(); ++i) {
        Keypoint2D kp;
        kp.name = joints.names[i];
        Projection<double> pr{};
        try {
            pr = project<double>(camera, joints.positions.col(static_cast<Eigen::Index>(i)));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BehindCamera)
                throw;
            kp.x = -1.0;
            kp.y = -1.0;
            kp.state = KeypointState::OutOfFrame;
            out.push_back(kp);
            continue;
        }
        kp.x = pr.x;
        kp.y = pr.y;
        if (!(pr.x >= 0.0 && pr.x < layer.width && pr.y >= 0.0 && pr.y < layer.height)) {
            kp.state = KeypointState::OutOfFrame;
        } else {
            const int px = static_cast<int>(std::floor(pr.x));
            const int py = static_cast<int>(std::floor(pr.y));
            const Eigen::Index p = layer.pixel(px, py);
            kp.state = layer.color(3, p) > 0.5 && layer.depth[p] < pr.depth ? KeypointState::BlanketOccluded
                                                                            : KeypointState::Visible;
        }
        out.push_back(kp);
    }
    return out;
}

nlohmann::json to_json(const AnnotationRecord& rec)
{
    nlohmann::json joints = nlohmann::json::array();
    for (const auto& kp : rec.joints)
        joints.push_back({{"name", kp.name}, {"x", kp.x}, {"y", kp.y}, {"state", to_string(kp.state)}});
    return {{"videoId", rec.video_id},
            {"segmentId", rec.segment_id},
            {"frameIdx", rec.frame_idx},
            {"camId", rec.cam_id},
            {"bbox", rec.bbox},
            {"joints", std::move(joints)},
            {"textureSeed", rec.texture_seed}};
}

} // namespace bg2
