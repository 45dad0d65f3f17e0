#include <bg2/composite.hpp>

#include "support.hpp"

#include <doctest.h>

using namespace bg2;

namespace {

RenderTarget random_layer(std::mt19937_64& rng, int w, int h)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RenderTarget t(w, h);
    for (Eigen::Index i = 0; i < t.color.cols(); ++i)
        t.color.col(i) << u(rng), u(rng), u(rng), u(rng);
    return t;
}

LinearImage random_image(std::mt19937_64& rng, int w, int h)
{
    LinearImage img;
    img.width = w;
    img.height = h;
    img.rgb.resize(3, static_cast<Eigen::Index>(w) * h);
    for (Eigen::Index i = 0; i < img.rgb.cols(); ++i)
        img.rgb.col(i) = test::random_vec(rng, 0.0, 1.0);
    return img;
}

// Straight-alpha union of two layers, A over B.
RenderTarget merge(const RenderTarget& a, const RenderTarget& b)
{
    RenderTarget out(a.width, a.height);
    for (Eigen::Index i = 0; i < a.color.cols(); ++i) {
        const double aa = a.color(3, i), ab = b.color(3, i);
        const double alpha = aa + ab * (1.0 - aa);
        out.color(3, i) = alpha;
        if (alpha > 0.0)
            out.color.col(i).head<3>() =
                (aa * a.color.col(i).head<3>() + ab * (1.0 - aa) * b.color.col(i).head<3>()) / alpha;
    }
    return out;
}

Camera pinhole(int size)
{
    Camera c;
    c.fx = c.fy = size;
    c.cx = c.cy = 0.5 * size;
    c.width = c.height = size;
    return c;
}

} // namespace

TEST_CASE("alpha_over: hand-evaluated pixel and identities")
{
    RenderTarget fg(1, 1);
    fg.color.col(0) << 1, 0, 0, 0.5;
    LinearImage bg;
    bg.width = bg.height = 1;
    bg.rgb = Vector3d(0, 0, 1);
    CHECK((alpha_over(fg, bg).rgb.col(0) - Vector3d(0.5, 0, 0.5)).norm() == 0.0);

    std::mt19937_64 rng(51);
    RenderTarget layer = random_layer(rng, 8, 6);
    const LinearImage back = random_image(rng, 8, 6);
    layer.color.row(3).setZero();
    CHECK(alpha_over(layer, back).rgb == back.rgb);
    layer.color.row(3).setOnes();
    CHECK(alpha_over(layer, back).rgb == layer.color.topRows<3>());

    // Transparent layer leaves 8-bit source frames byte-exact.
    Image8 src;
    src.width = 8;
    src.height = 6;
    src.channels = 3;
    for (int i = 0; i < 8 * 6 * 3; ++i)
        src.data.push_back(static_cast<std::uint8_t>(rng() & 0xff));
    layer.color.row(3).setZero();
    CHECK(to_srgb8(alpha_over(layer, to_linear(src))).data == src.data);

    CHECK_THROWS_AS(alpha_over(RenderTarget(3, 3), back), Error);
}

TEST_CASE("alpha_over: stacking two layers equals compositing their straight-alpha merge")
{
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 20; ++trial) {
        const RenderTarget a = random_layer(rng, 16, 16);
        const RenderTarget b = random_layer(rng, 16, 16);
        const LinearImage bg = random_image(rng, 16, 16);
        const LinearImage stacked = alpha_over(a, alpha_over(b, bg));
        const LinearImage merged = alpha_over(merge(a, b), bg);
        CHECK((stacked.rgb - merged.rgb).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("annotate: transparent layer, occluding cloth, cloth behind the joint")
{
    const Camera cam = pinhole(8);
    JointSet joints;
    joints.names = {"a"};
    joints.positions = Vector3d(0, 0, 2.0); // projects to pixel (4, 4) at depth 2

    RenderTarget layer(8, 8);
    auto kp = annotate(joints, cam, layer);
    REQUIRE(kp.size() == 1);
    CHECK(kp[0].state == KeypointState::Visible);
    CHECK(kp[0].x == 4.0);
    CHECK(kp[0].y == 4.0);

    layer.color(3, layer.pixel(4, 4)) = 1.0;
    layer.depth[layer.pixel(4, 4)] = 1.0;
    CHECK(annotate(joints, cam, layer)[0].state == KeypointState::BlanketOccluded);

    joints.positions = Vector3d(0, 0, 0.5);
    CHECK(annotate(joints, cam, layer)[0].state == KeypointState::Visible);

    // Half-transparent coverage does not occlude.
    joints.positions = Vector3d(0, 0, 2.0);
    layer.color(3, layer.pixel(4, 4)) = 0.5;
    CHECK(annotate(joints, cam, layer)[0].state == KeypointState::Visible);
}

TEST_CASE("annotate: out of frame, behind camera, counts partition")
{
    const Camera cam = pinhole(16);
    std::mt19937_64 rng(53);
    JointSet joints;
    const int n = 200;
    joints.positions.resize(3, n);
    for (int i = 0; i < n; ++i) {
        joints.names.push_back("j" + std::to_string(i));
        joints.positions.col(i) = test::random_vec(rng, -1.5, 1.5) + Vector3d(0, 0, 1.0);
    }
    RenderTarget layer(16, 16);
    for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 8; ++x) {
            layer.color(3, layer.pixel(x, y)) = 1.0;
            layer.depth[layer.pixel(x, y)] = 0.8;
        }
    const auto kps = annotate(joints, cam, layer);
    REQUIRE(kps.size() == static_cast<std::size_t>(n));
    int vis = 0, occ = 0, out = 0;
    for (int i = 0; i < n; ++i) {
        const Vector3d p = joints.positions.col(i);
        const auto& k = kps[static_cast<std::size_t>(i)];
        CHECK(k.name == joints.names[static_cast<std::size_t>(i)]);
        const bool inFrame =
            p.z() > 1e-9 && k.x >= 0.0 && k.x < 16.0 && k.y >= 0.0 && k.y < 16.0;
        if (!inFrame) {
            CHECK(k.state == KeypointState::OutOfFrame);
            ++out;
            continue;
        }
        const bool occluded = k.x < 8.0 && p.z() > 0.8;
        CHECK(k.state == (occluded ? KeypointState::BlanketOccluded : KeypointState::Visible));
        (occluded ? occ : vis)++;
    }
    CHECK(vis + occ + out == n);
    CHECK(vis > 0);
    CHECK(occ > 0);
    CHECK(out > 0);
}

TEST_CASE("annotation record JSON shape")
{
    AnnotationRecord r;
    r.video_id = "v000";
    r.segment_id = 1;
    r.frame_idx = 12;
    r.cam_id = "cam2";
    r.bbox = {70, 170, 330, 430};
    r.joints = {{"head", 1.5, 2.5, KeypointState::BlanketOccluded}};
    r.texture_seed = 42;
    const nlohmann::json j = to_json(r);
    CHECK(j["videoId"] == "v000");
    CHECK(j["segmentId"] == 1);
    CHECK(j["frameIdx"] == 12);
    CHECK(j["camId"] == "cam2");
    CHECK(j["bbox"] == nlohmann::json::array({70.0, 170.0, 330.0, 430.0}));
    CHECK(j["joints"][0]["state"] == "BlanketOccluded");
    CHECK(j["joints"][0]["x"] == 1.5);
    CHECK(j["textureSeed"] == 42);
}
