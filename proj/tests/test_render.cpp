#include <bg2/render.hpp>

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace bg2;

namespace {

Camera identity_camera(int size)
{
    Camera cam;
    cam.fx = cam.fy = size;
    cam.cx = cam.cy = 0.5 * size;
    cam.width = cam.height = size;
    return cam;
}

// nx x ny grid in the plane z = depth spanning [-half, half]^2.
Matrix3Xd plane_grid(int nx, int ny, double half, double depth)
{
    Matrix3Xd x(3, nx * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            x.col(j * nx + i) << -half + 2 * half * i / (nx - 1), -half + 2 * half * j / (ny - 1), depth;
    return x;
}

TriMesh quad_mesh(double half, double depth)
{
    TriMesh m;
    m.vertices = plane_grid(2, 2, half, depth);
    m.triangles.resize(3, 2);
    m.triangles << 0, 0, 1, 3, 3, 2;
    return m;
}

std::vector<AreaLight> one_light(const Vector3d& center)
{
    AreaLight l;
    l.center = center;
    l.u_axis = Vector3d(0.3, 0, 0);
    l.v_axis = Vector3d(0, 0.3, 0);
    l.radiance = Vector3d(4, 3, 2);
    l.samples = 4;
    return {l};
}

} // namespace

TEST_CASE("cloth_surface: 2x2 grid")
{
    const ClothSurface s = cloth_surface(plane_grid(2, 2, 1.0, 0.0), 2, 2);
    CHECK(s.mesh.triangle_count() == 2);
    Matrix2Xd uv(2, 4);
    uv << 0, 1, 0, 1,
          0, 0, 1, 1;
    CHECK(s.mesh.uvs == uv);
}

TEST_CASE("cloth_surface: counts and planar normals")
{
    std::mt19937_64 rng(31);
    for (const auto& [nx, ny] : {std::pair{3, 5}, std::pair{8, 8}, std::pair{17, 4}}) {
        const ClothSurface flat = cloth_surface(plane_grid(nx, ny, 0.7, 1.5), nx, ny);
        CHECK(flat.mesh.triangle_count() == 2 * (nx - 1) * (ny - 1));
        for (Eigen::Index i = 0; i < flat.normals.cols(); ++i)
            CHECK((flat.normals.col(i) - Vector3d(0, 0, 1)).norm() < 1e-12);

        // Rotated plane: every normal equals the rotated plane normal; frames are orthonormal.
        const Matrix3d R = test::random_rotation(rng);
        const ClothSurface tilted = cloth_surface(R * plane_grid(nx, ny, 0.7, 1.5), nx, ny);
        for (Eigen::Index i = 0; i < tilted.normals.cols(); ++i) {
            CHECK((tilted.normals.col(i) - R.col(2)).norm() < 1e-12);
            CHECK(std::abs(tilted.tangents.col(i).dot(tilted.normals.col(i))) < 1e-12);
            CHECK(std::abs(tilted.bitangents.col(i).norm() - 1.0) < 1e-12);
        }
    }
    CHECK_THROWS_AS(cloth_surface(plane_grid(3, 3, 1, 1), 3, 4), Error);
}

TEST_CASE("shade: hand-evaluated unit case, back-facing, linearity")
{
    AreaLight l;
    l.center = Vector3d(0, 0, 1);
    l.u_axis = Vector3d(0.5, 0, 0);
    l.v_axis = Vector3d(0, 0.5, 0);
    l.radiance = Vector3d::Constant(std::numbers::pi);
    l.samples = 1;
    const Vector3d one = shade(Vector3d::Zero(), Vector3d(0, 0, 1), Vector3d::Ones(), {l});
    CHECK((one - Vector3d::Ones()).norm() < 1e-15);
    CHECK(shade(Vector3d::Zero(), Vector3d(0, 0, -1), Vector3d::Ones(), {l}) == Vector3d::Zero());

    std::mt19937_64 rng(32);
    for (int k = 0; k < 100; ++k) {
        std::vector<AreaLight> lights = one_light(test::random_vec(rng, -2, 2));
        lights.push_back(one_light(test::random_vec(rng, -2, 2)).front());
        const Vector3d p = test::random_vec(rng, -0.5, 0.5);
        const Vector3d n = test::random_vec(rng, -1, 1).normalized();
        const Vector3d alb = test::random_vec(rng, 0, 1);
        const Vector3d base = shade(p, n, alb, lights);
        for (auto& li : lights)
            li.radiance *= 2.0;
        CHECK(shade(p, n, alb, lights) == 2.0 * base);
        CHECK((base.array() >= 0.0).all());
    }
}

TEST_CASE("area light sampling is stratified inside the rectangle")
{
    for (const int samples : {1, 2, 3, 4, 7, 16}) {
        AreaLight l;
        l.center = Vector3d(1, 2, 3);
        l.u_axis = Vector3d(0.5, 0, 0);
        l.v_axis = Vector3d(0, 0.25, 0);
        l.samples = samples;
        const auto pts = l.sample_points();
        CHECK(pts.size() == static_cast<std::size_t>(samples));
        Vector3d mean = Vector3d::Zero();
        for (const auto& p : pts) {
            CHECK(std::abs(p.x() - 1) < 0.5);
            CHECK(std::abs(p.y() - 2) < 0.25);
            mean += p / samples;
        }
        if (samples == 1 || samples == 4 || samples == 16)
            CHECK((mean - l.center).norm() < 1e-12);
    }
    AreaLight bad;
    bad.v_axis = bad.u_axis;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("render_layer: empty bake is fully transparent")
{
    const Camera cam = identity_camera(32);
    const RenderTarget t = render_layer(Matrix3Xd(3, 0), 0, 0, quad_mesh(5, 1), cam, one_light({0, 0, 0}), {});
    CHECK(t.color.row(3).isZero(0.0));
    CHECK(t.width == 32);
}

TEST_CASE("render_layer: holdout body in front hides the cloth, behind it does not")
{
    const Camera cam = identity_camera(32);
    const Matrix3Xd cloth = plane_grid(2, 2, 4.0, 2.0);
    const RenderTarget hidden = render_layer(cloth, 2, 2, quad_mesh(4.0, 1.0), cam, one_light({0, 0, 0}), {});
    CHECK(hidden.color.isZero(0.0));

    const RenderTarget shown = render_layer(cloth, 2, 2, quad_mesh(4.0, 3.0), cam, one_light({0, 0, 0}), {});
    CHECK(shown.color.row(3).isOnes(0.0));
    CHECK(shown.depth.maxCoeff() < 2.0 + 1e-12);
}

TEST_CASE("render_layer: alpha is exactly where the cloth is the nearest surface")
{
    // Body quad covers the left half of the image at depth 1.5; the cloth plane at 2 fills the view.
    const Camera cam = identity_camera(32);
    TriMesh body;
    body.vertices.resize(3, 4);
    body.vertices << -1, 0, -1, 0,
                     -1, -1, 1, 1,
                     1.5, 1.5, 1.5, 1.5;
    body.triangles.resize(3, 2);
    body.triangles << 0, 0, 1, 3, 3, 2;
    const RenderTarget t = render_layer(plane_grid(3, 3, 4.0, 2.0), 3, 3, body, cam, one_light({0, 0, 0}), {});
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            // Body covers screen x in [-1/1.5, 0] * 32 + 16 = [-5.3, 16], clipped to pixel centres x < 16.
            const bool bodyNearer = x + 0.5 < 16.0;
            CHECK(t.alpha(x, y) == (bodyNearer ? 0.0 : 1.0));
        }
}

TEST_CASE("render_layer: full-screen quad matches direct shading per pixel")
{
    const int size = 32;
    const Camera cam = identity_camera(size);
    const double half = 2.0, depth = 2.0;
    TextureParams tex;
    tex.color_b = tex.color_a; // parity flips at cell borders would otherwise dominate round-off
    const auto lights = one_light({0.2, -0.1, 0.4});
    const RenderTarget t = render_layer(plane_grid(2, 2, half, depth), 2, 2, TriMesh{}, cam, lights, tex);
    double worst = 0.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            REQUIRE(t.alpha(x, y) == 1.0);
            const Vector3d p = unproject<double>(cam, x + 0.5, y + 0.5, depth);
            const double u = (p.x() + half) / (2 * half), v = (p.y() + half) / (2 * half);
            // The sheet faces away from the camera, so it is shaded from the flipped side.
            const Vector3d n = -bump_normal(u, v, Vector3d::UnitZ(), Vector3d::UnitX(), Vector3d::UnitY(), tex);
            const Vector3d want = shade(p, n, albedo(u, v, tex), lights);
            worst = std::max(worst, (t.color.col(t.pixel(x, y)).head<3>() - want).cwiseAbs().maxCoeff());
            CHECK(std::abs(t.depth[t.pixel(x, y)] - depth) < 1e-12);
        }
    CHECK(worst <= 1e-6);
}

TEST_CASE("render_layer_into: size mismatch")
{
    RenderTarget small(16, 16);
    try {
        render_layer_into(small, plane_grid(2, 2, 1, 2), 2, 2, TriMesh{}, identity_camera(32), {}, {});
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("render_layer: changing only the texture changes only covered pixels")
{
    const Camera cam = identity_camera(32);
    const Matrix3Xd cloth = plane_grid(4, 4, 0.5, 2.0);
    const auto lights = one_light({0, 0, 0});
    const RenderTarget a = render_layer(cloth, 4, 4, TriMesh{}, cam, lights, sample_params(1, {}));
    const RenderTarget b = render_layer(cloth, 4, 4, TriMesh{}, cam, lights, sample_params(2, {}));
    CHECK(a.color.row(3) == b.color.row(3));
    CHECK(a.depth == b.depth);
    int changed = 0;
    for (Eigen::Index i = 0; i < a.color.cols(); ++i) {
        if (a.color(3, i) == 0.0)
            CHECK(a.color.col(i) == b.color.col(i));
        changed += a.color.col(i) != b.color.col(i);
    }
    CHECK(changed > 0);
}
