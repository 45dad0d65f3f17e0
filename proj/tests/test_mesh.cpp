#include <bg2/fixtures.hpp>
#include <bg2/mesh.hpp>

#include "support.hpp"

#include <doctest.h>

#include <limits>
#include <map>

using namespace bg2;

namespace {

Camera pinhole(double f, double c)
{
    Camera cam;
    cam.fx = cam.fy = f;
    cam.cx = cam.cy = c;
    cam.width = cam.height = static_cast<int>(2 * c);
    return cam;
}

JointSet torso(const Vector3d& pelvis, const Vector3d& neck, const Vector3d& lhip, const Vector3d& rhip)
{
    JointSet j;
    j.names = {"pelvis", "neck", "left_hip", "right_hip"};
    j.positions.resize(3, 4);
    j.positions << pelvis, neck, lhip, rhip;
    return j;
}

TriMesh unit_right_triangle()
{
    TriMesh m;
    m.vertices.resize(3, 3);
    m.vertices << 0, 1, 0,
                  0, 0, 1,
                  0, 0, 0;
    m.triangles.resize(3, 1);
    m.triangles << 0, 1, 2;
    return m;
}

TriMesh random_mesh(std::mt19937_64& rng, int tris)
{
    TriMesh m;
    m.vertices.resize(3, 3 * tris);
    m.triangles.resize(3, tris);
    for (int t = 0; t < tris; ++t) {
        const Vector3d base = test::random_vec(rng, -1.0, 1.0);
        for (int k = 0; k < 3; ++k)
            m.vertices.col(3 * t + k) = base + test::random_vec(rng, -0.3, 0.3);
        m.triangles.col(t) << 3 * t, 3 * t + 1, 3 * t + 2;
    }
    return m;
}

// Independent scan: closest point by projection to the plane, falling back to the three edges.
Vector3d naive_closest(const Vector3d& p, const Vector3d& a, const Vector3d& b, const Vector3d& c)
{
    const Vector3d n = (b - a).cross(c - a).normalized();
    const Vector3d q = p - (p - a).dot(n) * n;
    auto insideEdge = [&](const Vector3d& u, const Vector3d& v) { return (v - u).cross(q - u).dot(n) >= 0.0; };
    if (insideEdge(a, b) && insideEdge(b, c) && insideEdge(c, a))
        return q;
    auto onSegment = [&](const Vector3d& u, const Vector3d& v) {
        const double t = std::clamp((p - u).dot(v - u) / (v - u).squaredNorm(), 0.0, 1.0);
        return Vector3d(u + t * (v - u));
    };
    Vector3d best = onSegment(a, b);
    for (const Vector3d& cand : {onSegment(b, c), onSegment(c, a)})
        if ((cand - p).norm() < (best - p).norm())
            best = cand;
    return best;
}

} // namespace

TEST_CASE("project: principal point on the optical axis")
{
    const Camera cam = pinhole(900, 450);
    for (const double z : {0.1, 1.0, 37.0}) {
        const auto p = project<double>(cam, Vector3d(0, 0, z));
        CHECK(p.x == 450.0);
        CHECK(p.y == 450.0);
        CHECK(p.depth == z);
    }
}

TEST_CASE("project: hand-evaluated pinhole example")
{
    const auto p = project<double>(pinhole(900, 450), Vector3d(0.1, 0, 1));
    CHECK(p.x == doctest::Approx(540.0).epsilon(1e-15));
    CHECK(p.y == 450.0);
    CHECK(p.depth == 1.0);
}

TEST_CASE("project: zero or negative depth is BehindCamera")
{
    const Camera cam = pinhole(900, 450);
    for (const double z : {0.0, -1.0, 1e-10}) {
        try {
            project<double>(cam, Vector3d(0.2, 0.1, z));
            FAIL("expected BehindCamera");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::BehindCamera);
        }
    }
}

TEST_CASE("project and unproject round trip on random posed cameras")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Vector3d eye = test::random_vec(rng, -5, 5);
        const Vector3d target = test::random_vec(rng, -1, 1);
        if ((target - eye).norm() < 0.5)
            continue;
        const Camera cam = Camera::look_at(eye, target, Vector3d::UnitZ(), 700, 640, 480);
        std::uniform_real_distribution<double> px(0, 640), py(0, 480), depth(0.2, 20);
        const Vector3d world = unproject<double>(cam, px(rng), py(rng), depth(rng));
        const auto p = project<double>(cam, world);
        CHECK((unproject<double>(cam, p.x, p.y, p.depth) - world).norm() < 1e-6);
    }
}

TEST_CASE("torso_frame: axis-aligned example")
{
    const TorsoFrame f = torso_frame(torso({0, 0, 0}, {0, 0, 1}, {0.1, 0, 0}, {-0.1, 0, 0}));
    CHECK((f.up - Vector3d(0, 0, 1)).norm() < 1e-12);
    CHECK((f.lateral - Vector3d(1, 0, 0)).norm() < 1e-12);
    CHECK((f.facing - Vector3d(0, -1, 0)).norm() < 1e-12);
}

TEST_CASE("torso_frame: rotation equivariance and translation invariance")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const JointSet j = torso(test::random_vec(rng, -1, 1), test::random_vec(rng, -1, 1) + Vector3d(0, 0, 2),
                                 test::random_vec(rng, -1, 1), test::random_vec(rng, -1, 1));
        const Matrix3d R = test::random_rotation(rng);
        const Vector3d t = test::random_vec(rng, -10, 10);
        JointSet moved = j;
        moved.positions = (R * j.positions).colwise() + t;
        const TorsoFrame a = torso_frame(j);
        const TorsoFrame b = torso_frame(moved);
        CHECK((R * a.up - b.up).norm() < 1e-9);
        CHECK((R * a.lateral - b.lateral).norm() < 1e-9);
        CHECK((R * a.facing - b.facing).norm() < 1e-9);
        Matrix3d F;
        F << b.up, b.lateral, b.facing;
        CHECK((F.transpose() * F - Matrix3d::Identity()).norm() < 1e-6);
    }
}

TEST_CASE("torso_frame: degenerate torso")
{
    CHECK_THROWS_AS(torso_frame(torso({0, 0, 0}, {0, 0, 0}, {0.1, 0, 0}, {-0.1, 0, 0})), Error);
    try {
        torso_frame(torso({0, 0, 0}, {0, 0, 1}, {0.1, 0, 0}, {0.1, 0, 0}));
        FAIL("expected DegenerateTorso");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateTorso);
    }
}

TEST_CASE("closest point: unit right triangle")
{
    const TriMesh m = unit_right_triangle();
    const auto cp = closest_point_on_mesh(m, Vector3d(0.25, 0.25, 1));
    CHECK((cp.point - Vector3d(0.25, 0.25, 0)).norm() < 1e-15);
    CHECK(cp.distance == doctest::Approx(1.0));
    CHECK((cp.normal - Vector3d(0, 0, 1)).norm() < 1e-15);

    const auto on = closest_point_on_mesh(m, Vector3d(0.2, 0.3, 0));
    CHECK(on.distance < 1e-15);
    const MeshBvh bvh(m);
    CHECK(bvh.closest_point(Vector3d(0.25, 0.25, 1)).distance == doctest::Approx(1.0));
}

TEST_CASE("closest point: brute force and BVH agree with an independent scan")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const TriMesh m = random_mesh(rng, 20 + 24 * trial);
        const MeshBvh bvh(m);
        for (int q = 0; q < 50; ++q) {
            const Vector3d p = test::random_vec(rng, -2, 2);
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index t = 0; t < m.triangle_count(); ++t) {
                const auto tri = m.triangles.col(t);
                best = std::min(best, (naive_closest(p, m.vertices.col(tri[0]), m.vertices.col(tri[1]),
                                                     m.vertices.col(tri[2])) - p).norm());
            }
            const auto brute = closest_point_on_mesh(m, p);
            const auto fast = bvh.closest_point(p);
            CHECK(brute.distance == doctest::Approx(best).epsilon(1e-9));
            CHECK(fast.distance == brute.distance);
            CHECK((fast.point - brute.point).norm() < 1e-9);
            CHECK(fast.triangle == brute.triangle);
            CHECK((brute.point - p).norm() == doctest::Approx(brute.distance));
        }
    }
}

TEST_CASE("capsule fixture mesh is closed with outward winding")
{
    const Vector3d a(-0.5, 0, 0.65), b(0.5, 0, 0.65);
    const TriMesh m = fixtures::capsule_mesh(a, b, 0.15);
    CHECK_NOTHROW(m.validate());
    for (Eigen::Index t = 0; t < m.triangle_count(); ++t) {
        const auto tri = m.triangles.col(t);
        const Vector3d c = (m.vertices.col(tri[0]) + m.vertices.col(tri[1]) + m.vertices.col(tri[2])) / 3.0;
        const double s = std::clamp((c - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
        CHECK(m.face_normal(t).dot(c - (a + s * (b - a))) > 0.0);
    }
    // Every directed edge appears once in each direction.
    std::map<std::pair<int, int>, int> edges;
    for (Eigen::Index t = 0; t < m.triangle_count(); ++t)
        for (int k = 0; k < 3; ++k)
            ++edges[{m.triangles(k, t), m.triangles((k + 1) % 3, t)}];
    for (const auto& [e, count] : edges) {
        CHECK(count == 1);
        CHECK(edges.count({e.second, e.first}) == 1);
    }
}

TEST_CASE("capsule fixture joints lie inside the body")
{
    const MeshSequence seq = fixtures::lying_sequence(1, 50.0, [](std::size_t) { return Vector3d::Zero(); });
    CHECK_NOTHROW(seq.validate());
    const TriMesh body = seq.frame_mesh(0);
    const JointSet joints = seq.frame_joints(0);
    for (Eigen::Index j = 0; j < joints.positions.cols(); ++j) {
        const auto cp = closest_point_on_mesh(body, joints.positions.col(j));
        CHECK((joints.positions.col(j) - cp.point).dot(cp.normal) < 0.0);
    }
    const TorsoFrame f = torso_frame(joints);
    CHECK((f.facing - Vector3d::UnitZ()).norm() < 1e-12);
}

TEST_CASE("sequence categories")
{
    CHECK(parse_category("Standing") == SequenceCategory::Standing);
    CHECK(parse_category("lying") == SequenceCategory::Lying);
    CHECK(parse_category("Alternating") == SequenceCategory::Mixed);
    CHECK_THROWS_AS(parse_category("sitting"), Error);
}

TEST_CASE("mesh validation rejects bad indices and degenerate triangles")
{
    TriMesh m = unit_right_triangle();
    CHECK_NOTHROW(m.validate());
    m.triangles(2, 0) = 7;
    CHECK_THROWS_AS(m.validate(), Error);
    m = unit_right_triangle();
    m.vertices.col(2) = m.vertices.col(1) * 0.5;
    CHECK_THROWS_AS(m.validate(), Error);
}
