#pragma once

#include <bg2/common.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bg2 {

/// Triangle mesh with one column per vertex / triangle.
struct TriMesh {
    Matrix3Xd vertices;
    Matrix3Xi triangles;
    Matrix2Xd uvs; // empty, or one column per vertex

    Eigen::Index vertex_count() const { return vertices.cols(); }
    Eigen::Index triangle_count() const { return triangles.cols(); }
    bool has_uvs() const { return uvs.cols() > 0; }

    Vector3d face_normal(Eigen::Index tri) const;

    /// Throws FormatError on out-of-range indices or triangles with area <= 1e-12.
    void validate() const;
};

/// Named 3-D joints of one frame; column i belongs to names[i].
struct JointSet {
    std::vector<std::string> names;
    Matrix3Xd positions;

    std::optional<Eigen::Index> find(std::string_view name) const;
    Vector3d at(std::string_view name) const; // throws InvalidArgument when absent
};

/// Shared topology plus per-frame vertex positions and joint tracks.
struct MeshSequence {
    TriMesh topology; // vertices hold frame 0
    std::vector<Matrix3Xd> frames;
    double fps = 50.0;
    std::vector<std::string> joint_names;
    std::vector<Matrix3Xd> joints; // 3 x jointCount per frame

    std::size_t frame_count() const { return frames.size(); }
    TriMesh frame_mesh(std::size_t frame) const;
    JointSet frame_joints(std::size_t frame) const;

    void validate() const;
};

enum class SequenceCategory { Standing, Lying, Mixed };

const char* to_string(SequenceCategory c);
SequenceCategory parse_category(std::string_view s);

/// Pinhole camera, world -> camera rigid transform followed by intrinsics.
struct Camera {
    std::string id;
    double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
    Matrix3d rotation = Matrix3d::Identity();
    Vector3d translation = Vector3d::Zero();
    int width = 1, height = 1;

    void validate() const;

    /// Camera placed at `eye` looking at `target`; image y grows along -up.
    static Camera look_at(const Vector3d& eye, const Vector3d& target, const Vector3d& up,
                          double focal, int width, int height);
};

template <typename Scalar>
struct Projection {
    Scalar x;
    Scalar y;
    Scalar depth;
};

inline constexpr double kMinDepth = 1e-9;

/// Pinhole projection; throws BehindCamera when the camera-space depth is <= 1e-9.
template <typename Scalar>
Projection<Scalar> project(const Camera& cam, const Vec3<Scalar>& p)
{
    const Vec3<Scalar> pc = cam.rotation.template cast<Scalar>() * p + cam.translation.template cast<Scalar>();
    if (!(pc.z() > Scalar(kMinDepth)))
        throw Error(ErrorCode::BehindCamera, "point has camera depth <= 1e-9");
    return {Scalar(cam.fx) * pc.x() / pc.z() + Scalar(cam.cx),
            Scalar(cam.fy) * pc.y() / pc.z() + Scalar(cam.cy),
            pc.z()};
}

template <typename Scalar>
Vec3<Scalar> unproject(const Camera& cam, Scalar x, Scalar y, Scalar depth)
{
    const Vec3<Scalar> pc((x - Scalar(cam.cx)) / Scalar(cam.fx) * depth,
                          (y - Scalar(cam.cy)) / Scalar(cam.fy) * depth,
                          depth);
    return cam.rotation.transpose().template cast<Scalar>() * (pc - cam.translation.template cast<Scalar>());
}

/// Joint names used to derive the torso frame.
struct TorsoJoints {
    std::string pelvis = "pelvis";
    std::string neck = "neck";
    std::string left_hip = "left_hip";
    std::string right_hip = "right_hip";
};

struct TorsoFrame {
    Vector3d up;
    Vector3d facing;
    Vector3d lateral;
};

/// up = neck - pelvis, lateral = left hip - right hip orthogonalized, facing = lateral x up.
TorsoFrame torso_frame(const JointSet& joints, const TorsoJoints& names = {});

template <typename Scalar>
struct ClosestPoint {
    Vec3<Scalar> point;
    Vec3<Scalar> normal;
    Scalar distance;
    Eigen::Index triangle = -1;
};

/// Closest point on triangle (a, b, c) by Voronoi region classification.
template <typename Scalar>
Vec3<Scalar> closest_point_on_triangle(const Vec3<Scalar>& p, const Vec3<Scalar>& a,
                                       const Vec3<Scalar>& b, const Vec3<Scalar>& c)
{
    const Vec3<Scalar> ab = b - a, ac = c - a, ap = p - a;
    const Scalar d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0 && d2 <= 0)
        return a;

    const Vec3<Scalar> bp = p - b;
    const Scalar d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3)
        return b;

    const Scalar vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0)
        return a + ab * (d1 / (d1 - d3));

    const Vec3<Scalar> cp = p - c;
    const Scalar d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6)
        return c;

    const Scalar vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0)
        return a + ac * (d2 / (d2 - d6));

    const Scalar va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

    const Scalar denom = Scalar(1) / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

/// Bounding-volume hierarchy over the triangles of one mesh frame.
class MeshBvh {
public:
    MeshBvh() = default;
    explicit MeshBvh(const TriMesh& mesh);

    bool empty() const { return nodes_.empty(); }

    /// Nearest surface point; ties resolve to the lowest triangle index.
    ClosestPoint<double> closest_point(const Vector3d& query) const;

private:
    struct Node {
        Eigen::AlignedBox3d box;
        int left = -1, right = -1;
        int first = 0, count = 0;
    };

    int build(int first, int count, int depth);
    void query(int node, const Vector3d& q, ClosestPoint<double>& best, double& bestSq) const;

    TriMesh mesh_;
    std::vector<Node> nodes_;
    std::vector<int> order_;
    std::vector<Eigen::AlignedBox3d> boxes_;
};

/// Exhaustive closest point; the BVH must agree with it.
ClosestPoint<double> closest_point_on_mesh(const TriMesh& mesh, const Vector3d& query);

Eigen::AlignedBox3d bounding_box(const Matrix3Xd& points);

} // namespace bg2
