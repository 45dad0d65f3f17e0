#include <bg2/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bg2 {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BehindCamera: return "BehindCamera";
    case ErrorCode::DegenerateTorso: return "DegenerateTorso";
    case ErrorCode::MixedExcluded: return "MixedExcluded";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MissingBake: return "MissingBake";
    case ErrorCode::MissingSourceFrame: return "MissingSourceFrame";
    case ErrorCode::InconsistentManifest: return "InconsistentManifest";
    case ErrorCode::EmptyJoints: return "EmptyJoints";
    case ErrorCode::JointSetMismatch: return "JointSetMismatch";
    case ErrorCode::DegenerateNormalizer: return "DegenerateNormalizer";
    case ErrorCode::MissingSourceJoint: return "MissingSourceJoint";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::ModelCountMismatch: return "ModelCountMismatch";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Vector3d TriMesh::face_normal(Eigen::Index tri) const
{
    const Vector3d a = vertices.col(triangles(0, tri));
    const Vector3d b = vertices.col(triangles(1, tri));
    const Vector3d c = vertices.col(triangles(2, tri));
    return (b - a).cross(c - a).normalized();
}

void TriMesh::validate() const
{
    if (has_uvs() && uvs.cols() != vertices.cols())
        throw Error(ErrorCode::FormatError, "uv count does not match vertex count");
    for (Eigen::Index t = 0; t < triangles.cols(); ++t) {
        for (int k = 0; k < 3; ++k) {
            const int idx = triangles(k, t);
            if (idx < 0 || idx >= vertices.cols())
                throw Error(ErrorCode::FormatError, "triangle " + std::to_string(t) + " index out of range");
        }
        const Vector3d a = vertices.col(triangles(0, t));
        const Vector3d b = vertices.col(triangles(1, t));
        const Vector3d c = vertices.col(triangles(2, t));
        if (0.5 * (b - a).cross(c - a).norm() <= 1e-12)
            throw Error(ErrorCode::FormatError, "triangle " + std::to_string(t) + " is degenerate");
    }
}

std::optional<Eigen::Index> JointSet::find(std::string_view name) const
{
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        return std::nullopt;
    return static_cast<Eigen::Index>(it - names.begin());
}

Vector3d JointSet::at(std::string_view name) const
{
    const auto idx = find(name);
    if (!idx)
        throw Error(ErrorCode::InvalidArgument, "joint '" + std::string(name) + "' not present");
    return positions.col(*idx);
}

TriMesh MeshSequence::frame_mesh(std::size_t frame) const
{
    TriMesh m;
    m.vertices = frames.at(frame);
    m.triangles = topology.triangles;
    m.uvs = topology.uvs;
    return m;
}

JointSet MeshSequence::frame_joints(std::size_t frame) const
{
    return JointSet{joint_names, joints.at(frame)};
}

void MeshSequence::validate() const
{
    if (!(fps > 0.0))
        throw Error(ErrorCode::FormatError, "fps must be positive");
    if (joints.size() != frames.size())
        throw Error(ErrorCode::FormatError, "joint track length differs from frame count");
    for (std::size_t f = 0; f < frames.size(); ++f) {
        if (frames[f].cols() != topology.vertices.cols())
            throw Error(ErrorCode::FormatError, "frame " + std::to_string(f) + " vertex count differs");
        if (joints[f].cols() != static_cast<Eigen::Index>(joint_names.size()))
            throw Error(ErrorCode::FormatError, "frame " + std::to_string(f) + " joint count differs");
    }
    topology.validate();
}

const char* to_string(SequenceCategory c)
{
    switch (c) {
    case SequenceCategory::Standing: return "Standing";
    case SequenceCategory::Lying: return "Lying";
    case SequenceCategory::Mixed: return "Mixed";
    }
    return "Unknown";
}

SequenceCategory parse_category(std::string_view s)
{
    if (s == "Standing" || s == "standing")
        return SequenceCategory::Standing;
    if (s == "Lying" || s == "lying")
        return SequenceCategory::Lying;
    if (s == "Mixed" || s == "mixed" || s == "Alternating" || s == "alternating")
        return SequenceCategory::Mixed;
    throw Error(ErrorCode::InvalidArgument, "unknown sequence category '" + std::string(s) + "'");
}

void Camera::validate() const
{
    if (!(fx > 0.0 && fy > 0.0))
        throw Error(ErrorCode::InvalidArgument, "camera focal lengths must be positive");
    if (width <= 0 || height <= 0)
        throw Error(ErrorCode::InvalidArgument, "camera image size must be positive");
    if (!(rotation * rotation.transpose()).isApprox(Matrix3d::Identity(), 1e-6) ||
        std::abs(rotation.determinant() - 1.0) > 1e-6)
        throw Error(ErrorCode::InvalidArgument, "camera rotation is not orthonormal");
}

Camera Camera::look_at(const Vector3d& eye, const Vector3d& target, const Vector3d& up,
                       double focal, int width, int height)
{
    const Vector3d forward = (target - eye).normalized();
    const Vector3d right = forward.cross(up).normalized();
    const Vector3d down = forward.cross(right);

    Camera cam;
    cam.rotation.row(0) = right.transpose();
    cam.rotation.row(1) = down.transpose();
    cam.rotation.row(2) = forward.transpose();
    cam.translation = -cam.rotation * eye;
    cam.fx = cam.fy = focal;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    cam.width = width;
    cam.height = height;
    return cam;
}

TorsoFrame torso_frame(const JointSet& joints, const TorsoJoints& names)
{
    const Vector3d pelvis = joints.at(names.pelvis);
    const Vector3d neck = joints.at(names.neck);
    const Vector3d hips = joints.at(names.left_hip) - joints.at(names.right_hip);

    const Vector3d spine = neck - pelvis;
    if (spine.norm() < 1e-6)
        throw Error(ErrorCode::DegenerateTorso, "neck coincides with pelvis");
    if (hips.norm() < 1e-6)
        throw Error(ErrorCode::DegenerateTorso, "hip joints coincide");

    TorsoFrame frame;
    frame.up = spine.normalized();
    const Vector3d lateral = hips - hips.dot(frame.up) * frame.up;
    if (lateral.norm() < 1e-6)
        throw Error(ErrorCode::DegenerateTorso, "hip axis parallel to spine");
    frame.lateral = lateral.normalized();
    frame.facing = frame.lateral.cross(frame.up);
    return frame;
}

Eigen::AlignedBox3d bounding_box(const Matrix3Xd& points)
{
    Eigen::AlignedBox3d box;
    for (Eigen::Index i = 0; i < points.cols(); ++i)
        box.extend(Vector3d(points.col(i)));
    return box;
}

ClosestPoint<double> closest_point_on_mesh(const TriMesh& mesh, const Vector3d& query)
{
    ClosestPoint<double> best{Vector3d::Zero(), Vector3d::Zero(), std::numeric_limits<double>::infinity(), -1};
    double bestSq = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < mesh.triangle_count(); ++t) {
        const Vector3d p = closest_point_on_triangle<double>(query,
                                                             mesh.vertices.col(mesh.triangles(0, t)),
                                                             mesh.vertices.col(mesh.triangles(1, t)),
                                                             mesh.vertices.col(mesh.triangles(2, t)));
        const double dSq = (query - p).squaredNorm();
        if (dSq < bestSq) {
            bestSq = dSq;
            best.point = p;
            best.triangle = t;
        }
    }
    if (best.triangle >= 0) {
        best.distance = std::sqrt(bestSq);
        best.normal = mesh.face_normal(best.triangle);
    }
    return best;
}

MeshBvh::MeshBvh(const TriMesh& mesh)
    : mesh_(mesh)
{
    const int n = static_cast<int>(mesh_.triangle_count());
    if (n == 0)
        return;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    boxes_.resize(n);
    for (int t = 0; t < n; ++t) {
        Eigen::AlignedBox3d box;
        for (int k = 0; k < 3; ++k)
            box.extend(Vector3d(mesh_.vertices.col(mesh_.triangles(k, t))));
        boxes_[t] = box;
    }
    nodes_.reserve(2 * n);
    build(0, n, 0);
}

int MeshBvh::build(int first, int count, int depth)
{
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Eigen::AlignedBox3d box;
    for (int i = first; i < first + count; ++i)
        box.extend(boxes_[order_[i]]);
    nodes_[index].box = box;

    constexpr int kLeafSize = 4;
    if (count <= kLeafSize || depth > 40) {
        nodes_[index].first = first;
        nodes_[index].count = count;
        return index;
    }

    int axis = 0;
    box.sizes().maxCoeff(&axis);
    const int mid = first + count / 2;
    std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                     [&](int a, int b) {
                         const double ca = boxes_[a].center()[axis];
                         const double cb = boxes_[b].center()[axis];
                         return ca < cb || (ca == cb && a < b);
                     });
    const int left = build(first, mid - first, depth + 1);
    const int right = build(mid, first + count - mid, depth + 1);
    nodes_[index].left = left;
    nodes_[index].right = right;
    return index;
}

void MeshBvh::query(int node, const Vector3d& q, ClosestPoint<double>& best, double& bestSq) const
{
    const Node& n = nodes_[node];
    if (n.left < 0) {
        for (int i = n.first; i < n.first + n.count; ++i) {
            const int t = order_[i];
            const Vector3d p = closest_point_on_triangle<double>(q,
                                                                 mesh_.vertices.col(mesh_.triangles(0, t)),
                                                                 mesh_.vertices.col(mesh_.triangles(1, t)),
                                                                 mesh_.vertices.col(mesh_.triangles(2, t)));
            const double dSq = (q - p).squaredNorm();
            if (dSq < bestSq || (dSq == bestSq && t < best.triangle)) {
                bestSq = dSq;
                best.point = p;
                best.triangle = t;
            }
        }
        return;
    }
    const double dl = nodes_[n.left].box.squaredExteriorDistance(q);
    const double dr = nodes_[n.right].box.squaredExteriorDistance(q);
    const int nearFirst = dl <= dr ? n.left : n.right;
    const int farSecond = dl <= dr ? n.right : n.left;
    const double dNear = std::min(dl, dr), dFar = std::max(dl, dr);
    if (dNear <= bestSq)
        query(nearFirst, q, best, bestSq);
    if (dFar <= bestSq)
        query(farSecond, q, best, bestSq);
}

ClosestPoint<double> MeshBvh::closest_point(const Vector3d& query) const
{
    ClosestPoint<double> best{Vector3d::Zero(), Vector3d::Zero(), std::numeric_limits<double>::infinity(), -1};
    if (nodes_.empty())
        return best;
    double bestSq = std::numeric_limits<double>::infinity();
    this->query(0, query, best, bestSq);
    best.distance = std::sqrt(bestSq);
    best.normal = mesh_.face_normal(best.triangle);
    return best;
}

} // namespace bg2
