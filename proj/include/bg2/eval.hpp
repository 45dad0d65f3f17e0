#pragma once

#include <bg2/common.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bg2 {

struct BBox {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    /// Scalar box size used by PCK: the longer side.
    double size() const { return std::max(width(), height()); }
    bool operator==(const BBox&) const = default;
};

inline constexpr double kBBoxPad = 30.0;
inline constexpr double kPckThreshold = 0.05;

/// Extremes of the joints (2 x N) grown by `pad` pixels on every side, unclamped.
template <typename Derived>
BBox bbox_from_joints(const Eigen::MatrixBase<Derived>& joints, double pad = kBBoxPad)
{
    static_assert(Derived::RowsAtCompileTime == 2 || Derived::RowsAtCompileTime == Eigen::Dynamic);
    if (joints.cols() == 0)
        throw Error(ErrorCode::EmptyJoints, "bounding box needs at least one joint");
    const auto lo = joints.rowwise().minCoeff().eval();
    const auto hi = joints.rowwise().maxCoeff().eval();
    return {lo(0) - pad, lo(1) - pad, hi(0) + pad, hi(1) + pad};
}

/// Fraction of columns whose pred-gt distance is within threshold * bbox_size (inclusive).
template <typename PredDerived, typename GtDerived>
double pck_points(const Eigen::MatrixBase<PredDerived>& pred, const Eigen::MatrixBase<GtDerived>& gt,
                  double bbox_size, double threshold = kPckThreshold)
{
    if (pred.cols() != gt.cols())
        throw Error(ErrorCode::JointSetMismatch, "prediction and ground truth joint counts differ");
    if (gt.cols() == 0)
        throw Error(ErrorCode::EmptyJoints, "no joints to score");
    const double cutoff = threshold * bbox_size;
    const auto dist = (pred - gt).colwise().norm().eval();
    return static_cast<double>((dist.array() <= cutoff).count()) / static_cast<double>(gt.cols());
}

/// Mean pred-gt distance divided by `normalizer`.
template <typename PredDerived, typename GtDerived>
double nme_points(const Eigen::MatrixBase<PredDerived>& pred, const Eigen::MatrixBase<GtDerived>& gt,
                  double normalizer)
{
    if (pred.cols() != gt.cols())
        throw Error(ErrorCode::JointSetMismatch, "prediction and ground truth joint counts differ");
    if (gt.cols() == 0)
        throw Error(ErrorCode::EmptyJoints, "no joints to score");
    if (!(normalizer >= 1e-6))
        throw Error(ErrorCode::DegenerateNormalizer, "head-thorax distance below 1e-6 px");
    return (pred - gt).colwise().norm().mean() / normalizer;
}

/// Named 2-D joints of one frame; column i belongs to names[i].
struct PoseRecord {
    std::string frame_id;
    std::vector<std::string> names;
    Matrix2Xd joints;
    std::optional<Eigen::VectorXd> confidence;
    std::string split; // optional tag such as "cover" / "uncover"

    std::optional<Eigen::Index> find(const std::string& name) const;
    Vector2d at(const std::string& name) const;
};

/// Columns of `other` reordered to match the joint order of `reference`; JointSetMismatch when the
/// name sets differ.
Matrix2Xd aligned_joints(const PoseRecord& reference, const PoseRecord& other);

double pck(const PoseRecord& pred, const PoseRecord& gt, const BBox& bbox, double threshold = kPckThreshold);
double nme(const PoseRecord& pred, const PoseRecord& gt, const std::string& head_joint,
           const std::string& thorax_joint);

/// Joint layout of an annotation format plus the NME normaliser joints.
struct Rig {
    std::string name;
    std::vector<std::string> joints;
    std::string head;
    std::string thorax;
};

struct SkeletonMap {
    std::string source_rig;
    std::string target_rig;
    std::vector<std::pair<std::string, std::string>> entries; // source -> target

    /// Target names unique and covering every joint of `target` exactly once.
    void validate(const Rig& target) const;
    SkeletonMap inverse() const;
};

PoseRecord remap_skeleton(const PoseRecord& pred, const SkeletonMap& map);

enum class Split { None, Cover, Uncover };
Split parse_split(const std::string& s);

struct SetMetrics {
    double pck = 0.0;
    double nme = 0.0;
    std::size_t frames = 0;
};

/// Per-frame PCK/NME against GT boxes padded by 30 px, averaged with equal frame weights.
SetMetrics evaluate_set(const std::vector<PoseRecord>& preds, const std::vector<PoseRecord>& gts, const Rig& rig,
                        const SkeletonMap* map, Split split, int workers = 1);

enum class BlanketCondition { No, Synthetic, Real };
const char* to_string(BlanketCondition b);
BlanketCondition parse_blanket(const std::string& s);

struct MetricRow {
    std::string test_set;
    BlanketCondition blanket = BlanketCondition::No;
    std::string model;
    double pck = 0.0;
    double nme = 0.0;
};

struct DifferenceRow {
    std::string test_set;
    double pck = 0.0; // model B - model A
    double nme = 0.0;
};

/// Rows grouped by test set (first-appearance order), model A before model B.
struct MetricReport {
    std::vector<MetricRow> rows;
    std::vector<bool> best_pck;
    std::vector<bool> best_nme;

    std::vector<std::string> test_sets() const;
    /// Recomputed from the stored rows on every call.
    std::vector<DifferenceRow> differences() const;

    std::string to_text() const;
    std::string to_csv() const;
};

MetricReport build_report(const std::vector<MetricRow>& rows);

// JSON interchange.
PoseRecord pose_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PoseRecord& p);
std::vector<PoseRecord> load_pose_records(const std::filesystem::path& path);
Rig load_rig(const std::filesystem::path& path);
Rig rig_from_json(const nlohmann::json& j);
SkeletonMap load_skeleton_map(const std::filesystem::path& path);
SkeletonMap skeleton_map_from_json(const nlohmann::json& j);
MetricRow metric_row_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MetricRow& r);

} // namespace bg2
