#include <bg2/eval.hpp>
#include <bg2/parallel.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

namespace bg2 {

std::optional<Eigen::Index> PoseRecord::find(const std::string& name) const
{
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        return std::nullopt;
    return static_cast<Eigen::Index>(it - names.begin());
}

Vector2d PoseRecord::at(const std::string& name) const
{
    const auto idx = find(name);
    if (!idx)
        throw Error(ErrorCode::JointSetMismatch, frame_id + ": joint '" + name + "' missing");
    return joints.col(*idx);
}

Matrix2Xd aligned_joints(const PoseRecord& reference, const PoseRecord& other)
{
    if (reference.names.size() != other.names.size())
        throw Error(ErrorCode::JointSetMismatch,
                    reference.frame_id + ": " + std::to_string(other.names.size()) + " joints vs " +
                        std::to_string(reference.names.size()));
    Matrix2Xd out(2, static_cast<Eigen::Index>(reference.names.size()));
    for (std::size_t i = 0; i < reference.names.size(); ++i) {
        const auto idx = other.find(reference.names[i]);
        if (!idx)
            throw Error(ErrorCode::JointSetMismatch, reference.frame_id + ": joint '" + reference.names[i] + "' missing");
        out.col(static_cast<Eigen::Index>(i)) = other.joints.col(*idx);
    }
    return out;
}

double pck(const PoseRecord& pred, const PoseRecord& gt, const BBox& bbox, double threshold)
{
    return pck_points(aligned_joints(gt, pred), gt.joints, bbox.size(), threshold);
}

double nme(const PoseRecord& pred, const PoseRecord& gt, const std::string& head_joint, const std::string& thorax_joint)
{
    const double norm = (gt.at(head_joint) - gt.at(thorax_joint)).norm();
    return nme_points(aligned_joints(gt, pred), gt.joints, norm);
}

void SkeletonMap::validate(const Rig& target) const
{
    std::set<std::string> seen;
    for (const auto& [src, dst] : entries)
        if (!seen.insert(dst).second)
            throw Error(ErrorCode::InvalidArgument, "skeleton map targets '" + dst + "' twice");
    for (const auto& j : target.joints)
        if (!seen.count(j))
            throw Error(ErrorCode::InvalidArgument, "skeleton map has no source for target joint '" + j + "'");
    if (seen.size() != target.joints.size())
        throw Error(ErrorCode::InvalidArgument, "skeleton map targets joints outside rig '" + target.name + "'");
}

SkeletonMap SkeletonMap::inverse() const
{
    SkeletonMap inv;
    inv.source_rig = target_rig;
    inv.target_rig = source_rig;
    for (const auto& [src, dst] : entries)
        inv.entries.emplace_back(dst, src);
    return inv;
}

PoseRecord remap_skeleton(const PoseRecord& pred, const SkeletonMap& map)
{
    PoseRecord out;
    out.frame_id = pred.frame_id;
    out.split = pred.split;
    out.joints.resize(2, static_cast<Eigen::Index>(map.entries.size()));
    if (pred.confidence)
        out.confidence = Eigen::VectorXd(static_cast<Eigen::Index>(map.entries.size()));
    for (std::size_t i = 0; i < map.entries.size(); ++i) {
        const auto& [src, dst] = map.entries[i];
        const auto idx = pred.find(src);
        if (!idx)
            throw Error(ErrorCode::MissingSourceJoint, pred.frame_id + ": source joint '" + src + "' not in prediction");
        out.names.push_back(dst);
        out.joints.col(static_cast<Eigen::Index>(i)) = pred.joints.col(*idx);
        if (out.confidence)
            (*out.confidence)[static_cast<Eigen::Index>(i)] = (*pred.confidence)[*idx];
    }
    return out;
}

Split parse_split(const std::string& s)
{
    if (s == "none" || s.empty())
        return Split::None;
    if (s == "cover")
        return Split::Cover;
    if (s == "uncover")
        return Split::Uncover;
    throw Error(ErrorCode::InvalidArgument, "unknown split '" + s + "'");
}

namespace {

bool in_split(const PoseRecord& gt, Split split)
{
    switch (split) {
    case Split::None: return true;
    case Split::Cover: return gt.split == "cover";
    case Split::Uncover: return gt.split == "uncover";
    }
    return false;
}

PoseRecord restrict_to(const PoseRecord& rec, const std::vector<std::string>& joints)
{
    PoseRecord out;
    out.frame_id = rec.frame_id;
    out.split = rec.split;
    out.names = joints;
    out.joints.resize(2, static_cast<Eigen::Index>(joints.size()));
    for (std::size_t i = 0; i < joints.size(); ++i)
        out.joints.col(static_cast<Eigen::Index>(i)) = rec.at(joints[i]);
    return out;
}

} // namespace

SetMetrics evaluate_set(const std::vector<PoseRecord>& preds, const std::vector<PoseRecord>& gts, const Rig& rig,
                        const SkeletonMap* map, Split split, int workers)
{
    std::unordered_map<std::string, const PoseRecord*> predById;
    for (const auto& p : preds)
        predById.emplace(p.frame_id, &p);
    std::set<std::string> gtIds;
    for (const auto& g : gts)
        gtIds.insert(g.frame_id);

    std::vector<const PoseRecord*> selected;
    std::vector<std::string> missing, extra;
    for (const auto& g : gts) {
        if (!in_split(g, split))
            continue;
        selected.push_back(&g);
        if (!predById.count(g.frame_id))
            missing.push_back(g.frame_id);
    }
    for (const auto& p : preds)
        if (!gtIds.count(p.frame_id))
            extra.push_back(p.frame_id);
    if (!missing.empty() || !extra.empty()) {
        std::string msg;
        for (const auto& m : missing)
            msg += " missing:" + m;
        for (const auto& e : extra)
            msg += " extra:" + e;
        throw Error(ErrorCode::FrameMismatch, "prediction frames do not match ground truth:" + msg);
    }

    // Ordered by frame id for a deterministic reduction.
    std::sort(selected.begin(), selected.end(),
              [](const PoseRecord* a, const PoseRecord* b) { return a->frame_id < b->frame_id; });
    std::vector<double> framePck(selected.size()), frameNme(selected.size());
    parallel_for(selected.size(), workers, [&](std::size_t i) {
        const PoseRecord gt = restrict_to(*selected[i], rig.joints);
        const PoseRecord& raw = *predById.at(gt.frame_id);
        const PoseRecord pred = restrict_to(map ? remap_skeleton(raw, *map) : raw, rig.joints);
        framePck[i] = pck(pred, gt, bbox_from_joints(gt.joints));
        frameNme[i] = nme(pred, gt, rig.head, rig.thorax);
    });

    SetMetrics m;
    m.frames = selected.size();
    if (m.frames == 0)
        return m;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        m.pck += framePck[i];
        m.nme += frameNme[i];
    }
    m.pck /= static_cast<double>(m.frames);
    m.nme /= static_cast<double>(m.frames);
    return m;
}

const char* to_string(BlanketCondition b)
{
    switch (b) {
    case BlanketCondition::No: return "No";
    case BlanketCondition::Synthetic: return "Synthetic";
    case BlanketCondition::Real: return "Real";
    }
    return "No";
}

BlanketCondition parse_blanket(const std::string& s)
{
    if (s == "No")
        return BlanketCondition::No;
    if (s == "Synthetic")
        return BlanketCondition::Synthetic;
    if (s == "Real")
        return BlanketCondition::Real;
    throw Error(ErrorCode::InvalidArgument, "unknown blanket condition '" + s + "'");
}

std::vector<std::string> MetricReport::test_sets() const
{
    std::vector<std::string> sets;
    for (const auto& r : rows)
        if (std::find(sets.begin(), sets.end(), r.test_set) == sets.end())
            sets.push_back(r.test_set);
    return sets;
}

std::vector<DifferenceRow> MetricReport::differences() const
{
    std::vector<DifferenceRow> out;
    for (const auto& set : test_sets()) {
        std::vector<const MetricRow*> pair;
        for (const auto& r : rows)
            if (r.test_set == set)
                pair.push_back(&r);
        if (pair.size() != 2)
            throw Error(ErrorCode::ModelCountMismatch, set + ": expected two models");
        out.push_back({set, pair[1]->pck - pair[0]->pck, pair[1]->nme - pair[0]->nme});
    }
    return out;
}

MetricReport build_report(const std::vector<MetricRow>& rows)
{
    std::vector<std::string> order;
    std::map<std::string, std::vector<MetricRow>> bySet;
    for (const auto& r : rows) {
        if (!bySet.count(r.test_set))
            order.push_back(r.test_set);
        bySet[r.test_set].push_back(r);
    }
    MetricReport report;
    for (const auto& set : order) {
        const auto& group = bySet[set];
        if (group.size() != 2)
            throw Error(ErrorCode::ModelCountMismatch,
                        set + ": " + std::to_string(group.size()) + " models, expected exactly 2");
        const double bestPck = std::max(group[0].pck, group[1].pck);
        const double bestNme = std::min(group[0].nme, group[1].nme);
        for (const auto& r : group) {
            report.rows.push_back(r);
            report.best_pck.push_back(r.pck == bestPck);
            report.best_nme.push_back(r.nme == bestNme);
        }
    }
    return report;
}

std::string MetricReport::to_text() const
{
    std::size_t setW = 11, modelW = 10;
    for (const auto& r : rows) {
        setW = std::max(setW, r.test_set.size());
        modelW = std::max(modelW, r.model.size());
    }
    auto mark = [](double v, bool best) { return fmt::format("{}{:.3f}", best ? "*" : " ", v); };
    std::string out = fmt::format("{:<{}}  {:<9}  {:<{}}  {:>7}  {:>7}\n", "Test Dataset", setW, "Blanket", "Model",
                                  modelW, "PCK", "NME");
    out += std::string(setW + modelW + 33, '-') + "\n";
    const auto diffs = differences();
    for (std::size_t s = 0; s < diffs.size(); ++s) {
        for (std::size_t k = 0; k < 2; ++k) {
            const std::size_t i = 2 * s + k;
            const auto& r = rows[i];
            out += fmt::format("{:<{}}  {:<9}  {:<{}}  {:>7}  {:>7}\n", r.test_set, setW, to_string(r.blanket), r.model,
                               modelW, mark(r.pck, best_pck[i]), mark(r.nme, best_nme[i]));
        }
        out += fmt::format("{:<{}}  {:<9}  {:<{}}  {:>+7.3f}  {:>+7.3f}\n", diffs[s].test_set, setW, "", "Difference",
                           modelW, diffs[s].pck, diffs[s].nme);
    }
    out += "(* best result for the test set)\n";
    return out;
}

std::string MetricReport::to_csv() const
{
    std::string out = "test_set,blanket,model,pck,nme,best_pck,best_nme\n";
    const auto diffs = differences();
    for (std::size_t s = 0; s < diffs.size(); ++s) {
        for (std::size_t k = 0; k < 2; ++k) {
            const std::size_t i = 2 * s + k;
            const auto& r = rows[i];
            out += fmt::format("{},{},{},{:.3f},{:.3f},{},{}\n", r.test_set, to_string(r.blanket), r.model, r.pck, r.nme,
                               best_pck[i] ? 1 : 0, best_nme[i] ? 1 : 0);
        }
        out += fmt::format("{},,Difference,{:+.3f},{:+.3f},,\n", diffs[s].test_set, diffs[s].pck, diffs[s].nme);
    }
    return out;
}

PoseRecord pose_from_json(const nlohmann::json& j)
{
    PoseRecord p;
    p.frame_id = j.at("frameId").is_string() ? j.at("frameId").get<std::string>() : j.at("frameId").dump();
    p.split = j.value("split", std::string{});
    const auto& joints = j.at("joints");
    p.joints.resize(2, static_cast<Eigen::Index>(joints.size()));
    bool anyConf = false;
    Eigen::VectorXd conf = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(joints.size()));
    for (std::size_t i = 0; i < joints.size(); ++i) {
        const auto& jt = joints[i];
        p.names.push_back(jt.at("name").get<std::string>());
        p.joints.col(static_cast<Eigen::Index>(i)) << jt.at("x").get<double>(), jt.at("y").get<double>();
        if (jt.contains("confidence")) {
            anyConf = true;
            conf[static_cast<Eigen::Index>(i)] = jt["confidence"].get<double>();
        }
    }
    if (anyConf)
        p.confidence = conf;
    return p;
}

nlohmann::json to_json(const PoseRecord& p)
{
    nlohmann::json joints = nlohmann::json::array();
    for (std::size_t i = 0; i < p.names.size(); ++i) {
        nlohmann::json jt{{"name", p.names[i]},
                          {"x", p.joints(0, static_cast<Eigen::Index>(i))},
                          {"y", p.joints(1, static_cast<Eigen::Index>(i))}};
        if (p.confidence)
            jt["confidence"] = (*p.confidence)[static_cast<Eigen::Index>(i)];
        joints.push_back(std::move(jt));
    }
    nlohmann::json j{{"frameId", p.frame_id}, {"joints", std::move(joints)}};
    if (!p.split.empty())
        j["split"] = p.split;
    return j;
}

std::vector<PoseRecord> load_pose_records(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<PoseRecord> out;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        try {
            out.push_back(pose_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::FormatError, path.string() + ":" + std::to_string(lineNo) + ": " + e.what());
        }
    }
    return out;
}

Rig rig_from_json(const nlohmann::json& j)
{
    Rig r;
    r.name = j.at("name").get<std::string>();
    r.joints = j.at("joints").get<std::vector<std::string>>();
    r.head = j.at("head").get<std::string>();
    r.thorax = j.at("thorax").get<std::string>();
    return r;
}

Rig load_rig(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return rig_from_json(nlohmann::json::parse(in));
}

SkeletonMap skeleton_map_from_json(const nlohmann::json& j)
{
    SkeletonMap m;
    m.source_rig = j.at("sourceRig").get<std::string>();
    m.target_rig = j.at("targetRig").get<std::string>();
    for (const auto& e : j.at("entries"))
        m.entries.emplace_back(e.at("source").get<std::string>(), e.at("target").get<std::string>());
    return m;
}

SkeletonMap load_skeleton_map(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return skeleton_map_from_json(nlohmann::json::parse(in));
}

MetricRow metric_row_from_json(const nlohmann::json& j)
{
    MetricRow r;
    r.test_set = j.at("testSet").get<std::string>();
    r.blanket = parse_blanket(j.value("blanket", std::string("No")));
    r.model = j.at("model").get<std::string>();
    r.pck = j.at("pck").get<double>();
    r.nme = j.at("nme").get<double>();
    return r;
}

nlohmann::json to_json(const MetricRow& r)
{
    return {{"testSet", r.test_set}, {"blanket", to_string(r.blanket)}, {"model", r.model}, {"pck", r.pck}, {"nme", r.nme}};
}

} // namespace bg2
