#include <bg2/mesh_io.hpp>

#include "binary_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bg2 {

namespace {

constexpr std::uint32_t kBgmsVersion = 1;

struct ObjFrame {
    Matrix3Xd vertices;
    Matrix3Xi triangles;
    Matrix2Xd uvs;
};

ObjFrame parse_obj(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());

    std::vector<Vector3d> verts;
    std::vector<Vector2d> texcoords;
    std::vector<Eigen::Vector3i> tris;
    std::vector<int> vertexUv;

    auto parse_ref = [](const std::string& tok, int count) {
        // "v", "v/vt", "v//vn" or "v/vt/vn"; negative indices are relative.
        int v = 0, vt = 0;
        const auto slash = tok.find('/');
        v = std::stoi(tok.substr(0, slash));
        if (slash != std::string::npos && slash + 1 < tok.size() && tok[slash + 1] != '/')
            vt = std::stoi(tok.substr(slash + 1));
        if (v < 0)
            v = count + v + 1;
        return std::pair{v - 1, vt};
    };

    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            Vector3d p;
            ls >> p.x() >> p.y() >> p.z();
            verts.push_back(p);
            vertexUv.push_back(-1);
        } else if (tag == "vt") {
            Vector2d t;
            ls >> t.x() >> t.y();
            texcoords.push_back(t);
        } else if (tag == "f") {
            std::vector<int> face;
            std::string tok;
            while (ls >> tok) {
                auto [v, vt] = parse_ref(tok, static_cast<int>(verts.size()));
                if (v < 0 || v >= static_cast<int>(verts.size()))
                    throw Error(ErrorCode::FormatError, path.string() + ": face index out of range");
                if (vt != 0 && vertexUv[v] < 0)
                    vertexUv[v] = vt < 0 ? static_cast<int>(texcoords.size()) + vt : vt - 1;
                face.push_back(v);
            }
            for (std::size_t k = 2; k < face.size(); ++k)
                tris.emplace_back(face[0], face[k - 1], face[k]);
        }
    }

    ObjFrame frame;
    frame.vertices.resize(3, static_cast<Eigen::Index>(verts.size()));
    for (std::size_t i = 0; i < verts.size(); ++i)
        frame.vertices.col(static_cast<Eigen::Index>(i)) = verts[i];
    frame.triangles.resize(3, static_cast<Eigen::Index>(tris.size()));
    for (std::size_t i = 0; i < tris.size(); ++i)
        frame.triangles.col(static_cast<Eigen::Index>(i)) = tris[i];
    const bool anyUv = std::any_of(vertexUv.begin(), vertexUv.end(), [](int i) { return i >= 0; });
    if (anyUv) {
        frame.uvs = Matrix2Xd::Zero(2, frame.vertices.cols());
        for (std::size_t i = 0; i < vertexUv.size(); ++i)
            if (vertexUv[i] >= 0 && vertexUv[i] < static_cast<int>(texcoords.size()))
                frame.uvs.col(static_cast<Eigen::Index>(i)) = texcoords[vertexUv[i]];
    }
    return frame;
}

} // namespace

void write_bgms(std::ostream& os, const MeshSequence& seq)
{
    seq.validate();
    detail::LeWriter w(os);
    w.bytes("BGMS", 4);
    w.u32(kBgmsVersion);
    const auto vertexCount = static_cast<std::uint32_t>(seq.topology.vertex_count());
    w.u32(vertexCount);
    w.u32(static_cast<std::uint32_t>(seq.topology.triangle_count()));
    w.u32(static_cast<std::uint32_t>(seq.frame_count()));
    w.f32(seq.fps);
    w.u32(static_cast<std::uint32_t>(seq.joint_names.size()));
    for (const auto& name : seq.joint_names)
        w.string(name);
    for (Eigen::Index t = 0; t < seq.topology.triangle_count(); ++t)
        for (int k = 0; k < 3; ++k)
            w.u32(static_cast<std::uint32_t>(seq.topology.triangles(k, t)));
    if (seq.topology.has_uvs()) {
        w.u32(vertexCount);
        for (Eigen::Index i = 0; i < seq.topology.uvs.cols(); ++i) {
            w.f32(seq.topology.uvs(0, i));
            w.f32(seq.topology.uvs(1, i));
        }
    } else {
        w.u32(0);
    }
    for (std::size_t f = 0; f < seq.frame_count(); ++f) {
        const Matrix3Xd& v = seq.frames[f];
        for (Eigen::Index i = 0; i < v.cols(); ++i)
            for (int k = 0; k < 3; ++k)
                w.f32(v(k, i));
        const Matrix3Xd& j = seq.joints[f];
        for (Eigen::Index i = 0; i < j.cols(); ++i)
            for (int k = 0; k < 3; ++k)
                w.f32(j(k, i));
    }
    w.check();
}

MeshSequence read_bgms(std::istream& is)
{
    detail::LeReader r(is);
    r.magic("BGMS");
    if (const auto version = r.u32(); version != kBgmsVersion)
        throw Error(ErrorCode::FormatError, "unsupported BGMS version " + std::to_string(version));
    const std::uint32_t vertexCount = r.u32();
    const std::uint32_t triCount = r.u32();
    const std::uint32_t frameCount = r.u32();
    MeshSequence seq;
    seq.fps = r.f32();
    const std::uint32_t jointCount = r.u32();
    constexpr std::uint32_t kLimit = 1u << 26;
    if (vertexCount > kLimit || triCount > kLimit || frameCount > kLimit || jointCount > (1u << 16))
        throw Error(ErrorCode::FormatError, "BGMS header counts out of range");

    seq.joint_names.reserve(jointCount);
    for (std::uint32_t j = 0; j < jointCount; ++j)
        seq.joint_names.push_back(r.string());

    seq.topology.triangles.resize(3, triCount);
    for (std::uint32_t t = 0; t < triCount; ++t)
        for (int k = 0; k < 3; ++k)
            seq.topology.triangles(k, t) = static_cast<int>(r.u32());

    const std::uint32_t uvCount = r.u32();
    if (uvCount != 0 && uvCount != vertexCount)
        throw Error(ErrorCode::FormatError, "BGMS uv count must be 0 or vertexCount");
    seq.topology.uvs.resize(2, uvCount);
    for (std::uint32_t i = 0; i < uvCount; ++i) {
        seq.topology.uvs(0, i) = r.f32();
        seq.topology.uvs(1, i) = r.f32();
    }

    seq.frames.resize(frameCount);
    seq.joints.resize(frameCount);
    for (std::uint32_t f = 0; f < frameCount; ++f) {
        Matrix3Xd& v = seq.frames[f];
        v.resize(3, vertexCount);
        for (std::uint32_t i = 0; i < vertexCount; ++i)
            for (int k = 0; k < 3; ++k)
                v(k, i) = r.f32();
        Matrix3Xd& j = seq.joints[f];
        j.resize(3, jointCount);
        for (std::uint32_t i = 0; i < jointCount; ++i)
            for (int k = 0; k < 3; ++k)
                j(k, i) = r.f32();
    }
    seq.topology.vertices = frameCount > 0 ? seq.frames[0] : Matrix3Xd(3, vertexCount);
    if (frameCount == 0)
        seq.topology.vertices.setZero();
    seq.validate();
    return seq;
}

void save_bgms(const std::filesystem::path& path, const MeshSequence& seq)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw Error(ErrorCode::IoError, "cannot write " + path.string());
    write_bgms(os, seq);
}

MeshSequence load_bgms(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return read_bgms(is);
}

MeshSequence import_obj_directory(const std::filesystem::path& dir, double fps)
{
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".obj")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw Error(ErrorCode::IoError, "no .obj files in " + dir.string());

    MeshSequence seq;
    seq.fps = fps;
    for (std::size_t f = 0; f < files.size(); ++f) {
        ObjFrame frame = parse_obj(files[f]);
        if (f == 0) {
            seq.topology.vertices = frame.vertices;
            seq.topology.triangles = frame.triangles;
            seq.topology.uvs = frame.uvs;
        } else if (frame.triangles != seq.topology.triangles) {
            throw Error(ErrorCode::FormatError, files[f].string() + ": topology differs from first frame");
        }
        seq.frames.push_back(std::move(frame.vertices));
    }

    const auto jointsPath = dir / "joints.json";
    if (std::filesystem::exists(jointsPath)) {
        std::ifstream in(jointsPath);
        const auto doc = nlohmann::json::parse(in);
        seq.joint_names = doc.at("names").get<std::vector<std::string>>();
        const auto& frames = doc.at("frames");
        if (frames.size() != seq.frames.size())
            throw Error(ErrorCode::FormatError, "joints.json frame count differs from OBJ count");
        for (const auto& fr : frames) {
            Matrix3Xd j(3, static_cast<Eigen::Index>(seq.joint_names.size()));
            if (fr.size() != seq.joint_names.size())
                throw Error(ErrorCode::FormatError, "joints.json joint count differs from names");
            for (std::size_t i = 0; i < fr.size(); ++i)
                for (int k = 0; k < 3; ++k)
                    j(k, static_cast<Eigen::Index>(i)) = fr[i].at(k).get<double>();
            seq.joints.push_back(std::move(j));
        }
    } else {
        seq.joints.assign(seq.frames.size(), Matrix3Xd(3, 0));
    }
    seq.validate();
    return seq;
}

} // namespace bg2
