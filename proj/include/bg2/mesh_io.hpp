#pragma once

#include <bg2/mesh.hpp>

#include <filesystem>
#include <iosfwd>

namespace bg2 {

/// "BGMS" v1 little-endian mesh sequence. Positions and fps are stored as f32.
void write_bgms(std::ostream& os, const MeshSequence& seq);
MeshSequence read_bgms(std::istream& is);

void save_bgms(const std::filesystem::path& path, const MeshSequence& seq);
MeshSequence load_bgms(const std::filesystem::path& path);

/// Builds a sequence from a directory of per-frame OBJ files (sorted by name).
/// Joints come from an optional `joints.json` beside them: {"names": [...], "frames": [[[x,y,z],...],...]}.
MeshSequence import_obj_directory(const std::filesystem::path& dir, double fps);

} // namespace bg2
