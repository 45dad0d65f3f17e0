#pragma once

#include <bg2/manifest.hpp>
#include <bg2/mesh.hpp>

#include <filesystem>
#include <functional>

namespace bg2::fixtures {

/// Closed capsule around segment a-b with outward winding.
TriMesh capsule_mesh(const Vector3d& a, const Vector3d& b, double radius, int segments = 16, int cap_rings = 4,
                     int body_rings = 8);

/// Seventeen joints (Human3.6M-style names) laid out inside a capsule person whose feet sit at
/// `feet`, head at `head`, chest pointing along `facing`.
JointSet capsule_joints(const Vector3d& feet, const Vector3d& head, const Vector3d& facing, double radius);

/// Person lying on its back along +x on top of the fixture bed.
struct LyingPerson {
    double length = 1.7;
    double radius = 0.15;
    double bed_top = 0.5;
};

/// Sequence of a lying capsule person translated by offset(frame) every frame.
MeshSequence lying_sequence(std::size_t frames, double fps, const std::function<Vector3d(std::size_t)>& offset,
                            const LyingPerson& person = {});

/// Rests for 10 frames, then slides the person sideways at 1.5 m/s (at 50 fps) out from under the blanket.
Vector3d walking_offset(std::size_t frame);

BedBox fixture_bed(const LyingPerson& person = {});
std::vector<Camera> fixture_cameras(int width, int height);
std::vector<AreaLight> fixture_lights();

struct DemoOptions {
    std::size_t frames = 10;
    int image_size = 128;
    int videos = 1;
    bool walking = false; // second and later videos slide out from under the blanket
    std::uint64_t seed = 7;
};

/// Writes BGMS files, synthetic source frames and manifest.json under `root`; returns the manifest path.
std::filesystem::path write_demo_dataset(const std::filesystem::path& root, const DemoOptions& options);

} // namespace bg2::fixtures
