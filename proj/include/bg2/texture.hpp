#pragma once

#include <bg2/common.hpp>

#include <json.hpp>

#include <cstdint>

namespace bg2 {

/// Woven-fabric shader parameters. Colours are linear RGB.
struct TextureParams {
    double freq_u = 160.0;
    double freq_v = 160.0;
    double distort_amp = 0.8;    // radians
    double distort_scale = 8.0;  // noise cells per UV unit
    double bump_strength = 0.35;
    double checker_cells = 6.0;
    Vector3d color_a = Vector3d::Constant(0.45);
    Vector3d color_b = Vector3d::Constant(0.08);
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const TextureParams&) const = default;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct ColorRange {
    Vector3d lo = Vector3d::Zero();
    Vector3d hi = Vector3d::Zero();
};

/// Per-field sampling intervals for sample_params.
struct TextureRanges {
    Range freq_u{120.0, 200.0};
    Range freq_v{120.0, 200.0};
    Range distort_amp{0.4, 1.2};
    Range distort_scale{4.0, 12.0};
    Range bump_strength{0.2, 0.5};
    Range checker_cells{4.0, 8.0};
    ColorRange color_a{Vector3d::Constant(0.35), Vector3d::Constant(0.55)};
    ColorRange color_b{Vector3d::Constant(0.03), Vector3d::Constant(0.12)};

    /// Every interval pinned to the corresponding field of p.
    static TextureRanges fixed(const TextureParams& p);
};

/// splitmix64 finaliser; the hash behind noise lattices and seed mixing.
std::uint64_t splitmix64(std::uint64_t x);

/// Smooth 2-D value noise in [-1, 1], periodic with `cells` lattice cells per unit.
double value_noise(double u, double v, double cells, std::uint64_t seed);

/// Product of two perpendicular distorted sinusoids, in [0, 1].
double height(double u, double v, const TextureParams& p);

/// Checkerboard base colour shaded by the weave height.
Vector3d albedo(double u, double v, const TextureParams& p);

/// Bump-mapped shading normal from a central difference of the height field.
Vector3d bump_normal(double u, double v, const Vector3d& normal, const Vector3d& tangent,
                     const Vector3d& bitangent, const TextureParams& p);

/// Uniform draws per field; throws BadRange when lo > hi.
TextureParams sample_params(std::uint64_t seed, const TextureRanges& ranges);

void to_json(nlohmann::json& j, const TextureParams& p);
void from_json(const nlohmann::json& j, TextureParams& p);
void to_json(nlohmann::json& j, const TextureRanges& r);
void from_json(const nlohmann::json& j, TextureRanges& r);

} // namespace bg2
