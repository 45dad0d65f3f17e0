#pragma once

#include <bg2/mesh.hpp>
#include <bg2/raster.hpp>
#include <bg2/texture.hpp>

#include <vector>

namespace bg2 {

/// Rectangular emitter spanning center ± u_axis ± v_axis.
struct AreaLight {
    Vector3d center = Vector3d::Zero();
    Vector3d u_axis = Vector3d::UnitX();
    Vector3d v_axis = Vector3d::UnitY();
    Vector3d radiance = Vector3d::Ones();
    int samples = 1;

    void validate() const;
    /// Stratified sample positions (cell centres of a near-square grid).
    std::vector<Vector3d> sample_points() const;
};

/// Straight-alpha linear RGBA layer plus a z-buffer, row-major pixels.
struct RenderTarget {
    int width = 0;
    int height = 0;
    Eigen::Matrix<double, 4, Eigen::Dynamic> color; // r, g, b, a per pixel
    Eigen::VectorXd depth;                          // metres, +inf where nothing was drawn

    RenderTarget() = default;
    RenderTarget(int w, int h);

    Eigen::Index pixel(int x, int y) const { return static_cast<Eigen::Index>(y) * width + x; }
    double alpha(int x, int y) const { return color(3, pixel(x, y)); }
};

/// Triangulated cloth with per-vertex shading frame.
struct ClothSurface {
    TriMesh mesh;         // two triangles per grid cell, uvs in [0,1]^2
    Matrix3Xd normals;    // area-weighted, unit
    Matrix3Xd tangents;   // along +u, orthogonal to the normal
    Matrix3Xd bitangents; // normal x tangent
};

ClothSurface cloth_surface(const Matrix3Xd& positions, int nx, int ny);

/// Lambertian response to the area lights, no visibility term.
Vector3d shade(const Vector3d& point, const Vector3d& normal, const Vector3d& albedo,
               const std::vector<AreaLight>& lights);

/// Body as depth-only holdout, then textured cloth; background stays transparent.
RenderTarget render_layer(const Matrix3Xd& bake_frame, int nx, int ny, const TriMesh& body,
                          const Camera& camera, const std::vector<AreaLight>& lights,
                          const TextureParams& texture);

/// Same as render_layer into a caller-provided target; throws DimensionMismatch when the target
/// size differs from the camera image size.
void render_layer_into(RenderTarget& target, const Matrix3Xd& bake_frame, int nx, int ny, const TriMesh& body,
                       const Camera& camera, const std::vector<AreaLight>& lights, const TextureParams& texture);

std::vector<ScreenVertex> project_vertices(const Camera& camera, const Matrix3Xd& points);

} // namespace bg2
