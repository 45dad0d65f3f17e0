#include <bg2/render.hpp>

#include <cmath>
#include <numbers>

namespace bg2 {

void AreaLight::validate() const
{
    if (samples < 1)
        throw Error(ErrorCode::InvalidArgument, "area light needs at least one sample");
    if (u_axis.norm() == 0.0 || v_axis.norm() == 0.0 || u_axis.cross(v_axis).norm() < 1e-12)
        throw Error(ErrorCode::InvalidArgument, "area light axes must be non-zero and non-parallel");
}

std::vector<Vector3d> AreaLight::sample_points() const
{
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples))));
    const int rows = (samples + cols - 1) / cols;
    std::vector<Vector3d> pts;
    pts.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        const int r = k / cols, c = k % cols;
        const int inRow = r + 1 < rows ? cols : samples - r * cols;
        const double a = (c + 0.5) / inRow;
        const double b = (r + 0.5) / rows;
        pts.push_back(center + (2.0 * a - 1.0) * u_axis + (2.0 * b - 1.0) * v_axis);
    }
    return pts;
}

RenderTarget::RenderTarget(int w, int h)
    : width(w), height(h),
      color(Eigen::Matrix<double, 4, Eigen::Dynamic>::Zero(4, static_cast<Eigen::Index>(w) * h)),
      depth(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(w) * h, std::numeric_limits<double>::infinity()))
{
}

ClothSurface cloth_surface(const Matrix3Xd& positions, int nx, int ny)
{
    if (positions.cols() != static_cast<Eigen::Index>(nx) * ny)
        throw Error(ErrorCode::DimensionMismatch, "cloth position count differs from nx*ny");
    ClothSurface s;
    s.mesh.vertices = positions;
    const Eigen::Index n = positions.cols();
    s.mesh.uvs.resize(2, n);
    auto idx = [nx](int i, int j) { return static_cast<int>(j * nx + i); };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            s.mesh.uvs.col(idx(i, j)) << static_cast<double>(i) / (nx - 1), static_cast<double>(j) / (ny - 1);

    s.mesh.triangles.resize(3, 2 * static_cast<Eigen::Index>(nx - 1) * (ny - 1));
    Eigen::Index t = 0;
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            s.mesh.triangles.col(t++) << idx(i, j), idx(i + 1, j), idx(i + 1, j + 1);
            s.mesh.triangles.col(t++) << idx(i, j), idx(i + 1, j + 1), idx(i, j + 1);
        }

    // Unnormalised face normals weight by twice the triangle area.
    s.normals = Matrix3Xd::Zero(3, n);
    for (Eigen::Index k = 0; k < s.mesh.triangles.cols(); ++k) {
        const auto tri = s.mesh.triangles.col(k);
        const Vector3d a = positions.col(tri[0]), b = positions.col(tri[1]), c = positions.col(tri[2]);
        const Vector3d fn = (b - a).cross(c - a);
        for (int m = 0; m < 3; ++m)
            s.normals.col(tri[m]) += fn;
    }
    s.tangents.resize(3, n);
    s.bitangents.resize(3, n);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int v = idx(i, j);
            Vector3d nrm = s.normals.col(v);
            nrm = nrm.norm() > 0.0 ? Vector3d(nrm.normalized()) : Vector3d::UnitZ();
            s.normals.col(v) = nrm;
            const Vector3d du = positions.col(idx(std::min(i + 1, nx - 1), j)) - positions.col(idx(std::max(i - 1, 0), j));
            Vector3d tan = du - du.dot(nrm) * nrm;
            if (tan.norm() < 1e-12)
                tan = nrm.unitOrthogonal();
            tan.normalize();
            s.tangents.col(v) = tan;
            s.bitangents.col(v) = nrm.cross(tan);
        }
    return s;
}

Vector3d shade(const Vector3d& point, const Vector3d& normal, const Vector3d& albedo,
               const std::vector<AreaLight>& lights)
{
    Vector3d out = Vector3d::Zero();
    for (const AreaLight& light : lights) {
        const std::vector<Vector3d> pts = light.sample_points();
        const double weight = 1.0 / (std::numbers::pi * light.samples);
        for (const Vector3d& s : pts) {
            const Vector3d toLight = s - point;
            const double d2 = toLight.squaredNorm();
            if (d2 == 0.0)
                continue;
            const double cosTheta = normal.dot(toLight) / std::sqrt(d2);
            if (cosTheta <= 0.0)
                continue;
            out += light.radiance.cwiseProduct(albedo) * (cosTheta * weight / d2);
        }
    }
    return out.cwiseMax(0.0);
}

std::vector<ScreenVertex> project_vertices(const Camera& camera, const Matrix3Xd& points)
{
    std::vector<ScreenVertex> out(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        const Vector3d pc = camera.rotation * points.col(i) + camera.translation;
        ScreenVertex& sv = out[static_cast<std::size_t>(i)];
        if (!(pc.z() > kMinDepth)) {
            sv.valid = false;
            continue;
        }
        const auto pr = project<double>(camera, points.col(i));
        sv.x = pr.x;
        sv.y = pr.y;
        sv.depth = pr.depth;
    }
    return out;
}

void render_layer_into(RenderTarget& target, const Matrix3Xd& bake_frame, int nx, int ny, const TriMesh& body,
                       const Camera& camera, const std::vector<AreaLight>& lights, const TextureParams& texture)
{
    if (target.width != camera.width || target.height != camera.height)
        throw Error(ErrorCode::DimensionMismatch, "render target size differs from camera image size");
    const int w = target.width, h = target.height;
    target.color.setZero();
    target.depth.setConstant(std::numeric_limits<double>::infinity());

    // Holdout: depth only.
    if (body.triangle_count() > 0) {
        const std::vector<ScreenVertex> bv = project_vertices(camera, body.vertices);
        for (Eigen::Index t = 0; t < body.triangle_count(); ++t)
            rasterize_triangle(bv[body.triangles(0, t)], bv[body.triangles(1, t)], bv[body.triangles(2, t)], w, h,
                               [&](int px, int py, double depth, const Vector3d&) {
                                   const Eigen::Index i = target.pixel(px, py);
                                   if (depth < target.depth[i])
                                       target.depth[i] = depth;
                               });
    }
    if (bake_frame.cols() == 0)
        return;

    const ClothSurface surf = cloth_surface(bake_frame, nx, ny);
    const std::vector<ScreenVertex> cv = project_vertices(camera, surf.mesh.vertices);
    const Vector3d eye = -camera.rotation.transpose() * camera.translation;

    // Keep the nearest cloth fragment per pixel, shade once at the end.
    std::vector<int> fragTri(static_cast<std::size_t>(w) * h, -1);
    std::vector<Vector3d> fragBary(static_cast<std::size_t>(w) * h);
    for (Eigen::Index t = 0; t < surf.mesh.triangle_count(); ++t) {
        const auto tri = surf.mesh.triangles.col(t);
        rasterize_triangle(cv[tri[0]], cv[tri[1]], cv[tri[2]], w, h,
                           [&](int px, int py, double depth, const Vector3d& bary) {
                               const Eigen::Index i = target.pixel(px, py);
                               if (depth < target.depth[i]) {
                                   target.depth[i] = depth;
                                   fragTri[static_cast<std::size_t>(i)] = static_cast<int>(t);
                                   fragBary[static_cast<std::size_t>(i)] = bary;
                               }
                           });
    }

    for (Eigen::Index i = 0; i < target.depth.size(); ++i) {
        const int t = fragTri[static_cast<std::size_t>(i)];
        if (t < 0)
            continue;
        const Vector3d& b = fragBary[static_cast<std::size_t>(i)];
        const auto tri = surf.mesh.triangles.col(t);
        Vector3d p = Vector3d::Zero(), n = Vector3d::Zero(), tan = Vector3d::Zero();
        Vector2d uv = Vector2d::Zero();
        for (int k = 0; k < 3; ++k) {
            p += b[k] * surf.mesh.vertices.col(tri[k]);
            n += b[k] * surf.normals.col(tri[k]);
            tan += b[k] * surf.tangents.col(tri[k]);
            uv += b[k] * surf.mesh.uvs.col(tri[k]);
        }
        n.normalize();
        tan = (tan - tan.dot(n) * n);
        tan = tan.norm() > 1e-12 ? Vector3d(tan.normalized()) : n.unitOrthogonal();
        const Vector3d bit = n.cross(tan);

        Vector3d shadingNormal = bump_normal(uv.x(), uv.y(), n, tan, bit, texture);
        if (n.dot(eye - p) < 0.0)
            shadingNormal = -shadingNormal;
        const Vector3d rgb = shade(p, shadingNormal, albedo(uv.x(), uv.y(), texture), lights);
        target.color.col(i) << rgb, 1.0;
    }
}

RenderTarget render_layer(const Matrix3Xd& bake_frame, int nx, int ny, const TriMesh& body,
                          const Camera& camera, const std::vector<AreaLight>& lights,
                          const TextureParams& texture)
{
    RenderTarget target(camera.width, camera.height);
    render_layer_into(target, bake_frame, nx, ny, body, camera, lights, texture);
    return target;
}

} // namespace bg2
