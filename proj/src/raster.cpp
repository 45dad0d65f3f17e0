#include <bg2/raster.hpp>

namespace bg2 {

CoverageBuffer rasterize_coverage(const std::vector<ScreenVertex>& vertices, const Matrix3Xi& triangles,
                                  int width, int height)
{
    CoverageBuffer buf;
    buf.width = width;
    buf.height = height;
    buf.ids.assign(static_cast<std::size_t>(width) * height, -1);
    buf.depth.assign(static_cast<std::size_t>(width) * height, std::numeric_limits<double>::infinity());
    for (Eigen::Index t = 0; t < triangles.cols(); ++t) {
        rasterize_triangle(vertices[triangles(0, t)], vertices[triangles(1, t)], vertices[triangles(2, t)],
                           width, height, [&](int px, int py, double depth, const Vector3d&) {
                               const std::size_t i = static_cast<std::size_t>(py) * width + px;
                               if (depth < buf.depth[i]) {
                                   buf.depth[i] = depth;
                                   buf.ids[i] = static_cast<int>(t);
                               }
                           });
    }
    return buf;
}

} // namespace bg2
