#pragma once

#include <bg2/common.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bg2 {

/// Projected vertex: pixel coordinates plus camera-space depth.
struct ScreenVertex {
    double x = 0.0;
    double y = 0.0;
    double depth = 0.0;
    bool valid = true; // false when the vertex was behind the camera
};

namespace raster {

inline double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py)
{
    return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

/// Top-left ownership for an edge of a positively oriented triangle.
inline bool is_top_left(const ScreenVertex& a, const ScreenVertex& b)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

inline bool inside(double e, bool topLeft)
{
    return e > 0.0 || (e == 0.0 && topLeft);
}

} // namespace raster

/// Scan-converts one triangle, sampling pixel centres with the top-left fill rule. For every
/// covered pixel calls fragment(px, py, depth, bary) where bary is perspective-correct and
/// ordered like (v0, v1, v2). Triangles touching an invalid vertex are skipped.
template <typename Fragment>
void rasterize_triangle(const ScreenVertex& v0, const ScreenVertex& v1, const ScreenVertex& v2,
                        int width, int height, Fragment&& fragment)
{
    if (!v0.valid || !v1.valid || !v2.valid)
        return;
    const double area = raster::edge(v0, v1, v2.x, v2.y);
    if (area == 0.0 || !std::isfinite(area))
        return;

    // Positive orientation; slot[k] remembers which input vertex sits at position k.
    const ScreenVertex* p[3] = {&v0, &v1, &v2};
    int slot[3] = {0, 1, 2};
    if (area < 0.0) {
        std::swap(p[1], p[2]);
        std::swap(slot[1], slot[2]);
    }
    const double signedArea = std::abs(area);
    const bool tl0 = raster::is_top_left(*p[1], *p[2]);
    const bool tl1 = raster::is_top_left(*p[2], *p[0]);
    const bool tl2 = raster::is_top_left(*p[0], *p[1]);

    const double minX = std::min({v0.x, v1.x, v2.x});
    const double maxX = std::max({v0.x, v1.x, v2.x});
    const double minY = std::min({v0.y, v1.y, v2.y});
    const double maxY = std::max({v0.y, v1.y, v2.y});
    const int x0 = std::max(0, static_cast<int>(std::ceil(minX - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(maxX - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(minY - 0.5)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(maxY - 0.5)));

    for (int py = y0; py <= y1; ++py) {
        const double cy = py + 0.5;
        for (int px = x0; px <= x1; ++px) {
            const double cx = px + 0.5;
            const double e0 = raster::edge(*p[1], *p[2], cx, cy);
            const double e1 = raster::edge(*p[2], *p[0], cx, cy);
            const double e2 = raster::edge(*p[0], *p[1], cx, cy);
            if (!raster::inside(e0, tl0) || !raster::inside(e1, tl1) || !raster::inside(e2, tl2))
                continue;
            const double l0 = e0 / signedArea, l1 = e1 / signedArea, l2 = e2 / signedArea;
            const double w0 = l0 / p[0]->depth, w1 = l1 / p[1]->depth, w2 = l2 / p[2]->depth;
            const double invDepth = w0 + w1 + w2;
            const double depth = 1.0 / invDepth;
            Vector3d bary;
            bary[slot[0]] = w0 * depth;
            bary[slot[1]] = w1 * depth;
            bary[slot[2]] = w2 * depth;
            fragment(px, py, depth, bary);
        }
    }
}

/// Nearest-surface id and depth per pixel (row-major, -1 / +inf when uncovered).
struct CoverageBuffer {
    int width = 0;
    int height = 0;
    std::vector<int> ids;
    std::vector<double> depth;
};

/// Depth-tested coverage of a triangle list; earlier triangles win exact depth ties.
CoverageBuffer rasterize_coverage(const std::vector<ScreenVertex>& vertices, const Matrix3Xi& triangles,
                                  int width, int height);

} // namespace bg2
