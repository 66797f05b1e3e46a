#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "astrocity/issue.hpp"

namespace astrocity::geom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

using Ring2 = std::vector<Vec2>;  // not closed: first vertex is not repeated

/// Planar footprint. Exterior counterclockwise, holes clockwise.
struct Polygon2 {
    Ring2 exterior;
    std::vector<Ring2> holes;
};

struct Aabb {
    double min_x = 0.0, min_y = 0.0;
    double max_x = 0.0, max_y = 0.0;
};

/// One planar face: exterior ring plus optional interior rings, all in 3D.
struct Face3 {
    std::vector<std::vector<Vec3>> rings;  // rings[0] exterior, rest holes
};

/// Closed volume. shells[0] is the outer shell; faces are oriented outward
/// (counterclockwise seen from outside).
struct SolidMesh {
    std::vector<std::vector<Face3>> shells;
};

struct TriSurface {
    std::vector<std::array<Vec3, 3>> triangles;
};

// -- planar operations --------------------------------------------------

double ring_signed_area(const Ring2& ring);

/// Shoelace area, holes subtracted.
double polygon_area(const Polygon2& p);

double perimeter(const Polygon2& p);

/// Ray casting against exterior and holes. Boundary points count as inside.
bool point_in_polygon(const Polygon2& p, const Vec2& pt);

Aabb clip_bbox(const Polygon2& p);

/// Checks ring sizes, winding and simple validity; throws
/// Error("InvalidPolygon") on failure.
void require_valid(const Polygon2& p);

/// Minkowski expansion by a disc of radius r, arcs approximated with
/// segments_per_quadrant points per 90 degrees. r == 0 returns p unchanged.
Polygon2 buffer2d(const Polygon2& p, double r, int segments_per_quadrant = 16);

/// Disc of radius r around a point, same arc approximation as buffer2d.
Polygon2 buffer_point(const Vec2& center, double r, int segments_per_quadrant = 16);

// -- solids --------------------------------------------------------------

/// Watertight prism over p between z_low (bottom) and z_high (top).
/// Throws Error("DegenerateHeight") if z_high <= z_low.
SolidMesh extrude(const Polygon2& p, double z_low, double z_high);

/// extrude(buffer2d(p, r), z_low - r, z_high + r): the prism expanded by r
/// laterally and vertically.
SolidMesh buffer3d(const Polygon2& p, double z_low, double z_high, double r,
                   int segments_per_quadrant = 16);

double solid_volume(const SolidMesh& s);

/// Issue codes: UNMATCHED_EDGE, ORIENTATION, NONPLANAR, NONPOSITIVE_VOLUME.
std::vector<Issue> check_watertight(const SolidMesh& s);

// -- indexed form (shared with document-level solid checks) --------------

/// shell -> surface -> ring -> vertex index
using IndexedShells = std::vector<std::vector<std::vector<std::vector<std::size_t>>>>;

std::vector<Issue> check_watertight_indexed(const std::vector<Vec3>& vertices,
                                            const IndexedShells& shells,
                                            double planarity_tol = 1e-6);

}  // namespace astrocity::geom
