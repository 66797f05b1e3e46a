#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "astrocity/geometry.hpp"

namespace astrocity::dem {

/// Regular elevation raster. Values are row-major with the northernmost
/// row first, matching the ESRI ASCII grid layout. The nodata sentinel is
/// matched bit-exactly.
struct DemGrid {
    std::size_t ncols = 0;
    std::size_t nrows = 0;
    double cellsize = 0.0;
    double xll = 0.0;  // lower-left corner
    double yll = 0.0;
    double nodata = -9999.0;
    std::vector<double> values;

    // row 0 = northernmost
    double at(std::size_t row, std::size_t col) const { return values[row * ncols + col]; }
    bool is_nodata(std::size_t row, std::size_t col) const { return at(row, col) == nodata; }

    double center_x(std::size_t col) const { return xll + (col + 0.5) * cellsize; }
    double center_y_from_south(std::size_t south_row) const {
        return yll + (south_row + 0.5) * cellsize;
    }

    geom::Aabb extent() const {
        return {xll, yll, xll + ncols * cellsize, yll + nrows * cellsize};
    }
};

/// Parses an ESRI ASCII grid. Header keys ncols, nrows, xllcorner,
/// yllcorner, cellsize and NODATA_value are matched case-insensitively;
/// each subsequent non-empty line is one row, north first.
/// Throws ParseError (with line number) or Error("DimensionMismatch").
DemGrid read_asc(const std::string& text);

std::string write_asc(const DemGrid& g);

/// Mean-aggregates factor x factor blocks, anchored at the lower-left
/// corner; trailing partial blocks are dropped. Nodata cells are excluded
/// from the mean; all-nodata blocks stay nodata.
DemGrid aggregate(const DemGrid& g, std::size_t factor);

/// Minimal cell-aligned subgrid covering bbox (intersected with the grid
/// extent). Throws Error("OutsideExtent") when they do not intersect.
DemGrid clip(const DemGrid& g, const geom::Aabb& bbox);

/// Containing-cell lookup. nullopt = nodata cell.
/// Throws Error("OutsideExtent") for points outside the grid.
std::optional<double> sample(const DemGrid& g, double x, double y);

/// Triangulates cell centers over the footprint: each quad of adjacent
/// centers splits along the lower-left to upper-right diagonal; a triangle
/// is kept iff its centroid lies inside the footprint and no vertex is
/// nodata. Throws Error("EmptyResult") when nothing survives.
geom::TriSurface tin_from_grid(const DemGrid& g, const geom::Polygon2& footprint);

/// Mean of the non-nodata cell centers inside the footprint.
std::optional<double> mean_in_footprint(const DemGrid& g, const geom::Polygon2& footprint);

}  // namespace astrocity::dem
