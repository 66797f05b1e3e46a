#pragma once

#include <string>

namespace astrocity::crs {

struct BodySphere {
    std::string name;
    double radius_m = 0.0;
};

enum class ProjectionKind {
    AlbersEqualAreaSphere,
    EquidistantCylindricalSphere,
};

/// Spherical projection, parameters in degrees / metres.
struct ProjectionSpec {
    ProjectionKind kind = ProjectionKind::EquidistantCylindricalSphere;
    BodySphere body;
    double lat_origin = 0.0;
    double lon_origin = 0.0;
    double std_parallel_1 = 0.0;  // Albers only
    double std_parallel_2 = 0.0;  // Albers only
    double false_easting = 0.0;
    double false_northing = 0.0;
    std::string authority;  // "IAU_2015", "EPSG"
    std::string code;       // "30185", "103885"
};

struct ProjectedXY {
    double x = 0.0;
    double y = 0.0;
};

struct GeographicLL {
    double lat = 0.0;
    double lon = 0.0;
};

/// Maps longitude into (-180, 180].
double normalize_lon(double lon_deg);

/// Geographic -> projected. Longitude is normalized first.
/// Throws Error("OutOfDomain") where the projection is undefined and
/// Error("PreconditionViolated") for |lat| > 90.
ProjectedXY forward(const ProjectionSpec& spec, double lat_deg, double lon_deg);

/// Projected -> geographic, the exact inverse of forward().
GeographicLL inverse(const ProjectionSpec& spec, double x, double y);

/// "https://www.opengis.net/def/crs/<authority>/0/<code>"
std::string crs_url(const std::string& authority, const std::string& code);

/// Built-in table: "IAU_2015:30185" (Moon sphere, Albers equal-area) and
/// "EPSG:103885" (Mars sphere, equidistant cylindrical). Accepts the bare
/// code as well. Throws Error("UnknownCrs") otherwise.
ProjectionSpec builtin_crs(const std::string& authority_code);

/// OGC URL for a spec from the built-in table.
std::string crs_url(const ProjectionSpec& spec);

}  // namespace astrocity::crs
