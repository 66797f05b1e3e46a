// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.
//
// Usage: astrocity_acceptance <recipes-dir>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "astrocity/builders.hpp"
#include "astrocity/crs.hpp"
#include "astrocity/dem.hpp"
#include "astrocity/document.hpp"
#include "astrocity/extension.hpp"
#include "astrocity/geometry.hpp"
#include "astrocity/recipe.hpp"
#include "astrocity/validate.hpp"
#include "mutation_suite.hpp"

using namespace astrocity;

namespace {

std::string g_recipes;

struct Check {
    std::ostringstream log;
    bool ok = true;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            log << "\n        failed: " << what;
        }
    }
};

constexpr double kPi = 3.141592653589793238462643383279502884;

struct SiteRow {
    const char* name;
    double lat, lon, y, x;
};

constexpr SiteRow kLandingSites[] = {
    {"Apollo 11 LM", 0.67416, 23.47314, -1084015.403, 797715.8357},
    {"Apollo 17 LM", 20.19106, 30.77228, -482883.3008, 859698.0733},
    {"Apollo 12 LM", -3.01279, -23.42192, -1178748.525, -819780.9946},
    {"Apollo 14 LM", -3.64589, -17.47194, -1239858.902, -617302.2113},
    {"Apollo 15 LM", 26.13239, 3.63330, -438959.4181, 96283.52627},
    {"Apollo 16 LM", -8.97344, 15.50105, -1384487.867, 570180.2265},
    {"Surveyor 1", -2.47448, 316.66020, -923865.0175, -1473497.873},
    {"Surveyor 3", -3.01623, -23.41801, -1178868.968, -819668.6523},
    {"Surveyor 5", 1.45515, 23.19426, -1065991.24, 783350.0884},
    {"Surveyor 6", 0.47424, -1.42752, -1188202.836, -49090.49337},
    {"Surveyor 7", -40.98117, -11.51270, -2052661.123, -503268.1364},
    {"Chang'e 3", 44.12142, -19.51174, 173854.6813, -396367.0196},
    {"Yutu Rover", 44.12085, -19.51219, 173838.3572, -396379.8343},
};

// Independent reference implementation of the spherical Albers projection,
// assembled through a complex-exponential polar form in long double so a
// coding slip in the library cannot hide.
std::pair<double, double> reference_albers(double lat_deg, double lon_deg) {
    const long double rad = static_cast<long double>(kPi) / 180.0L;
    const long double R = 1737400.0L;
    const long double p1 = 60.0L * rad, p2 = 20.0L * rad, p0 = 40.0L * rad;
    const long double n = (std::sin(p1) + std::sin(p2)) / 2.0L;
    const long double c = std::cos(p1) * std::cos(p1) + 2.0L * n * std::sin(p1);

    long double lon = std::fmod(static_cast<long double>(lon_deg), 360.0L);
    if (lon > 180.0L) lon -= 360.0L;
    if (lon <= -180.0L) lon += 360.0L;

    const auto rho = [&](long double phi) { return R * std::sqrt(c - 2.0L * n * std::sin(phi)) / n; };
    const std::complex<long double> pole(0.0L, rho(p0));
    const std::complex<long double> ray =
        std::polar(rho(static_cast<long double>(lat_deg) * rad),
                   static_cast<long double>(kPi) / 2.0L - n * lon * rad);
    const std::complex<long double> xy = pole - ray;
    return {static_cast<double>(-xy.real()), static_cast<double>(xy.imag())};
}

bool criterion_projection(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    const auto moon = crs::builtin_crs("IAU_2015:30185");
    for (const auto& row : kLandingSites) {
        const auto xy = crs::forward(moon, row.lat, row.lon);
        c.require(std::abs(xy.x - row.x) < 0.5 && std::abs(xy.y - row.y) < 0.5,
                  std::string(row.name) + ": forward off the published values");

        const auto [rx, ry] = reference_albers(row.lat, row.lon);
        c.require(std::abs(xy.x - rx) < 1e-6 && std::abs(xy.y - ry) < 1e-6,
                  std::string(row.name) + ": disagrees with the reference implementation");

        const auto ll = crs::inverse(moon, row.x, row.y);
        c.require(std::abs(ll.lat - row.lat) < 1e-5 &&
                      std::abs(ll.lon - crs::normalize_lon(row.lon)) < 1e-5,
                  std::string(row.name) + ": inverse misses the published lat/lon");
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(elapsed < 1.0, "projection column took " + std::to_string(elapsed) + " s");
    return c.ok;
}

bool criterion_fig17(Check& c) {
    const auto result = recipe::run_recipe_file(g_recipes + "/mars.json");
    const std::string text = cj::write_document(result.doc);

    const char* required[] = {
        "\"craterID\": 14300",
        "\"craterName\": \"Jezero\"",
        "\"diameter\": 47520.0",
        "\"approvalDate\": 2007",
        "\"target\": \"Mars\"",
        "\"evidenceType\": \"astrobiological\"",
        "\"restrictionType\": \"scientific\"",
        "\"restrictionAnalysisType\": \"3DBuffer\"",
        "\"restrictionValue\": 250",
        "\"restrictionUnit\": \"metre\"",
        "\"3DSpace\"",
        "/0/103885",
    };
    for (const char* needle : required)
        c.require(text.find(needle) != std::string::npos,
                  std::string("serialized document lacks ") + needle);

    c.require(result.doc.extensions.count("3DSpace") == 1 &&
                  result.doc.extensions.at("3DSpace").version == "2.0",
              "extension 3DSpace version 2.0 not declared");
    c.require(result.doc.reference_system_url.ends_with("/0/103885"),
              "reference system does not end /0/103885");
    return c.ok;
}

bool criterion_validation(Check& c) {
    const auto registry = ext::builtin_registry();
    for (const char* name : {"moon_south_pole", "moon_nearside", "mars"}) {
        const auto result = recipe::run_recipe_file(g_recipes + "/" + name + ".json");
        const auto issues = validate::validate_all(result.doc, registry);
        for (const auto& i : issues)
            c.require(i.severity != Severity::Error,
                      std::string(name) + ": " + i.code + " " + i.message);
    }

    c.require(testsupport::mutations().size() >= 12, "mutation suite smaller than 12");
    for (const auto& m : testsupport::mutations()) {
        cj::CityDocument doc = testsupport::reference_document();
        m.corrupt(doc);
        std::set<std::string> codes;
        for (const auto& i : validate::validate_all(doc, registry)) codes.insert(i.code);
        c.require(codes.count(m.expected_code) == 1,
                  std::string(m.name) + " did not trigger " + m.expected_code);
        c.require(codes.size() == 1,
                  std::string(m.name) + " triggered unrelated codes");
    }
    return c.ok;
}

bool criterion_geometry(Check& c) {
    // extrusion volume exactness
    geom::Polygon2 poly;
    poly.exterior = {{0, 0}, {13.5, 0}, {17, 9}, {4, 14}, {-2, 6}};
    const double area = geom::polygon_area(poly);
    for (const auto& [lo, hi] : {std::pair{-25.0, 25.0}, {0.0, 1.0}, {-500.0, 0.0}}) {
        const double vol = geom::solid_volume(geom::extrude(poly, lo, hi));
        c.require(std::abs(vol - area * (hi - lo)) <= 1e-9 * std::abs(area * (hi - lo)),
                  "extrusion volume differs from area x height");
    }

    // convex buffer area against the closed form at 16 segments/quadrant
    geom::Polygon2 tri;
    tri.exterior = {{0, 0}, {30, 0}, {0, 40}};
    for (const double r : {0.5, 5.0, 75.0}) {
        const double got = geom::polygon_area(geom::buffer2d(tri, r, 16));
        const double want = geom::polygon_area(tri) + geom::perimeter(tri) * r + kPi * r * r;
        c.require(std::abs(got - want) <= 0.01 * want,
                  "convex buffer area misses A + P r + pi r^2 at r=" + std::to_string(r));
    }

    // monotonicity over a randomized corpus
    std::uint64_t s = 0xa5a5a5a5ULL;
    auto rnd = [&s]() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s % 1000000) / 1000000.0;
    };
    for (int i = 0; i < 100; ++i) {
        geom::Polygon2 p;
        const int nv = 5 + static_cast<int>(rnd() * 12);
        for (int k = 0; k < nv; ++k) {
            const double a = 2.0 * kPi * k / nv;
            const double rr = 1.0 + 9.0 * rnd();
            p.exterior.push_back({rr * std::cos(a), rr * std::sin(a)});
        }
        double prev = geom::polygon_area(p);
        for (const double r : {0.25, 1.0, 4.0}) {
            const double a2 = geom::polygon_area(geom::buffer2d(p, r, 16));
            c.require(a2 >= prev - 1e-9, "buffer area not monotone in r");
            prev = a2;
        }
    }

    // every builder-emitted Solid in the three demo documents is watertight
    for (const char* name : {"moon_south_pole", "moon_nearside", "mars"}) {
        const auto result = recipe::run_recipe_file(g_recipes + "/" + name + ".json");
        const auto issues = validate::validate_solids(result.doc);
        c.require(issues.empty(), std::string(name) + ": solid issues found");
    }
    return c.ok;
}

bool criterion_terrain(Check& c) {
    // 50x50 paraboloid bowl, circular footprint
    dem::DemGrid g;
    g.ncols = g.nrows = 50;
    g.cellsize = 2.0;
    g.nodata = -9999.0;
    g.values.resize(50 * 50);
    const double cx = 50.0, cy = 50.0, rim = 50.0, depth = 20.0;
    for (std::size_t r = 0; r < 50; ++r) {
        const std::size_t s = 49 - r;
        for (std::size_t col = 0; col < 50; ++col) {
            const double x = g.center_x(col), y = g.center_y_from_south(s);
            const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (rim * rim);
            g.values[r * 50 + col] = -depth * std::max(0.0, 1.0 - d2);
        }
    }
    geom::Polygon2 disc;
    for (int i = 0; i < 32; ++i) {
        const double a = 2.0 * kPi * i / 32;
        disc.exterior.push_back({cx + 30.0 * std::cos(a), cy + 30.0 * std::sin(a)});
    }
    const geom::TriSurface tin = dem::tin_from_grid(g, disc);
    c.require(!tin.triangles.empty(), "paraboloid TIN is empty");
    for (const auto& t : tin.triangles)
        for (const auto& v : t) {
            const auto stored = dem::sample(g, v.x, v.y);
            c.require(stored.has_value() && v.z == *stored,
                      "TIN vertex does not take the grid value verbatim");
        }

    // flat DEM: TIN area within one boundary cell ring of the footprint
    dem::DemGrid flat = g;
    flat.values.assign(50 * 50, 3.0);
    const geom::TriSurface ftin = dem::tin_from_grid(flat, disc);
    double area = 0.0;
    for (const auto& t : ftin.triangles)
        area += 0.5 * std::abs((t[1].x - t[0].x) * (t[2].y - t[0].y) -
                               (t[2].x - t[0].x) * (t[1].y - t[0].y));
    const double ring =
        (geom::perimeter(disc) / flat.cellsize + 8.0) * flat.cellsize * flat.cellsize;
    c.require(std::abs(area - geom::polygon_area(disc)) <= ring,
              "flat TIN area outside one boundary cell ring");

    // 5 m -> 100 m aggregation
    dem::DemGrid fine;
    fine.ncols = fine.nrows = 60;
    fine.cellsize = 5.0;
    fine.nodata = -9999.0;
    fine.values.assign(3600, 1.0);
    const dem::DemGrid coarse = dem::aggregate(fine, 20);
    c.require(coarse.cellsize == 100.0 && coarse.ncols == 3 && coarse.nrows == 3,
              "factor-20 aggregation did not produce 100 m cells");

    // full Moon south pole recipe under 5 s
    const auto start = std::chrono::steady_clock::now();
    const auto result = recipe::run_recipe_file(g_recipes + "/moon_south_pole.json");
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(!result.doc.objects.empty(), "south pole recipe produced nothing");
    c.require(elapsed < 5.0, "south pole recipe took " + std::to_string(elapsed) + " s");
    return c.ok;
}

bool criterion_relationships(Check& c) {
    const auto registry = ext::builtin_registry();
    const auto result = recipe::run_recipe_file(g_recipes + "/moon_south_pole.json");
    const auto& doc = result.doc;

    auto allowed_targets = [&registry](const std::string& source) {
        std::vector<std::string> out;
        for (const auto& rel : registry.relationships)
            if (rel.realization == ext::Realization::RelatedObjectId && rel.source == source)
                out.push_back(rel.target);
        return out;
    };

    std::size_t links = 0, units = 0;
    for (const auto& [id, obj] : doc.objects) {
        if (obj.object_type == "+SpaceRestriction" || obj.object_type == "+SpaceLegal") {
            c.require(obj.attributes.contains("relatedObjectID"),
                      id + " lacks relatedObjectID");
            if (!obj.attributes.contains("relatedObjectID")) continue;
            ++links;
            const std::string target = obj.attributes.at("relatedObjectID").get<std::string>();
            const auto it = doc.objects.find(target);
            c.require(it != doc.objects.end(), id + " points at a missing object");
            if (it == doc.objects.end()) continue;
            bool ok = false;
            for (const auto& t : allowed_targets(obj.object_type))
                ok |= registry.is_subtype_of(it->second.object_type, t);
            c.require(ok, id + " points at a " + it->second.object_type);
        }
        if (obj.object_type == "+SpaceBuildingUnit") {
            ++units;
            c.require(obj.parents.size() == 1, id + " does not have exactly one parent");
            if (obj.parents.size() != 1) continue;
            const auto parent = doc.objects.find(obj.parents.front());
            c.require(parent != doc.objects.end() &&
                          parent->second.object_type == "+SpaceBuilding",
                      id + " parent is not a +SpaceBuilding");
            if (parent == doc.objects.end()) continue;
            const auto& kids = parent->second.children;
            c.require(std::find(kids.begin(), kids.end(), id) != kids.end(),
                      id + " missing from its parent's children");
        }
    }
    c.require(links > 0, "no relatedObjectID links in the south pole output");
    c.require(units > 0, "no building units in the south pole output");
    return c.ok;
}

bool criterion_roundtrip(Check& c) {
    for (const char* name : {"moon_south_pole", "moon_nearside", "mars"}) {
        const auto result = recipe::run_recipe_file(g_recipes + "/" + name + ".json");
        const cj::CityDocument back = cj::read_document(cj::write_document(result.doc));
        c.require(back == result.doc, std::string(name) + ": read(write(d)) != d");
    }

    // constructed 1.0 document -> 2.0
    const char* legacy = R"({
      "type": "CityJSON", "version": "1.0",
      "metadata": {"referenceSystem": "urn:ogc:def:crs:ESRI::103885"},
      "CityObjects": {"a": {"type": "+SpaceLegal", "attributes": {"legalObjectID": "a"},
        "geometry": [{"type": "MultiSurface", "lod": "1", "boundaries": [[[0,1,2]]]}]}},
      "transform": {"scale": [0.001, 0.001, 0.001], "translate": [0, 0, 0]},
      "vertices": [[0,0,0],[1000,0,0],[0,1000,0]]
    })";
    const cj::CityDocument old = cj::read_document(legacy);
    const cj::CityDocument upgraded = cj::upgrade_document(old);
    c.require(upgraded.version == "2.0", "upgrade did not set version 2.0");
    c.require(upgraded.objects == old.objects, "upgrade altered the objects");
    c.require(upgraded.vertices == old.vertices && upgraded.transform == old.transform,
              "upgrade altered vertices or transform");
    c.require(upgraded.reference_system_url ==
                  "https://www.opengis.net/def/crs/EPSG/0/103885",
              "upgrade did not rewrite the URN to the OGC URL form");
    return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: astrocity_acceptance <recipes-dir>\n");
        return 2;
    }
    g_recipes = argv[1];

    struct Criterion {
        int number;
        const char* name;
        std::function<bool(Check&)> run;
    };
    const Criterion criteria[] = {
        {1, "projection reproduction (13 landing sites, 0.5 m / 1e-5 deg, < 1 s)",
         criterion_projection},
        {2, "document fidelity (Mars recipe carries the expected values verbatim)",
         criterion_fig17},
        {3, "validation suite (3 clean documents, 22 exact-code mutations)",
         criterion_validation},
        {4, "geometry properties (volume, buffer area, monotonicity, watertight)",
         criterion_geometry},
        {5, "terrain meshing (paraboloid TIN, flat-area bound, aggregation, < 5 s)",
         criterion_terrain},
        {6, "relationship integrity (relatedObjectID targets, composition links)",
         criterion_relationships},
        {7, "round-trip and upgrade (read/write identity, 1.0 -> 2.0)",
         criterion_roundtrip},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Check check;
        bool ok = false;
        try {
            ok = criterion.run(check);
        } catch (const std::exception& e) {
            check.log << "\n        exception: " << e.what();
            ok = false;
        }
        std::printf("%s  %d %s%s\n", ok ? "PASS" : "FAIL", criterion.number, criterion.name,
                    check.log.str().c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
