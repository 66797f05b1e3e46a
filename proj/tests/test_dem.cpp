#include <doctest.h>

#include <cmath>
#include <string>

#include "astrocity/dem.hpp"
#include "astrocity/errors.hpp"

using namespace astrocity;

namespace {

const char* kTinyGrid =
    "ncols 2\n"
    "nrows 2\n"
    "xllcorner 0\n"
    "yllcorner 0\n"
    "cellsize 10\n"
    "NODATA_value -9999\n"
    "1 2\n"
    "3 4\n";

geom::Polygon2 square(double x0, double y0, double x1, double y1) {
    geom::Polygon2 p;
    p.exterior = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    return p;
}

dem::DemGrid paraboloid_grid(std::size_t n, double cellsize, double depth) {
    dem::DemGrid g;
    g.ncols = g.nrows = n;
    g.cellsize = cellsize;
    g.xll = 0.0;
    g.yll = 0.0;
    g.nodata = -9999.0;
    const double cx = n * cellsize / 2.0, cy = cx;
    const double rim = n * cellsize / 2.0;
    g.values.resize(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t s = n - 1 - r;
        for (std::size_t c = 0; c < n; ++c) {
            const double x = g.center_x(c), y = g.center_y_from_south(s);
            const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (rim * rim);
            g.values[r * n + c] = -depth * (1.0 - std::min(1.0, d2));
        }
    }
    return g;
}

}  // namespace

TEST_CASE("read_asc parses header and values") {
    const dem::DemGrid g = dem::read_asc(kTinyGrid);
    CHECK(g.ncols == 2);
    CHECK(g.nrows == 2);
    CHECK(g.cellsize == 10.0);
    // north row first: (row 0) = {1, 2}; sample by cell centers
    CHECK(dem::sample(g, 5.0, 15.0) == 1.0);
    CHECK(dem::sample(g, 15.0, 15.0) == 2.0);
    CHECK(dem::sample(g, 5.0, 5.0) == 3.0);
    CHECK(dem::sample(g, 15.0, 5.0) == 4.0);
}

TEST_CASE("read_asc header keys are case-insensitive") {
    const std::string text =
        "NCOLS 1\nNROWS 1\nXLLCORNER 2\nYLLCORNER 3\nCELLSIZE 1\nnodata_VALUE -1\n7\n";
    const dem::DemGrid g = dem::read_asc(text);
    CHECK(g.xll == 2.0);
    CHECK(g.nodata == -1.0);
    CHECK(g.at(0, 0) == 7.0);
}

TEST_CASE("read_asc error paths") {
    // 3 declared columns, 2 values per row
    const std::string mismatch =
        "ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n"
        "1 2\n3 4\n";
    CHECK_THROWS_AS(dem::read_asc(mismatch), Error);
    try {
        dem::read_asc(mismatch);
    } catch (const Error& e) {
        CHECK(e.code() == "DimensionMismatch");
    }

    CHECK_THROWS_AS(dem::read_asc("ncols 1\nnrows 1\n1\n"), ParseError);  // missing keys
    const std::string bad_token =
        "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\nfoo\n";
    CHECK_THROWS_WITH_AS(dem::read_asc(bad_token), doctest::Contains("line 7"), ParseError);
}

TEST_CASE("nodata sentinel is matched bit-exactly") {
    const std::string text =
        "ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n"
        "-9999 5\n";
    const dem::DemGrid g = dem::read_asc(text);
    CHECK(g.is_nodata(0, 0));
    CHECK(!g.is_nodata(0, 1));
    CHECK(dem::sample(g, 0.5, 0.5) == std::nullopt);
    CHECK(dem::sample(g, 1.5, 0.5) == 5.0);
}

TEST_CASE("write_asc round-trips") {
    const dem::DemGrid g = dem::read_asc(kTinyGrid);
    const dem::DemGrid h = dem::read_asc(dem::write_asc(g));
    CHECK(h.values == g.values);
    CHECK(h.xll == g.xll);
    CHECK(h.cellsize == g.cellsize);
}

TEST_CASE("aggregate means blocks and respects nodata") {
    const dem::DemGrid g = dem::read_asc(kTinyGrid);
    const dem::DemGrid a = dem::aggregate(g, 2);
    CHECK(a.ncols == 1);
    CHECK(a.nrows == 1);
    CHECK(a.cellsize == 20.0);
    CHECK(a.at(0, 0) == doctest::Approx(2.5));

    // factor 1 is the identity
    const dem::DemGrid same = dem::aggregate(g, 1);
    CHECK(same.values == g.values);

    const std::string with_nodata =
        "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\nNODATA_value -9999\n"
        "-9999 -9999\n-9999 8\n";
    const dem::DemGrid b = dem::aggregate(dem::read_asc(with_nodata), 2);
    CHECK(b.at(0, 0) == doctest::Approx(8.0));  // mean over the one live cell

    const std::string all_nodata =
        "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\nNODATA_value -9999\n"
        "-9999 -9999\n-9999 -9999\n";
    CHECK(dem::aggregate(dem::read_asc(all_nodata), 2).is_nodata(0, 0));
}

TEST_CASE("aggregate converts a 5 m grid into 100 m cells at factor 20") {
    dem::DemGrid g;
    g.ncols = g.nrows = 40;
    g.cellsize = 5.0;
    g.nodata = -9999.0;
    g.values.assign(40 * 40, 1.0);
    const dem::DemGrid a = dem::aggregate(g, 20);
    CHECK(a.cellsize == 100.0);
    CHECK(a.ncols == 2);
    CHECK(a.nrows == 2);
    CHECK(a.at(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("aggregate then sample at a block center equals the block mean") {
    dem::DemGrid g;
    g.ncols = 4;
    g.nrows = 4;
    g.cellsize = 1.0;
    g.nodata = -9999.0;
    g.values.resize(16);
    for (std::size_t i = 0; i < 16; ++i) g.values[i] = static_cast<double>(i);
    const dem::DemGrid a = dem::aggregate(g, 2);
    // south-west block holds stored values at rows 2-3, cols 0-1
    const double expected = (g.at(2, 0) + g.at(2, 1) + g.at(3, 0) + g.at(3, 1)) / 4.0;
    CHECK(dem::sample(a, 1.0, 1.0) == doctest::Approx(expected));
}

TEST_CASE("clip returns the minimal covering subgrid") {
    const dem::DemGrid g = dem::read_asc(kTinyGrid);
    const dem::DemGrid full = dem::clip(g, {0, 0, 20, 20});
    CHECK(full.values == g.values);

    const dem::DemGrid sw = dem::clip(g, {1, 1, 4, 4});
    CHECK(sw.ncols == 1);
    CHECK(sw.nrows == 1);
    CHECK(sw.at(0, 0) == 3.0);
    CHECK(sw.xll == 0.0);
    CHECK(sw.yll == 0.0);

    CHECK_THROWS_AS(dem::clip(g, {100, 100, 200, 200}), Error);
    CHECK_THROWS_AS(dem::sample(g, -1.0, 5.0), Error);
}

TEST_CASE("tin on a flat grid stays planar and near the footprint area") {
    dem::DemGrid g;
    g.ncols = g.nrows = 30;
    g.cellsize = 1.0;
    g.nodata = -9999.0;
    g.values.assign(30 * 30, 7.5);
    const geom::Polygon2 fp = square(5.0, 5.0, 25.0, 25.0);
    const geom::TriSurface tin = dem::tin_from_grid(g, fp);
    REQUIRE(!tin.triangles.empty());
    double area = 0.0;
    for (const auto& t : tin.triangles) {
        for (const auto& v : t) CHECK(v.z == 7.5);
        area += 0.5 * std::abs((t[1].x - t[0].x) * (t[2].y - t[0].y) -
                               (t[2].x - t[0].x) * (t[1].y - t[0].y));
    }
    // centroid clipping keeps the area within one boundary cell ring
    const double ring_bound = (geom::perimeter(fp) / g.cellsize + 8) * g.cellsize * g.cellsize;
    CHECK(std::abs(area - geom::polygon_area(fp)) <= ring_bound);
}

TEST_CASE("tin vertices take grid values verbatim on a paraboloid bowl") {
    const dem::DemGrid g = paraboloid_grid(50, 2.0, 20.0);
    geom::Polygon2 fp;
    const double cx = 50.0, cy = 50.0, r = 30.0;
    for (int i = 0; i < 24; ++i) {
        const double a = 2.0 * 3.14159265358979 * i / 24;
        fp.exterior.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    const geom::TriSurface tin = dem::tin_from_grid(g, fp);
    REQUIRE(!tin.triangles.empty());

    double slanted_area = 0.0;
    double planar_area = 0.0;
    for (const auto& t : tin.triangles) {
        for (const auto& v : t) {
            // vertex z must equal the stored cell value exactly
            const auto stored = dem::sample(g, v.x, v.y);
            REQUIRE(stored.has_value());
            CHECK(v.z == *stored);
        }
        const geom::Vec3 u{t[1].x - t[0].x, t[1].y - t[0].y, t[1].z - t[0].z};
        const geom::Vec3 w{t[2].x - t[0].x, t[2].y - t[0].y, t[2].z - t[0].z};
        const double nx = u.y * w.z - u.z * w.y;
        const double ny = u.z * w.x - u.x * w.z;
        const double nz = u.x * w.y - u.y * w.x;
        slanted_area += 0.5 * std::sqrt(nx * nx + ny * ny + nz * nz);
        planar_area += 0.5 * std::abs(nz);
    }
    // slope only increases surface area
    CHECK(slanted_area >= planar_area);
    CHECK(slanted_area > 0.999 * geom::polygon_area(fp));
}

TEST_CASE("tin respects nodata and empty results") {
    dem::DemGrid g;
    g.ncols = g.nrows = 4;
    g.cellsize = 1.0;
    g.nodata = -9999.0;
    g.values.assign(16, 1.0);
    g.values[5] = -9999.0;  // one interior cell

    const geom::TriSurface tin = dem::tin_from_grid(g, square(0, 0, 4, 4));
    for (const auto& t : tin.triangles)
        for (const auto& v : t) CHECK(v.z != -9999.0);

    CHECK_THROWS_AS(dem::tin_from_grid(g, square(100, 100, 104, 104)), Error);
}

TEST_CASE("tin triangle count is bounded by twice the bbox cells") {
    dem::DemGrid g;
    g.ncols = g.nrows = 20;
    g.cellsize = 1.0;
    g.nodata = -9999.0;
    g.values.assign(400, 0.0);
    const geom::Polygon2 fp = square(3.2, 3.2, 9.8, 9.8);
    const geom::TriSurface tin = dem::tin_from_grid(g, fp);
    const geom::Aabb box = geom::clip_bbox(fp);
    const double cells = std::ceil(box.max_x - box.min_x + 1) * std::ceil(box.max_y - box.min_y + 1);
    CHECK(tin.triangles.size() <= 2 * static_cast<std::size_t>(cells));
}
