#include "astrocity/dem.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "astrocity/errors.hpp"

namespace astrocity::dem {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_number(const std::string& tok, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + tok + "'", "line " + std::to_string(line_no));
    }
}

}  // namespace

DemGrid read_asc(const std::string& text) {
    DemGrid g;
    bool have_ncols = false, have_nrows = false, have_xll = false, have_yll = false,
         have_cs = false, have_nodata = false;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::size_t rows_read = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const auto toks = split_ws(line);
        if (toks.empty()) continue;

        const bool header_candidate =
            rows_read == 0 && toks.size() == 2 && !std::isdigit(static_cast<unsigned char>(toks[0][0])) &&
            toks[0][0] != '-' && toks[0][0] != '+' && toks[0][0] != '.';
        if (header_candidate) {
            const std::string key = lower(toks[0]);
            const double v = parse_number(toks[1], line_no);
            if (key == "ncols") {
                if (v < 1 || v != std::floor(v))
                    throw ParseError("ncols must be a positive integer", "line " + std::to_string(line_no));
                g.ncols = static_cast<std::size_t>(v);
                have_ncols = true;
            } else if (key == "nrows") {
                if (v < 1 || v != std::floor(v))
                    throw ParseError("nrows must be a positive integer", "line " + std::to_string(line_no));
                g.nrows = static_cast<std::size_t>(v);
                have_nrows = true;
            } else if (key == "xllcorner") {
                g.xll = v;
                have_xll = true;
            } else if (key == "yllcorner") {
                g.yll = v;
                have_yll = true;
            } else if (key == "cellsize") {
                if (v <= 0)
                    throw ParseError("cellsize must be positive", "line " + std::to_string(line_no));
                g.cellsize = v;
                have_cs = true;
            } else if (key == "nodata_value") {
                g.nodata = v;
                have_nodata = true;
            } else {
                throw ParseError("unknown header key '" + toks[0] + "'",
                                 "line " + std::to_string(line_no));
            }
            continue;
        }

        // first value row: the header must be complete
        if (rows_read == 0) {
            if (!(have_ncols && have_nrows && have_xll && have_yll && have_cs && have_nodata))
                throw ParseError(
                    "incomplete header (need ncols, nrows, xllcorner, yllcorner, cellsize, "
                    "NODATA_value)",
                    "line " + std::to_string(line_no));
            g.values.reserve(g.nrows * g.ncols);
        }
        if (rows_read == g.nrows)
            throw Error("DimensionMismatch",
                        "more value rows than the declared nrows=" + std::to_string(g.nrows) +
                            " (line " + std::to_string(line_no) + ")");
        if (toks.size() != g.ncols)
            throw Error("DimensionMismatch",
                        "row " + std::to_string(rows_read + 1) + " has " +
                            std::to_string(toks.size()) + " values, expected ncols=" +
                            std::to_string(g.ncols) + " (line " + std::to_string(line_no) + ")");
        for (const auto& tok : toks) g.values.push_back(parse_number(tok, line_no));
        ++rows_read;
    }

    if (rows_read == 0) throw ParseError("no value rows", "line " + std::to_string(line_no));
    if (rows_read != g.nrows)
        throw Error("DimensionMismatch", "read " + std::to_string(rows_read) +
                                             " rows, expected nrows=" + std::to_string(g.nrows));
    return g;
}

std::string write_asc(const DemGrid& g) {
    std::ostringstream out;
    out.precision(17);
    out << "ncols " << g.ncols << "\n"
        << "nrows " << g.nrows << "\n"
        << "xllcorner " << g.xll << "\n"
        << "yllcorner " << g.yll << "\n"
        << "cellsize " << g.cellsize << "\n"
        << "NODATA_value " << g.nodata << "\n";
    for (std::size_t r = 0; r < g.nrows; ++r) {
        for (std::size_t c = 0; c < g.ncols; ++c) {
            if (c) out << ' ';
            out << g.at(r, c);
        }
        out << "\n";
    }
    return out.str();
}

DemGrid aggregate(const DemGrid& g, std::size_t factor) {
    if (factor < 1) throw Error("PreconditionViolated", "aggregation factor must be >= 1");
    if (factor == 1) return g;

    DemGrid out;
    out.ncols = g.ncols / factor;
    out.nrows = g.nrows / factor;
    if (out.ncols == 0 || out.nrows == 0)
        throw Error("PreconditionViolated", "aggregation factor exceeds the grid size");
    out.cellsize = g.cellsize * static_cast<double>(factor);
    out.xll = g.xll;
    out.yll = g.yll;
    out.nodata = g.nodata;
    out.values.assign(out.nrows * out.ncols, out.nodata);

    // blocks anchored at the lower-left corner; leftover cells at the
    // north / east edges are dropped
    for (std::size_t so = 0; so < out.nrows; ++so) {      // output row, south-based
        for (std::size_t co = 0; co < out.ncols; ++co) {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t ds = 0; ds < factor; ++ds) {
                const std::size_t s = so * factor + ds;        // input south row
                const std::size_t r = g.nrows - 1 - s;         // input stored row
                for (std::size_t dc = 0; dc < factor; ++dc) {
                    const std::size_t c = co * factor + dc;
                    if (g.is_nodata(r, c)) continue;
                    sum += g.at(r, c);
                    ++n;
                }
            }
            const std::size_t ro = out.nrows - 1 - so;
            if (n > 0) out.values[ro * out.ncols + co] = sum / static_cast<double>(n);
        }
    }
    return out;
}

DemGrid clip(const DemGrid& g, const geom::Aabb& bbox) {
    const auto ext = g.extent();
    if (bbox.max_x < ext.min_x || bbox.min_x > ext.max_x || bbox.max_y < ext.min_y ||
        bbox.min_y > ext.max_y)
        throw Error("OutsideExtent", "clip window does not intersect the grid");

    auto low_index = [&](double v, double origin) {
        const double f = std::floor((v - origin) / g.cellsize);
        return static_cast<long>(f);
    };
    auto high_index = [&](double v, double origin) {
        const double f = std::ceil((v - origin) / g.cellsize) - 1.0;
        return static_cast<long>(f);
    };

    long c0 = std::max(0L, low_index(bbox.min_x, g.xll));
    long c1 = std::min(static_cast<long>(g.ncols) - 1, std::max(c0, high_index(bbox.max_x, g.xll)));
    long s0 = std::max(0L, low_index(bbox.min_y, g.yll));
    long s1 = std::min(static_cast<long>(g.nrows) - 1, std::max(s0, high_index(bbox.max_y, g.yll)));

    DemGrid out;
    out.ncols = static_cast<std::size_t>(c1 - c0 + 1);
    out.nrows = static_cast<std::size_t>(s1 - s0 + 1);
    out.cellsize = g.cellsize;
    out.xll = g.xll + static_cast<double>(c0) * g.cellsize;
    out.yll = g.yll + static_cast<double>(s0) * g.cellsize;
    out.nodata = g.nodata;
    out.values.reserve(out.nrows * out.ncols);
    for (std::size_t ro = 0; ro < out.nrows; ++ro) {
        const std::size_t so = out.nrows - 1 - ro;                      // output south row
        const std::size_t r = g.nrows - 1 - (static_cast<std::size_t>(s0) + so);
        for (std::size_t co = 0; co < out.ncols; ++co)
            out.values.push_back(g.at(r, static_cast<std::size_t>(c0) + co));
    }
    return out;
}

std::optional<double> sample(const DemGrid& g, double x, double y) {
    const auto ext = g.extent();
    if (x < ext.min_x || x > ext.max_x || y < ext.min_y || y > ext.max_y)
        throw Error("OutsideExtent", "sample point outside the grid");
    const std::size_t col = std::min<std::size_t>(
        g.ncols - 1, static_cast<std::size_t>(std::floor((x - g.xll) / g.cellsize)));
    const std::size_t south = std::min<std::size_t>(
        g.nrows - 1, static_cast<std::size_t>(std::floor((y - g.yll) / g.cellsize)));
    const std::size_t row = g.nrows - 1 - south;
    if (g.is_nodata(row, col)) return std::nullopt;
    return g.at(row, col);
}

geom::TriSurface tin_from_grid(const DemGrid& g, const geom::Polygon2& footprint) {
    geom::require_valid(footprint);
    const geom::Aabb box = geom::clip_bbox(footprint);

    // cell-center index ranges overlapping the footprint bbox
    auto center_range = [&](double lo, double hi, double origin, std::size_t count,
                            std::size_t& i0, std::size_t& i1) {
        const double f0 = std::floor((lo - origin) / g.cellsize - 0.5);
        const double f1 = std::ceil((hi - origin) / g.cellsize - 0.5);
        const long a = std::max(0L, static_cast<long>(f0));
        const long b = std::min(static_cast<long>(count) - 1, static_cast<long>(f1));
        i0 = static_cast<std::size_t>(std::max(0L, a));
        i1 = b < a ? i0 : static_cast<std::size_t>(b);
    };

    geom::TriSurface tin;
    if (box.max_x < g.extent().min_x || box.min_x > g.extent().max_x ||
        box.max_y < g.extent().min_y || box.min_y > g.extent().max_y)
        throw Error("EmptyResult", "footprint does not overlap the grid");

    std::size_t c0, c1, s0, s1;
    center_range(box.min_x, box.max_x, g.xll, g.ncols, c0, c1);
    center_range(box.min_y, box.max_y, g.yll, g.nrows, s0, s1);

    auto vertex = [&](std::size_t s, std::size_t c) -> geom::Vec3 {
        const std::size_t r = g.nrows - 1 - s;
        return {g.center_x(c), g.center_y_from_south(s), g.at(r, c)};
    };
    auto nodata_at = [&](std::size_t s, std::size_t c) {
        return g.is_nodata(g.nrows - 1 - s, c);
    };

    for (std::size_t s = s0; s < s1 && s + 1 < g.nrows; ++s) {
        for (std::size_t c = c0; c < c1 && c + 1 < g.ncols; ++c) {
            const geom::Vec3 ll = vertex(s, c);
            const geom::Vec3 lr = vertex(s, c + 1);
            const geom::Vec3 ur = vertex(s + 1, c + 1);
            const geom::Vec3 ul = vertex(s + 1, c);
            const bool nll = nodata_at(s, c), nlr = nodata_at(s, c + 1),
                       nur = nodata_at(s + 1, c + 1), nul = nodata_at(s + 1, c);

            auto keep = [&](const geom::Vec3& a, const geom::Vec3& b, const geom::Vec3& d,
                            bool any_nodata) {
                if (any_nodata) return;
                const geom::Vec2 centroid{(a.x + b.x + d.x) / 3.0, (a.y + b.y + d.y) / 3.0};
                if (geom::point_in_polygon(footprint, centroid))
                    tin.triangles.push_back({a, b, d});
            };
            // split along the lower-left to upper-right diagonal
            keep(ll, lr, ur, nll || nlr || nur);
            keep(ll, ur, ul, nll || nur || nul);
        }
    }

    if (tin.triangles.empty())
        throw Error("EmptyResult", "no triangle centroid falls inside the footprint");
    return tin;
}

std::optional<double> mean_in_footprint(const DemGrid& g, const geom::Polygon2& footprint) {
    const geom::Aabb box = geom::clip_bbox(footprint);
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < g.nrows; ++r) {
        const std::size_t s = g.nrows - 1 - r;
        const double cy = g.center_y_from_south(s);
        if (cy < box.min_y || cy > box.max_y) continue;
        for (std::size_t c = 0; c < g.ncols; ++c) {
            const double cx = g.center_x(c);
            if (cx < box.min_x || cx > box.max_x) continue;
            if (g.is_nodata(r, c)) continue;
            if (!geom::point_in_polygon(footprint, {cx, cy})) continue;
            sum += g.at(r, c);
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

}  // namespace astrocity::dem
