#include "astrocity/recipe.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "astrocity/crs.hpp"
#include "astrocity/dem.hpp"
#include "astrocity/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace astrocity::recipe {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IoError", "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

geom::Ring2 parse_ring(const json& jring, bool want_ccw) {
    geom::Ring2 ring;
    for (const auto& jpt : jring) {
        if (!jpt.is_array() || jpt.size() < 2)
            throw ParseError("ring coordinate is not an [x, y] pair", "coordinates");
        ring.push_back({jpt[0].get<double>(), jpt[1].get<double>()});
    }
    // GeoJSON closes rings explicitly
    if (ring.size() > 1 && ring.front().x == ring.back().x && ring.front().y == ring.back().y)
        ring.pop_back();
    if (ring.size() < 3) throw ParseError("ring has fewer than 3 vertices", "coordinates");
    const double area = geom::ring_signed_area(ring);
    if ((want_ccw && area < 0.0) || (!want_ccw && area > 0.0))
        std::reverse(ring.begin(), ring.end());
    return ring;
}

geom::Polygon2 parse_polygon_coords(const json& jcoords) {
    if (!jcoords.is_array() || jcoords.empty())
        throw ParseError("polygon without rings", "coordinates");
    geom::Polygon2 p;
    p.exterior = parse_ring(jcoords.at(0), true);
    for (std::size_t i = 1; i < jcoords.size(); ++i)
        p.holes.push_back(parse_ring(jcoords.at(i), false));
    return p;
}

void append_geometry(std::vector<Footprint>& out, const json& jgeom, const json& properties) {
    const std::string type = jgeom.value("type", "");
    if (type == "Polygon") {
        Footprint f;
        f.polygon = parse_polygon_coords(jgeom.at("coordinates"));
        f.properties = properties;
        out.push_back(std::move(f));
    } else if (type == "MultiPolygon") {
        for (const auto& jpoly : jgeom.at("coordinates")) {
            Footprint f;
            f.polygon = parse_polygon_coords(jpoly);
            f.properties = properties;
            out.push_back(std::move(f));
        }
    } else if (type == "Point") {
        const auto& jc = jgeom.at("coordinates");
        if (!jc.is_array() || jc.size() < 2)
            throw ParseError("point coordinate is not an [x, y] pair", "coordinates");
        Footprint f;
        f.is_point = true;
        f.point = {jc[0].get<double>(), jc[1].get<double>()};
        f.properties = properties;
        out.push_back(std::move(f));
    } else {
        throw ParseError("unsupported geometry type '" + type + "'", "geometry");
    }
}

}  // namespace

std::vector<Footprint> parse_footprints(const std::string& text) {
    json in;
    try {
        in = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), "byte " + std::to_string(e.byte));
    }

    std::vector<Footprint> out;
    const std::string type = in.value("type", "");
    if (type == "FeatureCollection") {
        for (const auto& jf : in.at("features"))
            append_geometry(out, jf.at("geometry"),
                            jf.contains("properties") && jf.at("properties").is_object()
                                ? jf.at("properties")
                                : json::object());
    } else if (type == "Feature") {
        append_geometry(out, in.at("geometry"),
                        in.contains("properties") && in.at("properties").is_object()
                            ? in.at("properties")
                            : json::object());
    } else {
        append_geometry(out, in, json::object());
    }
    if (out.empty()) throw ParseError("no footprints in input", "features");
    return out;
}

std::vector<Footprint> load_footprints(const std::string& path) {
    return parse_footprints(slurp(path));
}

build::SpaceSolidInput parse_space_solids(const std::string& text) {
    json in;
    try {
        in = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), "byte " + std::to_string(e.byte));
    }

    build::SpaceSolidInput out;
    const auto& jb = in.at("building");
    out.building_id = jb.value("id", "");
    if (jb.contains("attributes")) out.attributes = jb.at("attributes");

    auto parse_prism_footprint = [](const json& j) {
        geom::Polygon2 p;
        p.exterior = parse_ring(j, true);
        return p;
    };

    if (in.contains("units")) {
        for (const auto& ju : in.at("units")) {
            build::UnitInput u;
            u.unit_id = ju.value("id", "");
            if (ju.contains("attributes")) u.attributes = ju.at("attributes");
            u.footprint = parse_prism_footprint(ju.at("footprint"));
            u.z_low = ju.at("z_low").get<double>();
            u.z_high = ju.at("z_high").get<double>();
            if (!(u.z_high > u.z_low))
                throw ParseError("unit z_high must exceed z_low", "units/" + u.unit_id);
            out.units.push_back(std::move(u));
        }
    }
    if (in.contains("envelope")) {
        const auto& je = in.at("envelope");
        build::EnvelopeInput env;
        env.footprint = parse_prism_footprint(je.at("footprint"));
        env.z_low = je.at("z_low").get<double>();
        env.z_high = je.at("z_high").get<double>();
        out.envelope = std::move(env);
    }
    return out;
}

build::SpaceSolidInput load_space_solids(const std::string& path) {
    return parse_space_solids(slurp(path));
}

namespace {

build::AnalysisSpec parse_analysis(const json& j) {
    build::AnalysisSpec spec;
    spec.analysis = build::analysis_from_string(j.value("type", "Extrusion"));
    spec.value = j.value("value", 0.0);
    spec.unit = j.value("unit", "metre");
    spec.extrusion_up = j.value("up", 0.0);
    spec.extrusion_down = j.value("down", 0.0);
    return spec;
}

json step_attributes(const json& step, const json& feature_properties) {
    json attrs = step.value("attributes", json::object());
    attrs.update(feature_properties);  // per-feature values win
    return attrs;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return p.string();
    return (fs::path(base_dir) / p).string();
}

}  // namespace

RecipeResult run_recipe(const std::string& recipe_text, const std::string& base_dir,
                        std::optional<std::uint64_t> seed_override) {
    json in;
    try {
        in = json::parse(recipe_text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), "byte " + std::to_string(e.byte));
    }

    const std::string crs_name = in.value("crs", "");
    if (crs_name.empty()) throw ParseError("recipe lacks a 'crs'", "crs");
    const crs::ProjectionSpec proj = crs::builtin_crs(crs_name);

    const std::uint64_t seed =
        seed_override ? *seed_override : in.value("seed", std::uint64_t{0});

    RecipeResult result;
    result.doc = cj::new_document(crs::crs_url(proj));
    result.output_path = in.value("output", "");

    static const ext::ExtensionRegistry registry = ext::builtin_registry();
    build::FeatureBuilder builder(result.doc, registry, seed);
    builder.set_base_elevation(in.value("base_elevation", 0.0));

    // DEMs are loaded once per path; aggregation is applied downstream,
    // after per-footprint clipping
    std::map<std::string, dem::DemGrid> dems;
    auto load_dem = [&](const json& step) -> const dem::DemGrid& {
        const std::string path = resolve(base_dir, step.at("dem").get<std::string>());
        auto it = dems.find(path);
        if (it == dems.end()) it = dems.emplace(path, dem::read_asc(slurp(path))).first;
        return it->second;
    };

    auto targets_of = [&result](const json& step) -> const std::vector<std::string>& {
        const std::string ref = step.at("target").get<std::string>();
        const auto it = result.refs.find(ref);
        if (it == result.refs.end())
            throw Error("TargetNotFound", "step target ref '" + ref + "' is not defined");
        return it->second;
    };

    // prism steps may anchor their base elevation on a DEM: the mean
    // elevation over each footprint replaces the recipe-wide base
    const double recipe_base = in.value("base_elevation", 0.0);
    auto build_with_base = [&](const json& step, const geom::Polygon2& fp, auto&& fn) {
        if (step.contains("dem")) {
            if (const auto z0 = dem::mean_in_footprint(load_dem(step), fp)) {
                builder.set_base_elevation(*z0);
                auto id = fn();
                builder.set_base_elevation(recipe_base);
                return id;
            }
        }
        return fn();
    };

    if (!in.contains("steps") || !in.at("steps").is_array())
        throw ParseError("recipe lacks a 'steps' array", "steps");

    for (const auto& step : in.at("steps")) {
        const std::string role = step.value("role", "");
        std::vector<std::string> produced;

        if (role == "crater") {
            const auto& grid = load_dem(step);
            const auto factor = step.value("aggregate", std::size_t{1});
            for (const auto& f :
                 load_footprints(resolve(base_dir, step.at("source").get<std::string>()))) {
                // clip before aggregating to keep the working set small
                dem::DemGrid local = dem::clip(grid, geom::clip_bbox(f.polygon));
                if (factor > 1) local = dem::aggregate(local, factor);
                produced.push_back(
                    builder.build_crater(f.polygon, local, step_attributes(step, f.properties)));
            }
        } else if (role == "surface_object") {
            const double up = step.value("up", 0.0);
            const double down = step.value("down", 0.0);
            for (const auto& f :
                 load_footprints(resolve(base_dir, step.at("source").get<std::string>())))
                produced.push_back(build_with_base(step, f.polygon, [&] {
                    return builder.build_surface_object(f.polygon, up, down,
                                                        step_attributes(step, f.properties));
                }));
        } else if (role == "plan_unit") {
            const std::string use = step.at("use").get<std::string>();
            const double underground = step.value("underground", 0.0);
            const double aboveground = step.value("aboveground", 0.0);
            if (step.contains("center")) {
                // projected square grid cell, e.g. a settlement candidate
                const auto& jc = step.at("center");
                const geom::Polygon2 cell = build::grid_from_center(
                    proj, jc.at("lat").get<double>(), jc.at("lon").get<double>(),
                    step.at("side").get<double>());
                produced.push_back(builder.build_plan_unit(cell, use, underground, aboveground,
                                                           step.value("attributes", json::object())));
            } else {
                for (const auto& f :
                     load_footprints(resolve(base_dir, step.at("source").get<std::string>())))
                    produced.push_back(build_with_base(step, f.polygon, [&] {
                        return builder.build_plan_unit(f.polygon, use, underground, aboveground,
                                                       step_attributes(step, f.properties));
                    }));
            }
        } else if (role == "scientific_evidence") {
            const build::AnalysisSpec spec = parse_analysis(step.at("analysis"));
            const std::string evidence = step.at("evidence").get<std::string>();
            for (const auto& f :
                 load_footprints(resolve(base_dir, step.at("source").get<std::string>())))
                produced.push_back(build_with_base(step, f.polygon, [&] {
                    return builder.build_scientific_evidence(
                        f.polygon, spec, evidence, step_attributes(step, f.properties));
                }));
        } else if (role == "protected_area") {
            const double buffer_m = step.value("buffer", 0.0);
            const double up = step.value("up", 0.0);
            const double down = step.value("down", 0.0);
            if (step.contains("sites")) {
                // inline geographic sites, projected through the recipe CRS
                for (const auto& js : step.at("sites")) {
                    const auto xy = crs::forward(proj, js.at("lat").get<double>(),
                                                 js.at("lon").get<double>());
                    json attrs = step.value("attributes", json::object());
                    const std::string name = js.value("areaName", "");
                    produced.push_back(builder.build_protected_area(
                        geom::Vec2{xy.x, xy.y}, buffer_m, up, down, name, attrs));
                }
            } else {
                for (const auto& f :
                     load_footprints(resolve(base_dir, step.at("source").get<std::string>()))) {
                    json attrs = step_attributes(step, f.properties);
                    std::string name = attrs.value("areaName", "");
                    attrs.erase("areaName");
                    if (f.is_point)
                        produced.push_back(builder.build_protected_area(f.point, buffer_m, up,
                                                                        down, name, attrs));
                    else
                        produced.push_back(builder.build_protected_area(f.polygon, buffer_m, up,
                                                                        down, name, attrs));
                }
            }
        } else if (role == "restriction") {
            const build::AnalysisSpec spec = parse_analysis(step.at("analysis"));
            const std::string rtype = step.at("restrictionType").get<std::string>();
            for (const auto& target : targets_of(step))
                produced.push_back(builder.build_restriction(
                    target, spec, rtype, step.value("attributes", json::object())));
        } else if (role == "legal_space") {
            const build::AnalysisSpec spec = parse_analysis(step.at("analysis"));
            for (const auto& target : targets_of(step))
                produced.push_back(builder.build_legal_space(
                    target, spec, step.value("attributes", json::object())));
        } else if (role == "building") {
            const auto input =
                load_space_solids(resolve(base_dir, step.at("source").get<std::string>()));
            auto [building_id, unit_ids] = builder.build_building(input);
            produced.push_back(building_id);
            if (step.contains("ref"))
                result.refs[step.at("ref").get<std::string>() + "/units"] = unit_ids;
        } else {
            throw ParseError("unknown step role '" + role + "'", "steps");
        }

        if (step.contains("ref")) result.refs[step.at("ref").get<std::string>()] = produced;
    }

    cj::rebase_to_min_corner(result.doc);
    return result;
}

RecipeResult run_recipe_file(const std::string& path,
                             std::optional<std::uint64_t> seed_override) {
    return run_recipe(slurp(path), fs::path(path).parent_path().string(), seed_override);
}

}  // namespace astrocity::recipe
