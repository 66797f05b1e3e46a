#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "astrocity/builders.hpp"
#include "astrocity/document.hpp"
#include "astrocity/issue.hpp"

namespace astrocity::recipe {

/// One footprint from a GeoJSON-style file. Coordinates are already in the
/// projected planar CRS of the recipe, not geographic.
struct Footprint {
    bool is_point = false;
    geom::Polygon2 polygon;  // when !is_point
    geom::Vec2 point;        // when is_point
    nlohmann::json properties = nlohmann::json::object();
};

/// Reads a GeoJSON-style Feature / FeatureCollection / bare geometry with
/// Polygon, MultiPolygon or Point geometries. Ring closure and winding are
/// normalized on load.
std::vector<Footprint> parse_footprints(const std::string& text);
std::vector<Footprint> load_footprints(const std::string& path);

/// Reads the space-solids file backing +SpaceBuilding construction.
build::SpaceSolidInput parse_space_solids(const std::string& text);
build::SpaceSolidInput load_space_solids(const std::string& path);

struct RecipeResult {
    cj::CityDocument doc;
    std::string output_path;                             // recipe-declared, may be overridden
    std::map<std::string, std::vector<std::string>> refs;  // step ref -> produced ids
};

/// Executes a recipe: creates one document under the recipe CRS, runs every
/// step through FeatureBuilder, and rebases the quantization origin to the
/// minimum corner. Relative source paths resolve against base_dir.
/// `seed_override` (CLI --seed / ASTROCITY_SEED) wins over the recipe seed.
RecipeResult run_recipe(const std::string& recipe_text, const std::string& base_dir,
                        std::optional<std::uint64_t> seed_override = std::nullopt);

RecipeResult run_recipe_file(const std::string& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace astrocity::recipe
