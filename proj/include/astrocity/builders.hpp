#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "astrocity/crs.hpp"
#include "astrocity/dem.hpp"
#include "astrocity/document.hpp"
#include "astrocity/extension.hpp"
#include "astrocity/geometry.hpp"

namespace astrocity::build {

enum class AnalysisType { TwoDBuffer, ThreeDBuffer, Extrusion, BufferExtrusion };

AnalysisType analysis_from_string(const std::string& s);
std::string analysis_to_string(AnalysisType t);

/// How a logical-space volume derives from a footprint: buffer radius in
/// metres plus extrusion distances above/below the base elevation.
struct AnalysisSpec {
    AnalysisType analysis = AnalysisType::Extrusion;
    double value = 0.0;
    std::string unit = "metre";
    double extrusion_up = 0.0;
    double extrusion_down = 0.0;

    void require_valid() const;
};

/// Simplified space-solids input: a building with prismatic units.
struct UnitInput {
    std::string unit_id;
    nlohmann::json attributes = nlohmann::json::object();
    geom::Polygon2 footprint;
    double z_low = 0.0;
    double z_high = 0.0;
};

struct EnvelopeInput {
    geom::Polygon2 footprint;
    double z_low = 0.0;
    double z_high = 0.0;
};

struct SpaceSolidInput {
    std::string building_id;
    nlohmann::json attributes = nlohmann::json::object();
    std::vector<UnitInput> units;
    std::optional<EnvelopeInput> envelope;  // bounding solid of units when absent
};

/// Axis-aligned square of the given side centred on forward(spec, lat, lon).
geom::Polygon2 grid_from_center(const crs::ProjectionSpec& spec, double lat_deg,
                                double lon_deg, double side_m);

/// Builds extension features into one document, wiring relatedObjectID and
/// parents/children links. Remembers each feature's source footprint and
/// height range so dependent logical spaces can derive their volumes.
/// Serialize calls per document.
class FeatureBuilder {
public:
    FeatureBuilder(cj::CityDocument& doc, const ext::ExtensionRegistry& registry,
                   std::uint64_t seed = 0);

    /// Base elevation for prisms (default 0).
    void set_base_elevation(double z0) { base_z_ = z0; }
    double base_elevation() const { return base_z_; }

    void set_buffer_segments(int per_quadrant) { segments_ = per_quadrant; }

    std::string build_crater(const geom::Polygon2& footprint, const dem::DemGrid& grid,
                             const nlohmann::json& attrs);

    std::string build_surface_object(const geom::Polygon2& footprint, double up, double down,
                                     const nlohmann::json& attrs);

    std::string build_plan_unit(const geom::Polygon2& footprint, const std::string& use,
                                double underground, double aboveground,
                                const nlohmann::json& attrs = nlohmann::json::object());

    std::string build_scientific_evidence(const geom::Polygon2& footprint,
                                          const AnalysisSpec& spec, const std::string& evidence,
                                          const nlohmann::json& attrs = nlohmann::json::object());

    std::string build_protected_area(const geom::Polygon2& footprint, double buffer_m, double up,
                                     double down, const std::string& area_name,
                                     const nlohmann::json& attrs = nlohmann::json::object());

    /// Point form: the site becomes a disc of radius buffer_m.
    /// Throws Error("DegenerateGeometry") when buffer_m is 0.
    std::string build_protected_area(const geom::Vec2& site, double buffer_m, double up,
                                     double down, const std::string& area_name,
                                     const nlohmann::json& attrs = nlohmann::json::object());

    std::string build_restriction(const std::string& target_id, const AnalysisSpec& spec,
                                  const std::string& restriction_type,
                                  const nlohmann::json& attrs = nlohmann::json::object());

    std::string build_legal_space(const std::string& target_id, const AnalysisSpec& spec,
                                  const nlohmann::json& attrs = nlohmann::json::object());

    std::pair<std::string, std::vector<std::string>> build_building(const SpaceSolidInput& input);

    const cj::CityDocument& document() const { return *doc_; }

private:
    struct SourceShape {
        bool is_point = false;
        geom::Vec2 point;          // when is_point
        geom::Polygon2 footprint;  // when !is_point
        double z_low = 0.0;
        double z_high = 0.0;
    };

    std::string fresh_id();
    std::string add(cj::CityObjectRecord record, const std::vector<cj::WorldGeometry>& geometry);
    geom::Polygon2 snap(const geom::Polygon2& p) const;
    cj::WorldGeometry as_solid(const geom::SolidMesh& mesh) const;
    cj::WorldGeometry flat_multisurface(const geom::Polygon2& p, double z) const;
    void remember(const std::string& id, geom::Polygon2 footprint, double z_low, double z_high);
    void remember_point(const std::string& id, geom::Vec2 point, double z_low, double z_high);
    const SourceShape& source_shape(const std::string& id) const;
    geom::Polygon2 derived_shape(const SourceShape& src, const AnalysisSpec& spec) const;
    std::vector<std::string> allowed_targets(const std::string& source_type) const;
    std::string build_logical_space(const std::string& object_type, const std::string& target_id,
                                    const AnalysisSpec& spec, nlohmann::json attributes);

    cj::CityDocument* doc_;
    const ext::ExtensionRegistry* registry_;
    std::map<std::string, SourceShape> shapes_;
    double base_z_ = 0.0;
    int segments_ = 16;
    std::uint64_t rng_state_;
};

}  // namespace astrocity::build
