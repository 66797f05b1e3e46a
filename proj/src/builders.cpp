#include "astrocity/builders.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "astrocity/errors.hpp"

using nlohmann::json;

namespace astrocity::build {

AnalysisType analysis_from_string(const std::string& s) {
    if (s == "2DBuffer") return AnalysisType::TwoDBuffer;
    if (s == "3DBuffer") return AnalysisType::ThreeDBuffer;
    if (s == "Extrusion") return AnalysisType::Extrusion;
    if (s == "BufferExtrusion") return AnalysisType::BufferExtrusion;
    throw Error("InvalidEnum", "unknown analysis type '" + s + "'");
}

std::string analysis_to_string(AnalysisType t) {
    switch (t) {
        case AnalysisType::TwoDBuffer: return "2DBuffer";
        case AnalysisType::ThreeDBuffer: return "3DBuffer";
        case AnalysisType::Extrusion: return "Extrusion";
        case AnalysisType::BufferExtrusion: return "BufferExtrusion";
    }
    throw Error("InvalidEnum", "unknown analysis type");
}

void AnalysisSpec::require_valid() const {
    const bool buffers = analysis != AnalysisType::Extrusion;
    const bool extrudes =
        analysis == AnalysisType::Extrusion || analysis == AnalysisType::BufferExtrusion;
    if (buffers && !(value > 0.0))
        throw Error("PreconditionViolated", "buffer analyses need value > 0");
    if (extrudes && !(extrusion_up + extrusion_down > 0.0))
        throw Error("PreconditionViolated", "extrusion analyses need a nonzero height");
}

geom::Polygon2 grid_from_center(const crs::ProjectionSpec& spec, double lat_deg, double lon_deg,
                                double side_m) {
    if (!(side_m > 0.0)) throw Error("PreconditionViolated", "grid side must be positive");
    const auto center = crs::forward(spec, lat_deg, lon_deg);
    const double h = side_m / 2.0;
    geom::Polygon2 p;
    p.exterior = {{center.x - h, center.y - h},
                  {center.x + h, center.y - h},
                  {center.x + h, center.y + h},
                  {center.x - h, center.y + h}};
    return p;
}

FeatureBuilder::FeatureBuilder(cj::CityDocument& doc, const ext::ExtensionRegistry& registry,
                               std::uint64_t seed)
    : doc_(&doc), registry_(&registry), rng_state_(seed + 0x9e3779b97f4a7c15ULL) {
    cj::declare_extension(doc, registry);
}

std::string FeatureBuilder::fresh_id() {
    // splitmix64: deterministic, seedable id stream
    auto next = [this]() {
        std::uint64_t z = (rng_state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    const std::uint64_t hi = next();
    const std::uint64_t lo = next();
    char buf[37];
    std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx",
                  static_cast<unsigned>(hi >> 32), static_cast<unsigned>((hi >> 16) & 0xffff),
                  static_cast<unsigned>(((hi & 0x0fff) | 0x4000)),
                  static_cast<unsigned>(((lo >> 48) & 0x3fff) | 0x8000),
                  static_cast<unsigned long long>(lo & 0xffffffffffffULL));
    return buf;
}

std::string FeatureBuilder::add(cj::CityObjectRecord record,
                                const std::vector<cj::WorldGeometry>& geometry) {
    return cj::add_object(*doc_, std::move(record), geometry, registry_);
}

geom::Polygon2 FeatureBuilder::snap(const geom::Polygon2& p) const {
    // aligns footprint vertices with the document's quantization grid so
    // sub-resolution detail (e.g. millimetre buffer arcs) collapses here
    // instead of degenerating rings after quantization
    const auto& t = doc_->transform;
    auto snap_ring = [&](const geom::Ring2& ring) {
        geom::Ring2 out;
        for (const auto& v : ring) {
            const geom::Vec2 s{
                std::llround((v.x - t.translate[0]) / t.scale[0]) * t.scale[0] + t.translate[0],
                std::llround((v.y - t.translate[1]) / t.scale[1]) * t.scale[1] + t.translate[1]};
            if (!out.empty() && out.back().x == s.x && out.back().y == s.y) continue;
            out.push_back(s);
        }
        while (out.size() > 1 && out.front().x == out.back().x &&
               out.front().y == out.back().y)
            out.pop_back();
        return out;
    };
    geom::Polygon2 out;
    out.exterior = snap_ring(p.exterior);
    if (out.exterior.size() < 3 || geom::ring_signed_area(out.exterior) <= 0.0)
        throw Error("DegenerateGeometry",
                    "footprint collapses at the quantization resolution");
    for (const auto& h : p.holes) {
        auto ring = snap_ring(h);
        if (ring.size() >= 3 && geom::ring_signed_area(ring) < 0.0)
            out.holes.push_back(std::move(ring));
    }
    return out;
}

cj::WorldGeometry FeatureBuilder::as_solid(const geom::SolidMesh& mesh) const {
    cj::WorldGeometry g;
    g.kind = cj::GeometryKind::Solid;
    g.shells = mesh.shells;
    return g;
}

cj::WorldGeometry FeatureBuilder::flat_multisurface(const geom::Polygon2& p, double z) const {
    geom::Face3 face;
    auto lift = [z](const geom::Ring2& ring) {
        std::vector<geom::Vec3> out;
        out.reserve(ring.size());
        for (const auto& v : ring) out.push_back({v.x, v.y, z});
        return out;
    };
    face.rings.push_back(lift(p.exterior));
    for (const auto& h : p.holes) face.rings.push_back(lift(h));
    cj::WorldGeometry g;
    g.kind = cj::GeometryKind::MultiSurface;
    g.shells.push_back({std::move(face)});
    return g;
}

void FeatureBuilder::remember(const std::string& id, geom::Polygon2 footprint, double z_low,
                              double z_high) {
    shapes_[id] = SourceShape{false, {}, std::move(footprint), z_low, z_high};
}

void FeatureBuilder::remember_point(const std::string& id, geom::Vec2 point, double z_low,
                                    double z_high) {
    shapes_[id] = SourceShape{true, point, {}, z_low, z_high};
}

const FeatureBuilder::SourceShape& FeatureBuilder::source_shape(const std::string& id) const {
    const auto it = shapes_.find(id);
    if (it == shapes_.end())
        throw Error("TargetFootprintUnknown",
                    "object '" + id + "' has no recorded source footprint");
    return it->second;
}

geom::Polygon2 FeatureBuilder::derived_shape(const SourceShape& src,
                                             const AnalysisSpec& spec) const {
    if (src.is_point) {
        if (spec.analysis == AnalysisType::Extrusion || !(spec.value > 0.0))
            throw Error("DegenerateGeometry", "a point source needs a positive buffer");
        return geom::buffer_point(src.point, spec.value, segments_);
    }
    if (spec.analysis != AnalysisType::Extrusion && spec.value > 0.0)
        return geom::buffer2d(src.footprint, spec.value, segments_);
    return src.footprint;
}

std::vector<std::string> FeatureBuilder::allowed_targets(const std::string& source_type) const {
    std::vector<std::string> out;
    for (const auto& rel : registry_->relationships)
        if (rel.realization == ext::Realization::RelatedObjectId && rel.source == source_type)
            out.push_back(rel.target);
    return out;
}

std::string FeatureBuilder::build_crater(const geom::Polygon2& footprint,
                                         const dem::DemGrid& grid, const json& attrs) {
    for (const char* key : {"craterID", "craterName", "diameter"})
        if (!attrs.contains(key))
            throw Error("MissingAttribute", std::string("crater attributes need '") + key + "'");

    const dem::DemGrid clipped = dem::clip(grid, geom::clip_bbox(footprint));
    const geom::TriSurface tin = dem::tin_from_grid(clipped, footprint);

    cj::WorldGeometry g;
    g.kind = cj::GeometryKind::MultiSurface;
    auto& surfaces = g.shells.emplace_back();
    double z_low = tin.triangles.front()[0].z;
    double z_high = z_low;
    for (const auto& tri : tin.triangles) {
        geom::Face3 face;
        face.rings.push_back({tri[0], tri[1], tri[2]});
        surfaces.push_back(std::move(face));
        for (const auto& v : tri) {
            z_low = std::min(z_low, v.z);
            z_high = std::max(z_high, v.z);
        }
    }

    cj::CityObjectRecord rec;
    const auto& cid = attrs.at("craterID");
    rec.id = cid.is_string() ? cid.get<std::string>() : cid.dump();
    rec.object_type = "+SpaceCrater";
    rec.attributes = attrs;
    const std::string id = add(std::move(rec), {std::move(g)});
    remember(id, footprint, z_low, z_high);
    return id;
}

std::string FeatureBuilder::build_surface_object(const geom::Polygon2& footprint, double up,
                                                 double down, const json& attrs) {
    if (!(up + down > 0.0)) throw Error("DegenerateHeight", "up + down must be positive");
    const double z_low = base_z_ - down;
    const double z_high = base_z_ + up;

    cj::CityObjectRecord rec;
    rec.id = attrs.value("id", fresh_id());
    rec.object_type = "+SpaceSurfaceObject";
    rec.attributes = attrs;
    rec.attributes.erase("id");
    const std::string id =
        add(std::move(rec), {as_solid(geom::extrude(snap(footprint), z_low, z_high))});
    remember(id, footprint, z_low, z_high);
    return id;
}

std::string FeatureBuilder::build_plan_unit(const geom::Polygon2& footprint,
                                            const std::string& use, double underground,
                                            double aboveground, const json& attrs) {
    if (use.empty()) throw Error("PreconditionViolated", "plan use type must be non-empty");

    cj::CityObjectRecord rec;
    rec.id = attrs.value("id", fresh_id());
    rec.object_type = "+SpacePlanUnit";
    rec.attributes = attrs;
    rec.attributes.erase("id");
    rec.attributes["planUseType"] = use;
    rec.attributes["undergroundDepth"] = underground;
    rec.attributes["abovegroundDepth"] = aboveground;

    double z_low = base_z_, z_high = base_z_;
    std::vector<cj::WorldGeometry> geometry;
    if (underground > 0.0 || aboveground > 0.0) {
        z_low = base_z_ - underground;
        z_high = base_z_ + aboveground;
        geometry.push_back(as_solid(geom::extrude(snap(footprint), z_low, z_high)));
    } else {
        geometry.push_back(flat_multisurface(snap(footprint), base_z_));
    }
    const std::string id = add(std::move(rec), geometry);
    remember(id, footprint, z_low, z_high);
    return id;
}

std::string FeatureBuilder::build_scientific_evidence(const geom::Polygon2& footprint,
                                                      const AnalysisSpec& spec,
                                                      const std::string& evidence,
                                                      const json& attrs) {
    const auto* type = registry_->find("+SpaceScientificEvidence");
    const ext::AttributeSpec* enum_spec = nullptr;
    for (const auto& a : type->attributes)
        if (a.name == "evidenceType") enum_spec = &a;
    if (enum_spec == nullptr ||
        std::find(enum_spec->allowed_values.begin(), enum_spec->allowed_values.end(), evidence) ==
            enum_spec->allowed_values.end())
        throw Error("InvalidEnum", "evidence type '" + evidence + "' is not allowed");
    spec.require_valid();

    cj::CityObjectRecord rec;
    rec.id = attrs.value("id", fresh_id());
    rec.object_type = "+SpaceScientificEvidence";
    rec.attributes = attrs;
    rec.attributes.erase("id");
    rec.attributes["evidenceType"] = evidence;
    rec.attributes["legalObjectID"] = rec.id;

    const double z_low = base_z_ - spec.extrusion_down;
    const double z_high = base_z_ + spec.extrusion_up;
    geom::Polygon2 shape = footprint;
    if (spec.analysis != AnalysisType::Extrusion && spec.value > 0.0)
        shape = geom::buffer2d(footprint, spec.value, segments_);

    shape = snap(shape);
    std::vector<cj::WorldGeometry> geometry;
    if (spec.analysis == AnalysisType::TwoDBuffer)
        geometry.push_back(flat_multisurface(shape, base_z_));
    else if (spec.analysis == AnalysisType::ThreeDBuffer)
        geometry.push_back(as_solid(geom::extrude(shape, z_low - spec.value, z_high + spec.value)));
    else
        geometry.push_back(as_solid(geom::extrude(shape, z_low, z_high)));

    const std::string id = add(std::move(rec), geometry);
    remember(id, footprint, z_low, z_high);
    return id;
}

std::string FeatureBuilder::build_protected_area(const geom::Polygon2& footprint, double buffer_m,
                                                 double up, double down,
                                                 const std::string& area_name, const json& attrs) {
    if (buffer_m < 0.0) throw Error("PreconditionViolated", "buffer must be non-negative");
    if (!(up + down > 0.0)) throw Error("DegenerateHeight", "up + down must be positive");

    const geom::Polygon2 shape =
        buffer_m > 0.0 ? geom::buffer2d(footprint, buffer_m, segments_) : footprint;
    const double z_low = base_z_ - down;
    const double z_high = base_z_ + up;

    cj::CityObjectRecord rec;
    rec.id = attrs.value("id", fresh_id());
    rec.object_type = "+SpaceProtectedArea";
    rec.attributes = attrs;
    rec.attributes.erase("id");
    rec.attributes["areaName"] = area_name;
    rec.attributes["legalObjectID"] = rec.id;
    const std::string id =
        add(std::move(rec), {as_solid(geom::extrude(snap(shape), z_low, z_high))});
    remember(id, footprint, z_low, z_high);
    return id;
}

std::string FeatureBuilder::build_protected_area(const geom::Vec2& site, double buffer_m,
                                                 double up, double down,
                                                 const std::string& area_name, const json& attrs) {
    if (buffer_m <= 0.0)
        throw Error("DegenerateGeometry", "a point site needs a positive buffer");
    const geom::Polygon2 disc = geom::buffer_point(site, buffer_m, segments_);
    if (!(up + down > 0.0)) throw Error("DegenerateHeight", "up + down must be positive");

    const double z_low = base_z_ - down;
    const double z_high = base_z_ + up;
    cj::CityObjectRecord rec;
    rec.id = attrs.value("id", fresh_id());
    rec.object_type = "+SpaceProtectedArea";
    rec.attributes = attrs;
    rec.attributes.erase("id");
    rec.attributes["areaName"] = area_name;
    rec.attributes["legalObjectID"] = rec.id;
    const std::string id =
        add(std::move(rec), {as_solid(geom::extrude(snap(disc), z_low, z_high))});
    // the logical site stays a point; dependent volumes buffer it directly
    remember_point(id, site, z_low, z_high);
    return id;
}

namespace {

json analysis_attributes(const AnalysisSpec& spec) {
    json out = json::object();
    out["restrictionAnalysisType"] = analysis_to_string(spec.analysis);
    // integral values serialize without a fractional part ("250", not "250.0")
    if (spec.value == std::floor(spec.value) && std::abs(spec.value) < 9.0e15)
        out["restrictionValue"] = static_cast<std::int64_t>(spec.value);
    else
        out["restrictionValue"] = spec.value;
    out["restrictionUnit"] = spec.unit;
    return out;
}

}  // namespace

std::string FeatureBuilder::build_logical_space(const std::string& object_type,
                                                const std::string& target_id,
                                                const AnalysisSpec& spec, json attributes) {
    const auto target = doc_->objects.find(target_id);
    if (target == doc_->objects.end())
        throw Error("TargetNotFound", "no object '" + target_id + "'");

    const auto allowed = allowed_targets(object_type);
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const std::string& t) {
        return registry_->is_subtype_of(target->second.object_type, t);
    });
    if (!ok)
        throw Error("TargetTypeNotAllowed",
                    object_type + " cannot target a " + target->second.object_type);
    spec.require_valid();

    const SourceShape& src = source_shape(target_id);
    const geom::Polygon2 shape = snap(derived_shape(src, spec));

    cj::CityObjectRecord rec;
    rec.id = attributes.value("id", fresh_id());
    rec.object_type = object_type;
    rec.attributes = std::move(attributes);
    rec.attributes.erase("id");
    rec.attributes["relatedObjectID"] = target_id;
    rec.attributes["legalObjectID"] = rec.id;

    double z_low, z_high;
    std::vector<cj::WorldGeometry> geometry;
    switch (spec.analysis) {
        case AnalysisType::ThreeDBuffer:
            // grows the target's own height range in all directions
            z_low = src.z_low - spec.value;
            z_high = src.z_high + spec.value;
            geometry.push_back(as_solid(geom::extrude(shape, z_low, z_high)));
            break;
        case AnalysisType::TwoDBuffer:
            z_low = z_high = base_z_;
            geometry.push_back(flat_multisurface(shape, base_z_));
            break;
        default:
            z_low = base_z_ - spec.extrusion_down;
            z_high = base_z_ + spec.extrusion_up;
            geometry.push_back(as_solid(geom::extrude(shape, z_low, z_high)));
            break;
    }

    const std::string id = add(std::move(rec), geometry);
    shapes_[id] = SourceShape{src.is_point, src.point, src.footprint, z_low, z_high};
    return id;
}

std::string FeatureBuilder::build_restriction(const std::string& target_id,
                                              const AnalysisSpec& spec,
                                              const std::string& restriction_type,
                                              const json& attrs) {
    const auto* rspec = registry_->find("+SpaceRestriction");
    const ext::AttributeSpec* enum_spec = nullptr;
    for (const auto& a : rspec->attributes)
        if (a.name == "restrictionType") enum_spec = &a;
    if (std::find(enum_spec->allowed_values.begin(), enum_spec->allowed_values.end(),
                  restriction_type) == enum_spec->allowed_values.end())
        throw Error("InvalidEnum", "restriction type '" + restriction_type + "' is not allowed");

    json attributes = attrs;
    attributes.update(analysis_attributes(spec));
    attributes["restrictionType"] = restriction_type;
    return build_logical_space("+SpaceRestriction", target_id, spec, std::move(attributes));
}

std::string FeatureBuilder::build_legal_space(const std::string& target_id,
                                              const AnalysisSpec& spec, const json& attrs) {
    return build_logical_space("+SpaceLegal", target_id, spec, attrs);
}

std::pair<std::string, std::vector<std::string>> FeatureBuilder::build_building(
    const SpaceSolidInput& input) {
    std::vector<std::string> seen;
    for (const auto& u : input.units) {
        if (std::find(seen.begin(), seen.end(), u.unit_id) != seen.end())
            throw Error("DuplicateUnitId", "unit id '" + u.unit_id + "' appears twice");
        seen.push_back(u.unit_id);
    }

    // envelope: supplied, or the bounding solid of the units
    std::optional<EnvelopeInput> env = input.envelope;
    if (!env && !input.units.empty()) {
        geom::Aabb box = geom::clip_bbox(input.units.front().footprint);
        double z_low = input.units.front().z_low, z_high = input.units.front().z_high;
        for (const auto& u : input.units) {
            const geom::Aabb b = geom::clip_bbox(u.footprint);
            box.min_x = std::min(box.min_x, b.min_x);
            box.min_y = std::min(box.min_y, b.min_y);
            box.max_x = std::max(box.max_x, b.max_x);
            box.max_y = std::max(box.max_y, b.max_y);
            z_low = std::min(z_low, u.z_low);
            z_high = std::max(z_high, u.z_high);
        }
        EnvelopeInput e;
        e.footprint.exterior = {{box.min_x, box.min_y},
                                {box.max_x, box.min_y},
                                {box.max_x, box.max_y},
                                {box.min_x, box.max_y}};
        e.z_low = z_low;
        e.z_high = z_high;
        env = std::move(e);
    }

    cj::CityObjectRecord building;
    building.id = input.building_id.empty() ? fresh_id() : input.building_id;
    building.object_type = "+SpaceBuilding";
    building.attributes = input.attributes;
    std::vector<cj::WorldGeometry> geometry;
    if (env)
        geometry.push_back(
            as_solid(geom::extrude(snap(env->footprint), env->z_low, env->z_high)));
    const std::string building_id = add(std::move(building), geometry);
    if (env) remember(building_id, env->footprint, env->z_low, env->z_high);

    std::vector<std::string> unit_ids;
    for (const auto& u : input.units) {
        cj::CityObjectRecord unit;
        unit.id = u.unit_id.empty() ? fresh_id() : u.unit_id;
        unit.object_type = "+SpaceBuildingUnit";
        unit.attributes = u.attributes;
        unit.parents = {building_id};
        const std::string uid =
            add(std::move(unit), {as_solid(geom::extrude(snap(u.footprint), u.z_low, u.z_high))});
        remember(uid, u.footprint, u.z_low, u.z_high);
        unit_ids.push_back(uid);
    }
    return {building_id, unit_ids};
}

}  // namespace astrocity::build
