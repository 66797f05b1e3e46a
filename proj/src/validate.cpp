#include "astrocity/validate.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>

using nlohmann::json;

namespace astrocity::validate {

namespace {

void add(std::vector<Issue>& issues, const std::string& code, Severity severity,
         const std::string& object_id, const std::string& path, const std::string& message) {
    issues.push_back({code, severity, object_id, path, message});
}

}  // namespace

std::vector<Issue> validate_core(const cj::CityDocument& doc) {
    std::vector<Issue> issues;

    if (doc.version != "1.0" && doc.version != "2.0")
        add(issues, "VERSION_UNSUPPORTED", Severity::Error, "", "version",
            "version '" + doc.version + "' is not 1.0 or 2.0");

    for (int k = 0; k < 3; ++k)
        if (!(doc.transform.scale[k] > 0.0)) {
            add(issues, "TRANSFORM_SCALE", Severity::Error, "", "transform/scale",
                "scale components must be positive");
            break;
        }

    const std::size_t n = doc.vertices.size();
    for (const auto& [id, obj] : doc.objects) {
        for (std::size_t gi = 0; gi < obj.geometry.size(); ++gi) {
            const std::string gpath = "CityObjects/" + id + "/geometry/" + std::to_string(gi);
            for (const auto& shell : obj.geometry[gi].shells) {
                for (const auto& face : shell) {
                    for (const auto& ring : face) {
                        bool out_of_range = false;
                        for (const std::size_t idx : ring)
                            if (idx >= n) out_of_range = true;
                        if (out_of_range)
                            add(issues, "VTX_RANGE", Severity::Error, id, gpath,
                                "vertex index exceeds the vertex count");
                        std::set<std::size_t> distinct(ring.begin(), ring.end());
                        if (distinct.size() < 3)
                            add(issues, "RING_SIZE", Severity::Error, id, gpath,
                                "ring has fewer than 3 distinct vertices");
                        else if (ring.size() > 1 && ring.front() == ring.back())
                            add(issues, "RING_SIZE", Severity::Error, id, gpath,
                                "ring repeats its first vertex as last");
                    }
                }
            }
        }

        for (const auto& pid : obj.parents) {
            const auto it = doc.objects.find(pid);
            if (it == doc.objects.end() ||
                std::find(it->second.children.begin(), it->second.children.end(), id) ==
                    it->second.children.end())
                add(issues, "REL_ASYMMETRY", Severity::Error, id, "CityObjects/" + id + "/parents",
                    "parent '" + pid + "' does not list this object as a child");
        }
        for (const auto& cid : obj.children) {
            const auto it = doc.objects.find(cid);
            if (it == doc.objects.end() ||
                std::find(it->second.parents.begin(), it->second.parents.end(), id) ==
                    it->second.parents.end())
                add(issues, "REL_ASYMMETRY", Severity::Error, id,
                    "CityObjects/" + id + "/children",
                    "child '" + cid + "' does not list this object as a parent");
        }
    }

    std::set<std::array<long long, 3>> seen;
    for (std::size_t i = 0; i < doc.vertices.size(); ++i)
        if (!seen.insert(doc.vertices[i]).second)
            add(issues, "VTX_DUPLICATE", Severity::Warning, "",
                "vertices/" + std::to_string(i), "duplicate vertex triplet");

    if (doc.version == "2.0" && !doc.reference_system_url.empty()) {
        static const std::regex kUrlForm(
            R"(https://www\.opengis\.net/def/crs/[^/]+/0/[^/]+)");
        if (!std::regex_match(doc.reference_system_url, kUrlForm))
            add(issues, "CRS_URL_FORM", Severity::Error, "", "metadata/referenceSystem",
                "reference system is not in the OGC URL form");
    }

    return issues;
}

namespace {

bool value_matches_kind(const json& v, const ext::AttributeSpec& spec) {
    switch (spec.kind) {
        case ext::ValueKind::String: return v.is_string();
        case ext::ValueKind::Number: return v.is_number();
        case ext::ValueKind::Integer: return v.is_number_integer() || v.is_number_unsigned();
        case ext::ValueKind::DateString: {
            if (!v.is_string()) return false;
            static const std::regex kDate(R"(\d{4}-\d{2}-\d{2})");
            return std::regex_match(v.get<std::string>(), kDate);
        }
        case ext::ValueKind::Enum: return v.is_string();
    }
    return false;
}

}  // namespace

std::vector<Issue> validate_extension(const cj::CityDocument& doc,
                                      const ext::ExtensionRegistry& registry, bool strict) {
    std::vector<Issue> issues;

    const auto decl = doc.extensions.find(registry.extension_name);
    if (decl == doc.extensions.end())
        add(issues, "EXT_NOT_DECLARED", Severity::Error, "", "extensions",
            "document does not declare extension '" + registry.extension_name + "'");

    for (const auto& [id, obj] : doc.objects) {
        const std::string opath = "CityObjects/" + id;
        if (cj::is_core_type(obj.object_type)) continue;
        if (obj.object_type.empty() || obj.object_type.front() != '+') {
            add(issues, "EXT_NAME_PREFIX", Severity::Error, id, opath + "/type",
                "non-core type '" + obj.object_type + "' lacks the '+' prefix");
            continue;
        }
        const ext::FeatureTypeSpec* type = registry.find(obj.object_type);
        if (type == nullptr) {
            add(issues, "EXT_UNKNOWN_TYPE", Severity::Error, id, opath + "/type",
                "type '" + obj.object_type + "' is not defined by the extension");
            continue;
        }

        const auto effective = registry.effective_attributes(obj.object_type);
        for (const auto& [name, value] : obj.attributes.items()) {
            const auto it = std::find_if(
                effective.begin(), effective.end(),
                [&name = name](const ext::AttributeSpec* a) { return a->name == name; });
            if (it == effective.end()) {
                add(issues, "ATTR_UNKNOWN", strict ? Severity::Error : Severity::Warning, id,
                    opath + "/attributes/" + name,
                    "attribute is not defined for " + obj.object_type);
                continue;
            }
            const ext::AttributeSpec& spec = **it;
            if (!value_matches_kind(value, spec)) {
                add(issues, "ATTR_TYPE", Severity::Error, id, opath + "/attributes/" + name,
                    "value does not match the declared kind");
                continue;
            }
            if (spec.kind == ext::ValueKind::Enum &&
                std::find(spec.allowed_values.begin(), spec.allowed_values.end(),
                          value.get<std::string>()) == spec.allowed_values.end())
                add(issues, "ATTR_ENUM", Severity::Error, id, opath + "/attributes/" + name,
                    "'" + value.get<std::string>() + "' is not an allowed value");
        }

        for (const ext::AttributeSpec* spec : effective)
            if (spec->required && !obj.attributes.contains(spec->name))
                add(issues, "ATTR_REQUIRED", Severity::Error, id,
                    opath + "/attributes/" + spec->name, "required attribute is missing");

        if (registry.effective_geometry_required(obj.object_type) && obj.geometry.empty())
            add(issues, "GEOM_REQUIRED", Severity::Error, id, opath + "/geometry",
                "geometry is required for " + obj.object_type);

        // relatedObjectID: association endpoints are matched on the exact
        // source type; targets accept subclasses
        if (obj.attributes.contains("relatedObjectID") &&
            obj.attributes.at("relatedObjectID").is_string()) {
            const std::string target_id = obj.attributes.at("relatedObjectID").get<std::string>();
            const auto target = doc.objects.find(target_id);
            if (target == doc.objects.end()) {
                add(issues, "REF_INTEGRITY", Severity::Error, id,
                    opath + "/attributes/relatedObjectID",
                    "relatedObjectID '" + target_id + "' does not resolve");
            } else {
                bool allowed = false;
                for (const auto& rel : registry.relationships) {
                    if (rel.realization != ext::Realization::RelatedObjectId) continue;
                    if (rel.source != obj.object_type) continue;
                    if (registry.is_subtype_of(target->second.object_type, rel.target)) {
                        allowed = true;
                        break;
                    }
                }
                if (!allowed)
                    add(issues, "REF_TARGET_TYPE", Severity::Error, id,
                        opath + "/attributes/relatedObjectID",
                        obj.object_type + " may not reference a " + target->second.object_type);
            }
        }
    }

    // composition multiplicity, e.g. each +SpaceBuildingUnit needs exactly
    // one +SpaceBuilding parent
    for (const auto& rel : registry.relationships) {
        if (rel.kind != ext::RelationshipKind::Composition) continue;
        for (const auto& [id, obj] : doc.objects) {
            if (!registry.is_subtype_of(obj.object_type, rel.target)) continue;
            std::size_t owners = 0;
            for (const auto& pid : obj.parents) {
                const auto it = doc.objects.find(pid);
                if (it != doc.objects.end() &&
                    registry.is_subtype_of(it->second.object_type, rel.source))
                    ++owners;
            }
            if (owners != 1)
                add(issues, "MULT_COMPOSITION", Severity::Error, id,
                    "CityObjects/" + id + "/parents",
                    obj.object_type + " has " + std::to_string(owners) + " " + rel.source +
                        " parents, expected exactly 1");
        }
    }

    return issues;
}

std::vector<Issue> validate_solids(const cj::CityDocument& doc) {
    std::vector<Issue> issues;

    // world geometry is undefined under a broken transform; validate_core
    // reports TRANSFORM_SCALE
    for (int k = 0; k < 3; ++k)
        if (!(doc.transform.scale[k] > 0.0)) return issues;

    std::vector<geom::Vec3> world;
    world.reserve(doc.vertices.size());
    for (std::size_t i = 0; i < doc.vertices.size(); ++i) world.push_back(doc.vertex_world(i));

    for (const auto& [id, obj] : doc.objects) {
        for (std::size_t gi = 0; gi < obj.geometry.size(); ++gi) {
            const auto& g = obj.geometry[gi];
            if (g.kind != cj::GeometryKind::Solid) continue;

            bool in_range = true;
            for (const auto& shell : g.shells)
                for (const auto& face : shell)
                    for (const auto& ring : face)
                        for (const std::size_t idx : ring)
                            if (idx >= world.size()) in_range = false;
            const std::string gpath = "CityObjects/" + id + "/geometry/" + std::to_string(gi);
            if (!in_range) continue;  // validate_core reports VTX_RANGE

            for (const auto& found : geom::check_watertight_indexed(world, g.shells)) {
                std::string code = "SOLID_OPEN";
                if (found.code == "ORIENTATION" || found.code == "NONPOSITIVE_VOLUME")
                    code = "SOLID_ORIENTATION";
                else if (found.code == "NONPLANAR")
                    code = "SOLID_NONPLANAR";
                else if (found.code == "DEGENERATE_RING")
                    code = "SOLID_DEGENERATE";
                add(issues, code, Severity::Error, id, gpath + "/" + found.path, found.message);
            }
        }
    }
    return issues;
}

std::vector<Issue> validate_all(const cj::CityDocument& doc,
                                const ext::ExtensionRegistry& registry, bool strict) {
    std::vector<Issue> issues = validate_core(doc);
    auto ext_issues = validate_extension(doc, registry, strict);
    issues.insert(issues.end(), ext_issues.begin(), ext_issues.end());
    auto solid_issues = validate_solids(doc);
    issues.insert(issues.end(), solid_issues.begin(), solid_issues.end());
    return issues;
}

}  // namespace astrocity::validate
