#include "astrocity/extension.hpp"

#include <set>
#include <unordered_set>

#include <json.hpp>

#include "astrocity/errors.hpp"

using nlohmann::json;

namespace astrocity::ext {

const FeatureTypeSpec* ExtensionRegistry::find(const std::string& type_name) const {
    for (const auto& t : types)
        if (t.name == type_name) return &t;
    return nullptr;
}

bool ExtensionRegistry::is_subtype_of(const std::string& type_name,
                                      const std::string& ancestor) const {
    const FeatureTypeSpec* t = find(type_name);
    std::size_t hops = 0;
    while (t != nullptr) {
        if (t->name == ancestor) return true;
        if (t->parent.empty() || ++hops > types.size()) break;
        t = find(t->parent);
    }
    return false;
}

bool ExtensionRegistry::effective_geometry_required(const std::string& type_name) const {
    const FeatureTypeSpec* t = find(type_name);
    std::size_t hops = 0;
    while (t != nullptr) {
        if (t->geometry_required) return true;
        if (t->parent.empty() || ++hops > types.size()) break;
        t = find(t->parent);
    }
    return false;
}

std::vector<const AttributeSpec*> ExtensionRegistry::effective_attributes(
    const std::string& type_name) const {
    std::vector<const FeatureTypeSpec*> chain;
    const FeatureTypeSpec* t = find(type_name);
    while (t != nullptr && chain.size() <= types.size()) {
        chain.push_back(t);
        t = t->parent.empty() ? nullptr : find(t->parent);
    }
    std::vector<const AttributeSpec*> out;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it)
        for (const auto& a : (*it)->attributes) out.push_back(&a);
    return out;
}

ExtensionRegistry builtin_registry() {
    using VK = ValueKind;
    ExtensionRegistry reg;
    reg.extension_name = "3DSpace";
    reg.extension_version = "2.0";
    reg.schema_url =
        "https://raw.githubusercontent.com/geospatialstudies/space/refs/heads/main/"
        "space.ext.json";

    auto type = [&reg](FeatureTypeSpec t) { reg.types.push_back(std::move(t)); };

    type({.name = "+SpaceSurfaceObject",
          .attributes = {{"objectName", VK::String},
                         {"objectType", VK::String},
                         {"registrationDate", VK::DateString}}});

    type({.name = "+SpaceCrater",
          .parent = "+SpaceSurfaceObject",
          .attributes = {{.name = "craterID", .kind = VK::Integer, .required = true},
                         {.name = "craterName", .kind = VK::String, .required = true},
                         {.name = "diameter", .kind = VK::Number, .required = true},
                         {"depth", VK::Number},
                         {"albedo", VK::Number},
                         {"IAUID", VK::Integer},
                         {"approvalDate", VK::Integer},
                         {"target", VK::String}}});

    type({.name = "+SpacePlanUnit",
          .attributes = {{"planUseType", VK::Enum, {"mining", "settlement"}},
                         {"punitObjectType", VK::String},
                         {"undergroundDepth", VK::Number},
                         {"abovegroundDepth", VK::Number}}});

    type({.name = "+SpaceBuilding",
          .core_base = CoreBase::AbstractBuilding,
          .attributes = {{"buildingState", VK::String},
                         {"buildingID", VK::String},
                         {"buildingObjectID", VK::String}}});

    type({.name = "+SpaceBuildingUnit",
          .core_base = CoreBase::AbstractBuilding,
          .attributes = {{"unitUseType", VK::String}},
          .toplevel = false});

    type({.name = "+SpaceLegal",
          .attributes = {{"legalObjectID", VK::String}, {"relatedObjectID", VK::String}},
          .geometry_required = true});

    type({.name = "+SpaceScientificEvidence",
          .parent = "+SpaceLegal",
          .attributes = {
              {"evidenceType", VK::Enum, {"waterIce", "geological", "astrobiological"}}}});

    type({.name = "+SpaceProtectedArea",
          .parent = "+SpaceLegal",
          .attributes = {{"areaName", VK::String}}});

    type({.name = "+SpaceCommonArea",
          .parent = "+SpaceLegal",
          .attributes = {{"areaUseType", VK::String}}});

    type({.name = "+SpaceRestriction",
          .parent = "+SpaceLegal",
          .attributes = {
              {"restrictionType",
               VK::Enum,
               {"historicalSite", "mining", "scientific", "settlement"}},
              {"restrictionAnalysisType",
               VK::Enum,
               {"2DBuffer", "3DBuffer", "Extrusion", "BufferExtrusion"}},
              {"restrictionValue", VK::Number},
              {"restrictionUnit", VK::String}}});

    auto composition = [&reg](const std::string& source, const std::string& target) {
        reg.relationships.push_back({RelationshipKind::Composition, source, target,
                                     {1, 1}, {0, -1}, Realization::ParentsChildren});
    };
    auto association = [&reg](const std::string& source, const std::string& target) {
        reg.relationships.push_back({RelationshipKind::Association, source, target,
                                     {0, -1}, {0, 1}, Realization::RelatedObjectId});
    };

    composition("+SpaceBuilding", "+SpaceBuildingUnit");
    association("+SpaceRestriction", "+SpaceScientificEvidence");
    association("+SpaceRestriction", "+SpaceProtectedArea");
    association("+SpaceRestriction", "+SpaceSurfaceObject");
    association("+SpaceRestriction", "+SpacePlanUnit");
    association("+SpaceLegal", "+SpaceBuilding");
    association("+SpaceLegal", "+SpaceBuildingUnit");
    association("+SpaceLegal", "+SpacePlanUnit");

    return reg;
}

std::vector<Issue> validate_registry(const ExtensionRegistry& reg) {
    std::vector<Issue> issues;
    auto add = [&issues](const std::string& code, const std::string& path,
                         const std::string& message) {
        issues.push_back({code, Severity::Error, "", path, message});
    };

    std::set<std::string> names;
    for (const auto& t : reg.types) {
        if (t.name.empty() || t.name.front() != '+')
            add("NAME_PREFIX", t.name, "extension type names must start with '+'");
        if (!names.insert(t.name).second)
            add("DUP_NAME", t.name, "duplicate feature type name");
    }

    for (const auto& t : reg.types) {
        if (!t.parent.empty() && reg.find(t.parent) == nullptr)
            add("DANGLING_REF", t.name, "parent '" + t.parent + "' is not registered");

        std::set<std::string> own;
        for (const auto& a : t.attributes) {
            if (a.name.empty())
                add("DUP_ATTR", t.name, "attribute with empty name");
            else if (!own.insert(a.name).second)
                add("DUP_ATTR", t.name, "duplicate attribute '" + a.name + "'");
            if (a.kind == ValueKind::Enum && a.allowed_values.empty())
                add("ENUM_VALUES", t.name + "/" + a.name, "enum kind requires allowed values");
            if (a.kind != ValueKind::Enum && !a.allowed_values.empty())
                add("ENUM_VALUES", t.name + "/" + a.name,
                    "allowed values given for a non-enum kind");
        }

        // inherited attribute names must not be redefined
        const FeatureTypeSpec* up = t.parent.empty() ? nullptr : reg.find(t.parent);
        std::size_t hops = 0;
        while (up != nullptr && hops++ <= reg.types.size()) {
            for (const auto& a : up->attributes)
                if (own.count(a.name))
                    add("ATTR_SHADOW", t.name + "/" + a.name,
                        "shadows attribute inherited from " + up->name);
            up = up->parent.empty() ? nullptr : reg.find(up->parent);
        }
    }

    // parent cycles
    for (const auto& t : reg.types) {
        std::unordered_set<std::string> seen;
        const FeatureTypeSpec* cur = &t;
        while (cur != nullptr && !cur->parent.empty()) {
            if (!seen.insert(cur->name).second) {
                add("CYCLE", t.name, "parent chain contains a cycle");
                break;
            }
            cur = reg.find(cur->parent);
        }
    }

    for (const auto& r : reg.relationships) {
        if (reg.find(r.source) == nullptr)
            add("DANGLING_REF", r.source, "relationship source is not registered");
        if (reg.find(r.target) == nullptr)
            add("DANGLING_REF", r.target, "relationship target is not registered");
        if (r.kind == RelationshipKind::Composition &&
            r.realization != Realization::ParentsChildren)
            add("REL_REALIZATION", r.source + "->" + r.target,
                "composition must use the parents-children realization");
        if (r.kind == RelationshipKind::Association &&
            r.realization != Realization::RelatedObjectId)
            add("REL_REALIZATION", r.source + "->" + r.target,
                "association must use the relatedObjectID realization");
    }

    return issues;
}

namespace {

json attribute_schema(const AttributeSpec& a) {
    switch (a.kind) {
        case ValueKind::String: return json{{"type", "string"}};
        case ValueKind::Number: return json{{"type", "number"}};
        case ValueKind::Integer: return json{{"type", "integer"}};
        case ValueKind::DateString: return json{{"type", "string"}, {"format", "date"}};
        case ValueKind::Enum: return json{{"enum", a.allowed_values}};
    }
    return json::object();
}

const char* core_base_ref(CoreBase base) {
    switch (base) {
        case CoreBase::AbstractBuilding:
            return "cityobjects.schema.json#/_AbstractBuilding";
        case CoreBase::AbstractCityObject:
        default:
            return "cityobjects.schema.json#/_AbstractCityObject";
    }
}

}  // namespace

std::string emit_extension_schema(const ExtensionRegistry& reg) {
    if (has_errors(validate_registry(reg)))
        throw Error("RegistryInvalid", "registry violates its invariants");

    json doc;
    doc["type"] = "CityJSONExtension";
    doc["name"] = reg.extension_name;
    doc["url"] = reg.schema_url;
    doc["version"] = reg.extension_version;
    doc["versionCityJSON"] = "2.0";
    doc["description"] =
        "Surface objects and related logical spaces on celestial bodies";
    doc["extraRootProperties"] = json::object();
    doc["extraAttributes"] = json::object();

    json objects = json::object();
    for (const auto& t : reg.types) {
        json own;
        own["properties"]["type"] = json{{"enum", json::array({t.name})}};
        json attrs = json::object();
        for (const auto& a : t.attributes) attrs[a.name] = attribute_schema(a);
        own["properties"]["attributes"]["properties"] = attrs;

        json required = json::array({"type"});
        // subclasses inherit the geometry requirement from their upper-level
        // class instead of restating it
        if (t.geometry_required) {
            own["properties"]["geometry"] = json{
                {"type", "array"},
                {"items",
                 json{{"oneOf", json::array({json{{"$ref", "geomprimitives.schema.json#/Solid"}},
                                             json{{"$ref",
                                                   "geomprimitives.schema.json#/MultiSurface"}}})}}}};
            required.push_back("geometry");
        }
        own["required"] = required;

        const std::string parent_ref =
            t.parent.empty() ? core_base_ref(t.core_base) : "#/extraCityObjects/" + t.parent;
        objects[t.name] = json{{"allOf", json::array({json{{"$ref", parent_ref}}, own})}};
    }
    doc["extraCityObjects"] = objects;

    return doc.dump(2) + "\n";
}

}  // namespace astrocity::ext
