#include "astrocity/document.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "astrocity/errors.hpp"

using nlohmann::json;

namespace astrocity::cj {

namespace {

const std::set<std::string>& core_types() {
    static const std::set<std::string> kCore = {
        "Bridge",         "BridgePart",          "BridgeInstallation",
        "Building",       "BuildingPart",        "BuildingInstallation",
        "BuildingStorey", "BuildingRoom",        "BuildingUnit",
        "BuildingConstructiveElement",           "BuildingFurniture",
        "CityFurniture",  "CityObjectGroup",     "LandUse",
        "OtherConstruction",                     "PlantCover",
        "SolitaryVegetationObject",              "TINRelief",
        "Road",           "Railway",             "Waterway",
        "TransportSquare",                       "Tunnel",
        "TunnelPart",     "TunnelInstallation",  "WaterBody",
        "GenericCityObject"};
    return kCore;
}

std::array<long long, 3> quantize(const geom::Vec3& v, const Transform& t) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
        throw Error("NonFiniteCoordinate", "geometry coordinate is not finite");
    return {std::llround((v.x - t.translate[0]) / t.scale[0]),
            std::llround((v.y - t.translate[1]) / t.scale[1]),
            std::llround((v.z - t.translate[2]) / t.scale[2])};
}

std::size_t pool_vertex(CityDocument& doc, const geom::Vec3& v) {
    const auto q = quantize(v, doc.transform);
    auto [it, inserted] = doc.vertex_pool.try_emplace(q, doc.vertices.size());
    if (inserted) doc.vertices.push_back(q);
    return it->second;
}

void check_transform(const Transform& t) {
    for (const double s : t.scale)
        if (!(s > 0.0)) throw Error("PreconditionViolated", "transform scale must be positive");
}

}  // namespace

bool is_core_type(const std::string& type_name) { return core_types().count(type_name) > 0; }

CityDocument new_document(const std::string& crs_url, const Transform& transform) {
    if (crs_url.empty())
        throw Error("PreconditionViolated", "reference system URL must be non-empty");
    check_transform(transform);
    CityDocument doc;
    doc.transform = transform;
    doc.reference_system_url = crs_url;
    return doc;
}

void declare_extension(CityDocument& doc, const ext::ExtensionRegistry& registry) {
    doc.extensions[registry.extension_name] =
        ExtensionRef{registry.schema_url, registry.extension_version};
}

std::string add_object(CityDocument& doc, CityObjectRecord record,
                       const std::vector<WorldGeometry>& geometry,
                       const ext::ExtensionRegistry* registry) {
    if (record.id.empty()) throw Error("PreconditionViolated", "object id must be non-empty");
    if (doc.objects.count(record.id))
        throw Error("DuplicateId", "object '" + record.id + "' already exists");

    const bool known_ext = registry != nullptr && registry->find(record.object_type) != nullptr;
    if (!known_ext && !is_core_type(record.object_type))
        throw Error("UnknownType",
                    "'" + record.object_type + "' is neither a core type nor declared by the extension");

    for (const auto& parent_id : record.parents)
        if (!doc.objects.count(parent_id))
            throw Error("TargetNotFound", "parent '" + parent_id + "' does not exist");
    for (const auto& child_id : record.children)
        if (!doc.objects.count(child_id))
            throw Error("TargetNotFound", "child '" + child_id + "' does not exist");

    record.geometry.clear();
    for (const auto& wg : geometry) {
        GeometryRecord rec;
        rec.kind = wg.kind;
        rec.lod = wg.lod;
        for (const auto& shell : wg.shells) {
            auto& out_shell = rec.shells.emplace_back();
            for (const auto& face : shell) {
                auto& out_face = out_shell.emplace_back();
                for (const auto& ring : face.rings) {
                    auto& out_ring = out_face.emplace_back();
                    out_ring.reserve(ring.size());
                    for (const auto& v : ring) {
                        const std::size_t idx = pool_vertex(doc, v);
                        // quantization can collapse near-coincident ring
                        // vertices; drop the duplicates it creates
                        if (!out_ring.empty() && out_ring.back() == idx) continue;
                        out_ring.push_back(idx);
                    }
                    if (out_ring.size() > 1 && out_ring.front() == out_ring.back())
                        out_ring.pop_back();
                }
            }
        }
        record.geometry.push_back(std::move(rec));
    }

    const std::string id = record.id;
    for (const auto& parent_id : record.parents) {
        auto& kids = doc.objects[parent_id].children;
        if (std::find(kids.begin(), kids.end(), id) == kids.end()) kids.push_back(id);
    }
    for (const auto& child_id : record.children) {
        auto& parents = doc.objects[child_id].parents;
        if (std::find(parents.begin(), parents.end(), id) == parents.end())
            parents.push_back(id);
    }
    doc.objects.emplace(id, std::move(record));
    return id;
}

void rebase_to_min_corner(CityDocument& doc) {
    if (doc.vertices.empty()) return;
    std::array<long long, 3> lo = doc.vertices.front();
    for (const auto& v : doc.vertices)
        for (int k = 0; k < 3; ++k) lo[k] = std::min(lo[k], v[k]);
    if (lo == std::array<long long, 3>{0, 0, 0}) return;

    doc.vertex_pool.clear();
    for (std::size_t i = 0; i < doc.vertices.size(); ++i) {
        for (int k = 0; k < 3; ++k) doc.vertices[i][k] -= lo[k];
        doc.vertex_pool.emplace(doc.vertices[i], i);
    }
    for (int k = 0; k < 3; ++k)
        doc.transform.translate[k] += static_cast<double>(lo[k]) * doc.transform.scale[k];
}

namespace {

void check_write_invariants(const CityDocument& doc) {
    check_transform(doc.transform);
    const std::size_t n = doc.vertices.size();
    for (const auto& [id, obj] : doc.objects) {
        for (const auto& g : obj.geometry)
            for (const auto& shell : g.shells)
                for (const auto& face : shell)
                    for (const auto& ring : face)
                        for (const std::size_t idx : ring)
                            if (idx >= n)
                                throw Error("InvariantViolation",
                                            "vertex index out of range in object '" + id + "'");
        for (const auto& pid : obj.parents) {
            const auto it = doc.objects.find(pid);
            if (it == doc.objects.end() ||
                std::find(it->second.children.begin(), it->second.children.end(), id) ==
                    it->second.children.end())
                throw Error("InvariantViolation",
                            "parent/child links are asymmetric at object '" + id + "'");
        }
        for (const auto& cid : obj.children) {
            const auto it = doc.objects.find(cid);
            if (it == doc.objects.end() ||
                std::find(it->second.parents.begin(), it->second.parents.end(), id) ==
                    it->second.parents.end())
                throw Error("InvariantViolation",
                            "parent/child links are asymmetric at object '" + id + "'");
        }
    }
}

json boundaries_to_json(const GeometryRecord& g) {
    json shells = json::array();
    for (const auto& shell : g.shells) {
        json js = json::array();
        for (const auto& face : shell) {
            json jf = json::array();
            for (const auto& ring : face) jf.push_back(ring);
            js.push_back(jf);
        }
        shells.push_back(js);
    }
    if (g.kind == GeometryKind::MultiSurface)
        return shells.empty() ? json::array() : shells.at(0);
    return shells;
}

}  // namespace

std::string write_document(const CityDocument& doc) {
    check_write_invariants(doc);

    json out;
    out["type"] = "CityJSON";
    out["version"] = doc.version;
    out["transform"] = {{"scale", doc.transform.scale}, {"translate", doc.transform.translate}};
    if (!doc.reference_system_url.empty())
        out["metadata"]["referenceSystem"] = doc.reference_system_url;
    if (!doc.extensions.empty()) {
        json exts = json::object();
        for (const auto& [name, ref] : doc.extensions)
            exts[name] = {{"url", ref.url}, {"version", ref.version}};
        out["extensions"] = exts;
    }

    json objects = json::object();
    for (const auto& [id, obj] : doc.objects) {
        json jo;
        jo["type"] = obj.object_type;
        if (!obj.attributes.empty()) jo["attributes"] = obj.attributes;
        json geoms = json::array();
        for (const auto& g : obj.geometry) {
            json jg;
            jg["type"] = g.kind == GeometryKind::MultiSurface ? "MultiSurface" : "Solid";
            jg["lod"] = g.lod;
            jg["boundaries"] = boundaries_to_json(g);
            geoms.push_back(jg);
        }
        if (!geoms.empty()) jo["geometry"] = geoms;
        if (!obj.parents.empty()) jo["parents"] = obj.parents;
        if (!obj.children.empty()) jo["children"] = obj.children;
        objects[id] = jo;
    }
    out["CityObjects"] = objects;

    json verts = json::array();
    for (const auto& v : doc.vertices) verts.push_back(v);
    out["vertices"] = verts;

    return out.dump(2) + "\n";
}

namespace {

std::vector<std::vector<std::size_t>> parse_surface(const json& jf, const std::string& where) {
    std::vector<std::vector<std::size_t>> face;
    if (!jf.is_array()) throw ParseError("surface is not an array", where);
    for (const auto& jr : jf) {
        if (!jr.is_array()) throw ParseError("ring is not an array", where);
        std::vector<std::size_t> ring;
        for (const auto& ji : jr) {
            if (!ji.is_number_unsigned())
                throw ParseError("vertex index is not a non-negative integer", where);
            ring.push_back(ji.get<std::size_t>());
        }
        face.push_back(std::move(ring));
    }
    return face;
}

GeometryRecord parse_geometry(const json& jg, const std::string& where) {
    GeometryRecord g;
    const std::string kind = jg.value("type", "");
    if (kind == "MultiSurface")
        g.kind = GeometryKind::MultiSurface;
    else if (kind == "Solid")
        g.kind = GeometryKind::Solid;
    else
        throw ParseError("unsupported geometry type '" + kind + "'", where);
    if (jg.contains("lod")) {
        const auto& lod = jg.at("lod");
        g.lod = lod.is_string() ? lod.get<std::string>() : lod.dump();
    }
    const auto& jb = jg.at("boundaries");
    if (!jb.is_array()) throw ParseError("boundaries is not an array", where);
    if (g.kind == GeometryKind::MultiSurface) {
        auto& shell = g.shells.emplace_back();
        for (const auto& jf : jb) shell.push_back(parse_surface(jf, where));
    } else {
        for (const auto& js : jb) {
            if (!js.is_array()) throw ParseError("shell is not an array", where);
            auto& shell = g.shells.emplace_back();
            for (const auto& jf : js) shell.push_back(parse_surface(jf, where));
        }
    }
    return g;
}

}  // namespace

namespace {

CityDocument read_document_impl(const json& in);

}  // namespace

CityDocument read_document(const std::string& text) {
    json in;
    try {
        in = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), "byte " + std::to_string(e.byte));
    }
    try {
        return read_document_impl(in);
    } catch (const json::exception& e) {
        throw ParseError(e.what(), "document");
    }
}

namespace {

CityDocument read_document_impl(const json& in) {
    if (!in.is_object() || in.value("type", "") != "CityJSON")
        throw ParseError("not a CityJSON document", "type");

    CityDocument doc;
    doc.version = in.value("version", "");
    if (doc.version.empty()) throw ParseError("missing version", "version");

    if (in.contains("transform")) {
        const auto& jt = in.at("transform");
        try {
            doc.transform.scale = jt.at("scale").get<std::array<double, 3>>();
            doc.transform.translate = jt.at("translate").get<std::array<double, 3>>();
        } catch (const json::exception& e) {
            throw ParseError(e.what(), "transform");
        }
    } else {
        doc.transform.scale = {1.0, 1.0, 1.0};  // unquantized legacy document
    }

    if (in.contains("metadata") && in.at("metadata").contains("referenceSystem"))
        doc.reference_system_url = in.at("metadata").at("referenceSystem").get<std::string>();
    else if (in.contains("referenceSystem"))  // tolerated legacy placement
        doc.reference_system_url = in.at("referenceSystem").get<std::string>();

    if (in.contains("extensions")) {
        for (const auto& [name, je] : in.at("extensions").items())
            doc.extensions[name] = ExtensionRef{je.value("url", ""), je.value("version", "")};
    }

    if (in.contains("vertices")) {
        for (const auto& jv : in.at("vertices")) {
            if (!jv.is_array() || jv.size() != 3)
                throw ParseError("vertex is not a 3-array", "vertices");
            std::array<long long, 3> v{};
            for (int k = 0; k < 3; ++k) {
                if (!jv[k].is_number_integer() && !jv[k].is_number_unsigned())
                    throw ParseError("vertex component is not an integer", "vertices");
                v[k] = jv[k].get<long long>();
            }
            doc.vertex_pool.emplace(v, doc.vertices.size());
            doc.vertices.push_back(v);
        }
    }

    if (!in.contains("CityObjects") || !in.at("CityObjects").is_object())
        throw ParseError("missing CityObjects", "CityObjects");
    for (const auto& [id, jo] : in.at("CityObjects").items()) {
        const std::string where = "CityObjects/" + id;
        CityObjectRecord obj;
        obj.id = id;
        obj.object_type = jo.value("type", "");
        if (obj.object_type.empty()) throw ParseError("object without a type", where);
        if (jo.contains("attributes")) {
            if (!jo.at("attributes").is_object())
                throw ParseError("attributes is not an object", where);
            obj.attributes = jo.at("attributes");
        }
        if (jo.contains("geometry"))
            for (const auto& jg : jo.at("geometry"))
                obj.geometry.push_back(parse_geometry(jg, where));
        if (jo.contains("parents")) obj.parents = jo.at("parents").get<std::vector<std::string>>();
        if (jo.contains("children"))
            obj.children = jo.at("children").get<std::vector<std::string>>();

        for (const auto& g : obj.geometry)
            for (const auto& shell : g.shells)
                for (const auto& face : shell)
                    for (const auto& ring : face)
                        for (const std::size_t idx : ring)
                            if (idx >= doc.vertices.size())
                                throw ParseError("vertex index " + std::to_string(idx) +
                                                     " out of range",
                                                 where);

        doc.objects.emplace(id, std::move(obj));
    }

    return doc;
}

}  // namespace

std::string reference_system_urn_to_url(const std::string& urn) {
    // urn:ogc:def:crs:<authority>:[<version>]:<code>
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = urn.find(':', start);
        if (colon == std::string::npos) {
            parts.push_back(urn.substr(start));
            break;
        }
        parts.push_back(urn.substr(start, colon - start));
        start = colon + 1;
    }
    if (parts.size() < 6 || parts[0] != "urn" || parts[1] != "ogc" || parts[2] != "def" ||
        parts[3] != "crs")
        throw Error("PreconditionViolated", "not a CRS URN: '" + urn + "'");

    std::string authority = parts[4];
    const std::string code = parts.back();
    // normalize to the registry token used for the code family
    if (authority == "ESRI" || authority == "EPSSG" || authority == "EPSG")
        authority = "EPSG";
    else if (authority == "IAU" || authority == "IAU2015" || authority == "IAU_2015")
        authority = "IAU_2015";
    if (authority.empty() || code.empty())
        throw Error("PreconditionViolated", "CRS URN lacks authority or code: '" + urn + "'");
    return "https://www.opengis.net/def/crs/" + authority + "/0/" + code;
}

CityDocument upgrade_document(const CityDocument& doc) {
    if (doc.version == "2.0") throw Error("AlreadyCurrent", "document is already version 2.0");
    if (doc.version != "1.0")
        throw Error("PreconditionViolated", "can only upgrade version 1.0 documents");

    CityDocument out = doc;
    out.version = "2.0";
    if (!out.reference_system_url.empty() && out.reference_system_url.rfind("urn:", 0) == 0)
        out.reference_system_url = reference_system_urn_to_url(out.reference_system_url);
    return out;
}

}  // namespace astrocity::cj
