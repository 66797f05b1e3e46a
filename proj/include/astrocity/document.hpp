#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "astrocity/extension.hpp"
#include "astrocity/geometry.hpp"

namespace astrocity::cj {

/// Vertex quantization: world = index * scale + translate.
struct Transform {
    std::array<double, 3> scale{0.001, 0.001, 0.001};
    std::array<double, 3> translate{0.0, 0.0, 0.0};

    bool operator==(const Transform&) const = default;
};

enum class GeometryKind { MultiSurface, Solid };

/// Quantized geometry. Boundaries are stored shell -> surface -> ring ->
/// vertex index; a MultiSurface has exactly one shell holding its surface
/// list and serializes three levels deep.
struct GeometryRecord {
    GeometryKind kind = GeometryKind::MultiSurface;
    std::string lod = "1";
    std::vector<std::vector<std::vector<std::vector<std::size_t>>>> shells;

    bool operator==(const GeometryRecord&) const = default;
};

/// World-coordinate geometry handed to add_object before quantization.
struct WorldGeometry {
    GeometryKind kind = GeometryKind::MultiSurface;
    std::string lod = "1";
    std::vector<std::vector<geom::Face3>> shells;  // one shell for MultiSurface
};

struct CityObjectRecord {
    std::string id;
    std::string object_type;
    nlohmann::json attributes = nlohmann::json::object();
    std::vector<GeometryRecord> geometry;
    std::vector<std::string> parents;
    std::vector<std::string> children;

    bool operator==(const CityObjectRecord&) const = default;
};

struct ExtensionRef {
    std::string url;
    std::string version;

    bool operator==(const ExtensionRef&) const = default;
};

/// In-memory CityJSON document with a deduplicated quantized vertex pool.
/// Single-writer: mutate from one thread at a time.
struct CityDocument {
    std::string version = "2.0";
    Transform transform;
    std::vector<std::array<long long, 3>> vertices;
    std::map<std::string, CityObjectRecord> objects;
    std::string reference_system_url;
    std::map<std::string, ExtensionRef> extensions;

    geom::Vec3 vertex_world(std::size_t index) const {
        const auto& v = vertices[index];
        return {v[0] * transform.scale[0] + transform.translate[0],
                v[1] * transform.scale[1] + transform.translate[1],
                v[2] * transform.scale[2] + transform.translate[2]};
    }

    bool operator==(const CityDocument& other) const {
        return version == other.version && transform == other.transform &&
               vertices == other.vertices && objects == other.objects &&
               reference_system_url == other.reference_system_url &&
               extensions == other.extensions;
    }

    // derived: quantized triplet -> vertex index (rebuilt by read/rebase)
    std::map<std::array<long long, 3>, std::size_t> vertex_pool;
};

/// Empty version-2.0 document. Throws Error("PreconditionViolated") on an
/// empty CRS URL or non-positive scale.
CityDocument new_document(const std::string& crs_url, const Transform& transform = {});

/// Declares the registry's extension on the document (name -> url/version).
void declare_extension(CityDocument& doc, const ext::ExtensionRegistry& registry);

/// Quantizes, deduplicates and links the record into the document.
/// `registry` resolves "+"-prefixed types; core types are built in.
/// Throws Error("UnknownType"), Error("NonFiniteCoordinate"),
/// Error("DuplicateId"), Error("TargetNotFound") for missing parents.
std::string add_object(CityDocument& doc, CityObjectRecord record,
                       const std::vector<WorldGeometry>& geometry,
                       const ext::ExtensionRegistry* registry);

/// Shifts the quantization origin so the minimum vertex index is (0,0,0);
/// world coordinates are unchanged.
void rebase_to_min_corner(CityDocument& doc);

/// Serializes to CityJSON text. Throws Error("InvariantViolation") when the
/// document breaks its own invariants.
std::string write_document(const CityDocument& doc);

/// Parses CityJSON text (versions 1.0 and 2.0); the exact inverse of
/// write_document on documents this library writes. Throws ParseError.
CityDocument read_document(const std::string& text);

/// 1.0 -> 2.0: rewrites the reference system from the legacy URN form to
/// the OGC URL form, keeps objects, vertices, transform and extensions.
/// Throws Error("AlreadyCurrent") for 2.0 input.
CityDocument upgrade_document(const CityDocument& doc);

/// URN "urn:ogc:def:crs:<auth>::<code>" -> OGC URL, normalizing the
/// authority token (ESRI-style numeric codes -> "EPSG", IAU -> "IAU_2015").
std::string reference_system_urn_to_url(const std::string& urn);

/// Core (non-extension) first-level city object types.
bool is_core_type(const std::string& type_name);

}  // namespace astrocity::cj
