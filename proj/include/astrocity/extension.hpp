#pragma once

#include <string>
#include <vector>

#include "astrocity/issue.hpp"

namespace astrocity::ext {

enum class ValueKind { String, Number, Integer, DateString, Enum };

struct AttributeSpec {
    std::string name;
    ValueKind kind = ValueKind::String;
    std::vector<std::string> allowed_values;  // Enum kind only
    bool required = false;
};

enum class CoreBase { AbstractCityObject, AbstractBuilding };

struct FeatureTypeSpec {
    std::string name;    // "+"-prefixed
    std::string parent;  // another extension type, or empty
    CoreBase core_base = CoreBase::AbstractCityObject;
    std::vector<AttributeSpec> attributes;
    bool geometry_required = false;
    bool toplevel = true;
};

enum class RelationshipKind { Composition, Association };
enum class Realization { ParentsChildren, RelatedObjectId };

struct Multiplicity {
    int min = 0;
    int max = -1;  // -1 = unbounded
};

struct RelationshipSpec {
    RelationshipKind kind = RelationshipKind::Association;
    std::string source;  // the type carrying the link
    std::string target;
    Multiplicity source_multiplicity;
    Multiplicity target_multiplicity;
    Realization realization = Realization::RelatedObjectId;
};

/// Machine-readable conceptual model: feature types, attributes, enums and
/// relationships. Immutable after construction.
struct ExtensionRegistry {
    std::string extension_name;
    std::string extension_version;
    std::string schema_url;
    std::vector<FeatureTypeSpec> types;
    std::vector<RelationshipSpec> relationships;

    const FeatureTypeSpec* find(const std::string& type_name) const;

    /// True when `type_name` equals `ancestor` or reaches it via parents.
    bool is_subtype_of(const std::string& type_name, const std::string& ancestor) const;

    /// Geometry requirement including inheritance from upper-level classes.
    bool effective_geometry_required(const std::string& type_name) const;

    /// Own and inherited attributes, base-most first.
    std::vector<const AttributeSpec*> effective_attributes(const std::string& type_name) const;
};

/// The built-in "3DSpace" model: 10 feature types for celestial-body
/// surface objects and logical spaces, with their relationships.
ExtensionRegistry builtin_registry();

/// Issue codes: NAME_PREFIX, DUP_NAME, DUP_ATTR, ATTR_SHADOW, ENUM_VALUES,
/// DANGLING_REF, CYCLE, REL_REALIZATION.
std::vector<Issue> validate_registry(const ExtensionRegistry& registry);

/// Emits the CityJSON extension schema document (deterministic text).
/// Throws Error("RegistryInvalid") when validate_registry reports errors.
std::string emit_extension_schema(const ExtensionRegistry& registry);

}  // namespace astrocity::ext
