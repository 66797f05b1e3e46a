#pragma once

#include <vector>

#include "astrocity/document.hpp"
#include "astrocity/extension.hpp"
#include "astrocity/issue.hpp"

namespace astrocity::validate {

/// Core-schema conformance.
///
/// Codes: VERSION_UNSUPPORTED, TRANSFORM_SCALE, VTX_RANGE, RING_SIZE,
/// REL_ASYMMETRY, CRS_URL_FORM, VTX_DUPLICATE (warning).
std::vector<Issue> validate_core(const cj::CityDocument& doc);

/// Conformance against the extension registry: known types, "+" prefix,
/// attribute kinds and enums, required attributes, inherited geometry
/// requirement, relatedObjectID integrity and target types, composition
/// multiplicity.
///
/// Codes: EXT_NOT_DECLARED, EXT_UNKNOWN_TYPE, EXT_NAME_PREFIX, ATTR_TYPE,
/// ATTR_ENUM, ATTR_REQUIRED, GEOM_REQUIRED, REF_INTEGRITY, REF_TARGET_TYPE,
/// MULT_COMPOSITION, ATTR_UNKNOWN (warning, error when strict).
std::vector<Issue> validate_extension(const cj::CityDocument& doc,
                                      const ext::ExtensionRegistry& registry,
                                      bool strict = false);

/// Watertightness of every Solid geometry.
///
/// Codes: SOLID_OPEN, SOLID_ORIENTATION, SOLID_NONPLANAR, SOLID_DEGENERATE.
std::vector<Issue> validate_solids(const cj::CityDocument& doc);

/// validate_core + validate_extension + validate_solids.
std::vector<Issue> validate_all(const cj::CityDocument& doc,
                                const ext::ExtensionRegistry& registry, bool strict = false);

}  // namespace astrocity::validate
