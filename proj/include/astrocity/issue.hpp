#pragma once

#include <string>
#include <vector>

namespace astrocity {

enum class Severity { Error, Warning };

/// One finding from a validation pass. `code` is drawn from the code table
/// in the module that produced it; `path` locates the offending field
/// ("transform/scale", "CityObjects/<id>/geometry/0").
struct Issue {
    std::string code;
    Severity severity = Severity::Error;
    std::string object_id;  // empty for document-level findings
    std::string path;
    std::string message;
};

inline bool has_errors(const std::vector<Issue>& issues) {
    for (const auto& i : issues)
        if (i.severity == Severity::Error) return true;
    return false;
}

inline std::vector<Issue> errors_only(const std::vector<Issue>& issues) {
    std::vector<Issue> out;
    for (const auto& i : issues)
        if (i.severity == Severity::Error) out.push_back(i);
    return out;
}

}  // namespace astrocity
