#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace astrocity {

/// Error thrown across the library. `code` is a stable machine-readable
/// identifier (e.g. "TargetNotFound"), `what()` carries the human message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Malformed input text. Carries a source location string ("line 7",
/// "CityObjects/14300", byte offset) when one is known.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::string location = "")
        : Error("ParseError", location.empty() ? message : location + ": " + message),
          location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

}  // namespace astrocity
