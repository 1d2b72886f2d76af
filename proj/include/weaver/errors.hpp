#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace weaver {

// Base for all pipeline errors. `code()` is a stable machine-readable
// identifier (e.g. "MalformedXml", "DuplicateServiceId"); what() carries the
// human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace weaver
