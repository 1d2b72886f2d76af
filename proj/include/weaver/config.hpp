#pragma once

#include <string>
#include <string_view>

#include "weaver/errors.hpp"

namespace weaver::config {

class ConfigError : public Error {
public:
    ConfigError(std::size_t line, const std::string& message)
        : Error("ConfigError", "config line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Effective settings for one pipeline run. Defaults apply when no config
// file is given; a file only needs the keys it wants to override.
struct Settings {
    double matchTheta = 0.5;          // match.theta
    double matchDecay = 0.5;          // match.decay
    int matchMaxHops = 2;             // match.max_hops
    bool selectScoreFirst = false;    // select.score_first
    int composeMaxDepth = 4;          // compose.max_depth
    bool composeUseIsa = false;       // compose.use_isa
    bool orchestratorUseName = true;  // orchestrator.use_name
    std::string chunkPattern = "(ADJ|N)*N";  // chunk_pattern

    bool operator==(const Settings&) const = default;
};

// Flat "key = value" text. '#' starts a comment, blank lines are skipped.
// Unknown keys and unparsable values raise ConfigError.
Settings parse(std::string_view text);

Settings load_file(const std::string& path);

// Uses BPMN_WEAVER_CONFIG when set (and then the file must load), else defaults.
Settings from_env_or_defaults();

}  // namespace weaver::config
