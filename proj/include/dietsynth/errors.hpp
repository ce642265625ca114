#pragma once

#include <stdexcept>
#include <string>

namespace dietsynth {

/// Invalid configuration or validation failure (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Infeasible generation request, e.g. frequency quotas that cannot fit a
/// week or a selector with no region-compatible items (CLI exit code 2).
struct GenerationError : ConfigError {
    explicit GenerationError(const std::string& msg) : ConfigError(msg) {}
};

/// Malformed or inconsistent data encountered while processing a dataset
/// (CLI exit code 3).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace dietsynth
