#pragma once

#include <stdexcept>
#include <string>

namespace subpix {

/// Invalid configuration, degenerate input, or malformed data. CLI exit code 1.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Filesystem-level failure (open/read/write). CLI exit code 2.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace subpix
