#pragma once

#include <stdexcept>
#include <string>

namespace amp {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Tensor dimensions do not line up; the message names the offending shapes.
struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// Non-finite input where finite values are required.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

/// Invalid model or training configuration.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Filesystem-level failure (missing file, unreadable path, short write).
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Malformed or inconsistent on-disk artifact (checkpoint, report, plan).
struct FormatError : Error {
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

/// Requested pruning ratio cannot be achieved; message reports the maximum.
struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

/// Training aborted (divergence); message carries the step index.
struct TrainError : Error {
    explicit TrainError(const std::string& msg) : Error(msg) {}
};

}  // namespace amp
