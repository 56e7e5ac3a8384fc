/**
 * @file Error.h
 * @brief Exception hierarchy shared by all modules
 */

#pragma once

#include <stdexcept>
#include <string>

namespace czi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value (usage error at the CLI).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Unreadable input, malformed file, inconsistent model or data.
class DataError : public Error {
public:
    using Error::Error;
};

/// Segmentation could not find the expected lattice structure.
class SegmentationError : public DataError {
public:
    SegmentationError(const std::string& what, std::string diagnostics)
        : DataError(what), diagnostics_(std::move(diagnostics)) {}

    /// Projection-curve dump useful for debugging the failure.
    const std::string& Diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

/// Sub-region rows do not follow either known primitive ordering.
class ClassificationError : public DataError {
public:
    using DataError::DataError;
};

/// Linear system singular even after regularization.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace czi
