#pragma once

#include <stdexcept>
#include <string>

namespace craft {

/// Shape or width disagreement between operands.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operation called out of order (e.g. backward without a recorded forward).
struct StateError : std::logic_error {
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

/// A value object violates one of its invariants.
struct ValidationError : std::invalid_argument {
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// File format or serialization failure.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Training aborted (non-finite loss or gradient).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace craft
