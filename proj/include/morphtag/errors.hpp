#pragma once

#include <stdexcept>
#include <string>

namespace morphtag {

/// Shape disagreement between operands or against an op signature.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

/// NaN/Inf detected in a forward value or gradient.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file (corpus, lexicon, vectors, dictionary).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Inconsistent or invalid configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace morphtag
