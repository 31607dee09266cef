#pragma once

#include <stdexcept>
#include <string>

namespace hopsi {

/// Malformed or out-of-range input data (exit code 2 at the CLI).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric degeneracy: singular Gram matrix, zero noise estimate, empty
/// truncation window (exit code 3 at the CLI).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid arguments passed to a library call (exit code 1 at the CLI).
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace hopsi
