#pragma once

#include <stdexcept>
#include <string>

namespace npseg {

/// Bad file contents, unreadable or unwritable paths, unsupported formats.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that is well formed but carries no usable signal (e.g. a constant image).
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on arguments was violated by the caller.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace npseg
