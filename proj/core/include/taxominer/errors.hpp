#pragma once

#include <stdexcept>
#include <string>

namespace taxominer {

// Bad user-supplied data (CLI exit code 1).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem or network trouble (CLI exit code 2).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : InputError {
    using InputError::InputError;
};

struct SchemaError : InputError {
    using InputError::InputError;
};

struct IntegrityError : InputError {
    using InputError::InputError;
};

}  // namespace taxominer
