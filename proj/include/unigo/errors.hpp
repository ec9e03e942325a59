#pragma once

#include <stdexcept>
#include <string>

namespace unigo {

// Precondition violations: bad parameter values, out-of-range arguments.
struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Incompatible tensor/vector dimensions. Messages name both shapes.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// NaN/Inf inputs or non-finite intermediate results.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input outside a primitive's mathematical domain (e.g. log of a
// nonpositive value).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed on-disk data; message carries file/row/field diagnostics.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Manifest references that do not resolve to existing, consistent files.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace unigo
