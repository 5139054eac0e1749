#pragma once

#include <stdexcept>
#include <string>

namespace ddbst {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension out of range or incompatible operand shapes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A scalar or configuration parameter outside its admissible range.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A value that should satisfy a mathematical invariant does not
/// (non-Hermitian input, failed bound audit, non-PSD state, ...).
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// Malformed serialized input (JSON files, shadow logs).
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace ddbst
