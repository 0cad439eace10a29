#pragma once

#include <stdexcept>
#include <string>

namespace vofrac {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An iterative procedure (root solve, adaptive quadrature) did not converge.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A stateful object was driven out of its required call sequence.
class SequenceError : public Error {
public:
    using Error::Error;
};

/// The direct scheme would need more retained levels than the configured cap.
class StorageLimitExceeded : public Error {
public:
    using Error::Error;
};

} // namespace vofrac
