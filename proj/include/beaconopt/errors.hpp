#pragma once

#include <stdexcept>
#include <string>

namespace beaconopt {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input document (bad JSON, unknown field, wrong type).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates an invariant (obstacle outside
/// room, non-positive extent, bad config values, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Discretization produced an empty drone or beacon domain.
class EmptyDomainError : public Error {
public:
    using Error::Error;
};

/// Linear system is singular or too ill-conditioned to trust
/// (coplanar/coincident beacons, rank-deficient geometry).
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

/// A beacon coincides with the evaluation point (zero range).
class CoincidentPointError : public Error {
public:
    using Error::Error;
};

/// The covering problem has no solution (some point unreachable).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its generation limit before meeting its
/// stop condition.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

/// Input exceeds a hard size limit (e.g. exhaustive enumeration cap).
class SizeError : public Error {
public:
    using Error::Error;
};

}  // namespace beaconopt
