#pragma once

#include <stdexcept>
#include <string>

namespace evade {

/* Base class for every failure raised by this library, so callers can
 * distinguish "the input or run was bad" from a programming error. */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/* Malformed operation inputs: bad waypoints, uncovered domain boundary,
 * map tables that are not homomorphisms, inclusion violations, ... */
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/* Unreadable or schema-violating input files. */
class ParseError : public Error {
public:
    using Error::Error;
};

/* A tangency or simultaneous-contact configuration persists longer than the
 * tolerance window, so the event structure is ambiguous. */
class NonGenericScenario : public Error {
public:
    using Error::Error;
};

/* The uncovered region comes too close to the covered set for the grid
 * resolution in use; component counts would not be trustworthy. */
class ClearanceTooSmall : public Error {
public:
    using Error::Error;
};

/* A map that the interval-collapsing step relies on being invertible turned
 * out not to be, or the component/homology cross-check failed. */
class IsoAssumptionViolated : public Error {
public:
    using Error::Error;
};

/* An enumeration exceeded its configured budget. */
class ResourceLimit : public Error {
public:
    using Error::Error;
};

} // namespace evade
