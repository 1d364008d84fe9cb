#ifndef EVSCHED_ERRORS_HPP_
#define EVSCHED_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace evsched {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Charging request cannot be met within its plug-in window.
struct EmptyFeasibleSet : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

struct LengthMismatch : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NonFiniteGradient : Error {
    using Error::Error;
};

struct NonPositiveCapacity : Error {
    using Error::Error;
};

struct InfeasibleBudget : Error {
    using Error::Error;
};

struct DisconnectedTree : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct SingularKkt : Error {
    using Error::Error;
};

struct NotConverged : Error {
    using Error::Error;
};

struct UnknownKind : Error {
    using Error::Error;
};

}  // namespace evsched

#endif  // EVSCHED_ERRORS_HPP_
