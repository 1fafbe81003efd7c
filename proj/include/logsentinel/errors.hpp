#pragma once

#include <stdexcept>
#include <string>

namespace logsentinel {

// Base for all library errors. CLI maps these to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedLine : Error {
    using Error::Error;
};
struct IoFailure : Error {
    using Error::Error;
};
struct EmptyJoin : Error {
    using Error::Error;
};
struct SchemaMismatch : Error {
    using Error::Error;
};
struct SingleClass : Error {
    using Error::Error;
};
struct ZeroMargin : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct TooFewRows : Error {
    using Error::Error;
};
struct NonFiniteInput : Error {
    using Error::Error;
};
struct PerplexityTooLarge : Error {
    using Error::Error;
};

}  // namespace logsentinel
