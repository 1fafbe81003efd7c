#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace logsentinel {

// A scalar cell: the leaf types a flattened log record or dataset cell can hold.
// JSON numbers without fraction/exponent parse as Int, everything else as Real.
using Scalar = std::variant<std::nullptr_t, bool, std::int64_t, double, std::string>;

inline bool is_null(const Scalar& s) { return std::holds_alternative<std::nullptr_t>(s); }
inline bool is_bool(const Scalar& s) { return std::holds_alternative<bool>(s); }
inline bool is_int(const Scalar& s) { return std::holds_alternative<std::int64_t>(s); }
inline bool is_real(const Scalar& s) { return std::holds_alternative<double>(s); }
inline bool is_string(const Scalar& s) { return std::holds_alternative<std::string>(s); }
inline bool is_numeric(const Scalar& s) { return is_int(s) || is_real(s); }

// Numeric view of a cell; booleans read as 0/1.
inline double as_double(const Scalar& s) {
    if (is_int(s)) return static_cast<double>(std::get<std::int64_t>(s));
    if (is_real(s)) return std::get<double>(s);
    if (is_bool(s)) return std::get<bool>(s) ? 1.0 : 0.0;
    return 0.0;
}

}  // namespace logsentinel
