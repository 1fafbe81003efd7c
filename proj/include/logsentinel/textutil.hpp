#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace logsentinel {

// Number of Unicode scalar values in a UTF-8 string (continuation bytes are
// not counted). Feature lengths are defined in code points, not bytes.
inline std::int64_t utf8_length(std::string_view s) {
    std::int64_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

// Shortest decimal representation that round-trips (to_chars general form).
// All persisted floating-point output goes through here so files are
// byte-stable across runs.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

// "0.6723" -> "67.23%"
inline std::string format_percent(double fraction) {
    return format_fixed(fraction * 100.0, 2) + "%";
}

inline bool parse_double(std::string_view s, double& out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool parse_int(std::string_view s, std::int64_t& out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace logsentinel
