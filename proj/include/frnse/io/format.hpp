#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include "frnse/error.hpp"

namespace frnse::io {

/// Shortest round-trip representation; '.' separator regardless of locale.
inline std::string format_double(double v)
{
    if (!std::isfinite(v))
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Shortest round-trip representation without an exponent.
inline std::string format_fixed(double v)
{
    if (!std::isfinite(v))
        throw InvalidArgument("cannot format a non-finite value as a decimal");
    char buf[512];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (res.ec != std::errc())
        throw InvalidArgument("value too large to format as a decimal");
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s)
{
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s)
{
    Int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

} // namespace frnse::io
