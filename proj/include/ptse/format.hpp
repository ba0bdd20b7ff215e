#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "ptse/errors.hpp"

namespace ptse {

//! Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v)
{
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

//! Parse a full string as a finite double; returns false on trailing
//! garbage, empty input, or non-finite values.
inline bool parse_double(std::string_view s, double& out)
{
  if (s.empty()) {
    return false;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

} // namespace ptse
