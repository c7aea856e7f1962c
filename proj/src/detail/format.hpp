#pragma once

#include <charconv>
#include <string>

namespace trecom::detail {

// Shortest round-trip decimal form.
inline std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace trecom::detail
