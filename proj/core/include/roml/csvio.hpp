#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace roml {

// Shortest round-trip decimal form; deterministic, locale-free.
inline std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string fmt_bool(bool v) { return v ? "1" : "0"; }

}  // namespace roml
