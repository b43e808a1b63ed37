#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "roml/errors.hpp"

namespace roml {

// Exact nonnegative rational.  The scale constants (c, c1, c2) are kept as
// rationals so every derived parameter is an exact integer ceiling, immune
// to floating-point fuzz like ceil(0.001 * 1000) == 2.
struct Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  constexpr Ratio() = default;
  constexpr Ratio(std::uint64_t n, std::uint64_t d) : num(n), den(d) {}

  static Ratio reduced(std::uint64_t n, std::uint64_t d) {
    if (d == 0) throw InvalidScaleError("ratio with zero denominator");
    const std::uint64_t g = std::gcd(n, d);
    return Ratio{n / g, d / g};
  }

  // Accepts "3/4", "0.05", "1", ".5" and scientific forms like "5e-3".
  static Ratio parse(std::string_view text);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool positive() const { return num > 0; }

  bool operator==(const Ratio&) const = default;

  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

}  // namespace roml
