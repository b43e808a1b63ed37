#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "roml/errors.hpp"

namespace roml {

// A stream is a sequence of element identifiers.  In protocol mode ids live
// in [2n] and the length is exactly n; standalone streams are unrestricted.
using Element = std::uint32_t;
using Stream = std::vector<Element>;

using u128 = unsigned __int128;

std::string u128_str(u128 v);

struct FrequencyVector {
  std::unordered_map<Element, std::uint64_t> counts;
  std::uint64_t total = 0;
};

FrequencyVector frequency_vector(std::span<const Element> stream);

// F_k = sum_i f_i^k, computed in checked 128-bit integer arithmetic.
// Throws OverflowError when some f_i^k (or the running sum) exceeds 2^128-1,
// which tells the caller to move to wider arithmetic.
u128 exact_fk(std::span<const Element> stream, int k);
u128 exact_fk(const FrequencyVector& fv, int k);

// Same value as exact_fk for streams whose ids lie in [1, universe], via a
// reusable dense count buffer (fast path for protocol-scale streams).
// Optionally reports the number of distinct elements.
u128 exact_fk_dense(std::span<const Element> stream, std::uint64_t universe,
                    int k, std::uint64_t* distinct_out = nullptr);

// One basic estimate anchored at 1-based position j: with r the number of
// occurrences of stream[j-1] at positions >= j, returns m * (r^k - (r-1)^k).
u128 ams_basic_estimate(std::span<const Element> stream, int k, std::uint64_t j);

// x^k with overflow checking.
u128 checked_pow(u128 x, int k);
u128 checked_add(u128 a, u128 b);

}  // namespace roml
