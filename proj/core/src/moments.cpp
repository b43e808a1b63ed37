#include "roml/moments.hpp"

#include <algorithm>

namespace roml {

std::string u128_str(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v > 0) {
    out.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

u128 checked_add(u128 a, u128 b) {
  const u128 s = a + b;
  if (s < a) throw OverflowError("F_k sum exceeds 128-bit capacity");
  return s;
}

u128 checked_pow(u128 x, int k) {
  u128 out = 1;
  u128 base = x;
  unsigned exp = static_cast<unsigned>(k);
  while (exp) {
    if (exp & 1) {
      if (base != 0 && out > static_cast<u128>(-1) / base)
        throw OverflowError("f_i^k exceeds 128-bit capacity");
      out *= base;
    }
    exp >>= 1;
    if (exp) {
      if (base > 1 && base > static_cast<u128>(-1) / base)
        throw OverflowError("f_i^k exceeds 128-bit capacity");
      base *= base;
    }
  }
  return out;
}

FrequencyVector frequency_vector(std::span<const Element> stream) {
  FrequencyVector fv;
  fv.counts.reserve(stream.size());
  for (Element e : stream) ++fv.counts[e];
  fv.total = stream.size();
  return fv;
}

u128 exact_fk(const FrequencyVector& fv, int k) {
  if (k < 1) throw InvalidScaleError("exact_fk requires k >= 1");
  u128 sum = 0;
  for (const auto& [elem, count] : fv.counts) {
    (void)elem;
    sum = checked_add(sum, checked_pow(count, k));
  }
  return sum;
}

u128 exact_fk(std::span<const Element> stream, int k) {
  return exact_fk(frequency_vector(stream), k);
}

u128 exact_fk_dense(std::span<const Element> stream, std::uint64_t universe,
                    int k, std::uint64_t* distinct_out) {
  if (k < 1) throw InvalidScaleError("exact_fk requires k >= 1");
  thread_local std::vector<std::uint64_t> counts;  // zeroed between calls
  if (counts.size() < universe + 1) counts.assign(universe + 1, 0);

  thread_local std::vector<Element> touched;
  touched.clear();
  auto rollback = [&] {
    for (Element e : touched) counts[e] = 0;
  };
  for (Element e : stream) {
    if (e < 1 || e > universe) {
      rollback();
      throw InvalidScaleError("element outside declared universe");
    }
    if (counts[e]++ == 0) touched.push_back(e);
  }
  u128 sum = 0;
  try {
    for (Element e : touched) {
      sum = checked_add(sum, checked_pow(counts[e], k));
      counts[e] = 0;
    }
  } catch (...) {
    rollback();  // keep the buffer clean for the next call on this thread
    throw;
  }
  if (distinct_out) *distinct_out = touched.size();
  return sum;
}

u128 ams_basic_estimate(std::span<const Element> stream, int k, std::uint64_t j) {
  if (j < 1 || j > stream.size())
    throw InvalidScaleError("ams_basic_estimate position out of range");
  const Element target = stream[j - 1];
  u128 r = 0;
  for (std::uint64_t i = j - 1; i < stream.size(); ++i) {
    if (stream[i] == target) ++r;
  }
  const u128 diff = checked_pow(r, k) - checked_pow(r - 1, k);
  const u128 m = stream.size();
  if (diff != 0 && m > static_cast<u128>(-1) / diff)
    throw OverflowError("basic estimate exceeds 128-bit capacity");
  return m * diff;
}

}  // namespace roml
