#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "roml/params.hpp"
#include "roml/ratio.hpp"

namespace roml {

// A width-w interval on the cycle [1..n], identified by its start.
// Covered set: {((start-1+j) mod n)+1 : 0 <= j < width}.
struct CyclicInterval {
  std::uint64_t start = 1;
  std::uint64_t width = 1;
  std::uint64_t modulus = 1;

  std::uint64_t end() const { return (start + width - 2) % modulus + 1; }
  bool wraps() const { return start + width - 1 > modulus; }
  bool contains(std::uint64_t j) const {
    return (j - start + modulus) % modulus < width;
  }
};

std::vector<std::uint64_t> interval_members(const CyclicInterval& iv);

// 1-based rank of j in the cyclic traversal order starting at iv.start.
// Throws NotMemberError when j is not covered.
std::uint64_t interval_rank(const CyclicInterval& iv, std::uint64_t j);

// Protocol failure events.  These are outcomes, not errors.
enum class AbortReason { WrappedInterval, TripleIntersection };
std::string abort_reason_name(AbortReason r);
struct Abort {
  AbortReason reason;
};

// t equal-width non-wrapping intervals sorted by end (ties by start, then
// draw order; equal width makes end order and start order coincide).
struct SortedIntervals {
  std::uint64_t n = 0;
  std::uint64_t w = 0;
  std::vector<std::uint64_t> starts;

  std::uint64_t size() const { return starts.size(); }
  std::uint64_t a(std::uint64_t i) const { return starts[i]; }          // 0-based
  std::uint64_t b(std::uint64_t i) const { return starts[i] + w - 1; }  // inclusive
  CyclicInterval interval(std::uint64_t i) const { return {starts[i], w, n}; }
};

// Draws t uniform starts and sorts; aborts iff some interval wraps, which is
// exactly the smallest-end-below-w condition.
std::variant<SortedIntervals, Abort> sample_intervals(const Params& params,
                                                      std::uint64_t seed);

struct IntersectionStats {
  bool triple_exists = false;
  std::uint64_t pair_count = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // 0-based index pairs
};

// For sorted equal-width non-wrapping intervals.  O(t log t).
IntersectionStats intersection_stats(const SortedIntervals& iv);

// Cyclic variants used by the Lemma-1 verifier, where wrapping is allowed.
std::uint64_t cyclic_max_coverage(const std::vector<std::uint64_t>& starts,
                                  std::uint64_t w, std::uint64_t n);
std::uint64_t cyclic_pair_count(std::vector<std::uint64_t> starts,
                                std::uint64_t w, std::uint64_t n);

enum class SegmentKind { EasyA, DoubledA, B };

struct Segment {
  SegmentKind kind;
  std::uint32_t index;  // the i of A_i or B_i
  std::uint64_t lo = 1, hi = 0;  // inclusive; lo > hi means empty

  bool empty() const { return lo > hi; }
  std::uint64_t length() const { return empty() ? 0 : hi - lo + 1; }
};

// The ordered A_0, B_1, A_1, ..., B_t, A_t covering of [n].  A_i is doubled
// iff b_i >= a_{i+1} and then equals I_i `intersect` I_{i+1}; easy segments
// sit strictly between intervals.  Sentinels: b_0 = 0, a_{t+1} = n+1.
struct Decomposition {
  std::uint64_t n = 0;
  std::uint64_t w = 0;
  std::vector<Segment> segments;  // in stream order, empties included
};

// Requires non-wrapping sorted intervals with no triple intersection.
// Validates exact coverage of [n] and throws DecompositionGapError otherwise.
Decomposition decompose(const SortedIntervals& iv);

struct Lemma1Report {
  std::uint64_t n = 0;
  int k = 2;
  Ratio c1;
  std::uint64_t t = 0, w = 0;
  std::uint64_t trials = 0;
  double empirical_triple_prob = 0;
  double mean_overlap_pairs = 0;
  double empirical_pair_exceed_prob = 0;
  double analytic_triple_bound = 0;  // 8 c1^2
  double analytic_pair_bound = 0;    // 4 c1 n^(1/(2k))
  std::uint64_t pair_threshold = 0;  // floor(n^(1/(2k))); exceed means count > this
  // Block-partition statistics (width-w blocks, last possibly short).
  double mean_jblocks_ge2 = 0;
  double mean_jblocks_ge3 = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

// Monte-Carlo check of the interval lemma at t = ceil(n^(1/k)); intervals
// here may wrap (the lemma lives on the cycle).
Lemma1Report verify_lemma1(std::uint64_t n, int k, Ratio c1,
                           std::uint64_t trials, std::uint64_t seed);

}  // namespace roml
