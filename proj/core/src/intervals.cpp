#include "roml/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "roml/csvio.hpp"
#include "roml/errors.hpp"
#include "roml/parallel.hpp"
#include "roml/rng.hpp"

namespace roml {

std::vector<std::uint64_t> interval_members(const CyclicInterval& iv) {
  std::vector<std::uint64_t> out;
  out.reserve(iv.width);
  for (std::uint64_t j = 0; j < iv.width; ++j) {
    out.push_back((iv.start - 1 + j) % iv.modulus + 1);
  }
  return out;
}

std::uint64_t interval_rank(const CyclicInterval& iv, std::uint64_t j) {
  if (j < 1 || j > iv.modulus || !iv.contains(j)) {
    throw NotMemberError("position " + std::to_string(j) +
                         " not in interval starting at " +
                         std::to_string(iv.start));
  }
  return (j - iv.start + iv.modulus) % iv.modulus + 1;
}

std::string abort_reason_name(AbortReason r) {
  switch (r) {
    case AbortReason::WrappedInterval: return "wrapped_interval";
    case AbortReason::TripleIntersection: return "triple_intersection";
  }
  return "unknown";
}

std::variant<SortedIntervals, Abort> sample_intervals(const Params& params,
                                                      std::uint64_t seed) {
  Rng rng(derive_seed(seed, "intervals"));
  SortedIntervals iv;
  iv.n = params.n;
  iv.w = params.w;
  iv.starts.resize(params.t);
  bool wrapped = false;
  for (auto& a : iv.starts) {
    a = rng.one_to(params.n);
    if (a + params.w - 1 > params.n) wrapped = true;
  }
  if (wrapped) return Abort{AbortReason::WrappedInterval};
  // Equal widths: sorting by end is sorting by start; stable keeps draw order
  // on ties.
  std::stable_sort(iv.starts.begin(), iv.starts.end());
  return iv;
}

IntersectionStats intersection_stats(const SortedIntervals& iv) {
  IntersectionStats out;
  const std::uint64_t t = iv.size();
  // Equal widths + sorted ends: a position lying in three intervals forces
  // three consecutive ones, so pairwise checks against the next intervals
  // suffice and every intersecting pair is (i, j) with a_j <= b_i.
  std::uint64_t j = 1;
  for (std::uint64_t i = 0; i + 1 < t; ++i) {
    if (j < i + 1) j = i + 1;
    while (j < t && iv.a(j) <= iv.b(i)) ++j;
    for (std::uint64_t l = i + 1; l < j; ++l) {
      out.pairs.emplace_back(static_cast<std::uint32_t>(i),
                             static_cast<std::uint32_t>(l));
    }
    if (j - (i + 1) >= 2) out.triple_exists = true;
  }
  out.pair_count = out.pairs.size();
  return out;
}

std::uint64_t cyclic_max_coverage(const std::vector<std::uint64_t>& starts,
                                  std::uint64_t w, std::uint64_t n) {
  // Sweep over event positions; wrapped intervals contribute their tail
  // [1, e] to the base coverage and re-open at their start.
  std::uint64_t base = 0;
  std::map<std::uint64_t, std::int64_t> delta;
  for (std::uint64_t a : starts) {
    if (w >= n) {
      ++base;
      continue;
    }
    if (a + w - 1 <= n) {
      ++delta[a];
      if (a + w <= n) --delta[a + w];
    } else {
      const std::uint64_t e = a + w - 1 - n;  // tail end, >= 1
      ++base;                                 // covers position 1
      --delta[e + 1];
      ++delta[a];
    }
  }
  std::uint64_t best = base;
  std::int64_t cur = static_cast<std::int64_t>(base);
  for (const auto& [pos, d] : delta) {
    (void)pos;
    cur += d;
    best = std::max(best, static_cast<std::uint64_t>(std::max<std::int64_t>(cur, 0)));
  }
  return best;
}

std::uint64_t cyclic_pair_count(std::vector<std::uint64_t> starts,
                                std::uint64_t w, std::uint64_t n) {
  const std::uint64_t t = starts.size();
  if (t < 2) return 0;
  // Two width-w intervals intersect iff their starts are within w-1
  // cyclically; when n <= 2w-1 every pair does.
  if (n <= 2 * w - 1) return t * (t - 1) / 2;
  std::sort(starts.begin(), starts.end());
  std::uint64_t pairs = 0;
  std::uint64_t j = 0;
  for (std::uint64_t i = 0; i < t; ++i) {  // linear pairs: s[l] - s[i] <= w-1
    if (j < i + 1) j = i + 1;
    while (j < t && starts[j] - starts[i] <= w - 1) ++j;
    pairs += j - (i + 1);
  }
  // Wraparound pairs: s[l] >= s[i] + n - (w-1) with i < l.  Disjoint from the
  // linear case because n > 2w-1 here.
  for (std::uint64_t i = 0; i < t; ++i) {
    const std::uint64_t bound = starts[i] + n - (w - 1);
    if (bound > starts.back()) continue;
    const auto it = std::lower_bound(starts.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                                     starts.end(), bound);
    pairs += static_cast<std::uint64_t>(starts.end() - it);
  }
  return pairs;
}

Decomposition decompose(const SortedIntervals& iv) {
  const std::uint64_t t = iv.size();
  const std::uint64_t n = iv.n;
  Decomposition dec;
  dec.n = n;
  dec.w = iv.w;
  dec.segments.reserve(2 * t + 1);

  // Precondition: no triple intersection (checked via the consecutive form).
  for (std::uint64_t i = 0; i + 2 < t; ++i) {
    if (iv.a(i + 2) <= iv.b(i)) {
      throw DecompositionGapError("triple intersection among intervals " +
                                  std::to_string(i) + ".." + std::to_string(i + 2));
    }
  }

  auto a = [&](std::uint64_t i) {  // 1-based with sentinel a_{t+1} = n+1
    return i <= t ? iv.a(i - 1) : n + 1;
  };
  auto b = [&](std::uint64_t i) {  // 1-based with sentinel b_0 = 0
    return i >= 1 ? iv.b(i - 1) : 0;
  };

  for (std::uint64_t i = 0; i <= t; ++i) {
    if (i >= 1) {
      // B_i = I_i minus both neighbors (doubled overlaps go to the A's).
      Segment seg;
      seg.kind = SegmentKind::B;
      seg.index = static_cast<std::uint32_t>(i);
      seg.lo = std::max(a(i), b(i - 1) + 1);
      seg.hi = std::min(b(i), a(i + 1) - 1);
      if (seg.lo > seg.hi) { seg.lo = 1; seg.hi = 0; }
      dec.segments.push_back(seg);
    }
    Segment seg;
    seg.index = static_cast<std::uint32_t>(i);
    if (i >= 1 && i < t && b(i) >= a(i + 1)) {
      seg.kind = SegmentKind::DoubledA;  // A_i = I_i `intersect` I_{i+1}
      seg.lo = a(i + 1);
      seg.hi = b(i);
    } else {
      seg.kind = SegmentKind::EasyA;
      seg.lo = b(i) + 1;
      seg.hi = a(i + 1) - 1;
      if (seg.lo > seg.hi) { seg.lo = 1; seg.hi = 0; }
    }
    dec.segments.push_back(seg);
  }

  // Exact-coverage validation.
  std::uint64_t expect = 1;
  for (const Segment& seg : dec.segments) {
    if (seg.empty()) continue;
    if (seg.lo != expect) {
      throw DecompositionGapError(
          "coverage break at position " + std::to_string(expect) + " (segment starts at " +
          std::to_string(seg.lo) + ")");
    }
    expect = seg.hi + 1;
  }
  if (expect != n + 1) {
    throw DecompositionGapError("coverage ends at " + std::to_string(expect - 1) +
                                " instead of n");
  }
  return dec;
}

std::string Lemma1Report::csv_header() {
  return "n,k,c1,trials,empirical_triple_prob,analytic_triple_bound,"
         "mean_overlap_pairs,analytic_pair_bound,empirical_pair_exceed_prob";
}

std::string Lemma1Report::csv_row() const {
  std::ostringstream os;
  os << n << ',' << k << ',' << fmt_double(c1.value()) << ',' << trials << ','
     << fmt_double(empirical_triple_prob) << ',' << fmt_double(analytic_triple_bound)
     << ',' << fmt_double(mean_overlap_pairs) << ',' << fmt_double(analytic_pair_bound)
     << ',' << fmt_double(empirical_pair_exceed_prob);
  return os.str();
}

namespace {

// Number of width-w grid blocks (last possibly short) touched by >=2 and
// >=3 of the intervals.
std::pair<std::uint64_t, std::uint64_t> jblock_counts(
    const std::vector<std::uint64_t>& starts, std::uint64_t w, std::uint64_t n) {
  std::map<std::uint64_t, std::uint32_t> touched;
  auto mark_range = [&](std::uint64_t lo, std::uint64_t hi) {  // positions, inclusive
    for (std::uint64_t blk = (lo - 1) / w; blk <= (hi - 1) / w; ++blk) ++touched[blk];
  };
  for (std::uint64_t a : starts) {
    if (a + w - 1 <= n) {
      mark_range(a, a + w - 1);
    } else {  // wraps: [a, n] plus the tail [1, e]
      mark_range(a, n);
      mark_range(1, a + w - 1 - n);
    }
  }
  std::uint64_t ge2 = 0, ge3 = 0;
  for (const auto& [blk, cnt] : touched) {
    (void)blk;
    if (cnt >= 2) ++ge2;
    if (cnt >= 3) ++ge3;
  }
  return {ge2, ge3};
}

}  // namespace

Lemma1Report verify_lemma1(std::uint64_t n, int k, Ratio c1,
                           std::uint64_t trials, std::uint64_t seed) {
  if (trials < 100) throw InvalidScaleError("verify_lemma1 requires trials >= 100");
  if (n < 16 || k < 2) throw InvalidScaleError("verify_lemma1 requires n >= 16, k >= 2");

  Lemma1Report rep;
  rep.n = n;
  rep.k = k;
  rep.c1 = c1;
  rep.trials = trials;
  rep.t = ceil_ratio_pow(Ratio{1, 1}, n, 1, static_cast<unsigned>(k));
  rep.w = ceil_ratio_pow(c1, n, 2 * static_cast<unsigned>(k) - 3,
                         2 * static_cast<unsigned>(k));
  rep.pair_threshold = floor_root_pow(n, 1, 2 * static_cast<unsigned>(k));
  // Single divisions keep exactly-representable inputs clean (0.02, not
  // 0.020000000000000004).
  rep.analytic_triple_bound =
      8.0 * static_cast<double>(c1.num) * static_cast<double>(c1.num) /
      (static_cast<double>(c1.den) * static_cast<double>(c1.den));
  const std::uint64_t root = rep.pair_threshold;
  const bool perfect =
      ceil_ratio_pow(Ratio{1, 1}, n, 1, 2 * static_cast<unsigned>(k)) == root;
  const double n_half_k =
      perfect ? static_cast<double>(root)
              : std::pow(static_cast<double>(n), 1.0 / (2.0 * k));
  rep.analytic_pair_bound =
      4.0 * static_cast<double>(c1.num) * n_half_k / static_cast<double>(c1.den);

  struct Cell {
    std::uint8_t triple = 0, exceed = 0;
    std::uint64_t pairs = 0, ge2 = 0, ge3 = 0;
  };
  std::vector<Cell> cells(trials);

  parallel_for(trials, [&](std::uint64_t trial) {
    Rng rng(derive_seed(seed, "lemma1.trial", trial));
    std::vector<std::uint64_t> starts(rep.t);
    for (auto& a : starts) a = rng.one_to(n);
    Cell& cell = cells[trial];
    cell.triple = cyclic_max_coverage(starts, rep.w, n) >= 3 ? 1 : 0;
    cell.pairs = cyclic_pair_count(starts, rep.w, n);
    cell.exceed = cell.pairs > rep.pair_threshold ? 1 : 0;
    const auto [ge2, ge3] = jblock_counts(starts, rep.w, n);
    cell.ge2 = ge2;
    cell.ge3 = ge3;
  });

  std::uint64_t triples = 0, exceeds = 0, pair_sum = 0, ge2_sum = 0, ge3_sum = 0;
  for (const Cell& cell : cells) {
    triples += cell.triple;
    exceeds += cell.exceed;
    pair_sum += cell.pairs;
    ge2_sum += cell.ge2;
    ge3_sum += cell.ge3;
  }
  const auto dt = static_cast<double>(trials);
  rep.empirical_triple_prob = static_cast<double>(triples) / dt;
  rep.empirical_pair_exceed_prob = static_cast<double>(exceeds) / dt;
  rep.mean_overlap_pairs = static_cast<double>(pair_sum) / dt;
  rep.mean_jblocks_ge2 = static_cast<double>(ge2_sum) / dt;
  rep.mean_jblocks_ge3 = static_cast<double>(ge3_sum) / dt;
  return rep;
}

}  // namespace roml
