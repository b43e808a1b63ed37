#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "roml/params.hpp"
#include "roml/protocol.hpp"
#include "roml/ratio.hpp"
#include "roml/stats.hpp"

namespace roml {

// Minimum |j - i| over distinct pairs (linear distance, not cyclic).
// Returns n for a singleton, where the condition is vacuous.
std::uint64_t min_pairwise_gap(std::span<const std::uint64_t> positions,
                               std::uint64_t n);

struct GapReport {
  std::uint64_t n = 0;
  int k = 2;
  Ratio c2;
  std::uint64_t subset_size = 0;   // ceil(n^(1/k))
  std::uint64_t threshold = 0;     // ceil(c2 * n^(1-2/k))
  std::uint64_t trials = 0;
  double empirical_fail_prob = 0;  // P(min gap < threshold)
  double expected_close_pairs = 0; // C(s,2) * 2*threshold / n

  static std::string csv_header();
  std::string csv_row() const;
};

// Birthday-spacing check: random size-ceil(n^(1/k)) subsets of [n] and the
// frequency of a pairwise gap below the block width.
GapReport verify_lemma2(std::uint64_t n, int k, Ratio c2, std::uint64_t trials,
                        std::uint64_t seed);

// Positions carrying sigma(witness), ascending.
std::vector<std::uint64_t> heavy_positions(const StreamAssembly& assembly,
                                           Element witness,
                                           std::span<const Element> sigma);

// Reference law for the witness placements: t distinct uniform positions,
// each kept with independent probability 1/2; sorted.
std::vector<std::uint64_t> thinned_uniform_sample(std::uint64_t t,
                                                  std::uint64_t n,
                                                  std::uint64_t seed);

struct UniformityReport {
  std::uint64_t n = 0;
  int k = 2;
  std::uint64_t t = 0;
  std::uint64_t batches = 0;          // non-aborted assemblies measured
  std::uint64_t aborted_batches = 0;  // draws skipped by protocol failure
  Chi2Result survivor_chi2;           // survivor counts vs Binomial(t, 1/2)
  KsResult position_ks;               // pooled heavy positions vs thinned model
  bool chi2_pass = false;             // alpha = 0.01
  bool ks_pass = false;
  double spacing_ge_w2_freq = 0;      // min pairwise gap >= w2

  static std::string csv_header();
  std::string csv_row() const;
};

// Assembles `batches` YES streams and compares the witness placements with
// the thinned-uniform model: survivor-count chi-square, pooled-position
// two-sample KS, and the block-spacing frequency.
UniformityReport order_uniformity_test(const Params& params,
                                       std::uint64_t batches,
                                       std::uint64_t seed);

}  // namespace roml
