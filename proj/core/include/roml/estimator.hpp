#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "roml/moments.hpp"

namespace roml {

// Serialized estimator memory.  The byte layout is little-endian and
// length-prefixed (see README "Estimator state format"); size_bits is what
// the protocol charges per message.
struct EstimatorState {
  std::vector<std::uint8_t> bytes;
  std::uint64_t size_bits() const { return bytes.size() * 8; }
};

// A single-pass F_k estimator whose memory can be handed between stream
// writers.  restore() must resume behavior bit-identically, so a segmented
// run equals an unsegmented one.
class FkEstimator {
 public:
  virtual ~FkEstimator() = default;
  virtual void update(Element e) = 0;
  virtual double estimate() const = 0;  // defined once the pass is complete
  virtual EstimatorState serialize() const = 0;
  virtual void restore(const EstimatorState& state) = 0;
};

// Sampling estimator: sample_count uniform positions are fixed up front from
// the seed; each sample tracks the suffix count r of its element and
// contributes m*(r^k - (r-1)^k).  The declared length m must match the pass.
class AmsEstimator final : public FkEstimator {
 public:
  AmsEstimator(std::uint64_t m, int k, std::uint32_t sample_count,
               std::uint64_t seed);

  void update(Element e) override;
  double estimate() const override;
  EstimatorState serialize() const override;
  void restore(const EstimatorState& state) override;

 private:
  // Flat open-addressed element index over the active samples; derived from
  // the arrays below, never serialized, rebuilt on restore.
  void init_index();
  void reindex();
  std::uint32_t probe(Element e) const;
  void index_insert(std::uint32_t sample_idx, Element e);

  std::uint64_t m_ = 0;
  int k_ = 1;
  std::uint64_t pos_ = 0;
  std::uint32_t next_sample_ = 0;
  std::vector<std::uint64_t> sample_pos_;   // sorted, duplicates allowed
  std::vector<Element> sample_elem_;        // 0 until activated
  std::vector<std::uint64_t> sample_count_;
  std::vector<Element> slot_elem_;          // 0 = empty slot
  std::vector<std::uint32_t> slot_head_;    // chain head per slot
  std::vector<std::uint32_t> chain_next_;   // per-sample chain links
  std::uint32_t slot_mask_ = 0;
};

// Exact oracle with the same interface: full frequency map, huge state.
class ExactFkEstimator final : public FkEstimator {
 public:
  explicit ExactFkEstimator(int k) : k_(k) {}

  void update(Element e) override { ++counts_[e]; ++pos_; }
  double estimate() const override;
  EstimatorState serialize() const override;
  void restore(const EstimatorState& state) override;

  u128 exact() const;

 private:
  int k_;
  std::uint64_t pos_ = 0;
  std::unordered_map<Element, std::uint64_t> counts_;
};

struct SegmentedRun {
  double estimate = 0;
  std::uint64_t max_state_bits = 0;
  std::uint64_t handoffs = 0;
};

using EstimatorFactory = std::function<std::unique_ptr<FkEstimator>()>;

// Feeds the stream through fresh estimator instances, serializing at every
// boundary (inclusive 1-based segment ends; the last must equal the stream
// length) and restoring into the next instance.  The estimate is invariant
// under the choice of boundaries.
SegmentedRun run_segmented(const EstimatorFactory& factory,
                           std::span<const Element> stream,
                           std::span<const std::uint64_t> boundaries);

// Convenience wrappers for the sampling estimator.
double ams_estimate(std::span<const Element> stream, int k,
                    std::uint32_t sample_count, std::uint64_t seed);
SegmentedRun estimator_run_segmented(std::span<const Element> stream, int k,
                                     std::uint32_t sample_count,
                                     std::uint64_t seed,
                                     std::span<const std::uint64_t> boundaries);

}  // namespace roml
