#include "roml/estimator.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "roml/rng.hpp"

namespace roml {

namespace {

// Little-endian scalar append/read for the state buffers.
template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> in, std::size_t& at) {
  if (at + sizeof(T) > in.size())
    throw std::invalid_argument("estimator state truncated");
  T value;
  std::memcpy(&value, in.data() + at, sizeof(T));
  at += sizeof(T);
  return value;
}

template <typename T>
void put_array(std::vector<std::uint8_t>& out, const std::vector<T>& values) {
  const auto* raw = reinterpret_cast<const std::uint8_t*>(values.data());
  out.insert(out.end(), raw, raw + values.size() * sizeof(T));
}

template <typename T>
void get_array(std::span<const std::uint8_t> in, std::size_t& at,
               std::vector<T>& values) {
  const std::size_t bytes = values.size() * sizeof(T);
  if (at + bytes > in.size())
    throw std::invalid_argument("estimator state truncated");
  std::memcpy(values.data(), in.data() + at, bytes);
  at += bytes;
}

constexpr std::uint32_t kAmsMagic = 0x31534D41;   // "AMS1"
constexpr std::uint32_t kExactMagic = 0x31465845; // "EXF1"

}  // namespace

AmsEstimator::AmsEstimator(std::uint64_t m, int k, std::uint32_t sample_count,
                           std::uint64_t seed)
    : m_(m), k_(k) {
  if (m == 0) throw std::invalid_argument("AmsEstimator: empty stream");
  if (sample_count == 0) throw std::invalid_argument("AmsEstimator: sample_count >= 1");
  Rng rng(derive_seed(seed, "ams.positions"));
  sample_pos_.resize(sample_count);
  for (auto& p : sample_pos_) p = rng.one_to(m);
  std::sort(sample_pos_.begin(), sample_pos_.end());
  sample_elem_.assign(sample_count, 0);
  sample_count_.assign(sample_count, 0);
  init_index();
}

void AmsEstimator::init_index() {
  std::uint32_t slots = 4;
  while (slots < 2 * sample_pos_.size()) slots <<= 1;
  slot_mask_ = slots - 1;
  slot_elem_.assign(slots, 0);
  slot_head_.assign(slots, UINT32_MAX);
  chain_next_.assign(sample_pos_.size(), UINT32_MAX);
}

std::uint32_t AmsEstimator::probe(Element e) const {
  std::uint32_t h =
      static_cast<std::uint32_t>(splitmix64(e) >> 32) & slot_mask_;
  while (slot_elem_[h] != 0 && slot_elem_[h] != e) h = (h + 1) & slot_mask_;
  return h;  // load factor <= 1/2, so an empty or matching slot always exists
}

void AmsEstimator::index_insert(std::uint32_t sample_idx, Element e) {
  const std::uint32_t slot = probe(e);
  if (slot_elem_[slot] == 0) slot_elem_[slot] = e;
  chain_next_[sample_idx] = slot_head_[slot];
  slot_head_[slot] = sample_idx;
}

void AmsEstimator::update(Element e) {
  ++pos_;
  while (next_sample_ < sample_pos_.size() && sample_pos_[next_sample_] == pos_) {
    sample_elem_[next_sample_] = e;
    index_insert(next_sample_, e);
    ++next_sample_;
  }
  const std::uint32_t slot = probe(e);
  if (slot_elem_[slot] == e) {
    for (std::uint32_t idx = slot_head_[slot]; idx != UINT32_MAX;
         idx = chain_next_[idx]) {
      ++sample_count_[idx];
    }
  }
}

double AmsEstimator::estimate() const {
  if (pos_ != m_)
    throw std::logic_error("AmsEstimator: estimate before declared length consumed");
  u128 sum = 0;
  for (std::uint64_t r : sample_count_) {
    const u128 diff = checked_pow(r, k_) - checked_pow(r ? r - 1 : 0, k_);
    sum = checked_add(sum, static_cast<u128>(m_) * diff);
  }
  return static_cast<double>(sum) / static_cast<double>(sample_pos_.size());
}

EstimatorState AmsEstimator::serialize() const {
  EstimatorState state;
  auto& b = state.bytes;
  b.reserve(40 + sample_pos_.size() * 20);
  put<std::uint32_t>(b, kAmsMagic);
  put<std::uint64_t>(b, m_);
  put<std::uint32_t>(b, static_cast<std::uint32_t>(k_));
  put<std::uint32_t>(b, static_cast<std::uint32_t>(sample_pos_.size()));
  put<std::uint64_t>(b, pos_);
  put<std::uint32_t>(b, next_sample_);
  put_array(b, sample_pos_);
  put_array(b, sample_elem_);
  put_array(b, sample_count_);
  return state;
}

void AmsEstimator::restore(const EstimatorState& state) {
  std::span<const std::uint8_t> in(state.bytes);
  std::size_t at = 0;
  if (get<std::uint32_t>(in, at) != kAmsMagic)
    throw std::invalid_argument("not an AMS estimator state");
  m_ = get<std::uint64_t>(in, at);
  k_ = static_cast<int>(get<std::uint32_t>(in, at));
  const auto s = get<std::uint32_t>(in, at);
  pos_ = get<std::uint64_t>(in, at);
  next_sample_ = get<std::uint32_t>(in, at);
  sample_pos_.resize(s);
  sample_elem_.resize(s);
  sample_count_.resize(s);
  get_array(in, at, sample_pos_);
  get_array(in, at, sample_elem_);
  get_array(in, at, sample_count_);
  reindex();
}

void AmsEstimator::reindex() {
  init_index();
  for (std::uint32_t i = 0; i < next_sample_; ++i) {
    index_insert(i, sample_elem_[i]);
  }
}

double ExactFkEstimator::estimate() const { return static_cast<double>(exact()); }

u128 ExactFkEstimator::exact() const {
  u128 sum = 0;
  for (const auto& [elem, count] : counts_) {
    (void)elem;
    sum = checked_add(sum, checked_pow(count, k_));
  }
  return sum;
}

EstimatorState ExactFkEstimator::serialize() const {
  EstimatorState state;
  auto& b = state.bytes;
  b.reserve(28 + counts_.size() * 12);
  put<std::uint32_t>(b, kExactMagic);
  put<std::uint32_t>(b, static_cast<std::uint32_t>(k_));
  put<std::uint64_t>(b, pos_);
  put<std::uint64_t>(b, counts_.size());
  // Canonical order so serialization is a pure function of the multiset.
  std::vector<std::pair<Element, std::uint64_t>> entries(counts_.begin(),
                                                         counts_.end());
  std::sort(entries.begin(), entries.end());
  for (const auto& [e, f] : entries) {
    put<Element>(b, e);
    put<std::uint64_t>(b, f);
  }
  return state;
}

void ExactFkEstimator::restore(const EstimatorState& state) {
  std::span<const std::uint8_t> in(state.bytes);
  std::size_t at = 0;
  if (get<std::uint32_t>(in, at) != kExactMagic)
    throw std::invalid_argument("not an exact estimator state");
  k_ = static_cast<int>(get<std::uint32_t>(in, at));
  pos_ = get<std::uint64_t>(in, at);
  const auto entries = get<std::uint64_t>(in, at);
  counts_.clear();
  counts_.reserve(entries);
  for (std::uint64_t i = 0; i < entries; ++i) {
    const auto e = get<Element>(in, at);
    counts_[e] = get<std::uint64_t>(in, at);
  }
}

SegmentedRun run_segmented(const EstimatorFactory& factory,
                           std::span<const Element> stream,
                           std::span<const std::uint64_t> boundaries) {
  if (stream.empty()) throw std::invalid_argument("run_segmented: empty stream");
  if (boundaries.empty() || boundaries.back() != stream.size())
    throw std::invalid_argument("run_segmented: boundaries must end at stream length");
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i] <= boundaries[i - 1])
      throw std::invalid_argument("run_segmented: boundaries must increase");
  }

  SegmentedRun out;
  auto est = factory();
  auto spare = factory();  // restore() fully overwrites, so two instances alternate
  std::size_t next_boundary = 0;
  for (std::uint64_t pos = 1; pos <= stream.size(); ++pos) {
    est->update(stream[pos - 1]);
    if (pos == boundaries[next_boundary]) {
      const EstimatorState state = est->serialize();
      out.max_state_bits = std::max(out.max_state_bits, state.size_bits());
      ++out.handoffs;
      if (pos < stream.size()) {
        spare->restore(state);
        std::swap(est, spare);
      } else {
        est->restore(state);  // final report round-trips too
      }
      ++next_boundary;
    }
  }
  out.estimate = est->estimate();
  return out;
}

double ams_estimate(std::span<const Element> stream, int k,
                    std::uint32_t sample_count, std::uint64_t seed) {
  AmsEstimator est(stream.size(), k, sample_count, seed);
  for (Element e : stream) est.update(e);
  return est.estimate();
}

SegmentedRun estimator_run_segmented(std::span<const Element> stream, int k,
                                     std::uint32_t sample_count,
                                     std::uint64_t seed,
                                     std::span<const std::uint64_t> boundaries) {
  const std::uint64_t m = stream.size();
  return run_segmented(
      [&] { return std::make_unique<AmsEstimator>(m, k, sample_count, seed); },
      stream, boundaries);
}

}  // namespace roml
