#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "roml/disjointness.hpp"
#include "roml/estimator.hpp"
#include "roml/intervals.hpp"
#include "roml/moments.hpp"
#include "roml/params.hpp"

namespace roml {

// The objects all players share before any communication: the sorted
// intervals, a permutation sigma of [2n], and one bit per width-w2 block.
struct PublicRandomness {
  SortedIntervals intervals;
  std::vector<Element> sigma;        // sigma[x-1], x in [1..2n]
  std::vector<std::uint64_t> rbits;  // packed, num_blocks bits
  std::uint64_t num_blocks = 0;

  Element sigma_at(std::uint64_t x) const { return sigma[x - 1]; }
  bool rbit(std::uint64_t m) const {  // m in [1..num_blocks]
    return (rbits[(m - 1) >> 6] >> ((m - 1) & 63)) & 1ULL;
  }
};

// Draws intervals, sigma, and r.  Fails (an event, not an error) when an
// interval wraps or three intervals share a position.
std::variant<PublicRandomness, Abort> draw_public_randomness(
    const Params& params, std::uint64_t seed);

// Player i's private string: S_i in uniform random order, sigma applied.
struct PlayerString {
  std::uint32_t player = 0;  // 1-based
  std::vector<Element> seq;  // seq[l-1] = s^i_l
};

PlayerString build_player_string(const DisjInstance& inst, std::uint32_t player,
                                 std::span<const Element> sigma,
                                 std::uint64_t seed);

// Where a stream position came from.
struct Provenance {
  std::uint32_t player = 0;  // 0 = filler
  std::uint32_t rank = 0;    // l such that the element is s^player_l
  bool is_filler() const { return player == 0; }
};

struct StreamAssembly {
  Stream elements;                    // length n, ids in [2n]
  std::vector<std::uint32_t> writer;  // 1-based player per position
  std::vector<Provenance> provenance;

  std::uint64_t n() const { return elements.size(); }
};

// Applies the four position rules: easy segments are filler written by the
// next player, B segments coin-flip between filler and the set element,
// doubled segments go block-by-block to player i (r=1) or i+1 (r=0).
// Player sub-seeds and coin bits derive from `seed` as documented in rng.hpp.
StreamAssembly assemble_stream(const DisjInstance& inst,
                               const PublicRandomness& pr, const Params& params,
                               std::uint64_t seed);

// 1 + number of adjacent writer changes (the +1 is the report to the referee).
std::uint64_t count_messages(const StreamAssembly& assembly);

// Segment ends at every writer change, closed by the stream end; the handoff
// schedule for segmented estimator runs.
std::vector<std::uint64_t> writer_boundaries(const StreamAssembly& assembly);

enum class Decision { No, Yes };

// YES iff estimate > 2n; the boundary itself decides NO.
Decision decide(double estimate, std::uint64_t n);

enum class EstimatorKind { Exact, Ams };

struct ProtocolOptions {
  EstimatorKind estimator = EstimatorKind::Exact;
  std::uint32_t ams_samples = 4096;
  bool keep_assembly = false;
};

struct ProtocolOutcome {
  std::uint64_t seed = 0;
  InstanceKind kind = InstanceKind::No;
  std::optional<Abort> aborted;
  std::optional<Decision> decision;  // set iff not aborted
  double estimate = 0;
  u128 exact = 0;
  std::uint64_t messages = 0;
  std::uint64_t max_state_bits = 0;
  double reference_budget = 0;  // N / (t log2 N), reported never asserted

  u128 total_bits() const { return static_cast<u128>(messages) * max_state_bits; }
  bool correct() const {
    return decision && ((*decision == Decision::Yes) == (kind == InstanceKind::Yes));
  }

  static std::string csv_header();
  std::string csv_row() const;

  std::optional<StreamAssembly> assembly;  // populated when requested
};

// One end-to-end run: randomness, assembly, segmented estimation at writer
// boundaries, exact F_k alongside, decision and accounting.
ProtocolOutcome run_protocol(const DisjInstance& inst, const Params& params,
                             const ProtocolOptions& options, std::uint64_t seed);

// Binary stream export: 16-byte header (magic "ROML", u32 version, u32 n,
// u32 k), then n little-endian u32 element ids.
void write_assembly_binary(const std::string& path, const StreamAssembly& assembly,
                           int k);

}  // namespace roml
