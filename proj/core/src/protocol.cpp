#include "roml/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "roml/csvio.hpp"
#include "roml/errors.hpp"
#include "roml/rng.hpp"

namespace roml {

std::variant<PublicRandomness, Abort> draw_public_randomness(
    const Params& params, std::uint64_t seed) {
  auto drawn = sample_intervals(params, derive_seed(seed, "protocol.intervals"));
  if (std::holds_alternative<Abort>(drawn)) return std::get<Abort>(drawn);

  PublicRandomness pr;
  pr.intervals = std::move(std::get<SortedIntervals>(drawn));
  if (intersection_stats(pr.intervals).triple_exists) {
    return Abort{AbortReason::TripleIntersection};
  }

  // sigma and r are drawn only for non-failing interval draws; independent
  // child seeds keep the draw order immaterial.
  const std::uint64_t two_n = 2 * params.n;
  pr.sigma.resize(two_n);
  std::iota(pr.sigma.begin(), pr.sigma.end(), Element{1});
  Rng sigma_rng(derive_seed(seed, "protocol.sigma"));
  sigma_rng.shuffle(std::span<Element>(pr.sigma));

  pr.num_blocks = params.num_blocks;
  pr.rbits.assign((params.num_blocks + 63) / 64, 0);
  Rng r_rng(derive_seed(seed, "protocol.rbits"));
  for (auto& word : pr.rbits) word = r_rng.next();
  return pr;
}

PlayerString build_player_string(const DisjInstance& inst, std::uint32_t player,
                                 std::span<const Element> sigma,
                                 std::uint64_t seed) {
  PlayerString ps;
  ps.player = player;
  ps.seq = inst.sets.at(player - 1);
  Rng rng(seed);
  rng.shuffle(std::span<Element>(ps.seq));
  for (Element& e : ps.seq) e = sigma[e - 1];
  return ps;
}

StreamAssembly assemble_stream(const DisjInstance& inst,
                               const PublicRandomness& pr, const Params& params,
                               std::uint64_t seed) {
  const std::uint64_t n = params.n;
  const std::uint64_t t = pr.intervals.size();

  std::vector<PlayerString> strings;
  strings.reserve(t);
  for (std::uint64_t i = 1; i <= t; ++i) {
    strings.push_back(build_player_string(
        inst, static_cast<std::uint32_t>(i), pr.sigma,
        derive_seed(seed, "protocol.player", i)));
  }
  const std::uint64_t coin_seed = derive_seed(seed, "protocol.coins");

  const Decomposition dec = decompose(pr.intervals);

  StreamAssembly out;
  out.elements.resize(n);
  out.writer.resize(n);
  out.provenance.resize(n);
  std::uint64_t filled = 0;

  auto place = [&](std::uint64_t j, std::uint32_t writer, Element elem,
                   Provenance prov) {
    out.elements[j - 1] = elem;
    out.writer[j - 1] = writer;
    out.provenance[j - 1] = prov;
    ++filled;
  };

  for (const Segment& seg : dec.segments) {
    if (seg.empty()) continue;
    switch (seg.kind) {
      case SegmentKind::EasyA: {
        // Rule (1): easy A_{i-1} is written by player i as pure filler.
        // sigma(n+j) is contiguous in j, so the whole stretch is a copy.
        const std::uint32_t writer =
            seg.index < t ? seg.index + 1 : static_cast<std::uint32_t>(t);
        const auto lo = static_cast<std::ptrdiff_t>(seg.lo);
        const auto hi = static_cast<std::ptrdiff_t>(seg.hi);
        std::copy(pr.sigma.begin() + static_cast<std::ptrdiff_t>(n) + lo - 1,
                  pr.sigma.begin() + static_cast<std::ptrdiff_t>(n) + hi,
                  out.elements.begin() + lo - 1);
        std::fill(out.writer.begin() + lo - 1, out.writer.begin() + hi, writer);
        std::fill(out.provenance.begin() + lo - 1, out.provenance.begin() + hi,
                  Provenance{});
        filled += seg.length();
        break;
      }
      case SegmentKind::B: {
        // Rule (2): player i's own stretch; a private fair coin picks filler
        // or the rank-l entry of s^i.
        const std::uint32_t i = seg.index;
        const std::uint64_t a_i = pr.intervals.a(i - 1);
        for (std::uint64_t j = seg.lo; j <= seg.hi; ++j) {
          const std::uint64_t rank = j - a_i + 1;
          if (derive_bit(coin_seed, i, j)) {
            place(j, i, pr.sigma_at(n + j), Provenance{});
          } else {
            place(j, i, strings[i - 1].seq[rank - 1],
                  Provenance{i, static_cast<std::uint32_t>(rank)});
          }
        }
        break;
      }
      case SegmentKind::DoubledA: {
        // Rules (3)/(4): the overlap of I_i and I_{i+1}, handed out block by
        // block; r_m = 1 selects player i, r_m = 0 player i+1.
        const std::uint32_t i = seg.index;
        const std::uint64_t a_i = pr.intervals.a(i - 1);
        const std::uint64_t a_next = pr.intervals.a(i);
        for (std::uint64_t j = seg.lo; j <= seg.hi; ++j) {
          const std::uint64_t block = (j - 1) / params.w2 + 1;
          if (pr.rbit(block)) {
            const std::uint64_t rank = j - a_i + 1;
            place(j, i, strings[i - 1].seq[rank - 1],
                  Provenance{i, static_cast<std::uint32_t>(rank)});
          } else {
            const std::uint64_t rank = j - a_next + 1;
            place(j, i + 1, strings[i].seq[rank - 1],
                  Provenance{i + 1, static_cast<std::uint32_t>(rank)});
          }
        }
        break;
      }
    }
  }

  if (filled != n) {
    throw AssemblyIncompleteError("assembled " + std::to_string(filled) +
                                  " of " + std::to_string(n) + " positions");
  }
  return out;
}

std::uint64_t count_messages(const StreamAssembly& assembly) {
  std::uint64_t changes = 0;
  for (std::uint64_t j = 1; j < assembly.n(); ++j) {
    if (assembly.writer[j] != assembly.writer[j - 1]) ++changes;
  }
  return changes + 1;
}

std::vector<std::uint64_t> writer_boundaries(const StreamAssembly& assembly) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t j = 1; j < assembly.n(); ++j) {
    if (assembly.writer[j] != assembly.writer[j - 1]) out.push_back(j);
  }
  out.push_back(assembly.n());
  return out;
}

Decision decide(double estimate, std::uint64_t n) {
  return estimate > 2.0 * static_cast<double>(n) ? Decision::Yes : Decision::No;
}

ProtocolOutcome run_protocol(const DisjInstance& inst, const Params& params,
                             const ProtocolOptions& options, std::uint64_t seed) {
  if (inst.N != params.N || inst.t != params.t || inst.w != params.w) {
    throw InvalidScaleError("instance scales do not match params (instance " +
                            std::to_string(inst.N) + "/" + std::to_string(inst.t) +
                            "/" + std::to_string(inst.w) + ")");
  }

  ProtocolOutcome out;
  out.seed = seed;
  out.kind = inst.kind;
  out.reference_budget = static_cast<double>(params.N) /
      (static_cast<double>(params.t) * std::log2(static_cast<double>(params.N)));

  auto drawn = draw_public_randomness(params, seed);
  if (std::holds_alternative<Abort>(drawn)) {
    out.aborted = std::get<Abort>(drawn);
    return out;
  }
  const auto& pr = std::get<PublicRandomness>(drawn);

  StreamAssembly assembly = assemble_stream(inst, pr, params, seed);
  out.messages = count_messages(assembly);

  std::uint64_t distinct = 0;
  out.exact = exact_fk_dense(assembly.elements, 2 * params.n, params.k, &distinct);

  if (options.estimator == EstimatorKind::Ams) {
    const auto boundaries = writer_boundaries(assembly);
    const SegmentedRun run = estimator_run_segmented(
        assembly.elements, params.k, options.ams_samples,
        derive_seed(seed, "protocol.estimator"), boundaries);
    out.estimate = run.estimate;
    out.max_state_bits = run.max_state_bits;
  } else {
    out.estimate = static_cast<double>(out.exact);
    // The exact oracle's memory only grows, so the final state is the
    // largest handoff; sizing it from the distinct count matches
    // ExactFkEstimator::serialize byte for byte.
    out.max_state_bits = (24 + 12 * distinct) * 8;
  }

  out.decision = decide(out.estimate, params.n);
  if (options.keep_assembly) out.assembly = std::move(assembly);
  return out;
}

std::string ProtocolOutcome::csv_header() {
  return "seed,kind,decision,correct,aborted,abort_reason,exact_fk,estimate,"
         "messages,max_state_bits,total_bits,reference_budget";
}

std::string ProtocolOutcome::csv_row() const {
  std::ostringstream os;
  os << seed << ',' << kind_name(kind) << ',';
  if (decision) os << (*decision == Decision::Yes ? "yes" : "no");
  os << ',';
  if (decision) os << (correct() ? '1' : '0');
  os << ',' << (aborted ? '1' : '0') << ',';
  if (aborted) os << abort_reason_name(aborted->reason);
  os << ',';
  if (!aborted) os << u128_str(exact);
  os << ',';
  if (!aborted) os << fmt_double(estimate);
  os << ',' << messages << ',' << max_state_bits << ',' << u128_str(total_bits())
     << ',' << fmt_double(reference_budget);
  return os.str();
}

void write_assembly_binary(const std::string& path, const StreamAssembly& assembly,
                           int k) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");

  auto put32 = [&](std::uint32_t v) {
    const std::uint8_t raw[4] = {
        static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
        static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
    out.write(reinterpret_cast<const char*>(raw), 4);
  };

  out.write("ROML", 4);
  put32(1);  // format version
  put32(static_cast<std::uint32_t>(assembly.n()));
  put32(static_cast<std::uint32_t>(k));
  for (Element e : assembly.elements) put32(e);
  if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace roml
