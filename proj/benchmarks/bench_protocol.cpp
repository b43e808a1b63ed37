#include <benchmark/benchmark.h>

#include <variant>

#include "roml/disjointness.hpp"
#include "roml/protocol.hpp"

using namespace roml;

namespace {

const Params& protocol_params() {
  static const Params p = derive_params(1'000'000, 3, Ratio{1, 2}, Ratio{1, 1000},
                                        Ratio{1, 200}, 100);
  return p;
}

std::uint64_t good_seed(const Params& p) {
  for (std::uint64_t seed = 0;; ++seed) {
    if (std::holds_alternative<PublicRandomness>(draw_public_randomness(p, seed))) {
      return seed;
    }
  }
}

}  // namespace

static void BM_draw_public_randomness(benchmark::State& state) {
  const Params& p = protocol_params();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(draw_public_randomness(p, seed++));
  }
}
BENCHMARK(BM_draw_public_randomness);

static void BM_assemble_stream(benchmark::State& state) {
  const Params& p = protocol_params();
  const std::uint64_t seed = good_seed(p);
  const auto pr = std::get<PublicRandomness>(draw_public_randomness(p, seed));
  const DisjInstance inst = gen_instance(p, InstanceKind::Yes, seed);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_stream(inst, pr, p, seed));
  }
  state.SetItemsProcessed(state.iterations() * p.n);
}
BENCHMARK(BM_assemble_stream);

static void BM_run_protocol_exact(benchmark::State& state) {
  const Params& p = protocol_params();
  const std::uint64_t seed = good_seed(p);
  const DisjInstance inst = gen_instance(p, InstanceKind::Yes, seed);
  const ProtocolOptions options{EstimatorKind::Exact, 0, false};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_protocol(inst, p, options, seed));
  }
}
BENCHMARK(BM_run_protocol_exact);

static void BM_run_protocol_ams(benchmark::State& state) {
  const Params& p = protocol_params();
  const std::uint64_t seed = good_seed(p);
  const DisjInstance inst = gen_instance(p, InstanceKind::Yes, seed);
  const ProtocolOptions options{EstimatorKind::Ams, 4096, false};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_protocol(inst, p, options, seed));
  }
}
BENCHMARK(BM_run_protocol_ams);
