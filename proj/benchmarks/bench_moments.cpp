#include <benchmark/benchmark.h>

#include "roml/estimator.hpp"
#include "roml/moments.hpp"
#include "roml/rng.hpp"

using namespace roml;

namespace {

Stream make_stream(std::uint64_t len, std::uint64_t universe) {
  Rng rng(12345);
  Stream s(len);
  for (auto& e : s) e = static_cast<Element>(1 + rng.below(universe));
  return s;
}

}  // namespace

static void BM_frequency_vector(benchmark::State& state) {
  const Stream s = make_stream(static_cast<std::uint64_t>(state.range(0)),
                               static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(frequency_vector(s));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_frequency_vector)->Range(1 << 12, 1 << 20);

static void BM_exact_fk(benchmark::State& state) {
  const Stream s = make_stream(static_cast<std::uint64_t>(state.range(0)),
                               static_cast<std::uint64_t>(state.range(0)) / 4 + 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_fk(s, 3));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_exact_fk)->Range(1 << 12, 1 << 20);

static void BM_ams_estimate(benchmark::State& state) {
  const Stream s = make_stream(1 << 20, 1 << 18);
  const auto samples = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ams_estimate(s, 3, samples, 7));
  }
  state.SetItemsProcessed(state.iterations() * (1 << 20));
}
BENCHMARK(BM_ams_estimate)->Arg(256)->Arg(1024)->Arg(4096);

BENCHMARK_MAIN();
