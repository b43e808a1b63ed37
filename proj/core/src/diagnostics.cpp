#include "roml/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <unordered_set>

#include "roml/csvio.hpp"
#include "roml/errors.hpp"
#include "roml/parallel.hpp"
#include "roml/rng.hpp"

namespace roml {

std::uint64_t min_pairwise_gap(std::span<const std::uint64_t> positions,
                               std::uint64_t n) {
  if (positions.size() <= 1) return n;
  std::vector<std::uint64_t> sorted(positions.begin(), positions.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t best = n;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    best = std::min(best, sorted[i] - sorted[i - 1]);
  }
  return best;
}

std::string GapReport::csv_header() {
  return "n,k,c2,subset_size,threshold,trials,empirical_fail_prob,"
         "expected_close_pairs";
}

std::string GapReport::csv_row() const {
  std::ostringstream os;
  os << n << ',' << k << ',' << fmt_double(c2.value()) << ',' << subset_size << ','
     << threshold << ',' << trials << ',' << fmt_double(empirical_fail_prob) << ','
     << fmt_double(expected_close_pairs);
  return os.str();
}

GapReport verify_lemma2(std::uint64_t n, int k, Ratio c2, std::uint64_t trials,
                        std::uint64_t seed) {
  if (trials < 100) throw InvalidScaleError("verify_lemma2 requires trials >= 100");
  if (n < 16 || k < 2) throw InvalidScaleError("verify_lemma2 requires n >= 16, k >= 2");

  GapReport rep;
  rep.n = n;
  rep.k = k;
  rep.c2 = c2;
  rep.trials = trials;
  rep.subset_size = ceil_ratio_pow(Ratio{1, 1}, n, 1, static_cast<unsigned>(k));
  rep.threshold = ceil_ratio_pow(c2, n, static_cast<unsigned>(k) - 2,
                                 static_cast<unsigned>(k));
  const double s = static_cast<double>(rep.subset_size);
  rep.expected_close_pairs =
      s * (s - 1) * static_cast<double>(rep.threshold) / static_cast<double>(n);

  std::vector<std::uint8_t> fails(trials, 0);
  parallel_for(trials, [&](std::uint64_t trial) {
    Rng rng(derive_seed(seed, "lemma2.trial", trial));
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(rep.subset_size * 2);
    std::vector<std::uint64_t> subset;
    subset.reserve(rep.subset_size);
    while (subset.size() < rep.subset_size) {
      const std::uint64_t v = rng.one_to(n);
      if (chosen.insert(v).second) subset.push_back(v);
    }
    fails[trial] = min_pairwise_gap(subset, n) < rep.threshold ? 1 : 0;
  });

  std::uint64_t failed = 0;
  for (auto f : fails) failed += f;
  rep.empirical_fail_prob = static_cast<double>(failed) / static_cast<double>(trials);
  return rep;
}

std::vector<std::uint64_t> heavy_positions(const StreamAssembly& assembly,
                                           Element witness,
                                           std::span<const Element> sigma) {
  const Element target = sigma[witness - 1];
  std::vector<std::uint64_t> out;
  for (std::uint64_t j = 1; j <= assembly.n(); ++j) {
    if (assembly.elements[j - 1] == target) out.push_back(j);
  }
  return out;
}

std::vector<std::uint64_t> thinned_uniform_sample(std::uint64_t t,
                                                  std::uint64_t n,
                                                  std::uint64_t seed) {
  if (t > n) throw InvalidScaleError("thinned_uniform_sample requires t <= n");
  Rng rng(derive_seed(seed, "thinned"));
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(t * 2);
  std::vector<std::uint64_t> drawn;
  drawn.reserve(t);
  while (drawn.size() < t) {
    const std::uint64_t v = rng.one_to(n);
    if (chosen.insert(v).second) drawn.push_back(v);
  }
  std::vector<std::uint64_t> kept;
  for (std::uint64_t v : drawn) {
    if (rng.bit()) kept.push_back(v);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::string UniformityReport::csv_header() {
  return "n,k,t,batches,aborted_batches,chi2_stat,chi2_pvalue,chi2_pass,"
         "ks_stat,ks_pvalue,ks_pass,spacing_ge_w2_freq";
}

std::string UniformityReport::csv_row() const {
  std::ostringstream os;
  os << n << ',' << k << ',' << t << ',' << batches << ',' << aborted_batches << ','
     << fmt_double(survivor_chi2.stat) << ',' << fmt_double(survivor_chi2.pvalue)
     << ',' << fmt_bool(chi2_pass) << ',' << fmt_double(position_ks.stat) << ','
     << fmt_double(position_ks.pvalue) << ',' << fmt_bool(ks_pass) << ','
     << fmt_double(spacing_ge_w2_freq);
  return os.str();
}

UniformityReport order_uniformity_test(const Params& params,
                                       std::uint64_t batches,
                                       std::uint64_t seed) {
  if (batches < 30) throw InvalidScaleError("order_uniformity_test requires batches >= 30");

  UniformityReport rep;
  rep.n = params.n;
  rep.k = params.k;
  rep.t = params.t;
  rep.batches = batches;

  // Pass 1: find the batch indices whose interval draw survives.  Only the
  // intervals decide failure, so sigma and r are not drawn here.
  std::vector<std::uint64_t> selected;
  selected.reserve(batches);
  std::uint64_t scanned = 0;
  while (selected.size() < batches) {
    const std::uint64_t wave =
        std::max<std::uint64_t>(64, (batches - selected.size()) * 5 / 4 + 16);
    std::vector<std::uint8_t> ok(wave, 0);
    parallel_for(wave, [&](std::uint64_t i) {
      const std::uint64_t batch_seed = derive_seed(seed, "diag.batch", scanned + i);
      auto drawn = sample_intervals(params, derive_seed(batch_seed, "protocol.intervals"));
      if (std::holds_alternative<Abort>(drawn)) return;
      ok[i] = intersection_stats(std::get<SortedIntervals>(drawn)).triple_exists ? 0 : 1;
    });
    for (std::uint64_t i = 0; i < wave && selected.size() < batches; ++i) {
      if (ok[i]) selected.push_back(scanned + i);
    }
    scanned += wave;
  }
  rep.aborted_batches = selected.back() + 1 - batches;

  // Pass 2: assemble the selected batches and pool the statistics.
  std::vector<std::uint64_t> survivors(batches, 0);
  std::vector<std::uint8_t> spaced(batches, 0);
  std::vector<std::atomic<std::uint32_t>> heavy_hist(params.n);
  std::vector<std::atomic<std::uint32_t>> thinned_hist(params.n);

  parallel_for(batches, [&](std::uint64_t idx) {
    const std::uint64_t batch_seed = derive_seed(seed, "diag.batch", selected[idx]);
    auto drawn = draw_public_randomness(params, batch_seed);
    const auto& pr = std::get<PublicRandomness>(drawn);  // pass 1 guarantees success
    const DisjInstance inst = gen_instance(
        params, InstanceKind::Yes, derive_seed(batch_seed, "diag.instance"));
    const StreamAssembly assembly = assemble_stream(inst, pr, params, batch_seed);

    const auto heavy = heavy_positions(assembly, inst.witness, pr.sigma);
    survivors[idx] = heavy.size();
    spaced[idx] = min_pairwise_gap(heavy, params.n) >= params.w2 ? 1 : 0;
    for (std::uint64_t pos : heavy) {
      heavy_hist[pos - 1].fetch_add(1, std::memory_order_relaxed);
    }
    for (std::uint64_t pos : thinned_uniform_sample(
             params.t, params.n, derive_seed(batch_seed, "diag.thinned"))) {
      thinned_hist[pos - 1].fetch_add(1, std::memory_order_relaxed);
    }
  });

  rep.survivor_chi2 = chi2_binomial_gof(survivors, params.t, 0.5);
  rep.chi2_pass = rep.survivor_chi2.pvalue >= 0.01;

  std::vector<std::uint32_t> h1(params.n), h2(params.n);
  for (std::uint64_t i = 0; i < params.n; ++i) {
    h1[i] = heavy_hist[i].load(std::memory_order_relaxed);
    h2[i] = thinned_hist[i].load(std::memory_order_relaxed);
  }
  rep.position_ks = ks_two_sample_hist(h1, h2);
  rep.ks_pass = rep.position_ks.pvalue >= 0.01;

  std::uint64_t spaced_count = 0;
  for (auto s : spaced) spaced_count += s;
  rep.spacing_ge_w2_freq =
      static_cast<double>(spaced_count) / static_cast<double>(batches);
  return rep;
}

}  // namespace roml
