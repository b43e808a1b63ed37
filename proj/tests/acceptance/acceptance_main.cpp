// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.  Every tolerance is pinned here; the run is deterministic from
// the fixed seeds below.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <variant>
#include <vector>

#include <sys/wait.h>

#include "roml/diagnostics.hpp"
#include "roml/disjointness.hpp"
#include "roml/errors.hpp"
#include "roml/estimator.hpp"
#include "roml/intervals.hpp"
#include "roml/moments.hpp"
#include "roml/parallel.hpp"
#include "roml/params.hpp"
#include "roml/protocol.hpp"
#include "roml/rng.hpp"

using namespace roml;

namespace {

int g_failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(const std::string& id, bool pass, const std::string& detail,
            double seconds) {
  if (!pass) ++g_failures;
  std::printf("[%s] %s: %s [%.1fs]\n", pass ? "PASS" : "FAIL", id.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Params default_protocol_params() {
  // Protocol-mode defaults: t = 100 n^(1/k) forces w = 1 at this n (any
  // larger width makes triple intersections certain, aborting every seed).
  return derive_params(1'000'000, 3, Ratio{1, 2}, Ratio{1, 1000}, Ratio{1, 200},
                       100);
}

// ---------------------------------------------------------------- C1 + C2
void criteria_1_2() {
  Timer timer;
  const std::uint64_t trials = 10'000;
  const Lemma1Report rep = verify_lemma1(1'000'000, 3, Ratio{1, 20}, trials, 101);
  const double elapsed = timer.seconds();

  const double se_triple = std::sqrt(0.02 * 0.98 / static_cast<double>(trials));
  const double bound1 = 0.02 + 3 * se_triple;
  report("C1 lemma1 triple probability",
         rep.empirical_triple_prob <= bound1 && elapsed < 60.0,
         "empirical=" + fmt(rep.empirical_triple_prob) + " <= " + fmt(bound1) +
             " (analytic 8c1^2=" + fmt(rep.analytic_triple_bound) + ")",
         elapsed);

  const double se_pairs =
      std::sqrt(std::max(rep.mean_overlap_pairs, 1e-6) / static_cast<double>(trials));
  const double bound2 = 2.0 + 3 * se_pairs;
  const bool pass2 = rep.mean_overlap_pairs <= bound2 &&
                     rep.empirical_pair_exceed_prob <= 0.02 &&
                     rep.pair_threshold == 10;
  report("C2 lemma1 pair bound", pass2,
         "mean_pairs=" + fmt(rep.mean_overlap_pairs) + " <= " + fmt(bound2) +
             ", P(pairs>10)=" + fmt(rep.empirical_pair_exceed_prob) + " <= 0.02",
         timer.seconds());
}

// -------------------------------------------------------------------- C3
void criterion_3() {
  Timer timer;
  const GapReport rep = verify_lemma2(1'000'000, 4, Ratio{1, 200}, 10'000, 103);
  const bool pass = rep.threshold == 5 && rep.empirical_fail_prob <= 0.02;
  report("C3 lemma2 spacing", pass,
         "P(min gap < " + std::to_string(rep.threshold) + ")=" +
             fmt(rep.empirical_fail_prob) + " <= 0.02 (birthday approx " +
             fmt(rep.expected_close_pairs) + ")",
         timer.seconds());
}

// --------------------------------------------------------- C4 + C6a + C7
// One pass over 10^4 protocol seeds: partition soundness, the structural
// message bound, and the abort-rate inequality with a common-random-numbers
// estimate of the triple rate.
void criteria_4_6a_7(const Params& params) {
  Timer timer;
  const std::uint64_t seeds = 10'000;
  const std::uint64_t root = 104;

  struct Cell {
    std::uint8_t aborted = 0, triple_lemma_style = 0, violation = 0,
                 bound_violation = 0;
  };
  std::vector<Cell> cells(seeds);

  parallel_for(seeds, [&](std::uint64_t i) {
    Cell& cell = cells[i];
    const std::uint64_t seed = derive_seed(root, "c4", i);

    // Lemma-1-style triple indicator at the same parameters, from the same
    // interval sub-seed the protocol uses (common random numbers).
    {
      Rng rng(derive_seed(seed, "protocol.intervals"));
      std::vector<std::uint64_t> starts(params.t);
      for (auto& a : starts) a = rng.one_to(params.n);
      cell.triple_lemma_style =
          cyclic_max_coverage(starts, params.w, params.n) >= 3 ? 1 : 0;
    }

    auto drawn = draw_public_randomness(params, seed);
    if (std::holds_alternative<Abort>(drawn)) {
      cell.aborted = 1;
      return;
    }
    const auto& pr = std::get<PublicRandomness>(drawn);
    const DisjInstance inst =
        gen_instance(params, InstanceKind::Yes, derive_seed(seed, "inst"));
    try {
      const StreamAssembly assembly = assemble_stream(inst, pr, params, seed);
      // Writer ids must stay in [1, t]; fused with the message count.
      std::uint64_t messages = 1;
      for (std::uint64_t j = 0; j < assembly.n(); ++j) {
        const auto w = assembly.writer[j];
        if (w < 1 || w > params.t) {
          cell.violation = 1;
          break;
        }
        if (j > 0 && w != assembly.writer[j - 1]) ++messages;
      }
      const auto stats = intersection_stats(pr.intervals);
      const std::uint64_t bound =
          4 * (params.t + 1) +
          stats.pair_count * ((params.w + params.w2 - 1) / params.w2 + 2);
      if (messages > bound) cell.bound_violation = 1;
    } catch (const std::exception&) {
      cell.violation = 1;  // DecompositionGap / AssemblyIncomplete
    }
  });

  std::uint64_t aborted = 0, triples = 0, violations = 0, bound_violations = 0;
  for (const Cell& cell : cells) {
    aborted += cell.aborted;
    triples += cell.triple_lemma_style;
    violations += cell.violation;
    bound_violations += cell.bound_violation;
  }
  const double elapsed = timer.seconds();
  const auto n_seeds = static_cast<double>(seeds);

  report("C4a partition soundness", violations == 0,
         std::to_string(seeds - aborted) + " non-aborted assemblies, " +
             std::to_string(violations) + " violations",
         elapsed);
  report("C6a structural message bound", bound_violations == 0,
         std::to_string(bound_violations) + " of " +
             std::to_string(seeds - aborted) + " assemblies exceed the bound",
         elapsed);

  const double abort_rate = static_cast<double>(aborted) / n_seeds;
  const double triple_rate = static_cast<double>(triples) / n_seeds;
  const double wrap_term =
      static_cast<double>(params.w - 1) / static_cast<double>(params.n);
  const double bound = wrap_term + triple_rate + 0.01;
  report("C7 abort rate", abort_rate <= bound,
         "abort=" + fmt(abort_rate) + " <= (w-1)/n + lemma1_triple + 0.01 = " +
             fmt(bound),
         timer.seconds());
}

// ------------------------------------------------------------------- C4b
// Exhaustive small-scale oracle for the intersection statistics.
void criterion_4b() {
  Timer timer;
  std::uint64_t checked = 0, mismatches = 0;
  Rng rng(1048);
  for (std::uint64_t t : {2, 3, 5, 8, 13, 20}) {
    for (std::uint64_t n : {20, 50, 100, 200}) {
      for (std::uint64_t w : {1, 2, 3, 5, 8}) {
        if (w > n / 2) continue;
        for (int rep = 0; rep < 50; ++rep) {
          std::vector<std::uint64_t> starts(t);
          for (auto& a : starts) a = 1 + rng.below(n - w + 1);  // non-wrapping
          std::sort(starts.begin(), starts.end());
          const SortedIntervals iv{n, w, starts};

          // Brute force over positions.
          std::vector<std::uint32_t> coverage(n + 2, 0);
          for (std::uint64_t a : starts) {
            for (std::uint64_t off = 0; off < w; ++off) ++coverage[a + off];
          }
          bool triple = false;
          for (std::uint64_t p = 1; p <= n; ++p) triple |= coverage[p] >= 3;
          std::uint64_t pairs = 0;
          for (std::uint64_t i = 0; i < t; ++i) {
            for (std::uint64_t j = i + 1; j < t; ++j) {
              if (starts[j] <= starts[i] + w - 1) ++pairs;
            }
          }

          const auto stats = intersection_stats(iv);
          if (stats.triple_exists != triple || stats.pair_count != pairs) {
            ++mismatches;
          }
          ++checked;
        }
      }
    }
  }
  report("C4b intersection oracle", mismatches == 0,
         std::to_string(checked) + " instances (t<=20, n<=200), " +
             std::to_string(mismatches) + " mismatches",
         timer.seconds());
}

// --------------------------------------------------------------- C5 + C6b
void criteria_5_6b(const Params& params) {
  Timer timer;
  const std::uint64_t seeds = 1000;
  const std::uint64_t root = 105;

  struct Cell {
    std::uint8_t aborted = 0;
    std::uint8_t no_fk_is_n = 0;
    std::uint8_t yes_gap_ok = 0;
    std::uint64_t messages = 0;
  };
  std::vector<Cell> no_cells(seeds), yes_cells(seeds);

  parallel_for(2 * seeds, [&](std::uint64_t idx) {
    const bool yes = idx >= seeds;
    const std::uint64_t i = yes ? idx - seeds : idx;
    Cell& cell = yes ? yes_cells[i] : no_cells[i];
    const std::uint64_t seed = derive_seed(root, yes ? "c5.yes" : "c5.no", i);
    auto drawn = draw_public_randomness(params, seed);
    if (std::holds_alternative<Abort>(drawn)) {
      cell.aborted = 1;
      return;
    }
    const auto& pr = std::get<PublicRandomness>(drawn);
    const DisjInstance inst = gen_instance(
        params, yes ? InstanceKind::Yes : InstanceKind::No,
        derive_seed(seed, "inst"));
    const StreamAssembly assembly = assemble_stream(inst, pr, params, seed);
    cell.messages = count_messages(assembly);

    const u128 fk = exact_fk_dense(assembly.elements, 2 * params.n, params.k);
    if (!yes) {
      cell.no_fk_is_n = fk == params.n ? 1 : 0;
      return;
    }
    // Witness multiplicity must clear (2n)^(1/k), checked exactly as
    // mult^k > 2n, and F_k must reach 2n.
    const Element target = pr.sigma[inst.witness - 1];
    u128 mult = 0;
    for (Element e : assembly.elements) mult += e == target;
    const bool mult_ok = checked_pow(mult, params.k) > 2 * params.n;
    const bool fk_ok = fk >= 2 * params.n;
    cell.yes_gap_ok = mult_ok && fk_ok ? 1 : 0;
  });

  std::uint64_t no_ok = 0, no_decided = 0, yes_ok = 0, yes_decided = 0;
  double message_sum = 0;
  for (const Cell& cell : no_cells) {
    if (cell.aborted) continue;
    ++no_decided;
    no_ok += cell.no_fk_is_n;
  }
  for (const Cell& cell : yes_cells) {
    if (cell.aborted) continue;
    ++yes_decided;
    yes_ok += cell.yes_gap_ok;
    message_sum += static_cast<double>(cell.messages);
  }

  const bool no_pass = no_decided > 0 && no_ok == no_decided;
  const double yes_frac =
      yes_decided ? static_cast<double>(yes_ok) / static_cast<double>(yes_decided) : 0;
  report("C5 F_k gap", no_pass && yes_frac >= 0.99,
         "NO: F_k=n on " + std::to_string(no_ok) + "/" + std::to_string(no_decided) +
             "; YES: multiplicity^k>2n and F_k>=2n on " + fmt(yes_frac * 100) +
             "% of " + std::to_string(yes_decided),
         timer.seconds());

  const double nk = std::cbrt(static_cast<double>(params.n));
  const double ratio =
      yes_decided ? message_sum / static_cast<double>(yes_decided) / nk : 1e9;
  report("C6b message ratio", ratio <= 500.0,
         "mean messages / n^(1/k) = " + fmt(ratio) + " <= 500", timer.seconds());
}

// -------------------------------------------------------------------- C8
void criterion_8(const Params& params) {
  Timer timer;
  const std::uint64_t trials = 100;

  auto run_batch = [&](EstimatorKind kind, std::uint32_t samples) {
    struct Res {
      std::uint8_t aborted = 0, correct = 0;
    };
    std::vector<Res> results(2 * trials);
    const ProtocolOptions options{kind, samples, false};
    parallel_for(2 * trials, [&](std::uint64_t idx) {
      const bool yes = idx >= trials;
      const std::uint64_t i = yes ? idx - trials : idx;
      const std::uint64_t seed = derive_seed(108, yes ? "c8.yes" : "c8.no", i);
      const DisjInstance inst = gen_instance(
          params, yes ? InstanceKind::Yes : InstanceKind::No, seed);
      const ProtocolOutcome out = run_protocol(inst, params, options, seed);
      results[idx].aborted = out.aborted.has_value();
      results[idx].correct = out.correct() ? 1 : 0;
    });
    std::uint64_t decided = 0, correct = 0;
    for (const auto& r : results) {
      if (r.aborted) continue;
      ++decided;
      correct += r.correct;
    }
    return std::pair<std::uint64_t, std::uint64_t>{decided, correct};
  };

  const auto [exact_decided, exact_correct] = run_batch(EstimatorKind::Exact, 0);
  const double exact_acc =
      exact_decided ? static_cast<double>(exact_correct) / exact_decided : 0;
  const auto [ams_decided, ams_correct] = run_batch(EstimatorKind::Ams, 4096);
  const double ams_acc =
      ams_decided ? static_cast<double>(ams_correct) / ams_decided : 0;
  const double elapsed = timer.seconds();

  report("C8 end-to-end decision",
         exact_acc >= 0.95 && ams_acc >= 0.90 && elapsed < 300.0,
         "exact accuracy=" + fmt(exact_acc) + " (n=" + std::to_string(exact_decided) +
             ") >= 0.95; ams accuracy=" + fmt(ams_acc) + " (n=" +
             std::to_string(ams_decided) + ") >= 0.90",
         elapsed);
}

// -------------------------------------------------------------------- C9
void criterion_9() {
  Timer timer;
  Rng rng(109);

  std::uint64_t telescope_fail = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t len = 1 + rng.below(50);
    Stream s(len);
    for (auto& e : s) e = static_cast<Element>(1 + rng.below(10));
    const int k = 2 + static_cast<int>(rng.below(4));
    u128 sum = 0;
    for (std::uint64_t j = 1; j <= len; ++j) sum += ams_basic_estimate(s, k, j);
    if (sum != exact_fk(s, k) * static_cast<u128>(len)) ++telescope_fail;
  }

  std::uint64_t segment_fail = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t len = 2 + rng.below(199);
    Stream s(len);
    for (auto& e : s) e = static_cast<Element>(1 + rng.below(16));
    const int k = 2 + static_cast<int>(rng.below(3));
    const std::uint64_t seed = rng.next();
    std::vector<std::uint64_t> boundaries;
    for (std::uint64_t pos = 1; pos < len; ++pos) {
      if (rng.bit()) boundaries.push_back(pos);
    }
    boundaries.push_back(len);
    const double whole = ams_estimate(s, k, 64, seed);
    const SegmentedRun run = estimator_run_segmented(s, k, 64, seed, boundaries);
    if (run.estimate != whole) ++segment_fail;
  }

  report("C9 estimator identities", telescope_fail == 0 && segment_fail == 0,
         "telescoping failures=" + std::to_string(telescope_fail) +
             "/100, segmentation mismatches=" + std::to_string(segment_fail) + "/100",
         timer.seconds());
}

// ------------------------------------------------------------------- C10
void criterion_10(const Params& params) {
  Timer timer;
  const UniformityReport rep = order_uniformity_test(params, 10'000, 111);
  const bool pass = rep.chi2_pass && rep.spacing_ge_w2_freq >= 0.98;
  report("C10 order diagnostics", pass,
         "survivor chi2 p=" + fmt(rep.survivor_chi2.pvalue) +
             " (alpha=0.01), spacing>=w2 freq=" + fmt(rep.spacing_ge_w2_freq) +
             " >= 0.98; KS p=" + fmt(rep.position_ks.pvalue),
         timer.seconds());
}

// ------------------------------------------------------------------- C11
std::string run_cli_capture(const std::string& args, int* exit_code) {
  const std::string command = std::string(ROML_CLI_PATH) + " " + args + " 2>&1";
  std::string output;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) {
    *exit_code = -1;
    return output;
  }
  std::array<char, 4096> buffer;
  std::size_t got;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
    output.append(buffer.data(), got);
  }
  const int status = pclose(pipe);
  *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return output;
}

void criterion_11() {
  Timer timer;
  const std::vector<std::string> commands = {
      "gen-instance --n 1e6 --k 3 --c 1/2 --c1 0.001 --c2 0.005 --t-factor 100 "
      "--kind yes --seed 7",
      "lemma1 --n 1e5 --k 3 --c1 0.05 --t-factor 1 --trials 500 --seed 11",
      "lemma2 --n 1e5 --k 4 --c2 0.005 --trials 500 --seed 12",
      "protocol --n 2000 --k 2 --c 1/2 --c1 0.3 --c2 0.01 --t-factor 1 "
      "--trials 10 --estimator ams --samples 128 --seed 13",
      "diagnose --n 2000 --k 2 --c 1/2 --c1 0.3 --c2 0.01 --t-factor 1 "
      "--batches 40 --seed 14",
  };
  std::uint64_t mismatches = 0, failures = 0;
  for (const auto& command : commands) {
    int code_a = 0, code_b = 0;
    const std::string a = run_cli_capture(command, &code_a);
    const std::string b = run_cli_capture(command, &code_b);
    if (code_a != 0 || code_b != 0) ++failures;
    if (a != b || a.empty()) ++mismatches;
  }
  report("C11 reproducibility", mismatches == 0 && failures == 0,
         std::to_string(commands.size()) + " commands rerun byte-identically",
         timer.seconds());
}

}  // namespace

int main() {
  const Params params = default_protocol_params();
  std::printf("acceptance: protocol params %s\n", params.describe().c_str());

  criteria_1_2();
  criterion_3();
  criteria_4_6a_7(params);
  criterion_4b();
  criteria_5_6b(params);
  criterion_8(params);
  criterion_9();
  criterion_10(params);
  criterion_11();

  std::printf("acceptance: %d failure(s)\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
