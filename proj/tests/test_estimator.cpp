#include <doctest.h>

#include "roml/estimator.hpp"
#include "roml/rng.hpp"

using namespace roml;

namespace {

Stream random_stream(Rng& rng, std::uint64_t len, std::uint64_t universe) {
  Stream s(len);
  for (auto& e : s) e = static_cast<Element>(1 + rng.below(universe));
  return s;
}

}  // namespace

TEST_CASE("ams estimate over whole-stream enumeration equals F_k") {
  // With sample positions forced to every index, the average telescopes.
  const Stream s{5, 5, 5, 5};
  u128 sum = 0;
  for (std::uint64_t j = 1; j <= s.size(); ++j) sum += ams_basic_estimate(s, 2, j);
  CHECK(static_cast<double>(sum) / 4.0 == 16.0);
}

TEST_CASE("serialize/restore round-trip preserves behavior") {
  Rng rng(7);
  const Stream s = random_stream(rng, 300, 20);

  AmsEstimator reference(s.size(), 3, 64, 12345);
  AmsEstimator split(s.size(), 3, 64, 12345);
  for (std::uint64_t i = 0; i < 150; ++i) reference.update(s[i]);
  for (std::uint64_t i = 0; i < 150; ++i) split.update(s[i]);

  AmsEstimator resumed(1, 1, 1, 0);
  resumed.restore(split.serialize());
  for (std::uint64_t i = 150; i < s.size(); ++i) {
    reference.update(s[i]);
    resumed.update(s[i]);
  }
  CHECK(reference.estimate() == resumed.estimate());

  // State has nonzero size after an update.
  CHECK(reference.serialize().size_bits() > 0);
}

TEST_CASE("exact estimator matches exact_fk and round-trips") {
  Rng rng(8);
  const Stream s = random_stream(rng, 500, 30);
  ExactFkEstimator est(4);
  for (std::uint64_t i = 0; i < 250; ++i) est.update(s[i]);
  ExactFkEstimator resumed(4);
  resumed.restore(est.serialize());
  for (std::uint64_t i = 250; i < s.size(); ++i) resumed.update(s[i]);
  CHECK(resumed.exact() == exact_fk(s, 4));
}

TEST_CASE("segmented run equals unsegmented run for any boundaries") {
  Rng rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t len = 2 + rng.below(99);
    const Stream s = random_stream(rng, len, 12);
    const int k = 2 + static_cast<int>(rng.below(3));
    const std::uint64_t seed = rng.next();

    const double whole = ams_estimate(s, k, 32, seed);

    for (int bset = 0; bset < 10; ++bset) {
      std::vector<std::uint64_t> boundaries;
      for (std::uint64_t pos = 1; pos < len; ++pos) {
        if (rng.bit()) boundaries.push_back(pos);
      }
      boundaries.push_back(len);
      const SegmentedRun run = estimator_run_segmented(s, k, 32, seed, boundaries);
      CHECK(run.estimate == whole);
      CHECK(run.max_state_bits > 0);
      CHECK(run.handoffs == boundaries.size());
    }
  }
}

TEST_CASE("single boundary behaves like the plain run") {
  Rng rng(5);
  const Stream s = random_stream(rng, 64, 6);
  const std::vector<std::uint64_t> whole{s.size()};
  const SegmentedRun run = estimator_run_segmented(s, 2, 16, 99, whole);
  CHECK(run.estimate == ams_estimate(s, 2, 16, 99));
  CHECK(run.handoffs == 1);
}

TEST_CASE("segmented exact estimator is segmentation-invariant") {
  Rng rng(6);
  const Stream s = random_stream(rng, 400, 25);
  std::vector<std::uint64_t> boundaries{50, 51, 200, 399, 400};
  const SegmentedRun run = run_segmented(
      [] { return std::make_unique<ExactFkEstimator>(3); }, s, boundaries);
  CHECK(run.estimate == static_cast<double>(exact_fk(s, 3)));
}

TEST_CASE("boundary validation") {
  const Stream s{1, 2, 3};
  std::vector<std::uint64_t> bad{2};  // does not reach the end
  CHECK_THROWS(estimator_run_segmented(s, 2, 4, 1, bad));
  std::vector<std::uint64_t> unsorted{2, 2, 3};
  CHECK_THROWS(estimator_run_segmented(s, 2, 4, 1, unsorted));
}
