#include "roml/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

namespace roml {

Chi2Result chi2_binomial_gof(std::span<const std::uint64_t> samples,
                             std::uint64_t t, double p) {
  if (samples.empty()) throw std::invalid_argument("chi2: no samples");
  const auto n_samples = static_cast<double>(samples.size());
  const boost::math::binomial_distribution<double> law(static_cast<double>(t), p);

  // Cut points from binomial quantiles: aim for ~40 equiprobable bins, then
  // merge anything with expected count below 5.
  const unsigned target_bins =
      std::min<unsigned>(40, static_cast<unsigned>(std::min<std::uint64_t>(t, 1000)) + 1);
  std::vector<std::uint64_t> uppers;  // inclusive bin upper ends, last == t
  for (unsigned b = 1; b < target_bins; ++b) {
    const double q = static_cast<double>(b) / target_bins;
    const auto cut = static_cast<std::uint64_t>(boost::math::quantile(law, q));
    if (cut < t && (uppers.empty() || cut > uppers.back())) uppers.push_back(cut);
  }
  uppers.push_back(t);

  struct Bin {
    std::uint64_t lo, hi;  // inclusive count range
    double expected;
    std::uint64_t observed = 0;
  };
  auto mass = [&](std::uint64_t lo, std::uint64_t hi) {  // P(lo <= X <= hi)
    const double hi_cdf = boost::math::cdf(law, static_cast<double>(hi));
    if (lo == 0) return hi_cdf;
    return hi_cdf - boost::math::cdf(law, static_cast<double>(lo - 1));
  };
  std::vector<Bin> bins;
  std::uint64_t lo = 0;
  for (std::uint64_t hi : uppers) {
    bins.push_back({lo, hi, mass(lo, hi) * n_samples, 0});
    lo = hi + 1;
  }
  // Merge forward any bin with expected < 5; fold a light tail back.
  std::vector<Bin> merged;
  for (const Bin& bin : bins) {
    if (!merged.empty() && (merged.back().expected < 5.0 || bin.expected < 5.0)) {
      merged.back().hi = bin.hi;
      merged.back().expected += bin.expected;
      continue;
    }
    merged.push_back(bin);
  }
  if (merged.size() >= 2 && merged.back().expected < 5.0) {
    merged[merged.size() - 2].hi = merged.back().hi;
    merged[merged.size() - 2].expected += merged.back().expected;
    merged.pop_back();
  }

  Chi2Result out;
  out.bins = static_cast<unsigned>(merged.size());
  if (merged.size() < 2) return out;  // degenerate scale: nothing to test

  for (std::uint64_t s : samples) {
    for (Bin& bin : merged) {
      if (s >= bin.lo && s <= bin.hi) {
        ++bin.observed;
        break;
      }
    }
  }

  double stat = 0;
  for (const Bin& bin : merged) {
    const double diff = static_cast<double>(bin.observed) - bin.expected;
    stat += diff * diff / bin.expected;
  }
  out.stat = stat;
  out.df = static_cast<unsigned>(merged.size() - 1);
  const boost::math::chi_squared_distribution<double> chi2(out.df);
  out.pvalue = boost::math::cdf(boost::math::complement(chi2, stat));
  return out;
}

double kolmogorov_q(double lambda) {
  if (lambda <= 0) return 1.0;
  double sum = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample_hist(std::span<const std::uint32_t> h1,
                            std::span<const std::uint32_t> h2) {
  if (h1.size() != h2.size()) throw std::invalid_argument("ks: support mismatch");
  KsResult out;
  for (std::uint32_t v : h1) out.n1 += v;
  for (std::uint32_t v : h2) out.n2 += v;
  if (out.n1 == 0 || out.n2 == 0) throw std::invalid_argument("ks: empty sample");

  double c1 = 0, c2 = 0, d = 0;
  for (std::size_t i = 0; i < h1.size(); ++i) {
    c1 += h1[i];
    c2 += h2[i];
    d = std::max(d, std::abs(c1 / static_cast<double>(out.n1) -
                             c2 / static_cast<double>(out.n2)));
  }
  out.stat = d;
  const double ne = static_cast<double>(out.n1) * static_cast<double>(out.n2) /
                    static_cast<double>(out.n1 + out.n2);
  const double root = std::sqrt(ne);
  out.pvalue = kolmogorov_q((root + 0.12 + 0.11 / root) * d);
  return out;
}

}  // namespace roml
