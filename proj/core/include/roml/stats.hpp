#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace roml {

struct Chi2Result {
  double stat = 0;
  double pvalue = 1;
  unsigned df = 0;
  unsigned bins = 0;
};

// Goodness of fit of observed integer samples against Binomial(t, p), with
// equiprobable-ish bins merged so expected counts stay usable.
Chi2Result chi2_binomial_gof(std::span<const std::uint64_t> samples,
                             std::uint64_t t, double p);

struct KsResult {
  double stat = 0;
  double pvalue = 1;
  std::uint64_t n1 = 0, n2 = 0;
};

// Two-sample Kolmogorov-Smirnov on integer-valued data given as histograms
// over a common support 1..size.  Exactly the statistic of the sorted-sample
// formulation; the p-value uses the asymptotic Kolmogorov series.
KsResult ks_two_sample_hist(std::span<const std::uint32_t> h1,
                            std::span<const std::uint32_t> h2);

double kolmogorov_q(double lambda);

}  // namespace roml
