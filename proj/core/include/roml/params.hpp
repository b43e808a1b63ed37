#pragma once

#include <cstdint>
#include <string>

#include "roml/ratio.hpp"

namespace roml {

// Scale parameters shared by every module.
//
// Base fields are the knobs; the rest are derived with exact integer
// ceilings:
//
//   t          = ceil(t_factor * n^(1/k))
//   w          = ceil(c1 * n^(1 - 3/(2k)))        interval width, |S_i|
//   N          = ceil(t * w / c)                  disjointness universe
//   w2         = ceil(c2 * n^(1 - 2/k))           shared-bit block width
//   num_blocks = ceil(n / w2)
//
// t_factor = 100 is protocol mode; t_factor = 1 is the scaling the interval
// lemma is stated at.
struct Params {
  std::uint64_t n = 0;
  int k = 2;
  Ratio c{1, 2};
  Ratio c1{1, 20};
  Ratio c2{1, 200};
  std::uint64_t t_factor = 1;

  std::uint64_t t = 0;
  std::uint64_t w = 0;
  std::uint64_t N = 0;
  std::uint64_t w2 = 0;
  std::uint64_t num_blocks = 0;

  bool operator==(const Params&) const = default;

  std::string describe() const;
};

// Validates ranges, computes all derived fields, and checks feasibility.
// Throws InvalidScaleError naming the violated inequality; constants that
// are fine asymptotically can be infeasible at small n.
Params derive_params(std::uint64_t n, int k, Ratio c, Ratio c1, Ratio c2,
                     std::uint64_t t_factor);

// ceil(f * n^(p/q)) computed exactly: the least m with (m*f.den)^q >= f.num^q * n^p.
std::uint64_t ceil_ratio_pow(Ratio f, std::uint64_t n, unsigned p, unsigned q);

// floor(n^(p/q)): the greatest m with m^q <= n^p.
std::uint64_t floor_root_pow(std::uint64_t n, unsigned p, unsigned q);

}  // namespace roml
