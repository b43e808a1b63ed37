#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roml/moments.hpp"
#include "roml/params.hpp"

namespace roml {

enum class InstanceKind { No, Yes };

inline const char* kind_name(InstanceKind k) {
  return k == InstanceKind::Yes ? "yes" : "no";
}

// A t-party promise set-disjointness instance over [N]: every element occurs
// in 0, 1, or t of the sets, and a YES instance has exactly one element (the
// witness) occurring in all t.
struct DisjInstance {
  std::uint64_t N = 0;
  std::uint64_t t = 0;
  std::uint64_t w = 0;  // |S_i|
  InstanceKind kind = InstanceKind::No;
  Element witness = 0;  // meaningful iff kind == Yes
  std::vector<std::vector<Element>> sets;  // sets[i] ascending
};

// NO: t*w distinct elements split into t sets.  YES: one witness shared by
// all sets plus t*(w-1) distinct private elements.
// Throws InfeasiblePromiseError when the universe is too small.
DisjInstance gen_instance(std::uint64_t N, std::uint64_t t, std::uint64_t w,
                          InstanceKind kind, std::uint64_t seed);
DisjInstance gen_instance(const Params& params, InstanceKind kind,
                          std::uint64_t seed);

// Every violation found, as human-readable strings; empty means the promise
// holds and kind/witness are consistent.
std::vector<std::string> validate_promise(const DisjInstance& inst);

// Exact intersection test; the ground-truth oracle.
InstanceKind solve_exact(const DisjInstance& inst);

// Canonical JSON: fixed key order, sets by index, elements ascending,
// compact separators, trailing newline.  Byte-reproducible from seeds.
std::string instance_to_json(const DisjInstance& inst);
DisjInstance instance_from_json(const std::string& text);

// Long-form CSV rows ("set,element"), same data as the JSON envelope.
std::string instance_to_csv(const DisjInstance& inst);

}  // namespace roml
