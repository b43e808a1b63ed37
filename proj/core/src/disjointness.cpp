#include "roml/disjointness.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "roml/errors.hpp"
#include "roml/rng.hpp"

namespace roml {

namespace {

// First `take` entries of a uniform permutation of `pool`.
void partial_shuffle(std::vector<Element>& pool, std::uint64_t take, Rng& rng) {
  for (std::uint64_t i = 0; i < take; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
}

}  // namespace

DisjInstance gen_instance(std::uint64_t N, std::uint64_t t, std::uint64_t w,
                          InstanceKind kind, std::uint64_t seed) {
  if (t < 2 || w < 1 || N < 1) {
    throw InfeasiblePromiseError("need t >= 2, w >= 1, N >= 1");
  }
  if (kind == InstanceKind::No && t * w > N) {
    throw InfeasiblePromiseError("NO instance needs t*w <= N (" +
                                 std::to_string(t * w) + " > " + std::to_string(N) + ")");
  }
  if (kind == InstanceKind::Yes && t * (w - 1) + 1 > N) {
    throw InfeasiblePromiseError("YES instance needs t*(w-1)+1 <= N");
  }

  Rng rng(derive_seed(seed, "disj.instance"));
  DisjInstance inst;
  inst.N = N;
  inst.t = t;
  inst.w = w;
  inst.kind = kind;
  inst.sets.assign(t, {});

  std::vector<Element> pool(N);
  std::iota(pool.begin(), pool.end(), Element{1});

  if (kind == InstanceKind::No) {
    partial_shuffle(pool, t * w, rng);
    std::uint64_t at = 0;
    for (auto& set : inst.sets) {
      set.assign(pool.begin() + static_cast<std::ptrdiff_t>(at),
                 pool.begin() + static_cast<std::ptrdiff_t>(at + w));
      std::sort(set.begin(), set.end());
      at += w;
    }
  } else {
    inst.witness = static_cast<Element>(rng.one_to(N));
    std::swap(pool[inst.witness - 1], pool[N - 1]);  // keep witness out of the pool
    pool.pop_back();
    partial_shuffle(pool, t * (w - 1), rng);
    std::uint64_t at = 0;
    for (auto& set : inst.sets) {
      set.push_back(inst.witness);
      set.insert(set.end(), pool.begin() + static_cast<std::ptrdiff_t>(at),
                 pool.begin() + static_cast<std::ptrdiff_t>(at + (w - 1)));
      std::sort(set.begin(), set.end());
      at += w - 1;
    }
  }
  return inst;
}

DisjInstance gen_instance(const Params& params, InstanceKind kind,
                          std::uint64_t seed) {
  return gen_instance(params.N, params.t, params.w, kind, seed);
}

std::vector<std::string> validate_promise(const DisjInstance& inst) {
  std::vector<std::string> bad;
  std::unordered_map<Element, std::uint64_t> occurs;
  for (std::uint64_t i = 0; i < inst.sets.size(); ++i) {
    const auto& set = inst.sets[i];
    if (set.size() != inst.w) {
      bad.push_back("set " + std::to_string(i + 1) + " has size " +
                    std::to_string(set.size()) + ", expected " + std::to_string(inst.w));
    }
    for (std::size_t j = 0; j < set.size(); ++j) {
      if (set[j] < 1 || set[j] > inst.N) {
        bad.push_back("set " + std::to_string(i + 1) + " element " +
                      std::to_string(set[j]) + " outside [N]");
      }
      if (j > 0 && set[j] <= set[j - 1]) {
        bad.push_back("set " + std::to_string(i + 1) +
                      " not strictly ascending at offset " + std::to_string(j));
      }
      ++occurs[set[j]];
    }
  }
  if (inst.sets.size() != inst.t) {
    bad.push_back("instance has " + std::to_string(inst.sets.size()) +
                  " sets, expected t = " + std::to_string(inst.t));
  }

  std::vector<Element> full;  // elements in every set
  for (const auto& [e, cnt] : occurs) {
    if (cnt == inst.t) {
      full.push_back(e);
    } else if (cnt != 1) {
      bad.push_back("element " + std::to_string(e) + " occurs " +
                    std::to_string(cnt) + " times (allowed: 0, 1, or t)");
    }
  }
  std::sort(full.begin(), full.end());
  if (inst.kind == InstanceKind::Yes) {
    if (full.empty()) {
      bad.push_back("kind=yes but no element occurs in all sets (missing witness)");
    } else if (full.size() > 1) {
      bad.push_back("kind=yes with " + std::to_string(full.size()) + " full elements");
    } else if (full[0] != inst.witness) {
      bad.push_back("witness field " + std::to_string(inst.witness) +
                    " != common element " + std::to_string(full[0]));
    }
  } else if (!full.empty()) {
    bad.push_back("kind=no but element " + std::to_string(full[0]) +
                  " occurs in all sets");
  }
  return bad;
}

InstanceKind solve_exact(const DisjInstance& inst) {
  std::unordered_map<Element, std::uint64_t> occurs;
  for (const auto& set : inst.sets) {
    for (Element e : set) ++occurs[e];
  }
  for (const auto& [e, cnt] : occurs) {
    (void)e;
    if (cnt == inst.t) return InstanceKind::Yes;
  }
  return InstanceKind::No;
}

std::string instance_to_json(const DisjInstance& inst) {
  nlohmann::ordered_json j;
  j["N"] = inst.N;
  j["t"] = inst.t;
  j["w"] = inst.w;
  j["kind"] = kind_name(inst.kind);
  if (inst.kind == InstanceKind::Yes) j["witness"] = inst.witness;
  j["sets"] = inst.sets;
  return j.dump() + "\n";
}

DisjInstance instance_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DisjInstance inst;
  inst.N = j.at("N").get<std::uint64_t>();
  inst.t = j.at("t").get<std::uint64_t>();
  inst.w = j.at("w").get<std::uint64_t>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "yes") {
    inst.kind = InstanceKind::Yes;
    inst.witness = j.at("witness").get<Element>();
  } else if (kind == "no") {
    inst.kind = InstanceKind::No;
  } else {
    throw InfeasiblePromiseError("instance kind must be 'yes' or 'no'");
  }
  inst.sets = j.at("sets").get<std::vector<std::vector<Element>>>();
  return inst;
}

std::string instance_to_csv(const DisjInstance& inst) {
  std::ostringstream os;
  os << "set,element\n";
  for (std::uint64_t i = 0; i < inst.sets.size(); ++i) {
    for (Element e : inst.sets[i]) os << (i + 1) << ',' << e << '\n';
  }
  return os.str();
}

}  // namespace roml
