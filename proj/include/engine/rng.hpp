#pragma once
// Deterministic randomness: all stochastic choices flow from a single 64-bit
// seed through mt19937_64, whose output sequence is fixed by the standard,
// so identical (config, seed) pairs reproduce identical runs bit-for-bit.

#include <random>
#include <stdexcept>
#include <vector>

#include "engine/fp.hpp"

namespace kzc {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(u64 seed) : gen(seed) {}

  u64 next() { return gen(); }

  u64 below(u64 bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below(0)");
    // Rejection sampling for an unbiased, portable result.
    u64 limit = ~u64(0) - (~u64(0) % bound + 1) % bound;
    u64 v;
    do {
      v = gen();
    } while (v > limit);
    return v % bound;
  }

  u64 fp_elem(const Fp& K) { return below(K.p); }
  u64 fp_nonzero(const Fp& K) { return 1 + below(K.p - 1); }

  // A point in F_p^count with pairwise distinct coordinates.
  std::vector<u64> distinct_point(const Fp& K, std::size_t count) {
    if (count > K.p)
      throw std::invalid_argument("distinct_point: need count <= p");
    std::vector<u64> pool(K.p);
    for (u64 i = 0; i < K.p; ++i) pool[i] = i;
    std::vector<u64> out;
    for (std::size_t k = 0; k < count; ++k) {
      u64 idx = below(pool.size());
      out.push_back(pool[idx]);
      pool.erase(pool.begin() + (std::ptrdiff_t)idx);
    }
    return out;
  }
};

} // namespace kzc
