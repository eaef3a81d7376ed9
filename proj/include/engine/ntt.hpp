#pragma once
// Number-theoretic transform over the prime 2^64 - 2^32 + 1 (order-2^32 roots
// of unity, generator 7). Used as an exact convolution backend: inputs are
// small nonnegative integers whose convolution sums stay far below the
// modulus, so the result is the true integer convolution.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "engine/fp.hpp"

namespace kzc::ntt {

constexpr u64 P = 0xFFFFFFFF00000001ULL; // 2^64 - 2^32 + 1
constexpr u64 GEN = 7;

inline u64 add(u64 a, u64 b) {
  u64 s = a + b;
  if (s < a || s >= P) s -= P; // wrap means we exceeded 2^64 > P, subtract P
  return s;
}
inline u64 sub(u64 a, u64 b) { return a >= b ? a - b : a + P - b; }

// Reduce a 128-bit value using 2^64 = 2^32 - 1, 2^96 = -1 (mod P).
inline u64 reduce128(u128 x) {
  u64 lo = (u64)x;
  u64 hi = (u64)(x >> 64);
  u64 hi_hi = hi >> 32;   // weight 2^96 -> -1
  u64 hi_lo = hi & 0xFFFFFFFFULL; // weight 2^64 -> 2^32 - 1
  u64 t = hi_lo * 0xFFFFFFFFULL;  // fits: < 2^64
  u64 r = lo + t;
  if (r < lo || r >= P) r -= P;
  r = sub(r, hi_hi);
  return r;
}
inline u64 mul(u64 a, u64 b) { return reduce128((u128)a * b); }
inline u64 pw(u64 a, u64 e) {
  u64 r = 1;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}
inline u64 inv(u64 a) { return pw(a, P - 2); }

// In-place iterative radix-2 NTT; size must be a power of two <= 2^32.
inline void transform(std::vector<u64>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)))
    throw std::invalid_argument("ntt: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    u64 w = pw(GEN, (P - 1) / len);
    if (inverse) w = inv(w);
    for (std::size_t i = 0; i < n; i += len) {
      u64 wn = 1;
      for (std::size_t k = 0; k < len / 2; ++k) {
        u64 u = a[i + k], v = mul(a[i + k + len / 2], wn);
        a[i + k] = add(u, v);
        a[i + k + len / 2] = sub(u, v);
        wn = mul(wn, w);
      }
    }
  }
  if (inverse) {
    u64 ninv = inv((u64)n);
    for (auto& x : a) x = mul(x, ninv);
  }
}

// Exact integer convolution of two nonnegative integer sequences, assuming
// every output coefficient is < P. Output length = |a| + |b| - 1.
inline std::vector<u64> convolve(std::vector<u64> a, std::vector<u64> b) {
  if (a.empty() || b.empty()) return {};
  std::size_t need = a.size() + b.size() - 1, sz = 1;
  while (sz < need) sz <<= 1;
  a.resize(sz);
  b.resize(sz);
  transform(a, false);
  transform(b, false);
  for (std::size_t i = 0; i < sz; ++i) a[i] = mul(a[i], b[i]);
  transform(a, true);
  a.resize(need);
  return a;
}

} // namespace kzc::ntt
