#pragma once
// Prime-field arithmetic with a runtime odd-prime modulus.

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kzc {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline bool is_prime_u64(u64 v) {
  if (v < 2) return false;
  for (u64 d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

// Runtime prime field F_p. Elements are residues in [0, p).
struct Fp {
  using Elem = u64;
  u64 p;

  explicit Fp(u64 prime) : p(prime) {
    if (prime < 3 || !is_prime_u64(prime))
      throw std::invalid_argument("Fp: modulus must be an odd prime >= 3, got " +
                                  std::to_string(prime));
  }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool is_zero(Elem a) const { return a == 0; }
  Elem add(Elem a, Elem b) const {
    u64 s = a + b;
    return s >= p ? s - p : s;
  }
  Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p - b; }
  Elem neg(Elem a) const { return a == 0 ? 0 : p - a; }
  Elem mul(Elem a, Elem b) const { return (u128)a * b % p; }
  Elem pow(Elem a, u64 e) const {
    Elem r = 1;
    a %= p;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  Elem inv(Elem a) const {
    if (a == 0) throw std::domain_error("Fp::inv of zero");
    return pow(a, p - 2);
  }
  // Image of a (possibly negative) machine integer.
  Elem from_int(i64 v) const {
    i64 m = v % (i64)p;
    if (m < 0) m += (i64)p;
    return (u64)m;
  }
  bool eq(Elem a, Elem b) const { return a == b; }
  std::string to_string(Elem a) const { return std::to_string(a); }
};

} // namespace kzc
