#pragma once
// Extension field F_{p^k} = F_p[x]/(f) for polynomial identity testing when
// the base prime is small relative to the degrees involved. The modulus f is
// found deterministically: the lexicographically first monic irreducible of
// degree k (coefficients enumerated low-to-high).

#include <stdexcept>
#include <string>
#include <vector>

#include "engine/fp.hpp"

namespace kzc {

struct ExtField {
  using Elem = std::vector<u64>; // length k, coefficients of 1, x, ..., x^{k-1}
  Fp base;
  int k;
  std::vector<u64> modulus; // monic, length k+1

  ExtField(const Fp& F, int deg) : base(F), k(deg) {
    if (deg < 1) throw std::invalid_argument("ExtField: degree must be >= 1");
    modulus = find_irreducible(deg);
  }

  u64 order_log() const { return (u64)k; } // field size is p^k

  Elem zero() const { return Elem(k, 0); }
  Elem one() const {
    Elem e(k, 0);
    e[0] = 1;
    return e;
  }
  bool is_zero(const Elem& a) const {
    for (auto c : a)
      if (c) return false;
    return true;
  }
  Elem from_int(i64 v) const {
    Elem e(k, 0);
    e[0] = base.from_int(v);
    return e;
  }
  Elem from_base(u64 v) const {
    Elem e(k, 0);
    e[0] = v % base.p;
    return e;
  }
  Elem gen() const { // the class of x (a generator of the extension as a ring)
    Elem e(k, 0);
    if (k == 1) e[0] = modulus[0] ? base.neg(modulus[0]) : 0;
    else e[1] = 1;
    return e;
  }
  Elem add(const Elem& a, const Elem& b) const {
    Elem r(k);
    for (int i = 0; i < k; ++i) r[i] = base.add(a[i], b[i]);
    return r;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem r(k);
    for (int i = 0; i < k; ++i) r[i] = base.sub(a[i], b[i]);
    return r;
  }
  Elem neg(const Elem& a) const {
    Elem r(k);
    for (int i = 0; i < k; ++i) r[i] = base.neg(a[i]);
    return r;
  }
  Elem mul(const Elem& a, const Elem& b) const {
    std::vector<u64> prod(2 * k - 1, 0);
    for (int i = 0; i < k; ++i) {
      if (!a[i]) continue;
      for (int j = 0; j < k; ++j)
        if (b[j]) prod[i + j] = base.add(prod[i + j], base.mul(a[i], b[j]));
    }
    // Reduce by the monic modulus.
    for (int d = 2 * k - 2; d >= k; --d) {
      u64 c = prod[d];
      if (!c) continue;
      prod[d] = 0;
      for (int j = 0; j < k; ++j)
        prod[d - k + j] = base.sub(prod[d - k + j], base.mul(c, modulus[j]));
    }
    prod.resize(k);
    return prod;
  }
  Elem pow(Elem a, u128 e) const {
    Elem r = one();
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  Elem inv(const Elem& a) const {
    if (is_zero(a)) throw std::domain_error("ExtField::inv of zero");
    u128 q = 1;
    for (int i = 0; i < k; ++i) q *= base.p;
    return pow(a, q - 2);
  }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }
  std::string to_string(const Elem& a) const {
    std::string s = "[";
    for (int i = 0; i < k; ++i) s += (i ? "," : "") + std::to_string(a[i]);
    return s + "]";
  }

 private:
  // Test irreducibility of a monic degree-k polynomial over F_p by checking
  // gcd(x^{p^d} - x, f) = 1 for all d <= k/2.
  bool irreducible(const std::vector<u64>& f) const {
    auto polymod = [&](std::vector<u64> a) {
      for (int d = (int)a.size() - 1; d >= k; --d) {
        u64 c = a[d];
        if (!c) continue;
        a[d] = 0;
        for (int j = 0; j < k; ++j)
          a[d - k + j] = base.sub(a[d - k + j], base.mul(c, f[j]));
      }
      a.resize(k);
      return a;
    };
    auto pmul = [&](const std::vector<u64>& a, const std::vector<u64>& b) {
      std::vector<u64> r(a.size() + b.size() - 1, 0);
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i])
          for (std::size_t j = 0; j < b.size(); ++j)
            if (b[j]) r[i + j] = base.add(r[i + j], base.mul(a[i], b[j]));
      return polymod(std::move(r));
    };
    auto ppow_p = [&](std::vector<u64> a) { // a^p mod f
      std::vector<u64> r(k, 0);
      r[0] = 1;
      u64 e = base.p;
      while (e) {
        if (e & 1) r = pmul(r, a);
        a = pmul(a, a);
        e >>= 1;
      }
      return r;
    };
    auto gcd_deg = [&](std::vector<u64> a, std::vector<u64> b) {
      auto deg = [&](const std::vector<u64>& v) {
        for (int d = (int)v.size() - 1; d >= 0; --d)
          if (v[d]) return d;
        return -1;
      };
      while (true) {
        int db = deg(b);
        if (db < 0) return deg(a);
        int da = deg(a);
        while (da >= db) {
          u64 f2 = base.mul(a[da], base.inv(b[db]));
          for (int j = 0; j <= db; ++j)
            a[da - db + j] = base.sub(a[da - db + j], base.mul(f2, b[j]));
          da = deg(a);
        }
        std::swap(a, b);
      }
    };
    std::vector<u64> xp(k, 0); // iterate Frobenius images of x
    if (k == 1) return true;
    xp[1] = 1;
    std::vector<u64> fr = xp;
    for (int d = 1; d <= k / 2; ++d) {
      fr = ppow_p(fr); // x^{p^d} mod f
      std::vector<u64> diff = fr;
      diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
      diff[1] = base.sub(diff[1], 1); // x^{p^d} - x
      std::vector<u64> ff = f;
      if (gcd_deg(diff, ff) > 0) return false;
    }
    return true;
  }

  std::vector<u64> find_irreducible(int deg) const {
    std::vector<u64> f(deg + 1, 0);
    f[deg] = 1;
    // Enumerate constant-first; guaranteed to find one (count > 0).
    while (true) {
      if (irreducible(f)) return f;
      int i = 0;
      while (i < deg && ++f[i] == base.p) f[i++] = 0;
      if (i == deg) throw std::logic_error("no irreducible polynomial found");
    }
  }
};

} // namespace kzc
