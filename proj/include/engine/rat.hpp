#pragma once
// Exact rational arithmetic (GMP) behind the same field interface as Fp.

#include <gmpxx.h>

#include <stdexcept>
#include <string>

#include "engine/fp.hpp"

namespace kzc {

struct Rat {
  using Elem = mpq_class;

  Elem zero() const { return Elem(0); }
  Elem one() const { return Elem(1); }
  bool is_zero(const Elem& a) const { return a == 0; }
  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem inv(const Elem& a) const {
    if (a == 0) throw std::domain_error("Rat::inv of zero");
    return 1 / a;
  }
  Elem pow(Elem a, u64 e) const {
    Elem r(1);
    while (e) {
      if (e & 1) r *= a;
      a *= a;
      e >>= 1;
    }
    return r;
  }
  Elem from_int(i64 v) const { return Elem((long)v); }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }
  std::string to_string(const Elem& a) const { return a.get_str(); }
};

// Reduce a rational mod p. Throws if the denominator vanishes mod p
// (such a prime is exceptional for the construction at hand).
inline u64 rat_mod_p(const Fp& F, const mpq_class& q) {
  mpz_class num = q.get_num(), den = q.get_den();
  mpz_class pz((unsigned long)F.p);
  mpz_class nm = num % pz, dm = den % pz;
  if (dm < 0) dm += pz;
  if (nm < 0) nm += pz;
  u64 d = dm.get_ui();
  if (d == 0)
    throw std::domain_error("rational with denominator divisible by p=" +
                            std::to_string(F.p));
  return F.mul(nm.get_ui(), F.inv(d));
}

} // namespace kzc
