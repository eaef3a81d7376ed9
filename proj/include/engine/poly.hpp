#pragma once
// Sparse multivariate polynomials with a fixed variable layout:
// a t-block of size r followed by a z-block of size n (t1<...<tr<z1<...<zn).
// Terms are kept sorted lexicographically by exponent vector with no stored
// zero coefficients. Multiplication dispatches between sparse accumulation
// and a dense Kronecker-substitution NTT path for large prime-field operands.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "engine/fp.hpp"
#include "engine/ntt.hpp"

namespace kzc {

using u16 = std::uint16_t;

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

template <class F>
struct MultiPoly {
  using Elem = typename F::Elem;
  int r = 0; // number of t-variables
  int n = 0; // number of z-variables
  std::vector<u16> exps; // nterms * (r+n), lex-sorted
  std::vector<Elem> coeffs;

  int vars() const { return r + n; }
  std::size_t size() const { return coeffs.size(); }
  bool is_zero() const { return coeffs.empty(); }
  const u16* exp(std::size_t i) const { return exps.data() + i * (std::size_t)vars(); }
};

namespace detail {
inline int lex_cmp(const u16* a, const u16* b, int v) {
  for (int k = 0; k < v; ++k) {
    if (a[k] != b[k]) return a[k] < b[k] ? -1 : 1;
  }
  return 0;
}
} // namespace detail

template <class F>
MultiPoly<F> make_zero(int r, int n) {
  MultiPoly<F> p;
  p.r = r;
  p.n = n;
  return p;
}

// Build a polynomial from an unsorted term list; combines duplicates.
template <class F>
MultiPoly<F> from_terms(const F& K, int r, int n,
                        std::vector<std::pair<std::vector<u16>, typename F::Elem>> terms) {
  const int v = r + n;
  for (auto& t : terms)
    if ((int)t.first.size() != v) throw std::invalid_argument("from_terms: bad exponent length");
  std::sort(terms.begin(), terms.end(),
            [&](auto& a, auto& b) { return detail::lex_cmp(a.first.data(), b.first.data(), v) < 0; });
  MultiPoly<F> p = make_zero<F>(r, n);
  std::size_t i = 0;
  while (i < terms.size()) {
    auto cur = terms[i].second;
    std::size_t j = i + 1;
    while (j < terms.size() &&
           detail::lex_cmp(terms[i].first.data(), terms[j].first.data(), v) == 0) {
      cur = K.add(cur, terms[j].second);
      ++j;
    }
    if (!K.is_zero(cur)) {
      p.exps.insert(p.exps.end(), terms[i].first.begin(), terms[i].first.end());
      p.coeffs.push_back(cur);
    }
    i = j;
  }
  return p;
}

template <class F>
MultiPoly<F> monomial(const F& K, int r, int n, const std::vector<u16>& e,
                      typename F::Elem c) {
  return from_terms<F>(K, r, n, {{e, c}});
}

template <class F>
MultiPoly<F> constant(const F& K, int r, int n, typename F::Elem c) {
  return monomial<F>(K, r, n, std::vector<u16>(r + n, 0), c);
}

template <class F>
bool equal(const MultiPoly<F>& a, const MultiPoly<F>& b) {
  return a.r == b.r && a.n == b.n && a.exps == b.exps && a.coeffs == b.coeffs;
}

template <class F>
void check_layout(const MultiPoly<F>& a, const MultiPoly<F>& b) {
  if (a.r != b.r || a.n != b.n)
    throw std::invalid_argument("variable layout mismatch");
}

template <class F>
MultiPoly<F> add(const F& K, const MultiPoly<F>& a, const MultiPoly<F>& b) {
  check_layout(a, b);
  const int v = a.vars();
  MultiPoly<F> out = make_zero<F>(a.r, a.n);
  out.exps.reserve(a.exps.size() + b.exps.size());
  out.coeffs.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c;
    if (i >= a.size()) c = 1;
    else if (j >= b.size()) c = -1;
    else c = detail::lex_cmp(a.exp(i), b.exp(j), v);
    if (c < 0) {
      out.exps.insert(out.exps.end(), a.exp(i), a.exp(i) + v);
      out.coeffs.push_back(a.coeffs[i]);
      ++i;
    } else if (c > 0) {
      out.exps.insert(out.exps.end(), b.exp(j), b.exp(j) + v);
      out.coeffs.push_back(b.coeffs[j]);
      ++j;
    } else {
      auto s = K.add(a.coeffs[i], b.coeffs[j]);
      if (!K.is_zero(s)) {
        out.exps.insert(out.exps.end(), a.exp(i), a.exp(i) + v);
        out.coeffs.push_back(s);
      }
      ++i;
      ++j;
    }
  }
  return out;
}

template <class F>
MultiPoly<F> scale(const F& K, const MultiPoly<F>& a, typename F::Elem c) {
  if (K.is_zero(c)) return make_zero<F>(a.r, a.n);
  MultiPoly<F> out = a;
  for (auto& x : out.coeffs) x = K.mul(x, c);
  return out;
}

template <class F>
MultiPoly<F> negate(const F& K, const MultiPoly<F>& a) {
  MultiPoly<F> out = a;
  for (auto& x : out.coeffs) x = K.neg(x);
  return out;
}

template <class F>
MultiPoly<F> sub(const F& K, const MultiPoly<F>& a, const MultiPoly<F>& b) {
  return add(K, a, negate(K, b));
}

template <class F>
int total_degree(const MultiPoly<F>& a) {
  int d = -1;
  const int v = a.vars();
  for (std::size_t i = 0; i < a.size(); ++i) {
    int s = 0;
    for (int k = 0; k < v; ++k) s += a.exp(i)[k];
    d = std::max(d, s);
  }
  return d; // -1 for the zero polynomial
}

template <class F>
bool is_homogeneous(const MultiPoly<F>& a) {
  if (a.is_zero()) return true;
  const int v = a.vars();
  int d0 = -1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    int s = 0;
    for (int k = 0; k < v; ++k) s += a.exp(i)[k];
    if (d0 < 0) d0 = s;
    else if (s != d0) return false;
  }
  return true;
}

template <class F>
std::vector<int> var_caps(const MultiPoly<F>& a) {
  const int v = a.vars();
  std::vector<int> caps(v, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int k = 0; k < v; ++k) caps[k] = std::max(caps[k], (int)a.exp(i)[k]);
  return caps;
}

// ---------------------------------------------------------------------------
// Multiplication
// ---------------------------------------------------------------------------

namespace detail {

// Generic sparse multiply via ordered-map accumulation.
template <class F>
MultiPoly<F> mul_map(const F& K, const MultiPoly<F>& a, const MultiPoly<F>& b) {
  const int v = a.vars();
  std::map<std::vector<u16>, typename F::Elem> acc;
  std::vector<u16> e(v);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const u16* ea = a.exp(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const u16* eb = b.exp(j);
      for (int k = 0; k < v; ++k) e[k] = (u16)(ea[k] + eb[k]);
      auto it = acc.find(e);
      auto pr = K.mul(a.coeffs[i], b.coeffs[j]);
      if (it == acc.end()) acc.emplace(e, pr);
      else it->second = K.add(it->second, pr);
    }
  }
  MultiPoly<F> out = make_zero<F>(a.r, a.n);
  for (auto& [ee, c] : acc) {
    if (K.is_zero(c)) continue;
    out.exps.insert(out.exps.end(), ee.begin(), ee.end());
    out.coeffs.push_back(c);
  }
  return out;
}

// Open-addressing hash table over u128 packed exponent keys (9 bits/var).
struct PackedAccumulator {
  std::vector<u128> keys;
  std::vector<u64> vals;
  std::vector<char> used;
  std::size_t mask;
  explicit PackedAccumulator(std::size_t expect) {
    std::size_t sz = 16;
    while (sz < expect * 2) sz <<= 1;
    keys.resize(sz);
    vals.resize(sz);
    used.assign(sz, 0);
    mask = sz - 1;
  }
  static std::size_t hash(u128 k) {
    u64 x = (u64)k ^ (u64)(k >> 64) * 0x9E3779B97F4A7C15ULL;
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDULL;
    x ^= x >> 33;
    return (std::size_t)x;
  }
  void grow() {
    PackedAccumulator bigger(count * 2 + 16);
    for (std::size_t i = 0; i <= mask; ++i)
      if (used[i]) bigger.insert_raw(keys[i], vals[i]);
    bigger.count = count;
    *this = std::move(bigger);
  }
  void insert_raw(u128 k, u64 v) {
    std::size_t h = hash(k) & mask;
    while (used[h]) h = (h + 1) & mask;
    used[h] = 1;
    keys[h] = k;
    vals[h] = v;
  }
  std::size_t count = 0;
  void accumulate(const Fp& K, u128 k, u64 v) {
    std::size_t h = hash(k) & mask;
    while (used[h]) {
      if (keys[h] == k) {
        vals[h] = K.add(vals[h], v);
        return;
      }
      h = (h + 1) & mask;
    }
    used[h] = 1;
    keys[h] = k;
    vals[h] = v;
    if (++count * 2 > mask) grow();
  }
};

inline MultiPoly<Fp> mul_packed(const Fp& K, const MultiPoly<Fp>& a,
                                const MultiPoly<Fp>& b) {
  const int v = a.vars();
  std::vector<u128> ka(a.size()), kb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    u128 k = 0;
    for (int t = 0; t < v; ++t) k = (k << 9) | a.exp(i)[t];
    ka[i] = k;
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    u128 k = 0;
    for (int t = 0; t < v; ++t) k = (k << 9) | b.exp(j)[t];
    kb[j] = k;
  }
  PackedAccumulator acc(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      acc.accumulate(K, ka[i] + kb[j], K.mul(a.coeffs[i], b.coeffs[j]));
  std::vector<std::pair<std::vector<u16>, u64>> terms;
  terms.reserve(acc.count);
  for (std::size_t h = 0; h <= acc.mask; ++h) {
    if (!acc.used[h] || acc.vals[h] == 0) continue;
    std::vector<u16> e(v);
    u128 k = acc.keys[h];
    for (int t = v - 1; t >= 0; --t) {
      e[t] = (u16)(k & 0x1FF);
      k >>= 9;
    }
    terms.emplace_back(std::move(e), acc.vals[h]);
  }
  return from_terms<Fp>(K, a.r, a.n, std::move(terms));
}

constexpr std::size_t KRON_SLOT_LIMIT = std::size_t(1) << 26;

inline bool kron_feasible(const MultiPoly<Fp>& a, const MultiPoly<Fp>& b,
                          std::vector<std::size_t>& radix_out, int& drop_out) {
  if (!is_homogeneous(a) || !is_homogeneous(b)) return false;
  auto ca = var_caps(a), cb = var_caps(b);
  const int v = a.vars();
  std::vector<std::size_t> s(v);
  int drop = 0;
  for (int k = 0; k < v; ++k) {
    s[k] = (std::size_t)ca[k] + cb[k] + 1;
    if (s[k] > s[drop]) drop = k;
  }
  u128 total = 1;
  for (int k = 0; k < v; ++k) {
    if (k == drop) continue;
    total *= s[k];
    if (total > (u128)KRON_SLOT_LIMIT) return false;
  }
  radix_out = s;
  drop_out = drop;
  return true;
}

// Dense Kronecker-substitution multiply for homogeneous operands; the
// largest-cap variable is eliminated via homogeneity and restored afterwards.
inline MultiPoly<Fp> mul_kronecker(const Fp& K, const MultiPoly<Fp>& a,
                                   const MultiPoly<Fp>& b,
                                   const std::vector<std::size_t>& radix, int drop) {
  const int v = a.vars();
  const int Dc = total_degree(a) + total_degree(b);
  std::vector<std::size_t> weight(v, 0);
  std::size_t N = 1;
  for (int k = v - 1; k >= 0; --k) {
    if (k == drop) continue;
    weight[k] = N;
    N *= radix[k];
  }
  auto pack = [&](const MultiPoly<Fp>& p) {
    std::size_t mx = 0;
    std::vector<u64> dense;
    std::vector<std::size_t> codes(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::size_t c = 0;
      for (int k = 0; k < v; ++k)
        if (k != drop) c += weight[k] * p.exp(i)[k];
      codes[i] = c;
      mx = std::max(mx, c);
    }
    dense.assign(mx + 1, 0);
    for (std::size_t i = 0; i < p.size(); ++i)
      dense[codes[i]] = K.add(dense[codes[i]], p.coeffs[i]);
    return dense;
  };
  std::vector<u64> da = pack(a), db = pack(b);
  std::vector<u64> conv = ntt::convolve(std::move(da), std::move(db));
  std::vector<std::pair<std::vector<u16>, u64>> terms;
  for (std::size_t code = 0; code < conv.size(); ++code) {
    u64 c = conv[code] % K.p;
    if (c == 0) continue;
    std::vector<u16> e(v, 0);
    std::size_t rest = code;
    int sum = 0;
    for (int k = 0; k < v; ++k) {
      if (k == drop) continue;
      e[k] = (u16)(rest / weight[k]);
      rest %= weight[k];
      sum += e[k];
    }
    e[drop] = (u16)(Dc - sum);
    terms.emplace_back(std::move(e), c);
  }
  return from_terms<Fp>(K, a.r, a.n, std::move(terms));
}

} // namespace detail

template <class F>
MultiPoly<F> mul(const F& K, const MultiPoly<F>& a, const MultiPoly<F>& b) {
  check_layout(a, b);
  if (a.is_zero() || b.is_zero()) return make_zero<F>(a.r, a.n);
  if constexpr (std::is_same_v<F, Fp>) {
    const u128 work = (u128)a.size() * b.size();
    if (work > 20'000'000) {
      std::vector<std::size_t> radix;
      int drop;
      if (detail::kron_feasible(a, b, radix, drop))
        return detail::mul_kronecker(K, a, b, radix, drop);
      if (work > 4'000'000'000ULL)
        throw BudgetExceeded("polynomial product too large: " +
                             std::to_string(a.size()) + " x " +
                             std::to_string(b.size()) + " terms");
    }
    auto caps = var_caps(a);
    auto cb = var_caps(b);
    bool packable = a.vars() <= 14;
    for (int k = 0; k < a.vars() && packable; ++k)
      if (caps[k] + cb[k] >= 512) packable = false;
    if (packable) return detail::mul_packed(K, a, b);
  }
  return detail::mul_map(K, a, b);
}

// ---------------------------------------------------------------------------
// Calculus / structural operations
// ---------------------------------------------------------------------------

template <class F>
MultiPoly<F> deriv(const F& K, const MultiPoly<F>& a, int var) {
  const int v = a.vars();
  std::vector<std::pair<std::vector<u16>, typename F::Elem>> terms;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const u16* e = a.exp(i);
    if (e[var] == 0) continue;
    auto c = K.mul(a.coeffs[i], K.from_int((i64)e[var]));
    if (K.is_zero(c)) continue;
    std::vector<u16> ne(e, e + v);
    ne[var] -= 1;
    terms.emplace_back(std::move(ne), c);
  }
  return from_terms<F>(K, a.r, a.n, std::move(terms));
}

template <class F>
typename F::Elem eval(const F& K, const MultiPoly<F>& a,
                      const std::vector<typename F::Elem>& pt) {
  const int v = a.vars();
  if ((int)pt.size() != v) throw std::invalid_argument("eval: bad point size");
  // Precompute power tables per variable.
  auto caps = var_caps(a);
  std::vector<std::vector<typename F::Elem>> pw(v);
  for (int k = 0; k < v; ++k) {
    pw[k].resize(caps[k] + 1);
    pw[k][0] = K.one();
    for (int d = 1; d <= caps[k]; ++d) pw[k][d] = K.mul(pw[k][d - 1], pt[k]);
  }
  auto acc = K.zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto term = a.coeffs[i];
    const u16* e = a.exp(i);
    for (int k = 0; k < v; ++k)
      if (e[k]) term = K.mul(term, pw[k][e[k]]);
    acc = K.add(acc, term);
  }
  return acc;
}

// Evaluate an Fp polynomial in an extension ring G via a coefficient lift.
template <class G>
typename G::Elem eval_lifted(const G& K, const MultiPoly<Fp>& a,
                             const std::vector<typename G::Elem>& pt) {
  const int v = a.vars();
  std::vector<int> caps = var_caps(a);
  std::vector<std::vector<typename G::Elem>> pw(v);
  for (int k = 0; k < v; ++k) {
    pw[k].resize(caps[k] + 1);
    pw[k][0] = K.one();
    for (int d = 1; d <= caps[k]; ++d) pw[k][d] = K.mul(pw[k][d - 1], pt[k]);
  }
  auto acc = K.zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto term = K.from_int((i64)a.coeffs[i]);
    const u16* e = a.exp(i);
    for (int k = 0; k < v; ++k)
      if (e[k]) term = K.mul(term, pw[k][e[k]]);
    acc = K.add(acc, term);
  }
  return acc;
}

// Substitute variable vi := value of variable vj (identification of variables).
template <class F>
MultiPoly<F> identify_vars(const F& K, const MultiPoly<F>& a, int vi, int vj) {
  const int v = a.vars();
  std::vector<std::pair<std::vector<u16>, typename F::Elem>> terms;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<u16> e(a.exp(i), a.exp(i) + v);
    e[vj] = (u16)(e[vj] + e[vi]);
    e[vi] = 0;
    terms.emplace_back(std::move(e), a.coeffs[i]);
  }
  return from_terms<F>(K, a.r, a.n, std::move(terms));
}

// Multiply by (x_vi - x_vj).
template <class F>
MultiPoly<F> mul_linear_diff(const F& K, const MultiPoly<F>& a, int vi, int vj) {
  const int v = a.vars();
  std::vector<std::pair<std::vector<u16>, typename F::Elem>> terms;
  terms.reserve(a.size() * 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<u16> e1(a.exp(i), a.exp(i) + v), e2 = e1;
    e1[vi] += 1;
    e2[vj] += 1;
    terms.emplace_back(std::move(e1), a.coeffs[i]);
    terms.emplace_back(std::move(e2), K.neg(a.coeffs[i]));
  }
  return from_terms<F>(K, a.r, a.n, std::move(terms));
}

// Exact division by (x_vi - x_vj); throws std::domain_error if not divisible.
// Synthetic division viewing the polynomial as univariate in x_vi.
template <class F>
MultiPoly<F> div_linear_diff(const F& K, const MultiPoly<F>& a, int vi, int vj) {
  const int v = a.vars();
  if (a.is_zero()) return a;
  int dmax = 0;
  for (std::size_t i = 0; i < a.size(); ++i) dmax = std::max(dmax, (int)a.exp(i)[vi]);
  // Bucket terms by x_vi exponent, stripping that exponent.
  std::vector<std::vector<std::pair<std::vector<u16>, typename F::Elem>>> buck(dmax + 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::vector<u16> e(a.exp(i), a.exp(i) + v);
    int d = e[vi];
    e[vi] = 0;
    buck[d].emplace_back(std::move(e), a.coeffs[i]);
  }
  auto bucket_poly = [&](int d) { return from_terms<F>(K, a.r, a.n, buck[d]); };
  // q_{k} = f_{k+1} + x_vj * q_{k+1}; remainder = f_0 + x_vj * q_0 must vanish.
  std::vector<MultiPoly<F>> q(dmax);
  MultiPoly<F> carry = make_zero<F>(a.r, a.n);
  for (int k = dmax - 1; k >= 0; --k) {
    MultiPoly<F> fk1 = bucket_poly(k + 1);
    MultiPoly<F> shifted = carry;
    if (!shifted.is_zero()) {
      for (std::size_t i = 0; i < shifted.size(); ++i)
        shifted.exps[i * v + vj] += 1;
    }
    q[k] = add(K, fk1, shifted);
    carry = q[k];
  }
  MultiPoly<F> rem = bucket_poly(0);
  if (!carry.is_zero()) {
    MultiPoly<F> shifted = carry;
    for (std::size_t i = 0; i < shifted.size(); ++i)
      shifted.exps[i * v + vj] += 1;
    rem = add(K, rem, shifted);
  }
  if (!rem.is_zero()) throw std::domain_error("div_linear_diff: not divisible");
  // Reassemble quotient: sum_k q_k * x_vi^k.
  std::vector<std::pair<std::vector<u16>, typename F::Elem>> terms;
  for (int k = 0; k < dmax; ++k) {
    for (std::size_t i = 0; i < q[k].size(); ++i) {
      std::vector<u16> e(q[k].exp(i), q[k].exp(i) + v);
      e[vi] = (u16)(e[vi] + k);
      terms.emplace_back(std::move(e), q[k].coeffs[i]);
    }
  }
  return from_terms<F>(K, a.r, a.n, std::move(terms));
}

// Apply a permutation to the z-block: z_a -> z_{perm[a]} (perm is 0-based on n).
template <class F>
MultiPoly<F> permute_z(const F& K, const MultiPoly<F>& a, const std::vector<int>& perm) {
  const int v = a.vars();
  if ((int)perm.size() != a.n) throw std::invalid_argument("permute_z: bad perm size");
  std::vector<std::pair<std::vector<u16>, typename F::Elem>> terms;
  terms.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const u16* e = a.exp(i);
    std::vector<u16> ne(e, e + v);
    for (int k = 0; k < a.n; ++k) ne[a.r + perm[k]] = e[a.r + k];
    terms.emplace_back(std::move(ne), a.coeffs[i]);
  }
  return from_terms<F>(K, a.r, a.n, std::move(terms));
}

// Extract the coefficient of t_1^{e_1} ... t_r^{e_r}; result has an empty t-block.
template <class F>
MultiPoly<F> t_coefficient(const F& K, const MultiPoly<F>& a, const std::vector<int>& te) {
  if ((int)te.size() != a.r) throw std::invalid_argument("t_coefficient: bad index length");
  const int v = a.vars();
  std::vector<std::pair<std::vector<u16>, typename F::Elem>> terms;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const u16* e = a.exp(i);
    bool match = true;
    for (int k = 0; k < a.r && match; ++k) match = ((int)e[k] == te[k]);
    if (!match) continue;
    terms.emplace_back(std::vector<u16>(e + a.r, e + v), a.coeffs[i]);
  }
  return from_terms<F>(K, 0, a.n, std::move(terms));
}

// Coefficient of t_1^{p l_1 - 1} ... t_r^{p l_r - 1}.
template <class F>
MultiPoly<F> p_integral(const F& K, const MultiPoly<F>& a, u64 p,
                        const std::vector<int>& ell) {
  if ((int)ell.size() != a.r)
    throw std::invalid_argument("p_integral: index count differs from t-block size");
  std::vector<int> te(a.r);
  for (int k = 0; k < a.r; ++k) {
    if (ell[k] < 1) throw std::invalid_argument("p_integral: indices must be >= 1");
    te[k] = (int)(p * (u64)ell[k] - 1);
  }
  return t_coefficient(K, a, te);
}

namespace detail {
inline void permutations_with_sign(int r, std::vector<std::pair<std::vector<int>, int>>& out) {
  std::vector<int> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    int inv = 0;
    for (int i = 0; i < r; ++i)
      for (int j = i + 1; j < r; ++j)
        if (perm[i] > perm[j]) ++inv;
    out.emplace_back(perm, inv % 2 == 0 ? 1 : -1);
  } while (std::next_permutation(perm.begin(), perm.end()));
}
} // namespace detail

// Sum over all permutations of the t-block, with sign (antisymmetrize) or
// without (symmetrize).
template <class F>
MultiPoly<F> t_symmetrization(const F& K, const MultiPoly<F>& a, bool with_sign) {
  const int v = a.vars();
  std::vector<std::pair<std::vector<int>, int>> perms;
  detail::permutations_with_sign(a.r, perms);
  std::vector<std::pair<std::vector<u16>, typename F::Elem>> terms;
  terms.reserve(a.size() * perms.size());
  for (auto& [perm, sg] : perms) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const u16* e = a.exp(i);
      std::vector<u16> ne(e, e + v);
      for (int k = 0; k < a.r; ++k) ne[perm[k]] = e[k];
      auto c = a.coeffs[i];
      if (with_sign && sg < 0) c = K.neg(c);
      terms.emplace_back(std::move(ne), c);
    }
  }
  return from_terms<F>(K, a.r, a.n, std::move(terms));
}

template <class F>
MultiPoly<F> antisymmetrize_t(const F& K, const MultiPoly<F>& a) {
  return t_symmetrization(K, a, true);
}
template <class F>
MultiPoly<F> symmetrize_t(const F& K, const MultiPoly<F>& a) {
  return t_symmetrization(K, a, false);
}

// Textual serialization: `coeff * t1^a1 ... zN^bN` terms, '+'-joined,
// sorted by exponent vector.
template <class F>
std::string dump(const F& K, const MultiPoly<F>& a) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) os << " + ";
    os << K.to_string(a.coeffs[i]);
    const u16* e = a.exp(i);
    for (int k = 0; k < a.r; ++k)
      if (e[k]) os << " * t" << (k + 1) << "^" << e[k];
    for (int k = 0; k < a.n; ++k)
      if (e[a.r + k]) os << " * z" << (k + 1) << "^" << e[a.r + k];
  }
  return os.str();
}

} // namespace kzc
