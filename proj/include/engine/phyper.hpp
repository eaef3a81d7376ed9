#pragma once
// The p-hypergeometric solution families. Every family arises from one master
// shape: apply Sym or Ant over the t-variables to
//     A(t) * prod_j Psi(t_j, z)^m / (t_j - z_{i_j}),
// then extract the coefficient of prod_j t_j^{p*l_j - 1}. Because the t-block
// is a product of one-variable factors, each coordinate is assembled directly
// from the cached t-coefficient slices c_i(k) of Psi^m / (t - z_i):
//     coord(l, i) = sum_{sigma} w(sigma) sum_{d in supp A} A_d
//                      prod_j c_{i_j}(p*l_{sigma(j)} - 1 - d_j),
// which avoids ever expanding the multi-t polynomial.

#include <map>
#include <stdexcept>
#include <vector>

#include "engine/kz.hpp"
#include "engine/poly.hpp"
#include "engine/weightspace.hpp"

namespace kzc {

enum class Family { N, M, BarN, BarM, TildeM };

enum class Prefactor { One, Vdm, VdmPow, VdmFrob };

struct FamilyTraits {
  int kappa;            // which connection the family solves
  bool bar;             // Psi exponent (p+1)/2 instead of (p-1)/2
  bool sym_op;          // Sym instead of Ant over the t-block
  Prefactor prefactor;  // extra alternating factor in the master shape
  bool wedge_carrier;   // values in the wedge power instead of the weight space
  bool ell_skew;        // coordinates skew (vs symmetric) in the l-indices
};

inline FamilyTraits family_traits(Family f) {
  switch (f) {
    case Family::N: return {2, false, false, Prefactor::Vdm, false, true};
    case Family::M: return {2, false, false, Prefactor::One, true, true};
    case Family::BarN: return {-2, true, true, Prefactor::VdmPow, false, false};
    case Family::BarM: return {-2, true, false, Prefactor::One, true, true};
    case Family::TildeM: return {-2, true, true, Prefactor::VdmFrob, true, false};
  }
  throw std::logic_error("family_traits: unreachable");
}

inline std::string family_name(Family f) {
  switch (f) {
    case Family::N: return "N";
    case Family::M: return "M";
    case Family::BarN: return "barN";
    case Family::BarM: return "barM";
    case Family::TildeM: return "tildeM";
  }
  return "?";
}

inline int psi_exponent(Family f, u64 p) {
  return (int)((family_traits(f).bar ? p + 1 : p - 1) / 2);
}

// The Vandermonde determinant in the t-block, layout (r, 0).
inline MultiPoly<Fp> vandermonde_t(const Fp& F, int r) {
  MultiPoly<Fp> v = constant<Fp>(F, r, 0, 1);
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) v = mul_linear_diff(F, v, i, j);
  return v;
}

// The prefactor A(t) of a family, expanded as a t-polynomial (layout (r, 0)).
inline MultiPoly<Fp> prefactor_poly(const Fp& F, Family fam, int r) {
  switch (family_traits(fam).prefactor) {
    case Prefactor::One: return constant<Fp>(F, r, 0, 1);
    case Prefactor::Vdm: return vandermonde_t(F, r);
    case Prefactor::VdmPow: {
      auto v = vandermonde_t(F, r);
      MultiPoly<Fp> out = constant<Fp>(F, r, 0, 1);
      for (u64 e = 0; e < F.p - 1; ++e) out = mul(F, out, v);
      return out;
    }
    case Prefactor::VdmFrob: {
      // prod_{i<j}(t_i^p - t_j^p): the Vandermonde with exponents scaled by p.
      auto v = vandermonde_t(F, r);
      for (auto& e : v.exps) e = (u16)((u64)e * F.p);
      return v;
    }
  }
  throw std::logic_error("prefactor_poly: unreachable");
}

// Cached t-coefficient slices of Psi(t,z)^m / (t - z_i) for every i.
struct SliceCache {
  int g = 0, n = 0, m = 0;
  // slice[i][k] = coefficient of t^k, a z-polynomial with layout (0, n).
  std::vector<std::vector<MultiPoly<Fp>>> slice;

  int tdeg() const { return m * n - 1; }

  static SliceCache build(const Fp& F, int g, int m) {
    SliceCache c;
    c.g = g;
    c.n = 2 * g + 1;
    c.m = m;
    // Psi^m with t as the single t-variable, raised by binary powering so the
    // large steps ride the dense multiplication path.
    MultiPoly<Fp> psi = constant<Fp>(F, 1, c.n, 1);
    for (int a = 0; a < c.n; ++a) psi = mul_linear_diff(F, psi, 0, 1 + a);
    MultiPoly<Fp> pw = constant<Fp>(F, 1, c.n, 1);
    MultiPoly<Fp> sq = psi;
    int e = m;
    while (e) {
      if (e & 1) pw = mul(F, pw, sq);
      e >>= 1;
      if (e) sq = mul(F, sq, sq);
    }
    c.slice.resize((std::size_t)c.n);
    for (int i = 0; i < c.n; ++i) {
      auto q = div_linear_diff(F, pw, 0, 1 + i);
      // Bucket the terms of q by t-exponent in one pass; within each t-slice
      // the z-part stays lex-sorted, so the buckets are valid polynomials.
      std::vector<MultiPoly<Fp>> buckets((std::size_t)c.tdeg() + 1, make_zero<Fp>(0, c.n));
      const int v = q.vars();
      for (std::size_t t = 0; t < q.size(); ++t) {
        const u16* ex = q.exp(t);
        auto& b = buckets[ex[0]];
        b.exps.insert(b.exps.end(), ex + 1, ex + v);
        b.coeffs.push_back(q.coeffs[t]);
      }
      c.slice[i] = std::move(buckets);
    }
    return c;
  }

  const MultiPoly<Fp>* at(int i, long k) const {
    if (k < 0 || k > tdeg()) return nullptr;
    const auto& s = slice[(std::size_t)i][(std::size_t)k];
    return s.is_zero() ? nullptr : &s;
  }
};

// One coordinate of a family, for arbitrary (possibly unsorted) index tuples.
inline MultiPoly<Fp> master_coordinate(const Fp& F, const SliceCache& C, const MultiPoly<Fp>& A,
                                       bool sym_op, const std::vector<int>& ell,
                                       const std::vector<int>& ivec) {
  const int r = (int)ivec.size();
  if ((int)ell.size() != r) throw std::invalid_argument("master_coordinate: arity mismatch");
  if (A.r != r) throw std::invalid_argument("master_coordinate: prefactor arity mismatch");
  std::vector<long> E(ell.size());
  for (int j = 0; j < r; ++j) {
    if (ell[j] < 1) throw std::invalid_argument("master_coordinate: indices must be >= 1");
    E[(std::size_t)j] = (long)F.p * ell[(std::size_t)j] - 1;
  }
  std::vector<std::pair<std::vector<int>, int>> perms;
  detail::permutations_with_sign(r, perms);
  MultiPoly<Fp> acc = make_zero<Fp>(0, C.n);
  for (auto& [perm, sg] : perms) {
    for (std::size_t term = 0; term < A.size(); ++term) {
      const u16* d = A.exp(term);
      std::vector<const MultiPoly<Fp>*> factors(r);
      bool dead = false;
      for (int j = 0; j < r && !dead; ++j) {
        factors[(std::size_t)j] = C.at(ivec[(std::size_t)j], E[(std::size_t)perm[j]] - d[j]);
        if (!factors[(std::size_t)j]) dead = true;
      }
      if (dead) continue;
      // Multiply smallest-first to keep intermediate sizes down.
      std::sort(factors.begin(), factors.end(),
                [](auto* a, auto* b) { return a->size() < b->size(); });
      MultiPoly<Fp> prod = *factors[0];
      for (int j = 1; j < r; ++j) prod = mul(F, prod, *factors[(std::size_t)j]);
      auto cf = A.coeffs[term];
      if (!sym_op && sg < 0) cf = F.neg(cf);
      acc = add(F, acc, scale(F, prod, cf));
    }
  }
  return acc;
}

// The carrier index sets of a family: sorted r-subsets of {0..n-1}.
inline std::vector<std::vector<int>> family_basis(Family fam, int g, int r) {
  auto t = family_traits(fam);
  return t.wedge_carrier ? WedgeSpace(2 * g + 1, r).basis : WeightSpace(g, r).basis;
}

// Build the solution vector for one l-tuple. Only the representative tuple
// (0,...,r-1) is assembled from polynomial products; the other coordinates
// follow by relabeling the z-variables, which commutes with the construction
// because Psi is symmetric in z.
inline PolyVector<Fp> build_solution(const Fp& F, Family fam, int g, int r,
                                     const std::vector<int>& ell, const SliceCache* cache = nullptr,
                                     const MultiPoly<Fp>* pref = nullptr) {
  if (r < 1) throw std::invalid_argument("build_solution: r must be >= 1");
  if (r > g) throw std::invalid_argument("build_solution: r must be <= g");
  if ((int)ell.size() != r) throw std::invalid_argument("build_solution: bad l-tuple length");
  const int n = 2 * g + 1;
  SliceCache local;
  if (!cache) {
    local = SliceCache::build(F, g, psi_exponent(fam, F.p));
    cache = &local;
  }
  MultiPoly<Fp> localpref;
  if (!pref) {
    localpref = prefactor_poly(F, fam, r);
    pref = &localpref;
  }
  auto traits = family_traits(fam);
  std::vector<int> rep(r);
  for (int j = 0; j < r; ++j) rep[(std::size_t)j] = j;
  auto repcoord = master_coordinate(F, *cache, *pref, traits.sym_op, ell, rep);
  auto basis = family_basis(fam, g, r);
  PolyVector<Fp> out;
  out.n = n;
  out.coords.reserve(basis.size());
  for (auto& J : basis) {
    if (repcoord.is_zero()) {
      out.coords.push_back(make_zero<Fp>(0, n));
      continue;
    }
    // Any permutation sending the representative tuple to J, order-preserved.
    std::vector<int> perm(n, -1);
    std::vector<char> taken(n, 0);
    for (int j = 0; j < r; ++j) {
      perm[(std::size_t)j] = J[(std::size_t)j];
      taken[(std::size_t)J[(std::size_t)j]] = 1;
    }
    int next = 0;
    for (int j = r; j < n; ++j) {
      while (taken[(std::size_t)next]) ++next;
      perm[(std::size_t)j] = next++;
    }
    out.coords.push_back(permute_z(F, repcoord, perm));
  }
  return out;
}

// Homogeneous degree of a (nonzero) coordinate of the family, from the shape.
inline long family_degree(const Fp& F, Family fam, int g, int r, const std::vector<int>& ell) {
  const long n = 2 * g + 1;
  const long m = psi_exponent(fam, F.p);
  long dega = 0;
  switch (family_traits(fam).prefactor) {
    case Prefactor::One: dega = 0; break;
    case Prefactor::Vdm: dega = (long)r * (r - 1) / 2; break;
    case Prefactor::VdmPow: dega = (long)(F.p - 1) * r * (r - 1) / 2; break;
    case Prefactor::VdmFrob: dega = (long)F.p * r * (r - 1) / 2; break;
  }
  long d = (long)r * (m * n - 1) + dega;
  for (int x : ell) d -= (long)F.p * x - 1;
  return d;
}

// The expansion of a TildeM solution in the BarM family:
//   TildeM^{l} = (-1)^{r(r-1)/2} sum_{sigma} sgn(sigma) BarM^{l + 1 - sigma},
// returned as coefficients on sorted l-tuples (skew-normalized); tuples with a
// repeated or non-positive entry contribute nothing.
inline std::map<std::vector<int>, i64> renumber_tilde(const std::vector<int>& ell) {
  const int r = (int)ell.size();
  std::vector<std::pair<std::vector<int>, int>> perms;
  detail::permutations_with_sign(r, perms);
  int global = (r * (r - 1) / 2) % 2 == 0 ? 1 : -1;
  std::map<std::vector<int>, i64> out;
  for (auto& [perm, sg] : perms) {
    std::vector<int> t(ell);
    bool dead = false;
    for (int j = 0; j < r; ++j) {
      t[(std::size_t)j] = ell[(std::size_t)j] - perm[(std::size_t)j]; // l_j + 1 - sigma_j
      if (t[(std::size_t)j] < 1) dead = true;
    }
    if (dead) continue;
    // Sort with sign; a repeated entry kills the term by skewness.
    int sortsign = 1;
    for (int x = 0; x < r; ++x)
      for (int y = 0; y < r - 1 - x; ++y)
        if (t[(std::size_t)y] > t[(std::size_t)y + 1]) {
          std::swap(t[(std::size_t)y], t[(std::size_t)y + 1]);
          sortsign = -sortsign;
        }
    bool dup = false;
    for (int x = 0; x + 1 < r; ++x)
      if (t[(std::size_t)x] == t[(std::size_t)x + 1]) dup = true;
    if (dup) continue;
    i64 c = (i64)global * sg * sortsign;
    out[t] += c;
    if (out[t] == 0) out.erase(t);
  }
  return out;
}

// Generic rank over K(z) of a list of polynomial vectors, measured as the
// maximal rank of evaluations at random points of a large extension field.
inline std::size_t generic_rank(const Fp& F, const std::vector<PolyVector<Fp>>& vecs, Rng& rng,
                                int tries = 3) {
  if (vecs.empty()) return 0;
  int d = 0;
  for (auto& v : vecs)
    for (auto& c : v.coords) d = std::max(d, total_degree(c));
  int k = 1;
  u128 size = F.p;
  while (size < (u128)64 * ((u64)d + 1) * vecs.size()) {
    size *= F.p;
    ++k;
  }
  ExtField G(F, k);
  std::size_t best = 0;
  for (int t = 0; t < tries; ++t) {
    std::vector<ExtField::Elem> z;
    for (int a = 0; a < vecs[0].n; ++a) {
      ExtField::Elem e(G.k);
      for (auto& c : e) c = rng.fp_elem(F);
      z.push_back(std::move(e));
    }
    Matrix<ExtField> m(G, vecs.size(), vecs[0].dim());
    for (std::size_t i = 0; i < vecs.size(); ++i)
      for (std::size_t j = 0; j < vecs[i].dim(); ++j)
        m.at(i, j) = eval_lifted(G, vecs[i].coords[j], z);
    best = std::max(best, rank(G, std::move(m)));
  }
  return best;
}

} // namespace kzc
