#pragma once
// Point evaluation of the master-form families without materializing their
// (potentially enormous) polynomial coordinates. At a fixed point z* the
// t-coefficient slices of Psi(t,z*)^m / (t - z*_i) are plain ring elements
// obtained by one dense univariate power and synthetic divisions, after which
// every coordinate of every family is a short sum of products. Derivatives
// for the connection identity come from dual numbers (a + b*eps, eps^2 = 0).

#include <stdexcept>
#include <vector>

#include "engine/extfield.hpp"
#include "engine/phyper.hpp"

namespace kzc {

// Commutative ring of dual numbers over a field G; inverses exist whenever
// the value part is invertible, which is all this file needs.
template <class G>
struct DualRing {
  using Base = typename G::Elem;
  struct Elem {
    Base a, b; // a + b*eps
  };
  const G* g;

  explicit DualRing(const G& base) : g(&base) {}

  Elem zero() const { return {g->zero(), g->zero()}; }
  Elem one() const { return {g->one(), g->zero()}; }
  Elem from_int(i64 v) const { return {g->from_int(v), g->zero()}; }
  Elem constant(const Base& x) const { return {x, g->zero()}; }
  Elem variable(const Base& x) const { return {x, g->one()}; }
  bool is_zero(const Elem& x) const { return g->is_zero(x.a) && g->is_zero(x.b); }
  bool eq(const Elem& x, const Elem& y) const { return g->eq(x.a, y.a) && g->eq(x.b, y.b); }
  Elem add(const Elem& x, const Elem& y) const { return {g->add(x.a, y.a), g->add(x.b, y.b)}; }
  Elem sub(const Elem& x, const Elem& y) const { return {g->sub(x.a, y.a), g->sub(x.b, y.b)}; }
  Elem neg(const Elem& x) const { return {g->neg(x.a), g->neg(x.b)}; }
  Elem mul(const Elem& x, const Elem& y) const {
    return {g->mul(x.a, y.a), g->add(g->mul(x.a, y.b), g->mul(x.b, y.a))};
  }
  Elem inv(const Elem& x) const {
    auto ia = g->inv(x.a);
    return {ia, g->neg(g->mul(g->mul(ia, ia), x.b))};
  }
};

// Values of the t-coefficient slices c_i(k) at a fixed z-point.
template <class R>
struct PointSlices {
  int n = 0, m = 0;
  std::vector<std::vector<typename R::Elem>> c; // c[i][k], k = 0..m*n-1

  static PointSlices build(const R& K, const std::vector<typename R::Elem>& z, int m) {
    PointSlices s;
    s.n = (int)z.size();
    s.m = m;
    // Dense Psi(t)^m by one product pass and repeated multiplication.
    std::vector<typename R::Elem> psi{K.one()};
    for (auto& za : z) {
      std::vector<typename R::Elem> next(psi.size() + 1, K.zero());
      for (std::size_t k = 0; k < psi.size(); ++k) {
        next[k + 1] = K.add(next[k + 1], psi[k]);
        next[k] = K.sub(next[k], K.mul(psi[k], za));
      }
      psi = std::move(next);
    }
    std::vector<typename R::Elem> pw{K.one()};
    for (int e = 0; e < m; ++e) {
      std::vector<typename R::Elem> next(pw.size() + psi.size() - 1, K.zero());
      for (std::size_t i = 0; i < pw.size(); ++i) {
        if (K.is_zero(pw[i])) continue;
        for (std::size_t j = 0; j < psi.size(); ++j)
          next[i + j] = K.add(next[i + j], K.mul(pw[i], psi[j]));
      }
      pw = std::move(next);
    }
    const int D = s.m * s.n; // degree of Psi^m
    s.c.resize((std::size_t)s.n);
    for (int i = 0; i < s.n; ++i) {
      // Synthetic division by (t - z_i): q_k = f_{k+1} + z_i q_{k+1}.
      std::vector<typename R::Elem> q((std::size_t)D, K.zero());
      q[(std::size_t)D - 1] = pw[(std::size_t)D];
      for (int k = D - 2; k >= 0; --k)
        q[(std::size_t)k] = K.add(pw[(std::size_t)k + 1], K.mul(z[(std::size_t)i], q[(std::size_t)k + 1]));
      s.c[(std::size_t)i] = std::move(q);
    }
    return s;
  }

  const typename R::Elem* at(int i, long k) const {
    if (k < 0 || k >= (long)c[(std::size_t)i].size()) return nullptr;
    return &c[(std::size_t)i][(std::size_t)k];
  }
};

// Value of one family coordinate at the point baked into the slices.
template <class R>
typename R::Elem master_coordinate_value(const R& K, const PointSlices<R>& C,
                                         const MultiPoly<Fp>& A, bool sym_op, u64 p,
                                         const std::vector<int>& ell,
                                         const std::vector<int>& ivec) {
  const int r = (int)ivec.size();
  if ((int)ell.size() != r || A.r != r)
    throw std::invalid_argument("master_coordinate_value: arity mismatch");
  std::vector<long> E(ell.size());
  for (int j = 0; j < r; ++j) E[(std::size_t)j] = (long)p * ell[(std::size_t)j] - 1;
  std::vector<std::pair<std::vector<int>, int>> perms;
  detail::permutations_with_sign(r, perms);
  auto acc = K.zero();
  for (auto& [perm, sg] : perms) {
    for (std::size_t term = 0; term < A.size(); ++term) {
      const u16* d = A.exp(term);
      auto prod = K.one();
      bool dead = false;
      for (int j = 0; j < r && !dead; ++j) {
        auto* f = C.at(ivec[(std::size_t)j], E[(std::size_t)perm[j]] - d[j]);
        if (!f) dead = true;
        else prod = K.mul(prod, *f);
      }
      if (dead) continue;
      i64 cf = (i64)A.coeffs[term];
      if (!sym_op && sg < 0) cf = -cf;
      acc = K.add(acc, K.mul(prod, K.from_int(cf)));
    }
  }
  return acc;
}

// All coordinates of a family at one point, in carrier-basis order.
template <class R>
std::vector<typename R::Elem> family_values_at(const R& K, Family fam, int g, int r, u64 p,
                                               const std::vector<int>& ell,
                                               const MultiPoly<Fp>& A,
                                               const std::vector<typename R::Elem>& z) {
  auto traits = family_traits(fam);
  auto slices = PointSlices<R>::build(K, z, psi_exponent(fam, p));
  auto basis = family_basis(fam, g, r);
  std::vector<typename R::Elem> out;
  out.reserve(basis.size());
  for (auto& J : basis)
    out.push_back(master_coordinate_value(K, slices, A, traits.sym_op, p, ell, J));
  return out;
}

namespace detail {

// Lift an Fp matrix into a ring via from_int of the representatives.
template <class R>
std::vector<std::vector<typename R::Elem>> lift_matrix(const R& K, const Matrix<Fp>& m) {
  std::vector<std::vector<typename R::Elem>> out(m.rows,
                                                 std::vector<typename R::Elem>(m.cols, K.zero()));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out[i][j] = K.from_int((i64)m.at(i, j));
  return out;
}

} // namespace detail

// Probabilistic verification of a family as a connection solution, evaluating
// the cleared identity at random extension-field points without ever building
// the polynomial coordinates. For weight-space families the singular-vector
// condition (annihilation by the raising operator) is checked alongside.
inline Verdict verify_family_at_points(const Fp& F, Family fam, int g, int r,
                                       const std::vector<int>& ell, Rng& rng, int points = 8,
                                       const KZSystem<Fp>* sys_override = nullptr) {
  auto traits = family_traits(fam);
  const int n = 2 * g + 1;
  auto sys = sys_override ? *sys_override
                          : (traits.wedge_carrier ? kz_wedge_system(F, g, r, traits.kappa)
                                                  : kz_weight_system(F, g, r, traits.kappa));
  auto A = prefactor_poly(F, fam, r);
  // Schwartz-Zippel: the cleared identity has degree at most deg(family) + n.
  const long dbound = family_degree(F, fam, g, r, ell) + n;
  int k = 1;
  u128 size = F.p;
  while (size < (u128)64 * (u64)(dbound + 1) * (u64)points * (u64)n) {
    size *= F.p;
    ++k;
  }
  ExtField G(F, k);
  DualRing<ExtField> D(G);
  std::vector<std::vector<Fp::Elem>> e_lift;
  Matrix<Fp> emat;
  if (!traits.wedge_carrier) emat = e_matrix(F, WeightSpace(g, r));
  auto kinv = G.inv(G.from_int(sys.kappa));
  for (int trial = 0; trial < points; ++trial) {
    // Random point with pairwise-distinct coordinates (collisions would kill
    // the clearing factors, not the identity; redraw for a sharp test).
    std::vector<ExtField::Elem> z;
    while ((int)z.size() < n) {
      ExtField::Elem e(G.k);
      for (auto& c : e) c = rng.fp_elem(F);
      bool dup = false;
      for (auto& prev : z)
        if (G.eq(prev, e)) dup = true;
      if (!dup) z.push_back(std::move(e));
    }
    for (int i = 0; i < n; ++i) {
      // Dual point: z_i carries the infinitesimal direction.
      std::vector<DualRing<ExtField>::Elem> zd;
      zd.reserve((std::size_t)n);
      for (int a = 0; a < n; ++a)
        zd.push_back(a == i ? D.variable(z[(std::size_t)a]) : D.constant(z[(std::size_t)a]));
      auto vals = family_values_at(D, fam, g, r, F.p, ell, A, zd);
      // Cleared identity over the base field: D_i * dv/dz_i equals
      // (1/kappa) sum_j prod_{k != i,j}(z_i - z_k) * (Omega_ij v).
      auto Di = G.one();
      for (int kk = 0; kk < n; ++kk)
        if (kk != i) Di = G.mul(Di, G.sub(z[(std::size_t)i], z[(std::size_t)kk]));
      std::vector<ExtField::Elem> rhs(sys.dimension, G.zero());
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        auto Dij = G.one();
        for (int kk = 0; kk < n; ++kk)
          if (kk != i && kk != j) Dij = G.mul(Dij, G.sub(z[(std::size_t)i], z[(std::size_t)kk]));
        const auto& om = sys.omega(i, j);
        for (std::size_t b = 0; b < sys.dimension; ++b) {
          auto row = G.zero();
          for (std::size_t cidx = 0; cidx < sys.dimension; ++cidx) {
            if (F.is_zero(om.at(b, cidx))) continue;
            row = G.add(row, G.mul(G.from_int((i64)om.at(b, cidx)), vals[cidx].a));
          }
          rhs[b] = G.add(rhs[b], G.mul(G.mul(kinv, Dij), row));
        }
      }
      for (std::size_t b = 0; b < sys.dimension; ++b)
        if (!G.eq(G.mul(Di, vals[b].b), rhs[b]))
          return {false, "cleared identity fails at a random point, direction " +
                             std::to_string(i + 1)};
      if (!traits.wedge_carrier && i == 0) {
        std::vector<ExtField::Elem> plain(sys.dimension);
        for (std::size_t b = 0; b < sys.dimension; ++b) plain[b] = vals[b].a;
        for (std::size_t rr = 0; rr < emat.rows; ++rr) {
          auto acc = G.zero();
          for (std::size_t cidx = 0; cidx < emat.cols; ++cidx) {
            if (F.is_zero(emat.at(rr, cidx))) continue;
            acc = G.add(acc, G.mul(G.from_int((i64)emat.at(rr, cidx)), plain[cidx]));
          }
          if (!G.is_zero(acc))
            return {false, "raising-operator image nonzero at a random point"};
        }
      }
    }
  }
  double fail_bound = (double)(dbound + 1) * points * n;
  double sz = fail_bound;
  for (int i = 0; i < k; ++i) sz /= (double)F.p;
  return {true, "identity holds at " + std::to_string(points) + " random points over F_p^" +
                    std::to_string(k) + "; false-accept probability <= " + std::to_string(sz)};
}

} // namespace kzc
