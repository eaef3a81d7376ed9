#pragma once
// The KZ connection at kappa = +2 or -2 on a weight space or on a wedge power
// of the weight-(2g-1) space, together with exact verifiers. All checks work
// with polynomials only: either in "cleared" form (multiplied by
// prod_{j != i}(z_i - z_j)) or through exact division by the linear factors,
// so every verdict is an exact statement about rational-function identities.

#include <stdexcept>
#include <string>
#include <vector>

#include "engine/extfield.hpp"
#include "engine/linalg.hpp"
#include "engine/poly.hpp"
#include "engine/rng.hpp"
#include "engine/weightspace.hpp"

namespace kzc {

// A vector with one z-polynomial per basis vector of the carrier space.
template <class F>
struct PolyVector {
  int n = 0; // number of z variables
  std::vector<MultiPoly<F>> coords;

  std::size_t dim() const { return coords.size(); }
  bool is_zero() const {
    for (auto& c : coords)
      if (!c.is_zero()) return false;
    return true;
  }
};

template <class F>
PolyVector<F> zero_vector(int n, std::size_t dim) {
  PolyVector<F> v;
  v.n = n;
  v.coords.assign(dim, make_zero<F>(0, n));
  return v;
}

template <class F>
PolyVector<F> vec_add(const F& K, const PolyVector<F>& a, const PolyVector<F>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("vec_add: dimension mismatch");
  PolyVector<F> out;
  out.n = a.n;
  out.coords.reserve(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out.coords.push_back(add(K, a.coords[i], b.coords[i]));
  return out;
}

template <class F>
PolyVector<F> vec_scale(const F& K, const PolyVector<F>& a, typename F::Elem c) {
  PolyVector<F> out;
  out.n = a.n;
  out.coords.reserve(a.dim());
  for (auto& x : a.coords) out.coords.push_back(scale(K, x, c));
  return out;
}

template <class F>
PolyVector<F> vec_sub(const F& K, const PolyVector<F>& a, const PolyVector<F>& b) {
  return vec_add(K, a, vec_scale(K, b, K.neg(K.one())));
}

// Apply a scalar matrix to a polynomial vector coordinate-wise.
template <class F>
std::vector<MultiPoly<F>> mat_vec_poly(const F& K, const Matrix<F>& m,
                                       const std::vector<MultiPoly<F>>& v) {
  if (m.cols != v.size()) throw std::invalid_argument("mat_vec_poly: shape mismatch");
  int n = v.empty() ? 0 : v[0].n;
  std::vector<MultiPoly<F>> out(m.rows, make_zero<F>(0, n));
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) {
      auto c = m.at(i, j);
      if (K.is_zero(c) || v[j].is_zero()) continue;
      out[i] = add(K, out[i], scale(K, v[j], c));
    }
  return out;
}

// Polynomial-valued pairing of two vectors over an orthonormal carrier basis.
template <class F>
MultiPoly<F> poly_shapovalov(const F& K, const PolyVector<F>& x, const PolyVector<F>& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("poly_shapovalov: dimension mismatch");
  MultiPoly<F> s = make_zero<F>(0, x.n);
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (x.coords[i].is_zero() || y.coords[i].is_zero()) continue;
    s = add(K, s, mul(K, x.coords[i], y.coords[i]));
  }
  return s;
}

// The connection data: for each pair i != j, the operator P^{(i,j)} - 1 on the
// chosen carrier space. The connection operator in direction i is
//   partial_i - (1/kappa) sum_{j != i} omega_{ij} / (z_i - z_j).
template <class F>
struct KZSystem {
  F K;
  explicit KZSystem(const F& field) : K(field) {}
  int g = 0, n = 0, kappa = 0;
  std::size_t dimension = 0;
  std::vector<Matrix<F>> omega_table; // n*n entries; empty matrix on diagonal

  const Matrix<F>& omega(int i, int j) const {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("KZSystem::omega: bad index pair");
    return omega_table[(std::size_t)i * (std::size_t)n + (std::size_t)j];
  }
  typename F::Elem kappa_inv() const { return K.inv(K.from_int((i64)kappa)); }
};

namespace detail {
inline void check_kappa(int kappa) {
  if (kappa != 2 && kappa != -2)
    throw std::invalid_argument("KZSystem: kappa must be +2 or -2");
}
} // namespace detail

// System on the full weight space containing Sing L[n-2r].
template <class F>
KZSystem<F> kz_weight_system(const F& K, int g, int r, int kappa) {
  detail::check_kappa(kappa);
  KZSystem<F> sys(K);
  sys.g = g;
  sys.n = 2 * g + 1;
  sys.kappa = kappa;
  WeightSpace w(g, r);
  sys.dimension = w.dim();
  sys.omega_table.assign((std::size_t)sys.n * sys.n, Matrix<F>());
  auto id = identity(K, w.dim());
  for (int i = 0; i < sys.n; ++i)
    for (int j = 0; j < sys.n; ++j) {
      if (i == j) continue;
      auto P = permutation_matrix(K, w, i, j);
      for (std::size_t t = 0; t < P.a.size(); ++t) P.a[t] = K.sub(P.a[t], id.a[t]);
      sys.omega_table[(std::size_t)i * sys.n + j] = std::move(P);
    }
  return sys;
}

// System on the r-th wedge power of the weight-(2g-1) space (which has the
// n-element basis w_{{1}}, ..., w_{{n}}). The pair operators extend by the
// Leibniz rule; the constant shift extends to r times the identity.
template <class F>
KZSystem<F> kz_wedge_system(const F& K, int g, int r, int kappa) {
  detail::check_kappa(kappa);
  KZSystem<F> sys(K);
  sys.g = g;
  sys.n = 2 * g + 1;
  sys.kappa = kappa;
  WeightSpace w1(g, 1);
  WedgeSpace W(sys.n, r);
  sys.dimension = W.dim();
  sys.omega_table.assign((std::size_t)sys.n * sys.n, Matrix<F>());
  auto rid = identity(K, W.dim());
  auto rscale = K.from_int((i64)r);
  for (std::size_t t = 0; t < rid.a.size(); ++t) rid.a[t] = K.mul(rid.a[t], rscale);
  for (int i = 0; i < sys.n; ++i)
    for (int j = 0; j < sys.n; ++j) {
      if (i == j) continue;
      auto P = permutation_matrix(K, w1, i, j);
      auto ext = wedge_leibniz(K, P, W);
      for (std::size_t t = 0; t < ext.a.size(); ++t) ext.a[t] = K.sub(ext.a[t], rid.a[t]);
      sys.omega_table[(std::size_t)i * sys.n + j] = std::move(ext);
    }
  return sys;
}

// prod over k != i, k != skip of (z_i - z_k), as a polynomial in n z-variables.
template <class F>
MultiPoly<F> clearing_product(const F& K, int n, int i, int skip = -1) {
  MultiPoly<F> out = constant<F>(K, 0, n, K.one());
  for (int k = 0; k < n; ++k) {
    if (k == i || k == skip) continue;
    out = mul_linear_diff(K, out, i, k);
  }
  return out;
}

// Cleared connection application:
//   prod_{j != i}(z_i - z_j) * ( partial_i v - (1/kappa) sum_j omega_{ij} v / (z_i - z_j) ).
// The result is a polynomial vector, zero iff the connection annihilates v.
template <class F>
PolyVector<F> kz_apply(const KZSystem<F>& sys, int i, const PolyVector<F>& v) {
  const F& K = sys.K;
  if (i < 0 || i >= sys.n) throw std::invalid_argument("kz_apply: index out of range");
  if (v.dim() != sys.dimension || v.n != sys.n)
    throw std::invalid_argument("kz_apply: vector does not match the carrier");
  auto s = sys.kappa_inv();
  PolyVector<F> out = zero_vector<F>(sys.n, sys.dimension);
  // Derivative part, multiplied by the full clearing product.
  for (std::size_t b = 0; b < sys.dimension; ++b) {
    auto d = deriv(K, v.coords[b], i);
    if (d.is_zero()) continue;
    for (int k = 0; k < sys.n; ++k) {
      if (k == i) continue;
      d = mul_linear_diff(K, d, i, k);
    }
    out.coords[b] = d;
  }
  // Pair-operator part: each term keeps all clearing factors except its own.
  for (int j = 0; j < sys.n; ++j) {
    if (j == i) continue;
    auto w = mat_vec_poly(K, sys.omega(i, j), v.coords);
    for (std::size_t b = 0; b < sys.dimension; ++b) {
      if (w[b].is_zero()) continue;
      for (int k = 0; k < sys.n; ++k) {
        if (k == i || k == j) continue;
        w[b] = mul_linear_diff(K, w[b], i, k);
      }
      out.coords[b] = sub(K, out.coords[b], scale(K, w[b], s));
    }
  }
  return out;
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

enum class VerifyMode { symbolic, probabilistic };

// Exact verification through division: a solution has each residue
// omega_{ij} v at z_i = z_j divisible by (z_i - z_j), and then
// partial_i v = (1/kappa) sum_j omega_{ij} v / (z_i - z_j) must hold exactly.
template <class F>
Verdict verify_solution_symbolic(const KZSystem<F>& sys, const PolyVector<F>& v) {
  const F& K = sys.K;
  auto s = sys.kappa_inv();
  for (int i = 0; i < sys.n; ++i) {
    std::vector<MultiPoly<F>> acc(sys.dimension, make_zero<F>(0, sys.n));
    for (int j = 0; j < sys.n; ++j) {
      if (j == i) continue;
      auto w = mat_vec_poly(K, sys.omega(i, j), v.coords);
      for (std::size_t b = 0; b < sys.dimension; ++b) {
        if (w[b].is_zero()) continue;
        MultiPoly<F> q;
        try {
          q = div_linear_diff(K, w[b], i, j);
        } catch (const std::domain_error&) {
          return {false, "direction " + std::to_string(i + 1) + ": residue at z" +
                             std::to_string(i + 1) + "=z" + std::to_string(j + 1) +
                             " does not vanish"};
        }
        acc[b] = add(K, acc[b], q);
      }
    }
    for (std::size_t b = 0; b < sys.dimension; ++b) {
      auto lhs = deriv(K, v.coords[b], i);
      auto rhs = scale(K, acc[b], s);
      if (!equal(sub(K, lhs, rhs), make_zero<F>(0, sys.n)))
        return {false, "direction " + std::to_string(i + 1) + ": coordinate " +
                           std::to_string(b) + " fails"};
    }
  }
  return {true, "symbolic check passed in all " + std::to_string(sys.n) + " directions"};
}

// Probabilistic verification over an extension of F_p large enough for the
// degree bound; only meaningful for prime-field systems.
inline Verdict verify_solution_probabilistic(const KZSystem<Fp>& sys, const PolyVector<Fp>& v,
                                             Rng& rng, int points = 32) {
  const Fp& K = sys.K;
  int d = 0;
  for (auto& c : v.coords) d = std::max(d, total_degree(c));
  const u64 degree_bound = (u64)d + (u64)sys.n; // cleared identity degree
  int k = 1;
  u128 size = K.p;
  while (size < (u128)64 * (degree_bound + (u64)sys.n + 1)) {
    size *= K.p;
    ++k;
  }
  ExtField G(K, k);
  auto s = G.from_base(sys.kappa_inv());
  // Precompute the z-derivatives of every coordinate once.
  std::vector<std::vector<MultiPoly<Fp>>> dv(sys.n);
  for (int i = 0; i < sys.n; ++i) {
    dv[i].reserve(v.dim());
    for (auto& c : v.coords) dv[i].push_back(deriv(K, c, i));
  }
  for (int pt = 0; pt < points; ++pt) {
    // A random point with pairwise distinct coordinates.
    std::vector<ExtField::Elem> z;
    while ((int)z.size() < sys.n) {
      ExtField::Elem cand(G.k);
      for (auto& c : cand) c = rng.fp_elem(K);
      bool dup = false;
      for (auto& prev : z)
        if (prev == cand) dup = true;
      if (!dup) z.push_back(std::move(cand));
    }
    std::vector<ExtField::Elem> vals(v.dim());
    for (std::size_t b = 0; b < v.dim(); ++b) vals[b] = eval_lifted(G, v.coords[b], z);
    for (int i = 0; i < sys.n; ++i) {
      // Clearing factors at the point.
      std::vector<ExtField::Elem> diff(sys.n, G.zero());
      auto full = G.one();
      for (int j = 0; j < sys.n; ++j) {
        if (j == i) continue;
        diff[j] = G.sub(z[i], z[j]);
        full = G.mul(full, diff[j]);
      }
      std::vector<ExtField::Elem> res(v.dim(), G.zero());
      for (std::size_t b = 0; b < v.dim(); ++b)
        res[b] = G.mul(full, eval_lifted(G, dv[i][b], z));
      for (int j = 0; j < sys.n; ++j) {
        if (j == i) continue;
        auto partial = G.mul(full, G.inv(diff[j]));
        const auto& om = sys.omega(i, j);
        // omega_{ij} applied to the evaluated coordinates.
        for (std::size_t b = 0; b < v.dim(); ++b) {
          auto acc = G.zero();
          for (std::size_t c = 0; c < v.dim(); ++c) {
            auto m = om.at(b, c);
            if (m == 0) continue;
            acc = G.add(acc, G.mul(G.from_base(m), vals[c]));
          }
          if (!G.is_zero(acc)) res[b] = G.sub(res[b], G.mul(G.mul(s, partial), acc));
        }
      }
      for (std::size_t b = 0; b < v.dim(); ++b)
        if (!G.is_zero(res[b]))
          return {false, "point " + std::to_string(pt) + ", direction " + std::to_string(i + 1) +
                             ": cleared identity is nonzero"};
    }
  }
  return {true, "passed at " + std::to_string(points) +
                    " random points over an extension of size p^" + std::to_string(k) +
                    "; per-point failure bound " + std::to_string(degree_bound) + "/(p^" +
                    std::to_string(k) + " - " + std::to_string(sys.n) + ")"};
}

template <class F>
Verdict verify_solution(const KZSystem<F>& sys, const PolyVector<F>& v, VerifyMode mode,
                        Rng* rng = nullptr, int points = 32) {
  if (v.dim() != sys.dimension || v.n != sys.n)
    return {false, "vector does not match the carrier dimension"};
  if (mode == VerifyMode::symbolic) return verify_solution_symbolic(sys, v);
  if constexpr (std::is_same_v<F, Fp>) {
    if (!rng) throw std::invalid_argument("verify_solution: probabilistic mode needs an Rng");
    return verify_solution_probabilistic(sys, v, *rng, points);
  } else {
    throw std::invalid_argument("verify_solution: probabilistic mode requires a prime field");
  }
}

// The pairing identity between the two connections:
//   partial_i S(x, y) = S(nabla^{kappa}_i x, y) + S(x, nabla^{-kappa}_i y),
// checked in cleared polynomial form for every direction i.
template <class F>
Verdict duality_check(const KZSystem<F>& plus, const KZSystem<F>& minus, const PolyVector<F>& x,
                      const PolyVector<F>& y) {
  const F& K = plus.K;
  if (plus.kappa != -minus.kappa || plus.n != minus.n || plus.dimension != minus.dimension)
    throw std::invalid_argument("duality_check: the two systems must be opposite on one carrier");
  auto S = poly_shapovalov(K, x, y);
  for (int i = 0; i < plus.n; ++i) {
    auto lhs = deriv(K, S, i);
    for (int k = 0; k < plus.n; ++k) {
      if (k == i) continue;
      lhs = mul_linear_diff(K, lhs, i, k);
    }
    auto rhs = add(K, poly_shapovalov(K, kz_apply(plus, i, x), y),
                   poly_shapovalov(K, x, kz_apply(minus, i, y)));
    if (!equal(lhs, rhs))
      return {false, "pairing identity fails in direction " + std::to_string(i + 1)};
  }
  return {true, "pairing identity holds in all directions"};
}

// Exact flatness check of the commutator [nabla_i, nabla_j] applied to v.
// With W_j = cleared application in direction j and D_i = prod_{a != i}(z_i - z_a),
//   nabla_i nabla_j v = B_ij / (D_i D_j^2),
//   B_ij = D_i (partial_i W_j * D_j - W_j * partial_i D_j)
//          - (1/kappa) sum_{a != i} (D_i / (z_i - z_a)) omega_{ia} W_j D_j,
// so the commutator vanishes iff B_ij D_i = B_ji D_j coordinate-wise.
template <class F>
bool flatness_check(const KZSystem<F>& sys, int i, int j, const PolyVector<F>& v) {
  const F& K = sys.K;
  auto s = sys.kappa_inv();
  auto B = [&](int a, int b) {
    auto W = kz_apply(sys, b, v);
    auto Da = clearing_product(K, sys.n, a);
    auto Db = clearing_product(K, sys.n, b);
    // partial_a D_b = -(product over c != a, b of (z_b - z_c)).
    auto dDb = negate(K, clearing_product(K, sys.n, b, a));
    std::vector<MultiPoly<F>> out(sys.dimension, make_zero<F>(0, sys.n));
    for (std::size_t c = 0; c < sys.dimension; ++c) {
      auto term = sub(K, mul(K, deriv(K, W.coords[c], a), Db), mul(K, W.coords[c], dDb));
      out[c] = mul(K, Da, term);
    }
    for (int e = 0; e < sys.n; ++e) {
      if (e == a) continue;
      auto om = mat_vec_poly(K, sys.omega(a, e), W.coords);
      auto Dae = clearing_product(K, sys.n, a, e);
      for (std::size_t c = 0; c < sys.dimension; ++c) {
        if (om[c].is_zero()) continue;
        out[c] = sub(K, out[c], scale(K, mul(K, Dae, mul(K, om[c], Db)), s));
      }
    }
    return out;
  };
  auto Bij = B(i, j), Bji = B(j, i);
  auto Di = clearing_product(K, sys.n, i);
  auto Dj = clearing_product(K, sys.n, j);
  for (std::size_t c = 0; c < sys.dimension; ++c)
    if (!equal(mul(K, Bij[c], Di), mul(K, Bji[c], Dj))) return false;
  return true;
}

} // namespace kzc
