#pragma once
// Weight spaces of the n-fold tensor power of the 2-dimensional sl2 module,
// n = 2g+1. The weight space of weight n-2r has the orthonormal basis
// { w_J : J an r-element subset of {1..n} }, J marking the lowered factors,
// ordered lexicographically. Singular vectors are the kernel of the raising
// operator e, computed exactly over the rationals once per (g, r) and reduced
// mod p on demand (so exceptional primes surface as denominator events).

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "engine/errors.hpp"
#include "engine/fp.hpp"
#include "engine/linalg.hpp"
#include "engine/rat.hpp"

namespace kzc {

inline u64 binom(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0;
  u64 r = 1;
  for (int i = 0; i < k; ++i) r = r * (u64)(n - i) / (u64)(i + 1);
  return r;
}

// All k-element subsets of {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> subsets_lex(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  if (k == 0) out = {{}};
  return out;
}

struct WeightSpace {
  int g, n, r; // n = 2g+1; weight = n - 2r
  std::vector<std::vector<int>> basis; // lex-sorted r-subsets (0-based)
  std::map<std::vector<int>, int> index;

  WeightSpace(int g_, int r_) : g(g_), n(2 * g_ + 1), r(r_) {
    if (r < 0 || r > n) throw std::invalid_argument("WeightSpace: bad r");
    basis = subsets_lex(n, r);
    for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = (int)i;
  }
  std::size_t dim() const { return basis.size(); }
};

// Raising operator e: weight space r -> r-1; e w_J = sum_{j in J} w_{J \ j}.
template <class F>
Matrix<F> e_matrix(const F& K, const WeightSpace& from) {
  WeightSpace to(from.g, from.r - 1);
  Matrix<F> m(K, to.dim(), from.dim());
  for (std::size_t c = 0; c < from.dim(); ++c) {
    for (int j : from.basis[c]) {
      std::vector<int> sub;
      for (int x : from.basis[c])
        if (x != j) sub.push_back(x);
      m.at((std::size_t)to.index.at(sub), c) = K.add(m.at((std::size_t)to.index.at(sub), c), K.one());
    }
  }
  return m;
}

// Lowering operator f: r -> r+1; f w_J = sum_{j not in J} w_{J + j}.
template <class F>
Matrix<F> f_matrix(const F& K, const WeightSpace& from) {
  WeightSpace to(from.g, from.r + 1);
  Matrix<F> m(K, to.dim(), from.dim());
  for (std::size_t c = 0; c < from.dim(); ++c) {
    for (int j = 0; j < from.n; ++j) {
      if (std::binary_search(from.basis[c].begin(), from.basis[c].end(), j)) continue;
      std::vector<int> sup = from.basis[c];
      sup.insert(std::lower_bound(sup.begin(), sup.end(), j), j);
      m.at((std::size_t)to.index.at(sup), c) = K.add(m.at((std::size_t)to.index.at(sup), c), K.one());
    }
  }
  return m;
}

// Matrix of the (i j) factor-permutation operator on the w_J basis (0-based i, j).
template <class F>
Matrix<F> permutation_matrix(const F& K, const WeightSpace& w, int i, int j) {
  if (i == j) throw std::invalid_argument("permutation_matrix: i == j");
  Matrix<F> m(K, w.dim(), w.dim());
  for (std::size_t c = 0; c < w.dim(); ++c) {
    std::vector<int> img;
    for (int x : w.basis[c]) {
      if (x == i) img.push_back(j);
      else if (x == j) img.push_back(i);
      else img.push_back(x);
    }
    std::sort(img.begin(), img.end());
    m.at((std::size_t)w.index.at(img), c) = K.one();
  }
  return m;
}

// Shapovalov form: the w_J basis is orthonormal.
template <class F>
typename F::Elem shapovalov(const F& K, const std::vector<typename F::Elem>& u,
                            const std::vector<typename F::Elem>& v) {
  if (u.size() != v.size()) throw std::invalid_argument("shapovalov: dimension mismatch");
  auto s = K.zero();
  for (std::size_t i = 0; i < u.size(); ++i) s = K.add(s, K.mul(u[i], v[i]));
  return s;
}

// Exact rational basis of Sing = ker e inside the weight-r space.
// Deterministic: kernel of the e-matrix under first-nonzero pivoting.
struct SingSpace {
  WeightSpace ambient;
  std::vector<std::vector<mpq_class>> basis; // rows, in w_J coordinates

  SingSpace(int g, int r) : ambient(g, r) {
    Rat Q;
    if (r == 0) {
      basis = {{mpq_class(1)}};
      return;
    }
    auto e = e_matrix(Q, ambient);
    basis = kernel(Q, e);
  }
  std::size_t dim() const { return basis.size(); }

  // Basis rows reduced mod p; throws ExceptionalPrime on denominator events.
  std::vector<std::vector<u64>> basis_mod_p(const Fp& F) const {
    std::vector<std::vector<u64>> out;
    out.reserve(basis.size());
    for (auto& row : basis) {
      std::vector<u64> v(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) {
        try {
          v[i] = rat_mod_p(F, row[i]);
        } catch (const std::domain_error&) {
          throw ExceptionalPrime(F.p, "singular-vector basis denominator vanishes");
        }
      }
      out.push_back(std::move(v));
    }
    return out;
  }
};

inline i64 sing_dim_formula(int g, int r) {
  int n = 2 * g + 1;
  return (i64)binom(n, r) - (i64)binom(n, r - 1);
}

// ---------------------------------------------------------------------------
// Wedge powers
// ---------------------------------------------------------------------------

// Basis bookkeeping for the r-th wedge power of an m-dimensional space whose
// basis is indexed 0..m-1; wedge basis = lex-sorted r-subsets.
struct WedgeSpace {
  int m, r;
  std::vector<std::vector<int>> basis;
  std::map<std::vector<int>, int> index;
  WedgeSpace(int m_, int r_) : m(m_), r(r_) {
    basis = subsets_lex(m, r);
    for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = (int)i;
  }
  std::size_t dim() const { return basis.size(); }
};

// Expand u_1 ^ ... ^ u_r (each u_i in F^m) in the subset basis: r x r minors.
template <class F>
std::vector<typename F::Elem> wedge_of_vectors(
    const F& K, const WedgeSpace& W,
    const std::vector<std::vector<typename F::Elem>>& vecs) {
  if ((int)vecs.size() != W.r) throw std::invalid_argument("wedge_of_vectors: arity");
  std::vector<typename F::Elem> out(W.dim(), K.zero());
  for (std::size_t b = 0; b < W.dim(); ++b) {
    Matrix<F> minor(K, W.r, W.r);
    for (int i = 0; i < W.r; ++i)
      for (int j = 0; j < W.r; ++j) minor.at(i, j) = vecs[i][W.basis[b][j]];
    out[b] = determinant(K, minor);
  }
  return out;
}

// Leibniz extension of an operator B on F^m to the wedge power:
// B^(r)(u_1^...^u_r) = sum_k u_1 ^ ... ^ B u_k ^ ... ^ u_r.
template <class F>
Matrix<F> wedge_leibniz(const F& K, const Matrix<F>& B, const WedgeSpace& W) {
  if (B.rows != (std::size_t)W.m || B.cols != (std::size_t)W.m)
    throw std::invalid_argument("wedge_leibniz: shape mismatch");
  Matrix<F> out(K, W.dim(), W.dim());
  for (std::size_t c = 0; c < W.dim(); ++c) {
    const auto& S = W.basis[c];
    for (int slot = 0; slot < W.r; ++slot) {
      int s = S[slot];
      for (int a = 0; a < W.m; ++a) {
        auto coef = B.at((std::size_t)a, (std::size_t)s);
        if (K.is_zero(coef)) continue;
        // Replace S[slot] by a; zero if a already occupies another slot.
        bool dup = false;
        for (int t = 0; t < W.r; ++t)
          if (t != slot && S[t] == a) dup = true;
        if (dup) continue;
        std::vector<int> img = S;
        img[slot] = a;
        // Sort and count transpositions for the sign.
        int sign = 1;
        for (int x = 0; x < W.r; ++x)
          for (int y = 0; y < W.r - 1 - x; ++y)
            if (img[y] > img[y + 1]) {
              std::swap(img[y], img[y + 1]);
              sign = -sign;
            }
        auto val = sign > 0 ? coef : K.neg(coef);
        std::size_t row = (std::size_t)W.index.at(img);
        out.at(row, c) = K.add(out.at(row, c), val);
      }
    }
  }
  return out;
}

// Wedge Shapovalov form: with an orthonormal underlying basis the subset basis
// of the wedge power is again orthonormal, so the form is the dot product.
template <class F>
typename F::Elem wedge_shapovalov(const F& K, const std::vector<typename F::Elem>& u,
                                  const std::vector<typename F::Elem>& v) {
  return shapovalov(K, u, v);
}

} // namespace kzc
