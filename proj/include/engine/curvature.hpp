#pragma once
// p-curvature operators at fixed evaluation points: the rank-1 closed form,
// a direct covariant-power oracle, good bases aligned with the Poincare
// element, Leibniz extensions to wedge powers, primitive subspaces, kernel
// audits, and the Kodaira-Spencer identification.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "engine/errors.hpp"
#include "engine/kz.hpp"
#include "engine/linalg.hpp"
#include "engine/phyper.hpp"
#include "engine/pointeval.hpp"
#include "engine/satake.hpp"

namespace kzc {

// ---------------------------------------------------------------------------
// Evaluation points
// ---------------------------------------------------------------------------

struct EvaluationPoint {
  int g = 0;
  u64 p = 0;
  std::vector<u64> z; // 2g+1 pairwise distinct coordinates in F_p

  EvaluationPoint(const Fp& F, int g_, std::vector<u64> z_) : g(g_), p(F.p), z(std::move(z_)) {
    const int n = 2 * g + 1;
    if ((u64)n >= p) throw std::invalid_argument("evaluation point: requires p > 2g+1");
    if ((int)z.size() != n) throw std::invalid_argument("evaluation point: wrong arity");
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (z[(std::size_t)i] % p == z[(std::size_t)j] % p)
          throw std::invalid_argument("evaluation point: coordinates collide");
  }

  // D_a = prod_{j != a} (z_a - z_j), always a unit for a valid point.
  u64 denom(const Fp& F, int a) const {
    auto d = F.one();
    for (int j = 0; j < (int)z.size(); ++j)
      if (j != a) d = F.mul(d, F.sub(z[(std::size_t)a], z[(std::size_t)j]));
    return d;
  }

  static EvaluationPoint random(const Fp& F, int g, Rng& rng) {
    return EvaluationPoint(F, g, rng.distinct_point(F, 2 * g + 1));
  }
};

// ---------------------------------------------------------------------------
// The carrier V at a point
// ---------------------------------------------------------------------------

// Constant basis of V = Sing[2g-1] as columns, with its span projector. All
// point-level linear algebra below works in these 2g V-coordinates; the
// pairing is the restriction of the orthonormal ambient form.
struct VFrame {
  Matrix<Fp> B;    // ambient (2g+1) x 2g
  Matrix<Fp> proj; // 2g x (2g+1)
  Matrix<Fp> gram; // B^T B

  static VFrame build(const Fp& F, int g) {
    VFrame f;
    f.B = sing_basis_columns(F, g, 1);
    f.proj = span_projector(F, f.B, "rank-one carrier");
    f.gram = mat_mul(F, transpose(F, f.B), f.B);
    return f;
  }
};

// Ambient weight-space values of the plus/minus r=1 families at the point.
inline std::vector<std::vector<u64>> family_point_values(const Fp& F, Family fam, int g,
                                                         const EvaluationPoint& pt) {
  auto A = prefactor_poly(F, fam, 1);
  std::vector<std::vector<u64>> out;
  for (int ell = 1; ell <= g; ++ell)
    out.push_back(family_values_at(F, fam, g, 1, F.p, {ell}, A, pt.z));
  return out;
}

// ---------------------------------------------------------------------------
// p-curvature operators
// ---------------------------------------------------------------------------

struct CurvatureOp {
  int a = 0;
  std::vector<u64> K;     // vector part, V-coordinates
  std::vector<u64> L;     // covector part on V-coordinates
  Matrix<Fp> tilde;       // normalized operator K (x) L on V
  u64 full_scale = 0;     // 1/(2 D_a^p); full operator = full_scale * tilde
  bool degenerate = false;
};

inline std::vector<CurvatureOp> pcurv_explicit(const Fp& F, int g, const EvaluationPoint& pt,
                                               const VFrame& frame) {
  const int n = 2 * g + 1;
  auto Nv = family_point_values(F, Family::N, g, pt);
  auto BNv = family_point_values(F, Family::BarN, g, pt);
  std::vector<CurvatureOp> ops;
  for (int a = 0; a < n; ++a) {
    CurvatureOp op;
    op.a = a;
    auto zp = F.pow(pt.z[(std::size_t)a], F.p);
    // Ambient K_a = sum z_a^{p(l-1)} N^l and the matching covector combination.
    std::vector<u64> Kamb((std::size_t)n, 0), Lamb((std::size_t)n, 0);
    auto c = F.one();
    for (int ell = 1; ell <= g; ++ell) {
      for (int b = 0; b < n; ++b) {
        Kamb[(std::size_t)b] =
            F.add(Kamb[(std::size_t)b], F.mul(c, Nv[(std::size_t)(ell - 1)][(std::size_t)b]));
        Lamb[(std::size_t)b] =
            F.add(Lamb[(std::size_t)b], F.mul(c, BNv[(std::size_t)(ell - 1)][(std::size_t)b]));
      }
      c = F.mul(c, zp);
    }
    const std::size_t d = frame.B.cols;
    op.K.assign(d, 0);
    op.L.assign(d, 0);
    for (std::size_t i = 0; i < d; ++i)
      for (int b = 0; b < n; ++b) {
        op.K[i] = F.add(op.K[i], F.mul(frame.proj.at(i, (std::size_t)b), Kamb[(std::size_t)b]));
        op.L[i] = F.add(op.L[i], F.mul(frame.B.at((std::size_t)b, i), Lamb[(std::size_t)b]));
      }
    op.tilde = Matrix<Fp>(F, d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) op.tilde.at(i, j) = F.mul(op.K[i], op.L[j]);
    op.full_scale = F.inv(F.mul(2, F.pow(pt.denom(F, a), F.p)));
    bool kz = true, lz = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (!F.is_zero(op.K[i])) kz = false;
      if (!F.is_zero(op.L[i])) lz = false;
    }
    op.degenerate = kz || lz;
    ops.push_back(std::move(op));
  }
  return ops;
}

// Direct oracle: apply the covariant derivative in direction a to a section
// p times, carrying the section as polynomial numerators over powers of the
// full discriminant Delta = prod_{i<j}(z_i - z_j), then evaluate.
inline std::vector<u64> pcurv_oracle_apply(const Fp& F, int g, const EvaluationPoint& pt, int a,
                                           std::vector<MultiPoly<Fp>> P) {
  const int n = 2 * g + 1;
  auto frame = VFrame::build(F, g);
  auto sys = restrict_system(F, kz_weight_system(F, g, 1, 2), frame.B, frame.proj);
  const std::size_t d = sys.dimension;
  if (P.size() != d) throw std::invalid_argument("oracle: section dimension mismatch");
  MultiPoly<Fp> Delta = constant<Fp>(F, 0, n, 1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) Delta = mul_linear_diff(F, Delta, i, j);
  auto dDelta = deriv(F, Delta, a);
  std::vector<MultiPoly<Fp>> Qaj;
  for (int j = 0; j < n; ++j)
    Qaj.push_back(j == a ? make_zero<Fp>(0, n) : div_linear_diff(F, Delta, a, j));
  auto kinv = F.inv(F.from_int(sys.kappa));
  for (u64 step = 0; step < F.p; ++step) {
    std::vector<MultiPoly<Fp>> next(d, make_zero<Fp>(0, n));
    for (std::size_t b = 0; b < d; ++b) {
      next[b] = mul(F, deriv(F, P[b], a), Delta);
      if (step > 0 && !P[b].is_zero())
        next[b] = sub(F, next[b], scale(F, mul(F, P[b], dDelta), F.from_int((i64)step)));
    }
    for (int j = 0; j < n; ++j) {
      if (j == a) continue;
      const auto& om = sys.omega(a, j);
      for (std::size_t b = 0; b < d; ++b) {
        MultiPoly<Fp> row = make_zero<Fp>(0, n);
        for (std::size_t cidx = 0; cidx < d; ++cidx)
          if (!F.is_zero(om.at(b, cidx)) && !P[cidx].is_zero())
            row = add(F, row, scale(F, P[cidx], om.at(b, cidx)));
        if (!row.is_zero())
          next[b] = sub(F, next[b], scale(F, mul(F, row, Qaj[(std::size_t)j]), kinv));
      }
    }
    P = std::move(next);
  }
  auto Dval = F.inv(F.pow(eval(F, Delta, pt.z), F.p));
  std::vector<u64> out(d, 0);
  for (std::size_t b = 0; b < d; ++b) out[b] = F.mul(eval(F, P[b], pt.z), Dval);
  return out;
}

inline Matrix<Fp> pcurv_direct_oracle(const Fp& F, int g, const EvaluationPoint& pt, int a) {
  if (g > 2 || F.p > 11)
    throw BudgetExceeded("direct p-curvature oracle capped at g=2, p<=11");
  const int n = 2 * g + 1;
  const std::size_t d = (std::size_t)(2 * g);
  Matrix<Fp> out(F, d, d);
  for (std::size_t col = 0; col < d; ++col) {
    std::vector<MultiPoly<Fp>> P(d, make_zero<Fp>(0, n));
    P[col] = constant<Fp>(F, 0, n, 1);
    auto vals = pcurv_oracle_apply(F, g, pt, a, std::move(P));
    for (std::size_t b = 0; b < d; ++b) out.at(b, col) = vals[b];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Good bases and the Poincare element
// ---------------------------------------------------------------------------

struct GoodBasis {
  int g = 0;
  Matrix<Fp> P;    // columns v_1..v_g, w_1..w_g in V-coordinates
  Matrix<Fp> Pinv; // rows x_1..x_g, y_1..y_g
  std::vector<u64> delta_V; // Poincare element in wedge-of-V coordinates
  bool good = false;        // false = preliminary only
};

// Poincare element in ambient wedge coordinates over the weight space.
inline std::vector<u64> poincare_ambient(const Fp& F, int g, const EvaluationPoint& pt) {
  const int n = 2 * g + 1;
  WedgeSpace W(n, 2);
  std::vector<u64> out(W.dim(), 0);
  for (std::size_t b = 0; b < W.dim(); ++b) {
    int i1 = W.basis[b][0], i2 = W.basis[b][1];
    auto diff = F.sub(pt.z[(std::size_t)i1], pt.z[(std::size_t)i2]);
    auto s = F.add(F.inv(pt.denom(F, i1)), F.inv(pt.denom(F, i2)));
    out[b] = F.mul(F.mul(2, F.inv(diff)), s);
  }
  return out;
}

// The same element in coordinates of the wedge square of the V-frame.
inline std::vector<u64> poincare_V(const Fp& F, int g, const EvaluationPoint& pt,
                                   const VFrame& frame) {
  const int n = 2 * g + 1;
  auto amb = poincare_ambient(F, g, pt);
  WedgeSpace Wamb(n, 2);
  const std::size_t d = frame.B.cols;
  WedgeSpace Wv((int)d, 2);
  Matrix<Fp> Bw(F, Wamb.dim(), Wv.dim());
  for (std::size_t c = 0; c < Wv.dim(); ++c) {
    std::vector<std::vector<u64>> pick;
    for (int t : Wv.basis[c]) {
      std::vector<u64> v(frame.B.rows);
      for (std::size_t i = 0; i < frame.B.rows; ++i) v[i] = frame.B.at(i, (std::size_t)t);
      pick.push_back(std::move(v));
    }
    auto w = wedge_of_vectors(F, Wamb, pick);
    for (std::size_t i = 0; i < w.size(); ++i) Bw.at(i, c) = w[i];
  }
  try {
    return solve(F, Bw, amb);
  } catch (const std::domain_error&) {
    throw std::domain_error("Poincare element escapes the wedge of the carrier");
  }
}

// Matrix of the map (x wedge) on wedge powers of a d-dimensional space, from
// wedge-r to wedge-(r+2) coordinates, for x given in wedge-2 coordinates.
template <class F>
Matrix<F> wedge_mult_by(const F& K, int d, int r, const std::vector<typename F::Elem>& x2) {
  WedgeSpace Wr(d, r), W2(d, 2), Wt(d, r + 2);
  Matrix<F> out(K, Wt.dim(), Wr.dim());
  for (std::size_t c = 0; c < Wr.dim(); ++c)
    for (std::size_t b = 0; b < W2.dim(); ++b) {
      if (K.is_zero(x2[b])) continue;
      // Merge the index sets; drop collisions; sign by transposition count.
      std::vector<int> merged = Wr.basis[c];
      bool dead = false;
      int sign = 1;
      for (int idx : W2.basis[b]) {
        std::size_t pos = 0;
        while (pos < merged.size() && merged[pos] < idx) ++pos;
        if (pos < merged.size() && merged[pos] == idx) {
          dead = true;
          break;
        }
        sign *= ((merged.size() - pos) % 2 == 0) ? 1 : -1;
        merged.insert(merged.begin() + (std::ptrdiff_t)pos, idx);
      }
      if (dead) continue;
      auto row = (std::size_t)Wt.index.at(merged);
      auto val = sign > 0 ? x2[b] : K.neg(x2[b]);
      out.at(row, c) = K.add(out.at(row, c), val);
    }
  return out;
}

inline GoodBasis build_good_basis(const Fp& F, int g, const EvaluationPoint& pt,
                                  const VFrame& frame,
                                  const std::vector<CurvatureOp>* precomputed = nullptr) {
  const std::size_t d = frame.B.cols; // 2g
  GoodBasis gb;
  gb.g = g;
  auto Nv = family_point_values(F, Family::N, g, pt);
  auto BNv = family_point_values(F, Family::BarN, g, pt);
  (void)precomputed;
  // Covector rows x_i = S(., bar N^i) in V-coordinates.
  Matrix<Fp> X(F, (std::size_t)g, d);
  for (int i = 0; i < g; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      u64 acc = 0;
      for (std::size_t b = 0; b < frame.B.rows; ++b)
        acc = F.add(acc, F.mul(BNv[(std::size_t)i][b], frame.B.at(b, j)));
      X.at((std::size_t)i, j) = acc;
    }
  // w_i = N^i in V-coordinates.
  Matrix<Fp> Wcols(F, d, (std::size_t)g);
  for (int i = 0; i < g; ++i)
    for (std::size_t r = 0; r < d; ++r) {
      u64 acc = 0;
      for (std::size_t b = 0; b < frame.B.rows; ++b)
        acc = F.add(acc, F.mul(frame.proj.at(r, b), Nv[(std::size_t)i][b]));
      Wcols.at(r, (std::size_t)i) = acc;
    }
  // v_j: the deterministic particular solution of X v = e_j (non-pivot
  // coordinates zeroed fixes the freedom of adding w-combinations).
  Matrix<Fp> Vcols(F, d, (std::size_t)g);
  for (int j = 0; j < g; ++j) {
    std::vector<u64> e((std::size_t)g, 0);
    e[(std::size_t)j] = 1;
    std::vector<u64> sol;
    try {
      sol = solve(F, X, e);
    } catch (const std::domain_error&) {
      throw ExceptionalPrime(F.p, "degenerate x-covectors at the evaluation point");
    }
    for (std::size_t r = 0; r < d; ++r) Vcols.at(r, (std::size_t)j) = sol[r];
  }
  auto assemble = [&](const Matrix<Fp>& vc) {
    Matrix<Fp> P(F, d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (int i = 0; i < g; ++i) {
        P.at(r, (std::size_t)i) = vc.at(r, (std::size_t)i);
        P.at(r, (std::size_t)(g + i)) = Wcols.at(r, (std::size_t)i);
      }
    return P;
  };
  gb.P = assemble(Vcols);
  gb.Pinv = inverse(F, gb.P);
  // Express the Poincare element in the preliminary wedge basis and correct
  // the v-vectors so it becomes proportional to sum v_i ^ w_i.
  auto dV = poincare_V(F, g, pt, frame);
  WedgeSpace Wv((int)d, 2);
  std::vector<std::vector<u64>> cols;
  for (std::size_t c = 0; c < Wv.dim(); ++c) {
    std::vector<std::vector<u64>> pick;
    for (int t : Wv.basis[c]) {
      std::vector<u64> v(d);
      for (std::size_t r = 0; r < d; ++r) v[r] = gb.P.at(r, (std::size_t)t);
      pick.push_back(std::move(v));
    }
    cols.push_back(wedge_of_vectors(F, Wv, pick));
  }
  Matrix<Fp> Pw(F, Wv.dim(), Wv.dim());
  for (std::size_t c = 0; c < Wv.dim(); ++c)
    for (std::size_t r = 0; r < Wv.dim(); ++r) Pw.at(r, c) = cols[c][r];
  auto coeff = solve(F, Pw, dV);
  auto at_pair = [&](int i, int j) { // coefficient on basis-index pair {i, j}
    std::vector<int> key{std::min(i, j), std::max(i, j)};
    return coeff[(std::size_t)Wv.index.at(key)];
  };
  u64 eps = at_pair(0, g); // coefficient of v_1 ^ w_1
  if (F.is_zero(eps))
    throw std::domain_error("Poincare element lies in the w-wedge span at this point");
  auto einv = F.inv(eps);
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) {
      auto cij = F.mul(at_pair(g + i, g + j), einv);
      if (F.is_zero(cij)) continue;
      for (std::size_t r = 0; r < d; ++r)
        Vcols.at(r, (std::size_t)i) =
            F.sub(Vcols.at(r, (std::size_t)i), F.mul(cij, Wcols.at(r, (std::size_t)j)));
    }
  gb.P = assemble(Vcols);
  gb.Pinv = inverse(F, gb.P);
  gb.delta_V = dV;
  gb.good = true;
  return gb;
}

// Operator matrix rewritten in the good-basis coordinates.
inline Matrix<Fp> in_good_basis(const Fp& F, const GoodBasis& gb, const Matrix<Fp>& op) {
  return mat_mul(F, gb.Pinv, mat_mul(F, op, gb.P));
}

// Poincare element in good-basis wedge-2 coordinates (exactly sum v_i ^ w_i
// up to the stored proportionality when the basis is good).
inline std::vector<u64> delta_good(const Fp& F, const GoodBasis& gb) {
  const int d = (int)gb.P.rows;
  WedgeSpace Wv(d, 2);
  std::vector<u64> out(Wv.dim(), 0);
  for (int i = 0; i < gb.g; ++i) {
    std::vector<int> key{i, gb.g + i};
    out[(std::size_t)Wv.index.at(key)] = F.one();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wedge extensions and subspace utilities
// ---------------------------------------------------------------------------

// Leibniz extension of an operator on a d-dimensional space to wedge-r.
template <class F>
Matrix<F> wedge_extend(const F& K, const Matrix<F>& M, int r) {
  const int d = (int)M.rows;
  WedgeSpace W(d, r);
  Matrix<F> out(K, W.dim(), W.dim());
  for (std::size_t c = 0; c < W.dim(); ++c) {
    const auto& J = W.basis[c];
    for (int pos = 0; pos < r; ++pos)
      for (int img = 0; img < d; ++img) {
        auto val = M.at((std::size_t)img, (std::size_t)J[(std::size_t)pos]);
        if (K.is_zero(val)) continue;
        std::vector<int> idx = J;
        idx[(std::size_t)pos] = img;
        // Sort with sign; collisions vanish.
        int sign = 1;
        bool dead = false;
        for (std::size_t i = 0; i + 1 < idx.size() && !dead; ++i)
          for (std::size_t j = 0; j + 1 < idx.size() - i; ++j) {
            if (idx[j] == idx[j + 1]) {
              dead = true;
              break;
            }
            if (idx[j] > idx[j + 1]) {
              std::swap(idx[j], idx[j + 1]);
              sign = -sign;
            }
          }
        if (dead || idx[idx.size() - 1] == idx[idx.size() - 2]) continue;
        auto row = (std::size_t)W.index.at(idx);
        out.at(row, c) = K.add(out.at(row, c), sign > 0 ? val : K.neg(val));
      }
  }
  return out;
}

// Common kernel of a family of operators restricted to the span of selected
// coordinate indices; returns kernel vectors in the full coordinates.
inline std::vector<std::vector<u64>> common_kernel_on(const Fp& F,
                                                      const std::vector<Matrix<Fp>>& ops,
                                                      const std::vector<std::size_t>& cols) {
  if (ops.empty()) return {};
  const std::size_t dim = ops[0].rows;
  Matrix<Fp> stacked(F, ops.size() * dim, cols.size());
  for (std::size_t o = 0; o < ops.size(); ++o)
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < cols.size(); ++c)
        stacked.at(o * dim + r, c) = ops[o].at(r, cols[c]);
  auto ker = kernel(F, stacked);
  std::vector<std::vector<u64>> out;
  for (auto& k : ker) {
    std::vector<u64> full(dim, 0);
    for (std::size_t c = 0; c < cols.size(); ++c) full[cols[c]] = k[c];
    out.push_back(std::move(full));
  }
  return out;
}

// Indices of the wedge-r good-basis monomials with exactly k v-factors.
inline std::vector<std::size_t> block_indices(int g, int r, int k) {
  WedgeSpace W(2 * g, r);
  std::vector<std::size_t> out;
  for (std::size_t b = 0; b < W.dim(); ++b) {
    int vcount = 0;
    for (int idx : W.basis[b])
      if (idx < g) ++vcount;
    if (vcount == k) out.push_back(b);
  }
  return out;
}

// Basis (full-coordinate vectors) of the primitive part of wedge-r: the exact
// kernel of wedging g-r+1 times with the Poincare element.
inline std::vector<std::vector<u64>> primitive_subspace(const Fp& F, int g, int r,
                                                        const std::vector<u64>& delta2) {
  const int d = 2 * g;
  Matrix<Fp> acc;
  bool first = true;
  int cur = r;
  for (int step = 0; step < g - r + 1; ++step) {
    auto M = wedge_mult_by(F, d, cur, delta2);
    acc = first ? M : mat_mul(F, M, acc);
    first = false;
    cur += 2;
  }
  return kernel(F, acc);
}

// dim(span of a + span of b) via stacked rank.
inline std::size_t joint_dim(const Fp& F, const std::vector<std::vector<u64>>& a,
                             const std::vector<std::vector<u64>>& b) {
  std::vector<std::vector<u64>> all = a;
  all.insert(all.end(), b.begin(), b.end());
  return span_dim(F, all);
}

inline bool same_span(const Fp& F, const std::vector<std::vector<u64>>& a,
                      const std::vector<std::vector<u64>>& b) {
  auto da = span_dim(F, a), db = span_dim(F, b);
  return da == db && joint_dim(F, a, b) == da;
}

// Vectors of a spanned inside span of b.
inline bool contained_in(const Fp& F, const std::vector<std::vector<u64>>& a,
                         const std::vector<std::vector<u64>>& b) {
  return joint_dim(F, a, b) == span_dim(F, b);
}

// The elements alpha_k, beta_k spanning the kernel block between one v-factor
// and two w-factors, in good-basis wedge-3 coordinates.
inline std::vector<std::vector<u64>> alpha_beta_elements(const Fp& F, int g) {
  WedgeSpace W(2 * g, 3);
  std::vector<std::vector<u64>> out;
  auto put = [&](std::vector<u64>& vec, int vidx, int wa, int wb, int sgn) {
    // v_{vidx} ^ w_{wa} ^ w_{wb}, all 1-based, wa < wb.
    if (vidx < 1 || vidx > g) return;
    std::vector<int> key{vidx - 1, g + wa - 1, g + wb - 1};
    auto pos = (std::size_t)W.index.at(key);
    vec[pos] = F.add(vec[pos], sgn > 0 ? F.one() : F.neg(F.one()));
  };
  for (int k = 1; k <= g - 1; ++k) {
    std::vector<u64> al(W.dim(), 0), be(W.dim(), 0);
    for (int a = 1; a <= k; ++a)
      for (int b = k + 1; b <= g; ++b) {
        put(al, a + b - k - 1, a, b, 1);
        put(be, a + b - k, a, b, 1);
      }
    out.push_back(std::move(al));
    out.push_back(std::move(be));
  }
  return out;
}

// The analogous elements in the one-v, three-w block of wedge-4.
inline std::vector<std::vector<u64>> alpha_i_elements(const Fp& F, int g) {
  WedgeSpace W(2 * g, 4);
  std::vector<std::vector<u64>> out;
  for (int i = 0; i <= 2; ++i)
    for (int k1 = 1; k1 < g; ++k1)
      for (int k2 = k1 + 1; k2 <= g - 1; ++k2) {
        std::vector<u64> el(W.dim(), 0);
        bool nonzero = false;
        for (int a = 1; a <= k1; ++a)
          for (int b = k1 + 1; b <= k2; ++b)
            for (int c = k2 + 1; c <= g; ++c) {
              int vidx = a + b + c - k1 - k2 - 2 + i;
              if (vidx < 1 || vidx > g) continue;
              std::vector<int> key{vidx - 1, g + a - 1, g + b - 1, g + c - 1};
              auto pos = (std::size_t)W.index.at(key);
              el[pos] = F.add(el[pos], F.one());
              nonzero = true;
            }
        if (nonzero) out.push_back(std::move(el));
      }
  return out;
}

// ---------------------------------------------------------------------------
// Kodaira-Spencer maps
// ---------------------------------------------------------------------------

// The reduced map on W = (mu-block) + (nu-block) at a point: the mu-block is
// sent to rank-1 combinations of the nu-block, the nu-block to zero.
template <class F>
Matrix<F> ks_tilde_matrix(const F& K, int g, const std::vector<typename F::Elem>& z, int a) {
  Matrix<F> out(K, (std::size_t)(2 * g), (std::size_t)(2 * g));
  std::vector<typename F::Elem> pw;
  auto c = K.one();
  for (int k = 0; k < g; ++k) {
    pw.push_back(c);
    c = K.mul(c, z[(std::size_t)a]);
  }
  for (int k = 0; k < g; ++k)
    for (int l = 0; l < g; ++l)
      out.at((std::size_t)(g + l), (std::size_t)k) =
          K.mul(pw[(std::size_t)k], pw[(std::size_t)l]);
  return out;
}

// ---------------------------------------------------------------------------
// Orthogonality across the two families
// ---------------------------------------------------------------------------

// Exact vanishing certificate for the pairing of a plus-family and a
// minus-family solution when the symbolic product is out of budget. The
// pairing is a symmetric homogeneous polynomial killed by every partial
// derivative (duality of the two connections), hence a symmetric homogeneous
// polynomial in p-th powers; it is reconstructed exactly from point values in
// the monomial-symmetric basis and checked to be zero.
struct OrthoReport {
  bool zero = false;
  std::string method; // "symbolic" | "degree" | "interpolation"
  std::string detail;
};

namespace detail {

inline void partitions_rec(int remaining, int max_part, int max_len, std::vector<int>& cur,
                           std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  if ((int)cur.size() == max_len) return;
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    cur.push_back(part);
    partitions_rec(remaining - part, part, max_len, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<int>> partitions(int total, int max_len) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  partitions_rec(total, total, max_len, cur, out);
  return out;
}

// Monomial symmetric polynomial m_lambda at a point over a field-like ring.
template <class F>
typename F::Elem monomial_symmetric(const F& K, const std::vector<int>& lambda,
                                    const std::vector<typename F::Elem>& x) {
  const int n = (int)x.size();
  std::vector<int> exps(lambda);
  exps.resize((std::size_t)n, 0);
  std::sort(exps.begin(), exps.end());
  auto acc = K.zero();
  do {
    auto term = K.one();
    for (int i = 0; i < n; ++i) {
      for (int e = 0; e < exps[(std::size_t)i]; ++e) term = K.mul(term, x[(std::size_t)i]);
    }
    acc = K.add(acc, term);
  } while (std::next_permutation(exps.begin(), exps.end()));
  return acc;
}

} // namespace detail

inline OrthoReport orthogonality_pair(const Fp& F, int g, int r, const std::vector<int>& ellN,
                                      const std::vector<int>& ellBar, Rng& rng,
                                      long symbolic_budget = 10000000) {
  const int n = 2 * g + 1;
  long degN = family_degree(F, Family::N, g, r, ellN);
  long degB = family_degree(F, Family::BarN, g, r, ellBar);
  long delta = degN + degB;
  bool small = true;
  {
    // A loose bound: the dense monomial counts of both coordinates.
    auto bound = [&](long deg) {
      double c = 1;
      for (int i = 1; i <= n - 1; ++i) c = c * (double)(deg + i) / (double)i;
      return c;
    };
    if (bound(degN) * 4 > (double)symbolic_budget || bound(degB) * 4 > (double)symbolic_budget ||
        bound(degN) * bound(degB) > 1e8)
      small = false;
  }
  if (small) {
    try {
      auto a = build_solution(F, Family::N, g, r, ellN);
      auto b = build_solution(F, Family::BarN, g, r, ellBar);
      auto s = poly_shapovalov(F, a, b);
      return {s.is_zero(), "symbolic", "pairing expanded and cancelled exactly"};
    } catch (const BudgetExceeded&) {
      // fall through to the exact out-of-budget certificate
    }
  }
  if (delta % (long)F.p != 0)
    return {true, "degree",
            "pairing is homogeneous of degree " + std::to_string(delta) +
                " and constant under all derivatives; p does not divide the degree"};
  const int d = (int)(delta / (long)F.p);
  auto lambdas = detail::partitions(d, n);
  // Extension field large enough to make the interpolation system generic.
  int k = 1;
  u128 size = F.p;
  while (size < (u128)4096 * (u64)(d + 1)) {
    size *= F.p;
    ++k;
  }
  ExtField G(F, k);
  auto An = prefactor_poly(F, Family::N, r);
  auto Ab = prefactor_poly(F, Family::BarN, r);
  const std::size_t unknowns = lambdas.size();
  const std::size_t rows = unknowns + 8;
  Matrix<ExtField> Msys(G, rows, unknowns);
  std::vector<ExtField::Elem> rhs;
  for (std::size_t rw = 0; rw < rows; ++rw) {
    std::vector<ExtField::Elem> z;
    for (int i = 0; i < n; ++i) {
      ExtField::Elem e(G.k);
      for (auto& c : e) c = rng.fp_elem(F);
      z.push_back(std::move(e));
    }
    auto va = family_values_at(G, Family::N, g, r, F.p, ellN, An, z);
    auto vb = family_values_at(G, Family::BarN, g, r, F.p, ellBar, Ab, z);
    auto s = G.zero();
    for (std::size_t b = 0; b < va.size(); ++b) s = G.add(s, G.mul(va[b], vb[b]));
    rhs.push_back(s);
    std::vector<ExtField::Elem> zp;
    for (auto& e : z) zp.push_back(G.pow(e, F.p));
    for (std::size_t cidx = 0; cidx < unknowns; ++cidx)
      Msys.at(rw, cidx) = detail::monomial_symmetric(G, lambdas[cidx], zp);
  }
  if (rank(G, Msys) != unknowns)
    return {false, "interpolation", "interpolation system degenerate; exceptional-point event"};
  std::vector<ExtField::Elem> sol;
  try {
    sol = solve(G, Msys, rhs);
  } catch (const std::domain_error&) {
    return {false, "interpolation", "pairing values inconsistent with a zero polynomial"};
  }
  for (auto& c : sol)
    if (!G.is_zero(c))
      return {false, "interpolation", "reconstructed pairing polynomial is nonzero"};
  return {true, "interpolation",
          "pairing lies in the p-th power subring; exact reconstruction over " +
              std::to_string(unknowns) + " symmetric monomials vanishes"};
}

} // namespace kzc
