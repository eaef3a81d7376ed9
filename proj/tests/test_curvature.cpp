#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "engine/curvature.hpp"
#include "engine/rat.hpp"

using namespace kzc;

namespace {

bool mat_is_zero(const Fp& F, const Matrix<Fp>& m) {
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (!F.is_zero(m.at(i, j))) return false;
  return true;
}

bool mat_eq(const Fp& F, const Matrix<Fp>& a, const Matrix<Fp>& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j)
      if (!F.eq(a.at(i, j), b.at(i, j))) return false;
  return true;
}

std::vector<u64> apply(const Fp& F, const Matrix<Fp>& m, const std::vector<u64>& v) {
  std::vector<u64> out(m.rows, 0);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out[i] = F.add(out[i], F.mul(m.at(i, j), v[j]));
  return out;
}

bool vec_is_zero(const Fp& F, const std::vector<u64>& v) {
  for (auto x : v)
    if (!F.is_zero(x)) return false;
  return true;
}

// Everything at one evaluation point that the audits below share.
struct Fiber {
  Fp F;
  int g;
  EvaluationPoint pt;
  VFrame frame;
  std::vector<CurvatureOp> ops;
  GoodBasis gb;
  std::vector<Matrix<Fp>> good_tilde; // operators in good-basis coordinates

  Fiber(u64 p, int g_, Rng& rng)
      : F(p), g(g_), pt(EvaluationPoint::random(F, g_, rng)), frame(VFrame::build(F, g_)),
        ops(pcurv_explicit(F, g_, pt, frame)), gb(build_good_basis(F, g_, pt, frame)) {
    for (auto& op : ops) good_tilde.push_back(in_good_basis(F, gb, op.tilde));
  }
};

} // namespace

TEST_CASE("evaluation points validate their invariants") {
  Fp F(7);
  CHECK_THROWS_AS(EvaluationPoint(F, 2, {1, 2, 3, 4, 1}), std::invalid_argument);
  CHECK_THROWS_AS(EvaluationPoint(F, 3, {1, 2, 3, 4, 5, 6, 0}), std::invalid_argument);
  CHECK_THROWS_AS(EvaluationPoint(F, 2, {1, 2, 3, 4}), std::invalid_argument);
  EvaluationPoint pt(F, 2, {0, 1, 2, 3, 5});
  for (int a = 0; a < 5; ++a) CHECK_FALSE(F.is_zero(pt.denom(F, a)));
}

TEST_CASE("explicit operators: rank one, square zero, kernel of dimension g") {
  Rng rng(11);
  for (auto [p, g] : {std::pair<u64, int>{7, 2}, {11, 3}}) {
    CAPTURE(p);
    CAPTURE(g);
    Fiber f(p, g, rng);
    const int n = 2 * g + 1;
    REQUIRE((int)f.ops.size() == n);
    std::vector<Matrix<Fp>> mats;
    for (auto& op : f.ops) {
      CHECK_FALSE(op.degenerate);
      CHECK(rank(f.F, op.tilde) == 1);
      CHECK(mat_is_zero(f.F, mat_mul(f.F, op.tilde, op.tilde)));
      mats.push_back(op.tilde);
    }
    auto ker = common_kernel(f.F, mats);
    CHECK(ker.size() == (std::size_t)g);
    // The kernel is exactly the span of the plus-family values.
    auto Nv = family_point_values(f.F, Family::N, g, f.pt);
    std::vector<std::vector<u64>> Ncoords;
    for (auto& amb : Nv) {
      std::vector<u64> c(f.frame.proj.rows, 0);
      for (std::size_t i = 0; i < f.frame.proj.rows; ++i)
        for (std::size_t j = 0; j < f.frame.proj.cols; ++j)
          c[i] = f.F.add(c[i], f.F.mul(f.frame.proj.at(i, j), amb[j]));
      Ncoords.push_back(std::move(c));
      CHECK(vec_is_zero(f.F, apply(f.F, mats[0], Ncoords.back())));
    }
    CHECK(same_span(f.F, ker, Ncoords));
  }
}

TEST_CASE("direct covariant-power oracle matches the closed formula") {
  Rng rng(23);
  Fp F(7);
  const int g = 2;
  EvaluationPoint pt = EvaluationPoint::random(F, g, rng);
  auto frame = VFrame::build(F, g);
  auto ops = pcurv_explicit(F, g, pt, frame);
  for (int a : {0, 3}) {
    auto oracle = pcurv_direct_oracle(F, g, pt, a);
    Matrix<Fp> expected(F, oracle.rows, oracle.cols);
    for (std::size_t i = 0; i < oracle.rows; ++i)
      for (std::size_t j = 0; j < oracle.cols; ++j)
        expected.at(i, j) = F.mul(ops[(std::size_t)a].full_scale, ops[(std::size_t)a].tilde.at(i, j));
    CHECK(mat_eq(F, oracle, expected));
  }
  CHECK_THROWS_AS(pcurv_direct_oracle(Fp(13), 2, EvaluationPoint(Fp(13), 2, {1, 2, 3, 4, 5}), 0),
                  BudgetExceeded);
}

TEST_CASE("oracle is linear over the rational function field") {
  Rng rng(29);
  Fp F(7);
  const int g = 2, n = 5;
  EvaluationPoint pt = EvaluationPoint::random(F, g, rng);
  auto oracle = pcurv_direct_oracle(F, g, pt, 1);
  // Apply the p-th covariant power to f * e_2 for a random polynomial f.
  std::vector<std::pair<std::vector<u16>, u64>> terms;
  terms.emplace_back(std::vector<u16>{1, 0, 2, 0, 0}, 3);
  terms.emplace_back(std::vector<u16>{0, 1, 0, 0, 2}, 5);
  auto fpoly = from_terms<Fp>(F, 0, n, std::move(terms));
  std::vector<MultiPoly<Fp>> sec(4, make_zero<Fp>(0, n));
  sec[2] = fpoly;
  auto vals = pcurv_oracle_apply(F, g, pt, 1, sec);
  auto fval = eval(F, fpoly, pt.z);
  for (std::size_t b = 0; b < vals.size(); ++b)
    CHECK(F.eq(vals[b], F.mul(fval, oracle.at(b, 2))));
}

TEST_CASE("covariant derivatives commute with the curvature operators") {
  Rng rng(31);
  Fp F(7);
  const int g = 2, n = 5;
  auto frame = VFrame::build(F, g);
  auto sys = restrict_system(F, kz_weight_system(F, g, 1, 2), frame.B, frame.proj);
  const std::size_t d = sys.dimension;
  auto An = prefactor_poly(F, Family::N, 1);
  auto Ab = prefactor_poly(F, Family::BarN, 1);
  DualRing<Fp> D(F);
  auto z = rng.distinct_point(F, n);
  const int a = 0, b = 2;
  // Dual evaluation: z_a carries the infinitesimal direction.
  std::vector<DualRing<Fp>::Elem> zd;
  for (int i = 0; i < n; ++i)
    zd.push_back(i == a ? D.variable(z[(std::size_t)i]) : D.constant(z[(std::size_t)i]));
  std::vector<std::vector<DualRing<Fp>::Elem>> Nv, Bv;
  for (int ell = 1; ell <= g; ++ell) {
    Nv.push_back(family_values_at(D, Family::N, g, 1, F.p, {ell}, An, zd));
    Bv.push_back(family_values_at(D, Family::BarN, g, 1, F.p, {ell}, Ab, zd));
  }
  // The operator entries as dual numbers; p-th powers carry no dual part.
  auto zbp = F.pow(z[(std::size_t)b], F.p);
  std::vector<DualRing<Fp>::Elem> Kc(d, D.zero()), Lc(d, D.zero());
  auto c = F.one();
  for (int ell = 0; ell < g; ++ell) {
    for (std::size_t i = 0; i < d; ++i)
      for (int amb = 0; amb < n; ++amb) {
        auto pj = D.constant(frame.proj.at(i, (std::size_t)amb));
        auto bs = D.constant(frame.B.at((std::size_t)amb, i));
        Kc[i] = D.add(Kc[i], D.mul(D.constant(c), D.mul(pj, Nv[(std::size_t)ell][(std::size_t)amb])));
        Lc[i] = D.add(Lc[i], D.mul(D.constant(c), D.mul(bs, Bv[(std::size_t)ell][(std::size_t)amb])));
      }
    c = F.mul(c, zbp);
  }
  // Value and derivative parts of the operator matrix.
  Matrix<Fp> M(F, d, d), dM(F, d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      auto e = D.mul(Kc[i], Lc[j]);
      M.at(i, j) = e.a;
      dM.at(i, j) = e.b;
    }
  // Residual of the commutator identity in direction a at the point.
  auto kinv = F.inv(F.from_int(sys.kappa));
  Matrix<Fp> resid = dM;
  for (int j = 0; j < n; ++j) {
    if (j == a) continue;
    auto cf = F.mul(kinv, F.inv(F.sub(z[(std::size_t)a], z[(std::size_t)j])));
    auto comm = mat_mul(F, sys.omega(a, j), M);
    auto back = mat_mul(F, M, sys.omega(a, j));
    for (std::size_t u = 0; u < d; ++u)
      for (std::size_t v = 0; v < d; ++v)
        resid.at(u, v) = F.sub(resid.at(u, v), F.mul(cf, F.sub(comm.at(u, v), back.at(u, v))));
  }
  CHECK(mat_is_zero(F, resid));
}

TEST_CASE("good basis: defining relations and the Poincare alignment") {
  Rng rng(37);
  for (auto [p, g] : {std::pair<u64, int>{7, 2}, {11, 3}}) {
    CAPTURE(p);
    CAPTURE(g);
    Fiber f(p, g, rng);
    const std::size_t d = (std::size_t)(2 * g);
    REQUIRE(f.gb.good);
    // x_i(v_j) = delta_ij and x_i(w_j) = 0 read off from the inverse rows.
    auto BNv = family_point_values(f.F, Family::BarN, g, f.pt);
    for (int i = 0; i < g; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        u64 acc = 0;
        for (std::size_t amb = 0; amb < f.frame.B.rows; ++amb) {
          u64 bij = 0;
          for (std::size_t r = 0; r < d; ++r)
            bij = f.F.add(bij, f.F.mul(f.frame.B.at(amb, r), f.gb.P.at(r, j)));
          acc = f.F.add(acc, f.F.mul(BNv[(std::size_t)i][amb], bij));
        }
        u64 want = (j == (std::size_t)i) ? 1 : 0;
        CHECK(f.F.eq(acc, want));
      }
    // The Poincare element expands as a multiple of sum v_i ^ w_i.
    WedgeSpace Wv(2 * g, 2);
    std::vector<std::vector<u64>> cols;
    for (std::size_t cdx = 0; cdx < Wv.dim(); ++cdx) {
      std::vector<std::vector<u64>> pick;
      for (int t : Wv.basis[cdx]) {
        std::vector<u64> v(d);
        for (std::size_t r = 0; r < d; ++r) v[r] = f.gb.P.at(r, (std::size_t)t);
        pick.push_back(std::move(v));
      }
      cols.push_back(wedge_of_vectors(f.F, Wv, pick));
    }
    Matrix<Fp> Pw(f.F, Wv.dim(), Wv.dim());
    for (std::size_t cdx = 0; cdx < Wv.dim(); ++cdx)
      for (std::size_t r = 0; r < Wv.dim(); ++r) Pw.at(r, cdx) = cols[cdx][r];
    auto coeff = solve(f.F, Pw, f.gb.delta_V);
    u64 epsv = 0;
    for (std::size_t bdx = 0; bdx < Wv.dim(); ++bdx) {
      int i1 = Wv.basis[bdx][0], i2 = Wv.basis[bdx][1];
      bool diag = (i2 == i1 + g);
      if (diag) {
        if (epsv == 0) epsv = coeff[bdx];
        CHECK(f.F.eq(coeff[bdx], epsv));
        CHECK_FALSE(f.F.is_zero(coeff[bdx]));
      } else {
        CHECK(f.F.is_zero(coeff[bdx]));
      }
    }
  }
}

TEST_CASE("operators in the good basis take the rank-one staircase form") {
  Rng rng(41);
  Fiber f(7, 2, rng);
  const int g = 2, n = 5;
  std::vector<u64> zp;
  for (int i = 0; i < n; ++i) zp.push_back(f.F.pow(f.pt.z[(std::size_t)i], f.F.p));
  for (int a = 0; a < n; ++a) {
    auto ks = ks_tilde_matrix(f.F, g, zp, a);
    CHECK(mat_eq(f.F, f.good_tilde[(std::size_t)a], ks));
  }
}

TEST_CASE("wedge extension: Poincare element and w-wedges are killed") {
  Rng rng(43);
  for (auto [p, g] : {std::pair<u64, int>{7, 2}, {11, 3}}) {
    CAPTURE(g);
    Fiber f(p, g, rng);
    auto dg = delta_good(f.F, g == f.gb.g ? f.gb : f.gb);
    for (auto& m : f.good_tilde) {
      auto w2 = wedge_extend(f.F, m, 2);
      CHECK(vec_is_zero(f.F, apply(f.F, w2, dg)));
      // w_i ^ w_j basis vectors lie in the kernel.
      WedgeSpace Wv(2 * g, 2);
      for (int i = g; i < 2 * g; ++i)
        for (int j = i + 1; j < 2 * g; ++j) {
          std::vector<u64> e(Wv.dim(), 0);
          e[(std::size_t)Wv.index.at({i, j})] = 1;
          CHECK(vec_is_zero(f.F, apply(f.F, w2, e)));
        }
    }
    // The V-coordinate Poincare element is killed by the raw extensions.
    for (auto& op : f.ops) {
      auto w2 = wedge_extend(f.F, op.tilde, 2);
      CHECK(vec_is_zero(f.F, apply(f.F, w2, f.gb.delta_V)));
    }
  }
}

TEST_CASE("wedge extension squares to zero and respects the block grading") {
  Rng rng(47);
  Fiber f(11, 3, rng);
  const int g = 3;
  for (int r : {2, 3}) {
    for (std::size_t a = 0; a < f.good_tilde.size(); ++a) {
      auto w = wedge_extend(f.F, f.good_tilde[a], r);
      CHECK(mat_is_zero(f.F, mat_mul(f.F, w, w)));
      // Block structure: the k-v block maps into the (k-1)-v block.
      for (int k = 0; k <= r; ++k) {
        auto src = block_indices(g, r, k);
        for (auto c : src)
          for (std::size_t row = 0; row < w.rows; ++row) {
            if (f.F.is_zero(w.at(row, c))) continue;
            int vcount = 0;
            WedgeSpace W(2 * g, r);
            for (int idx : W.basis[row])
              if (idx < g) ++vcount;
            CHECK(vcount == k - 1);
          }
      }
    }
  }
}

TEST_CASE("kernel on the wedge square has the predicted shape") {
  Rng rng(53);
  for (auto [p, g] : {std::pair<u64, int>{7, 2}, {11, 3}}) {
    CAPTURE(g);
    Fiber f(p, g, rng);
    std::vector<Matrix<Fp>> w2;
    for (auto& m : f.good_tilde) w2.push_back(wedge_extend(f.F, m, 2));
    auto ker = common_kernel(f.F, w2);
    CHECK(ker.size() == (std::size_t)(g * (g - 1) / 2 + 1));
    // Predicted basis: the diagonal element and the w-wedges.
    std::vector<std::vector<u64>> predicted{delta_good(f.F, f.gb)};
    WedgeSpace Wv(2 * g, 2);
    for (int i = g; i < 2 * g; ++i)
      for (int j = i + 1; j < 2 * g; ++j) {
        std::vector<u64> e(Wv.dim(), 0);
        e[(std::size_t)Wv.index.at({i, j})] = 1;
        predicted.push_back(std::move(e));
      }
    CHECK(same_span(f.F, ker, predicted));
  }
}

TEST_CASE("primitive subspaces: dimensions and the g=3 block description") {
  Rng rng(59);
  Fiber f2(7, 2, rng);
  auto dg2 = delta_good(f2.F, f2.gb);
  CHECK(primitive_subspace(f2.F, 2, 2, dg2).size() == 5); // C(4,2) - C(4,0)
  Fiber f3(11, 3, rng);
  const int g = 3;
  auto dg = delta_good(f3.F, f3.gb);
  auto prim = primitive_subspace(f3.F, g, 2, dg);
  CHECK(prim.size() == (std::size_t)(15 - 1)); // C(6,2) - C(6,0)
  // Blockwise: full v-block and w-block, and the trace-zero mixed block.
  WedgeSpace Wv(2 * g, 2);
  auto in_block = [&](const std::vector<u64>& v, int k) {
    for (std::size_t b = 0; b < Wv.dim(); ++b) {
      if (f3.F.is_zero(v[b])) continue;
      int vc = 0;
      for (int idx : Wv.basis[b])
        if (idx < g) ++vc;
      if (vc != k) return false;
    }
    return true;
  };
  std::vector<std::vector<u64>> p20, p11, p02;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (i < j) {
        std::vector<u64> e(Wv.dim(), 0);
        e[(std::size_t)Wv.index.at({i, j})] = 1;
        p20.push_back(e);
        std::vector<u64> w(Wv.dim(), 0);
        w[(std::size_t)Wv.index.at({g + i, g + j})] = 1;
        p02.push_back(w);
      }
      if (i != j) {
        std::vector<u64> e(Wv.dim(), 0);
        e[(std::size_t)Wv.index.at({std::min(i, g + j), std::max(i, g + j)})] = 1;
        p11.push_back(e);
      }
    }
  for (int i = 1; i < g; ++i) { // v_1^w_1 - v_i^w_i
    std::vector<u64> e(Wv.dim(), 0);
    e[(std::size_t)Wv.index.at({0, g})] = 1;
    e[(std::size_t)Wv.index.at({i, g + i})] = f3.F.neg(f3.F.one());
    p11.push_back(e);
  }
  std::vector<std::vector<u64>> predicted = p20;
  predicted.insert(predicted.end(), p11.begin(), p11.end());
  predicted.insert(predicted.end(), p02.begin(), p02.end());
  CHECK(same_span(f3.F, prim, predicted));
  (void)in_block;

  // Image chain within the primitive part.
  std::vector<std::vector<u64>> im20, im11;
  for (auto& m : f3.good_tilde) {
    auto w2 = wedge_extend(f3.F, m, 2);
    for (auto& v : p20) im20.push_back(apply(f3.F, w2, v));
    for (auto& v : p11) im11.push_back(apply(f3.F, w2, v));
  }
  CHECK(same_span(f3.F, im20, p11));
  CHECK(same_span(f3.F, im11, p02));
  // Codimension of the total image inside the primitive part: C(g,2).
  std::vector<std::vector<u64>> im_all = im20;
  im_all.insert(im_all.end(), im11.begin(), im11.end());
  CHECK(contained_in(f3.F, im_all, prim));
  CHECK(prim.size() - span_dim(f3.F, im_all) == (std::size_t)(g * (g - 1) / 2));
}

TEST_CASE("wedge-cube kernels: blocks, spanning elements, primitive count") {
  Rng rng(61);
  for (auto [p, g] : {std::pair<u64, int>{11, 3}, {11, 4}}) {
    CAPTURE(g);
    Fiber f(p, g, rng);
    std::vector<Matrix<Fp>> w3;
    for (auto& m : f.good_tilde) w3.push_back(wedge_extend(f.F, m, 3));
    // Two-v one-w block: trivial kernel.
    CHECK(common_kernel_on(f.F, w3, block_indices(g, 3, 2)).empty());
    // Pure v block: trivial kernel.
    CHECK(common_kernel_on(f.F, w3, block_indices(g, 3, 3)).empty());
    // One-v two-w block: kernel spanned by the staircase elements.
    auto k12 = common_kernel_on(f.F, w3, block_indices(g, 3, 1));
    CHECK(k12.size() == (std::size_t)(2 * g - 2));
    auto ab = alpha_beta_elements(f.F, g);
    for (auto& el : ab)
      for (auto& m : w3) CHECK(vec_is_zero(f.F, apply(f.F, m, el)));
    CHECK(same_span(f.F, k12, ab));
    // Their intersection with the primitive part has dimension g-2.
    auto dg = delta_good(f.F, f.gb);
    auto prim = primitive_subspace(f.F, g, 3, dg);
    CHECK(prim.size() == (std::size_t)binom(2 * g, 3) - (std::size_t)binom(2 * g, 1));
    auto inter = (std::size_t)(span_dim(f.F, ab) + prim.size() - joint_dim(f.F, ab, prim));
    CHECK(inter == (std::size_t)(g - 2));
    // Kernel on the primitive part: C(g,3) + g - 2.
    std::vector<std::vector<u64>> prim_ker;
    {
      // Restrict the stacked operators to the primitive basis.
      Matrix<Fp> stacked(f.F, w3.size() * w3[0].rows, prim.size());
      for (std::size_t o = 0; o < w3.size(); ++o)
        for (std::size_t c = 0; c < prim.size(); ++c) {
          auto img = apply(f.F, w3[o], prim[c]);
          for (std::size_t r = 0; r < img.size(); ++r)
            stacked.at(o * w3[o].rows + r, c) = img[r];
        }
      auto ker = kernel(f.F, stacked);
      CHECK(ker.size() == (std::size_t)binom(g, 3) + (std::size_t)(g - 2));
    }
  }
}

TEST_CASE("one-v three-w block: candidate elements lie in the kernel") {
  Rng rng(67);
  Fiber f(11, 4, rng);
  const int g = 4;
  std::vector<Matrix<Fp>> w4;
  for (auto& m : f.good_tilde) w4.push_back(wedge_extend(f.F, m, 4));
  auto cands = alpha_i_elements(f.F, g);
  CHECK_FALSE(cands.empty());
  for (auto& el : cands)
    for (auto& m : w4) CHECK(vec_is_zero(f.F, apply(f.F, m, el)));
  // Measured kernel dimension on the block, reported against the expected
  // count (r-1) * C(g-1, r-2) = 3 * C(3, 2) = 9; recorded, not asserted.
  auto k13 = common_kernel_on(f.F, w4, block_indices(g, 4, 1));
  MESSAGE("one-v three-w kernel dimension at g=4: ", k13.size(),
          " (expected count 9, candidate span ", span_dim(f.F, cands), ")");
  CHECK(k13.size() >= span_dim(f.F, cands));
}

TEST_CASE("Kodaira-Spencer maps on the wedge cube over the rationals") {
  Rat Q;
  const int g = 4, n = 9;
  std::vector<Rat::Elem> z;
  for (int i = 0; i < n; ++i) z.push_back(Q.from_int(2 * i + 1));
  std::vector<Matrix<Rat>> w3;
  for (int a = 0; a < n; ++a)
    w3.push_back(wedge_extend(Q, ks_tilde_matrix(Q, g, z, a), 3));
  auto ker = common_kernel(Q, w3);
  CHECK(ker.size() == (std::size_t)binom(g, 3) + (std::size_t)(2 * g - 2)); // 10
  // Primitive part of the wedge cube and its kernel intersection.
  WedgeSpace Wv(2 * g, 2);
  std::vector<Rat::Elem> delta2(Wv.dim(), Q.zero());
  for (int k = 0; k < g; ++k) delta2[(std::size_t)Wv.index.at({k, g + k})] = Q.one();
  Matrix<Rat> acc;
  bool first = true;
  int cur = 3;
  for (int step = 0; step < g - 3 + 1; ++step) {
    auto M = wedge_mult_by(Q, 2 * g, cur, delta2);
    acc = first ? M : mat_mul(Q, M, acc);
    first = false;
    cur += 2;
  }
  auto prim = kernel(Q, acc);
  CHECK(prim.size() == (std::size_t)binom(2 * g, 3) - (std::size_t)binom(2 * g, 1)); // 48
  auto inter = span_dim(Q, ker) + prim.size() - [&] {
    std::vector<std::vector<Rat::Elem>> all = ker;
    all.insert(all.end(), prim.begin(), prim.end());
    return span_dim(Q, all);
  }();
  CHECK(inter == (std::size_t)binom(g, 3) + (std::size_t)(g - 2)); // 6
}

TEST_CASE("orthogonality: symbolic pairs vanish, controls do not") {
  Rng rng(71);
  Fp F(11);
  // r=1 pairs at g=2.
  for (int l = 1; l <= 3; ++l)
    for (int m = 1; m <= 3; ++m) {
      auto rep = orthogonality_pair(F, 2, 1, {l}, {m}, rng);
      CAPTURE(l);
      CAPTURE(m);
      CHECK(rep.zero);
      CHECK(rep.method == "symbolic");
    }
  // r=2 pair at g=2.
  auto rep2 = orthogonality_pair(F, 2, 2, {1, 2}, {1, 2}, rng);
  CHECK(rep2.zero);
  // Negative control: the plus family is not self-orthogonal.
  auto a = build_solution(F, Family::N, 2, 1, {1});
  auto s = poly_shapovalov(F, a, a);
  CHECK_FALSE(s.is_zero());
}

TEST_CASE("orthogonality: exact certificate for an out-of-budget pair") {
  Rng rng(73);
  Fp F(13);
  // Force the non-symbolic paths with a tiny budget.
  auto rep = orthogonality_pair(F, 2, 1, {1}, {1}, rng, 1);
  CHECK(rep.zero);
  CHECK((rep.method == "degree" || rep.method == "interpolation"));
  auto rep2 = orthogonality_pair(F, 2, 2, {1, 2}, {1, 2}, rng, 1);
  CHECK(rep2.zero);
}
