#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "engine/phyper.hpp"

using namespace kzc;

namespace {

// Oracle: assemble the full multivariate master form in the (r, n) layout —
// prefactor times the product of Psi(t_j)^m / (t_j - z_{i_j}) — apply the
// symmetrization over the t-block, and read off the target t-coefficient.
// Slow but definitionally direct; used to validate the slice-cache route.
MultiPoly<Fp> direct_coordinate(const Fp& F, Family fam, int g, const std::vector<int>& ell,
                                const std::vector<int>& ivec) {
  const int r = (int)ivec.size();
  const int n = 2 * g + 1;
  const int m = psi_exponent(fam, F.p);
  MultiPoly<Fp> prod = constant<Fp>(F, r, n, 1);
  for (int j = 0; j < r; ++j) {
    MultiPoly<Fp> psi = constant<Fp>(F, r, n, 1);
    for (int a = 0; a < n; ++a) psi = mul_linear_diff(F, psi, j, r + a);
    MultiPoly<Fp> pw = constant<Fp>(F, r, n, 1);
    for (int e = 0; e < m; ++e) pw = mul(F, pw, psi);
    prod = mul(F, prod, div_linear_diff(F, pw, j, r + ivec[(std::size_t)j]));
  }
  auto A = prefactor_poly(F, fam, r);
  std::vector<std::pair<std::vector<u16>, u64>> lifted;
  for (std::size_t t = 0; t < A.size(); ++t) {
    std::vector<u16> e(A.exp(t), A.exp(t) + r);
    e.resize((std::size_t)(r + n), 0);
    lifted.emplace_back(std::move(e), A.coeffs[t]);
  }
  prod = mul(F, prod, from_terms<Fp>(F, r, n, std::move(lifted)));
  auto sym = family_traits(fam).sym_op ? symmetrize_t(F, prod) : antisymmetrize_t(F, prod);
  return p_integral(F, sym, F.p, ell);
}

const std::vector<Family> kAllFamilies = {Family::N, Family::M, Family::BarN, Family::BarM,
                                          Family::TildeM};

} // namespace

TEST_CASE("slice-cache coordinates match the direct multivariate expansion") {
  Fp F(7);
  const int g = 2;
  for (Family fam : kAllFamilies) {
    CAPTURE(family_name(fam));
    SliceCache cache = SliceCache::build(F, g, psi_exponent(fam, F.p));
    auto A = prefactor_poly(F, fam, 2);
    bool sym = family_traits(fam).sym_op;
    for (auto [l1, l2] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 2}}) {
      for (auto iv : {std::vector<int>{0, 1}, std::vector<int>{1, 3}}) {
        auto fast = master_coordinate(F, cache, A, sym, {l1, l2}, iv);
        auto slow = direct_coordinate(F, fam, g, {l1, l2}, iv);
        CHECK(equal(fast, slow));
      }
    }
  }
}

TEST_CASE("relabeling the z-block reproduces every coordinate from one tuple") {
  Fp F(7);
  const int g = 2, r = 2;
  for (Family fam : {Family::N, Family::BarN, Family::TildeM}) {
    CAPTURE(family_name(fam));
    SliceCache cache = SliceCache::build(F, g, psi_exponent(fam, F.p));
    auto A = prefactor_poly(F, fam, r);
    bool sym = family_traits(fam).sym_op;
    auto v = build_solution(F, fam, g, r, {1, 2}, &cache, &A);
    auto basis = family_basis(fam, g, r);
    REQUIRE(v.dim() == basis.size());
    for (std::size_t b = 0; b < basis.size(); ++b)
      CHECK(equal(v.coords[b], master_coordinate(F, cache, A, sym, {1, 2}, basis[b])));
  }
}

TEST_CASE("built families solve their connection systems at g=2, p=7") {
  Fp F(7);
  const int g = 2, r = 2;
  auto plus_w = kz_weight_system(F, g, r, 2);
  auto minus_w = kz_weight_system(F, g, r, -2);
  auto plus_x = kz_wedge_system(F, g, r, 2);
  auto minus_x = kz_wedge_system(F, g, r, -2);
  WeightSpace W(g, r);
  auto e = e_matrix(F, W);

  auto check_sing = [&](const PolyVector<Fp>& v) {
    auto img = mat_vec_poly(F, e, v.coords);
    for (auto& c : img) CHECK(c.is_zero());
  };

  auto vN = build_solution(F, Family::N, g, r, {1, 2});
  REQUIRE_FALSE(vN.is_zero());
  CHECK(verify_solution(plus_w, vN, VerifyMode::symbolic).pass);
  check_sing(vN);

  auto vM = build_solution(F, Family::M, g, r, {1, 2});
  REQUIRE_FALSE(vM.is_zero());
  CHECK(verify_solution(plus_x, vM, VerifyMode::symbolic).pass);

  auto vBN = build_solution(F, Family::BarN, g, r, {1, 3});
  REQUIRE_FALSE(vBN.is_zero());
  CHECK(verify_solution(minus_w, vBN, VerifyMode::symbolic).pass);
  check_sing(vBN);
  CHECK_FALSE(verify_solution(plus_w, vBN, VerifyMode::symbolic).pass);

  auto vBM = build_solution(F, Family::BarM, g, r, {1, 2});
  REQUIRE_FALSE(vBM.is_zero());
  CHECK(verify_solution(minus_x, vBM, VerifyMode::symbolic).pass);

  auto vTM = build_solution(F, Family::TildeM, g, r, {1, 3});
  REQUIRE_FALSE(vTM.is_zero());
  CHECK(verify_solution(minus_x, vTM, VerifyMode::symbolic).pass);
}

TEST_CASE("plus-family solutions vanish for indices above g") {
  Fp F(7);
  for (int g = 2; g <= 3; ++g) {
    SliceCache cache = SliceCache::build(F, g, psi_exponent(Family::N, F.p));
    auto A1 = prefactor_poly(F, Family::N, 1);
    for (int ell = g + 1; ell <= g + 2; ++ell)
      CHECK(build_solution(F, Family::N, g, 1, {ell}, &cache, &A1).is_zero());
    CHECK_FALSE(build_solution(F, Family::N, g, 1, {g}, &cache, &A1).is_zero());
  }
  // Same for the wedge-valued plus family at r = 2.
  SliceCache c2 = SliceCache::build(F, 2, psi_exponent(Family::M, F.p));
  auto A2 = prefactor_poly(F, Family::M, 2);
  CHECK(build_solution(F, Family::M, 2, 2, {1, 3}, &c2, &A2).is_zero());
  CHECK_FALSE(build_solution(F, Family::M, 2, 2, {1, 2}, &c2, &A2).is_zero());
}

TEST_CASE("index symmetries: skew or symmetric per family") {
  Fp F(7);
  const int g = 2, r = 2;
  for (Family fam : kAllFamilies) {
    CAPTURE(family_name(fam));
    SliceCache cache = SliceCache::build(F, g, psi_exponent(fam, F.p));
    auto A = prefactor_poly(F, fam, r);
    bool sym = family_traits(fam).sym_op;
    if (family_traits(fam).ell_skew) {
      auto a = master_coordinate(F, cache, A, sym, {1, 2}, {0, 1});
      auto swapped = master_coordinate(F, cache, A, sym, {2, 1}, {0, 1});
      CHECK_FALSE(a.is_zero());
      CHECK(equal(swapped, negate(F, a)));
      CHECK(master_coordinate(F, cache, A, sym, {2, 2}, {0, 1}).is_zero());
    } else {
      auto a = master_coordinate(F, cache, A, sym, {1, 3}, {0, 1});
      auto swapped = master_coordinate(F, cache, A, sym, {3, 1}, {0, 1});
      CHECK_FALSE(a.is_zero());
      CHECK(equal(swapped, a));
    }
  }
  // Carrier-index swap: skew for the wedge families, symmetric for the
  // weight-space ones (whose basis vectors carry unordered index sets).
  for (Family fam : kAllFamilies) {
    CAPTURE(family_name(fam));
    SliceCache cache = SliceCache::build(F, g, psi_exponent(fam, F.p));
    auto A = prefactor_poly(F, fam, r);
    bool sym = family_traits(fam).sym_op;
    std::vector<int> ell = family_traits(fam).ell_skew ? std::vector<int>{1, 2}
                                                       : std::vector<int>{1, 3};
    auto a = master_coordinate(F, cache, A, sym, ell, {0, 2});
    auto b = master_coordinate(F, cache, A, sym, ell, {2, 0});
    if (family_traits(fam).wedge_carrier) CHECK(equal(b, negate(F, a)));
    else CHECK(equal(b, a));
  }
}

TEST_CASE("coordinates are homogeneous of the predicted degree") {
  Fp F(7);
  const int g = 2, r = 2;
  for (Family fam : kAllFamilies) {
    CAPTURE(family_name(fam));
    std::vector<int> ell = family_traits(fam).ell_skew ? std::vector<int>{1, 2}
                                                       : std::vector<int>{1, 3};
    auto v = build_solution(F, fam, g, r, ell);
    REQUIRE_FALSE(v.is_zero());
    long d = family_degree(F, fam, g, r, ell);
    for (auto& c : v.coords) {
      CHECK(is_homogeneous(c));
      if (!c.is_zero()) CHECK((long)total_degree(c) == d);
    }
  }
}

TEST_CASE("minus-family relations at g=2: the symmetric weight family") {
  Fp F(7);
  const int g = 2, r = 2;
  SliceCache cache = SliceCache::build(F, g, psi_exponent(Family::BarN, F.p));
  auto A = prefactor_poly(F, Family::BarN, r);
  auto bn = [&](int l1, int l2) {
    return build_solution(F, Family::BarN, g, r, {l1, l2}, &cache, &A);
  };
  CHECK(bn(1, 1).is_zero());
  CHECK(bn(1, 2).is_zero());
  CHECK(bn(2, 3).is_zero());
  CHECK(bn(3, 3).is_zero());
  auto v22 = bn(2, 2);
  auto v13 = bn(1, 3);
  REQUIRE_FALSE(v13.is_zero());
  // v22 + 2 v13 = 0 coordinatewise.
  for (std::size_t b = 0; b < v22.dim(); ++b)
    CHECK(add(F, v22.coords[b], scale(F, v13.coords[b], F.from_int(2))).is_zero());
}

TEST_CASE("renumbering expands the twisted family in the skew one") {
  // r = 2 closed form: coefficient +1 on (l1-1, l2) and -1 on (l1, l2-1).
  auto c = renumber_tilde({2, 4});
  REQUIRE(c.size() == 2);
  CHECK(c.at({1, 4}) == 1);
  CHECK(c.at({2, 3}) == -1);
  // Entries below 1 are dropped.
  auto c2 = renumber_tilde({1, 3});
  REQUIRE(c2.size() == 1);
  CHECK(c2.at({1, 2}) == -1);
  // Adjacent indices collapse entirely.
  CHECK(renumber_tilde({1, 2}).empty());
  // A tuple mapping onto itself with multiplicity two.
  auto c3 = renumber_tilde({2, 2});
  REQUIRE(c3.size() == 1);
  CHECK(c3.at({1, 2}) == 2);
  // r = 3 case keeps only tuples with distinct positive entries.
  auto c4 = renumber_tilde({1, 3, 5});
  REQUIRE(c4.count({1, 2, 3}) == 1);
  for (auto& [t, coeff] : c4) {
    CHECK(t[0] >= 1);
    CHECK((t[0] < t[1] && t[1] < t[2]));
  }
}

TEST_CASE("renumbering identities hold for the constructed solutions") {
  Fp F(7);
  const int g = 2, r = 2;
  SliceCache cache = SliceCache::build(F, g, psi_exponent(Family::BarM, F.p));
  auto Abar = prefactor_poly(F, Family::BarM, r);
  auto Atil = prefactor_poly(F, Family::TildeM, r);
  auto bm = [&](std::vector<int> ell) {
    return build_solution(F, Family::BarM, g, r, ell, &cache, &Abar);
  };
  auto tm = [&](std::vector<int> ell) {
    return build_solution(F, Family::TildeM, g, r, ell, &cache, &Atil);
  };
  // Boundary vanishing of the twisted family.
  CHECK(tm({1, 1}).is_zero());
  CHECK(tm({1, 2}).is_zero());
  CHECK(tm({g, g + 1}).is_zero());
  CHECK(tm({g + 1, g + 1}).is_zero());
  // tm at any tuple equals the renumbered combination of bm solutions.
  for (auto ell : {std::vector<int>{1, 3}, std::vector<int>{2, 2}, std::vector<int>{2, 3}}) {
    auto lhs = tm(ell);
    auto expansion = renumber_tilde(ell);
    PolyVector<Fp> rhs = zero_vector<Fp>(lhs.n, lhs.dim());
    for (auto& [t, coeff] : expansion) {
      auto term = bm(t);
      for (std::size_t b = 0; b < rhs.dim(); ++b)
        rhs.coords[b] = add(F, rhs.coords[b], scale(F, term.coords[b], F.from_int(coeff)));
    }
    for (std::size_t b = 0; b < lhs.dim(); ++b) CHECK(equal(lhs.coords[b], rhs.coords[b]));
  }
}

TEST_CASE("telescoping sums of the twisted family vanish") {
  Fp F(11);
  const int g = 3, r = 2;
  SliceCache cache = SliceCache::build(F, g, psi_exponent(Family::TildeM, F.p));
  auto A = prefactor_poly(F, Family::TildeM, r);
  auto tm = [&](int l1, int l2) {
    return build_solution(F, Family::TildeM, g, r, {l1, l2}, &cache, &A);
  };
  // sum_{k=0}^{l-1} tm(l-k, l+1+k) = 0.
  for (int l = 2; l <= 3; ++l) {
    PolyVector<Fp> acc;
    for (int k = 0; k < l; ++k) {
      auto term = tm(l - k, l + 1 + k);
      if (acc.coords.empty()) acc = term;
      else
        for (std::size_t b = 0; b < acc.dim(); ++b)
          acc.coords[b] = add(F, acc.coords[b], term.coords[b]);
    }
    CHECK(acc.is_zero());
  }
  // tm(l, l) + 2 * sum_{k>=1} tm(l-k, l+1+k)... the diagonal variant at l = 2:
  // tm(2,2) + 2*tm(1,3) has the inner sum running over the single term tm(1,3).
  {
    auto diag = tm(2, 2);
    auto off = tm(1, 3);
    for (std::size_t b = 0; b < diag.dim(); ++b)
      CHECK(add(F, diag.coords[b], scale(F, off.coords[b], F.from_int(2))).is_zero());
  }
}

TEST_CASE("generic rank measures the span of the minus weight family") {
  Fp F(7);
  Rng rng(17);
  const int g = 2;
  // r = 1: indices 1..g+2 span a g-dimensional space.
  {
    SliceCache cache = SliceCache::build(F, g, psi_exponent(Family::BarN, F.p));
    auto A = prefactor_poly(F, Family::BarN, 1);
    std::vector<PolyVector<Fp>> fam;
    for (int l = 1; l <= g + 2; ++l)
      fam.push_back(build_solution(F, Family::BarN, g, 1, {l}, &cache, &A));
    CHECK(generic_rank(F, fam, rng) == (std::size_t)g);
  }
  // r = 2 at g = 2: all tuples collapse onto a single line.
  {
    SliceCache cache = SliceCache::build(F, g, psi_exponent(Family::BarN, F.p));
    auto A = prefactor_poly(F, Family::BarN, 2);
    std::vector<PolyVector<Fp>> fam;
    for (auto ell : {std::vector<int>{1, 3}, std::vector<int>{2, 2}})
      fam.push_back(build_solution(F, Family::BarN, g, 2, ell, &cache, &A));
    CHECK(generic_rank(F, fam, rng) == 1);
  }
  // The plus weight family at r = 1 has full rank g.
  {
    SliceCache cache = SliceCache::build(F, g, psi_exponent(Family::N, F.p));
    auto A = prefactor_poly(F, Family::N, 1);
    std::vector<PolyVector<Fp>> fam;
    for (int l = 1; l <= g; ++l)
      fam.push_back(build_solution(F, Family::N, g, 1, {l}, &cache, &A));
    CHECK(generic_rank(F, fam, rng) == (std::size_t)g);
  }
}

TEST_CASE("the two wedge families pair to zero") {
  Fp F(7);
  const int g = 2, r = 2;
  auto vM = build_solution(F, Family::M, g, r, {1, 2});
  auto vBM = build_solution(F, Family::BarM, g, r, {1, 2});
  CHECK(poly_shapovalov(F, vM, vBM).is_zero());
  auto vN = build_solution(F, Family::N, g, r, {1, 2});
  auto vBN = build_solution(F, Family::BarN, g, r, {1, 3});
  CHECK(poly_shapovalov(F, vN, vBN).is_zero());
}

TEST_CASE("argument validation") {
  Fp F(7);
  CHECK_THROWS_AS(build_solution(F, Family::N, 2, 0, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_solution(F, Family::N, 2, 3, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(build_solution(F, Family::N, 2, 2, {1}), std::invalid_argument);
  SliceCache cache = SliceCache::build(F, 2, 3);
  auto A = prefactor_poly(F, Family::N, 2);
  CHECK_THROWS_AS(master_coordinate(F, cache, A, false, {0, 1}, {0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(master_coordinate(F, cache, A, false, {1}, {0}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Point-evaluation route
// ---------------------------------------------------------------------------

#include "engine/pointeval.hpp"

TEST_CASE("dual numbers differentiate polynomial evaluation") {
  Fp F(11);
  ExtField G(F, 2);
  DualRing<ExtField> D(G);
  Rng rng(23);
  // A random 3-variable polynomial, differentiated in each direction.
  std::vector<std::pair<std::vector<u16>, u64>> tl;
  for (int t = 0; t < 8; ++t) {
    std::vector<u16> e(3);
    for (auto& x : e) x = (u16)rng.below(4);
    tl.emplace_back(std::move(e), rng.fp_elem(F));
  }
  auto poly = from_terms<Fp>(F, 0, 3, std::move(tl));
  std::vector<ExtField::Elem> pt;
  for (int a = 0; a < 3; ++a) {
    ExtField::Elem e(G.k);
    for (auto& c : e) c = rng.fp_elem(F);
    pt.push_back(std::move(e));
  }
  for (int dir = 0; dir < 3; ++dir) {
    std::vector<DualRing<ExtField>::Elem> dpt;
    for (int a = 0; a < 3; ++a)
      dpt.push_back(a == dir ? D.variable(pt[(std::size_t)a]) : D.constant(pt[(std::size_t)a]));
    auto dv = eval_lifted(D, poly, dpt);
    CHECK(G.eq(dv.a, eval_lifted(G, poly, pt)));
    CHECK(G.eq(dv.b, eval_lifted(G, deriv(F, poly, dir), pt)));
  }
}

TEST_CASE("point slices agree with evaluated symbolic coordinates") {
  Fp F(7);
  const int g = 2, r = 2, n = 5;
  Rng rng(31);
  std::vector<u64> zpt = rng.distinct_point(F, n);
  for (Family fam : kAllFamilies) {
    CAPTURE(family_name(fam));
    auto A = prefactor_poly(F, fam, r);
    std::vector<int> ell = family_traits(fam).ell_skew ? std::vector<int>{1, 2}
                                                       : std::vector<int>{1, 3};
    auto v = build_solution(F, fam, g, r, ell);
    auto vals = family_values_at(F, fam, g, r, F.p, ell, A, zpt);
    REQUIRE(vals.size() == v.dim());
    for (std::size_t b = 0; b < v.dim(); ++b)
      CHECK(vals[b] == eval(F, v.coords[b], zpt));
  }
}

TEST_CASE("point verification accepts the families and rejects a swap") {
  Fp F(7);
  Rng rng(41);
  const int g = 2;
  for (Family fam : kAllFamilies) {
    CAPTURE(family_name(fam));
    std::vector<int> ell = family_traits(fam).ell_skew ? std::vector<int>{1, 2}
                                                       : std::vector<int>{1, 3};
    auto verdict = verify_family_at_points(F, fam, g, 2, ell, rng, 2);
    CHECK(verdict.pass);
  }
  CHECK(verify_family_at_points(F, Family::N, g, 1, {1}, rng, 2).pass);
  CHECK(verify_family_at_points(F, Family::BarN, g, 1, {2}, rng, 2).pass);
  // Checking a family against the opposite connection must fail.
  auto wrong_w = kz_weight_system(F, g, 2, -2);
  CHECK_FALSE(verify_family_at_points(F, Family::N, g, 2, {1, 2}, rng, 2, &wrong_w).pass);
  auto wrong_x = kz_wedge_system(F, g, 2, 2);
  CHECK_FALSE(verify_family_at_points(F, Family::BarM, g, 2, {1, 2}, rng, 2, &wrong_x).pass);
}

TEST_CASE("point verification scales to a case near the symbolic budget") {
  Fp F(11);
  Rng rng(53);
  auto verdict = verify_family_at_points(F, Family::BarN, 3, 2, {1, 3}, rng, 1);
  CHECK(verdict.pass);
  CHECK(verdict.detail.find("false-accept") != std::string::npos);
}
