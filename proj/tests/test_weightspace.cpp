#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "engine/weightspace.hpp"
#include "engine/rng.hpp"

using namespace kzc;

TEST_CASE("weight space dimensions and lexicographic basis order") {
  WeightSpace w(2, 2); // n = 5
  CHECK(w.dim() == 10);
  CHECK(w.basis.front() == std::vector<int>{0, 1});
  CHECK(w.basis.back() == std::vector<int>{3, 4});
  for (std::size_t i = 1; i < w.dim(); ++i) CHECK(w.basis[i - 1] < w.basis[i]);
}

TEST_CASE("singular space dimensions match the closed formulas") {
  for (int g = 1; g <= 4; ++g) {
    for (int r = 0; r <= g; ++r) {
      SingSpace s(g, r);
      int n = 2 * g + 1;
      CHECK((i64)s.dim() == sing_dim_formula(g, r));
      CHECK((i64)s.dim() == (i64)binom(n - 1, r) - (i64)binom(n - 1, r - 2));
    }
  }
  // The two closed forms agree over the full desk-scale range.
  for (int g = 1; g <= 6; ++g)
    for (int r = 0; r <= g; ++r) {
      int n = 2 * g + 1;
      CHECK((i64)binom(n, r) - (i64)binom(n, r - 1) ==
            (i64)binom(n - 1, r) - (i64)binom(n - 1, r - 2));
    }
  CHECK(SingSpace(2, 1).dim() == 4);
  CHECK(SingSpace(2, 2).dim() == 5);
  CHECK(SingSpace(3, 0).dim() == 1);
}

TEST_CASE("singular vectors are annihilated by e, over Q and mod p") {
  Rat Q;
  for (int g = 2; g <= 3; ++g)
    for (int r = 1; r <= g; ++r) {
      SingSpace s(g, r);
      auto e = e_matrix(Q, s.ambient);
      for (auto& v : s.basis) {
        auto img = mat_vec(Q, e, v);
        for (auto& x : img) CHECK(x == 0);
      }
      Fp F(13);
      auto ep = e_matrix(F, s.ambient);
      for (auto& v : s.basis_mod_p(F)) {
        auto img = mat_vec(F, ep, v);
        for (auto x : img) CHECK(x == 0);
      }
    }
}

TEST_CASE("weight 2g-1 singular space is the sum-zero hyperplane") {
  for (int g = 2; g <= 4; ++g) {
    SingSpace s(g, 1);
    CHECK((int)s.dim() == 2 * g);
    for (auto& v : s.basis) {
      mpq_class sum = 0;
      for (auto& c : v) sum += c;
      CHECK(sum == 0);
    }
  }
}

TEST_CASE("shapovalov form is the orthonormal dot product") {
  Fp F(7);
  WeightSpace w(2, 2);
  std::vector<u64> u(w.dim(), 0), v(w.dim(), 0);
  u[(std::size_t)w.index.at({0, 1})] = 1;
  v[(std::size_t)w.index.at({0, 1})] = 1;
  CHECK(shapovalov(F, u, v) == 1);
  v.assign(w.dim(), 0);
  v[(std::size_t)w.index.at({0, 2})] = 1;
  CHECK(shapovalov(F, u, v) == 0);
}

TEST_CASE("gram matrix of singular vectors is invertible over Q") {
  Rat Q;
  SingSpace s(2, 1);
  Matrix<Rat> gram(Q, s.dim(), s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = 0; j < s.dim(); ++j)
      gram.at(i, j) = shapovalov(Q, s.basis[i], s.basis[j]);
  CHECK(determinant(Q, gram) != 0);
}

TEST_CASE("permutation operators act by membership swap and square to one") {
  Fp F(11);
  WeightSpace w1(2, 1);
  auto P = permutation_matrix(F, w1, 0, 1);
  std::vector<u64> w_1(w1.dim(), 0);
  w_1[(std::size_t)w1.index.at({0})] = 1;
  auto img = mat_vec(F, P, w_1);
  CHECK(img[(std::size_t)w1.index.at({1})] == 1);
  std::vector<u64> w_3(w1.dim(), 0);
  w_3[(std::size_t)w1.index.at({2})] = 1;
  CHECK(mat_vec(F, P, w_3) == w_3);
  // (P^{(i,j)})^2 = identity for all i < j at g = 3.
  WeightSpace w3(3, 2);
  auto id = identity(F, w3.dim());
  for (int i = 0; i < w3.n; ++i)
    for (int j = i + 1; j < w3.n; ++j) {
      auto Pij = permutation_matrix(F, w3, i, j);
      CHECK(mat_mul(F, Pij, Pij).a == id.a);
    }
  CHECK_THROWS(permutation_matrix(F, w3, 2, 2));
}

TEST_CASE("permutation operators commute with e (sl2 equivariance)") {
  Fp F(13);
  WeightSpace w(3, 2);
  WeightSpace wup(3, 1);
  auto e_lo = e_matrix(F, w);
  for (int i = 0; i < w.n; ++i)
    for (int j = i + 1; j < w.n; ++j) {
      auto P_lo = permutation_matrix(F, w, i, j);
      auto P_up = permutation_matrix(F, wup, i, j);
      CHECK(mat_mul(F, e_lo, P_lo).a == mat_mul(F, P_up, e_lo).a);
    }
}

TEST_CASE("wedge of singular vectors spans a space of dimension C(2g, r)") {
  Fp F(13);
  for (int g = 2; g <= 3; ++g) {
    SingSpace s(g, 1);
    auto sb = s.basis_mod_p(F);
    int n = 2 * g + 1;
    for (int r = 2; r <= 3; ++r) {
      WedgeSpace W(n, r);
      std::vector<std::vector<u64>> wedges;
      for (auto& tuple : subsets_lex((int)sb.size(), r)) {
        std::vector<std::vector<u64>> pick;
        for (int t : tuple) pick.push_back(sb[(std::size_t)t]);
        wedges.push_back(wedge_of_vectors(F, W, pick));
      }
      CHECK(span_dim(F, wedges) == binom(2 * g, r));
    }
  }
}

TEST_CASE("wedge shapovalov equals the determinant of slot pairings") {
  Fp F(101);
  Rng rng(5);
  WedgeSpace W(6, 3);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<u64>> a(3, std::vector<u64>(6)), b(3, std::vector<u64>(6));
    for (auto& v : a)
      for (auto& x : v) x = rng.fp_elem(F);
    for (auto& v : b)
      for (auto& x : v) x = rng.fp_elem(F);
    auto wa = wedge_of_vectors(F, W, a), wb = wedge_of_vectors(F, W, b);
    Matrix<Fp> gram(F, 3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gram.at(i, j) = shapovalov(F, a[i], b[j]);
    CHECK(wedge_shapovalov(F, wa, wb) == determinant(F, gram));
  }
}

TEST_CASE("leibniz wedge extension acts as a derivation on decomposables") {
  Fp F(101);
  Rng rng(9);
  WedgeSpace W(5, 2);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix<Fp> B(F, 5, 5);
    for (auto& x : B.a) x = rng.fp_elem(F);
    std::vector<u64> u(5), v(5);
    for (auto& x : u) x = rng.fp_elem(F);
    for (auto& x : v) x = rng.fp_elem(F);
    auto lhs = mat_vec(F, wedge_leibniz(F, B, W), wedge_of_vectors(F, W, {u, v}));
    auto Bu = mat_vec(F, B, u), Bv = mat_vec(F, B, v);
    auto rhs1 = wedge_of_vectors(F, W, {Bu, v});
    auto rhs2 = wedge_of_vectors(F, W, {u, Bv});
    for (std::size_t i = 0; i < lhs.size(); ++i)
      CHECK(lhs[i] == F.add(rhs1[i], rhs2[i]));
  }
}
