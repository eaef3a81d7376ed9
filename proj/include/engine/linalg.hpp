#pragma once
// Dense exact linear algebra over a field, with deterministic pivoting:
// elimination always picks the first nonzero entry in column order, so
// reduced forms, kernels, and ranks are reproducible across runs.

#include <stdexcept>
#include <vector>

namespace kzc {

template <class F>
struct Matrix {
  using Elem = typename F::Elem;
  std::size_t rows = 0, cols = 0;
  std::vector<Elem> a; // row-major

  Matrix() = default;
  Matrix(const F& K, std::size_t r, std::size_t c)
      : rows(r), cols(c), a(r * c, K.zero()) {}
  Elem& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Elem& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

template <class F>
Matrix<F> identity(const F& K, std::size_t n) {
  Matrix<F> m(K, n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = K.one();
  return m;
}

template <class F>
Matrix<F> mat_mul(const F& K, const Matrix<F>& x, const Matrix<F>& y) {
  if (x.cols != y.rows) throw std::invalid_argument("mat_mul: shape mismatch");
  Matrix<F> out(K, x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      if (K.is_zero(x.at(i, k))) continue;
      for (std::size_t j = 0; j < y.cols; ++j)
        out.at(i, j) = K.add(out.at(i, j), K.mul(x.at(i, k), y.at(k, j)));
    }
  return out;
}

template <class F>
std::vector<typename F::Elem> mat_vec(const F& K, const Matrix<F>& m,
                                      const std::vector<typename F::Elem>& v) {
  if (m.cols != v.size()) throw std::invalid_argument("mat_vec: shape mismatch");
  std::vector<typename F::Elem> out(m.rows, K.zero());
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (!K.is_zero(m.at(i, j)))
        out[i] = K.add(out[i], K.mul(m.at(i, j), v[j]));
  return out;
}

template <class F>
Matrix<F> transpose(const F& K, const Matrix<F>& m) {
  Matrix<F> out(K, m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out.at(j, i) = m.at(i, j);
  return out;
}

// In-place reduced row echelon form; returns pivot column list.
template <class F>
std::vector<std::size_t> rref(const F& K, Matrix<F>& m) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t sel = row;
    while (sel < m.rows && K.is_zero(m.at(sel, col))) ++sel;
    if (sel == m.rows) continue;
    for (std::size_t j = 0; j < m.cols; ++j) std::swap(m.at(sel, j), m.at(row, j));
    auto piv_inv = K.inv(m.at(row, col));
    for (std::size_t j = col; j < m.cols; ++j)
      m.at(row, j) = K.mul(m.at(row, j), piv_inv);
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == row || K.is_zero(m.at(i, col))) continue;
      auto f = m.at(i, col);
      for (std::size_t j = col; j < m.cols; ++j)
        m.at(i, j) = K.sub(m.at(i, j), K.mul(f, m.at(row, j)));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class F>
std::size_t rank(const F& K, Matrix<F> m) {
  return rref(K, m).size();
}

// Basis of the right null space; count = cols - rank.
template <class F>
std::vector<std::vector<typename F::Elem>> kernel(const F& K, Matrix<F> m) {
  auto pivots = rref(K, m);
  std::vector<char> is_pivot(m.cols, 0);
  for (auto c : pivots) is_pivot[c] = 1;
  std::vector<std::vector<typename F::Elem>> basis;
  for (std::size_t free_col = 0; free_col < m.cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<typename F::Elem> v(m.cols, K.zero());
    v[free_col] = K.one();
    for (std::size_t pi = 0; pi < pivots.size(); ++pi)
      v[pivots[pi]] = K.neg(m.at(pi, free_col));
    basis.push_back(std::move(v));
  }
  return basis;
}

// Solve M x = b; throws std::domain_error when inconsistent. Free variables
// (if any) are set to zero, deterministically.
template <class F>
std::vector<typename F::Elem> solve(const F& K, Matrix<F> m,
                                    const std::vector<typename F::Elem>& b) {
  if (m.rows != b.size()) throw std::invalid_argument("solve: shape mismatch");
  Matrix<F> aug(K, m.rows, m.cols + 1);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols) = b[i];
  }
  auto pivots = rref(K, aug);
  if (!pivots.empty() && pivots.back() == m.cols)
    throw std::domain_error("solve: inconsistent system");
  std::vector<typename F::Elem> x(m.cols, K.zero());
  for (std::size_t pi = 0; pi < pivots.size(); ++pi)
    x[pivots[pi]] = aug.at(pi, m.cols);
  return x;
}

template <class F>
Matrix<F> inverse(const F& K, const Matrix<F>& m) {
  if (m.rows != m.cols) throw std::invalid_argument("inverse: not square");
  Matrix<F> aug(K, m.rows, 2 * m.cols);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols + i) = K.one();
  }
  auto pivots = rref(K, aug);
  if (pivots.size() != m.rows || (pivots.size() && pivots.back() >= m.cols))
    throw std::domain_error("inverse: singular matrix");
  Matrix<F> out(K, m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out.at(i, j) = aug.at(i, m.cols + j);
  return out;
}

template <class F>
typename F::Elem determinant(const F& K, Matrix<F> m) {
  if (m.rows != m.cols) throw std::invalid_argument("determinant: not square");
  auto det = K.one();
  std::size_t n = m.rows;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t sel = col;
    while (sel < n && K.is_zero(m.at(sel, col))) ++sel;
    if (sel == n) return K.zero();
    if (sel != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(sel, j), m.at(col, j));
      det = K.neg(det);
    }
    det = K.mul(det, m.at(col, col));
    auto piv_inv = K.inv(m.at(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      if (K.is_zero(m.at(i, col))) continue;
      auto f = K.mul(m.at(i, col), piv_inv);
      for (std::size_t j = col; j < n; ++j)
        m.at(i, j) = K.sub(m.at(i, j), K.mul(f, m.at(col, j)));
    }
  }
  return det;
}

// Span dimension of a family of vectors (rows).
template <class F>
std::size_t span_dim(const F& K, const std::vector<std::vector<typename F::Elem>>& vecs) {
  if (vecs.empty()) return 0;
  Matrix<F> m(K, vecs.size(), vecs[0].size());
  for (std::size_t i = 0; i < vecs.size(); ++i)
    for (std::size_t j = 0; j < vecs[i].size(); ++j) m.at(i, j) = vecs[i][j];
  return rank(K, std::move(m));
}

// Intersection of a list of kernels: vectors annihilated by every matrix.
template <class F>
std::vector<std::vector<typename F::Elem>> common_kernel(
    const F& K, const std::vector<Matrix<F>>& mats) {
  if (mats.empty()) return {};
  std::size_t cols = mats[0].cols, rows = 0;
  for (auto& m : mats) {
    if (m.cols != cols) throw std::invalid_argument("common_kernel: shape mismatch");
    rows += m.rows;
  }
  Matrix<F> stacked(K, rows, cols);
  std::size_t off = 0;
  for (auto& m : mats) {
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) stacked.at(off + i, j) = m.at(i, j);
    off += m.rows;
  }
  return kernel(K, std::move(stacked));
}

} // namespace kzc
