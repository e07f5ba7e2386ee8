#pragma once

// Linear algebra over Z/m: Howell normal form, kernels, span membership.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "modring.hpp"

namespace kolyvagin {

using Vec = std::vector<Int>;

/// Dense row-major matrix over Z/m with entries kept in [0, m).
class MatrixZm {
 public:
  MatrixZm(Int m, std::size_t rows, std::size_t cols)
      : m_(Modulus(m).value()), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  MatrixZm(Int m, const std::vector<Vec>& rows, std::size_t cols) : MatrixZm(m, rows.size(), cols) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw std::invalid_argument("ragged matrix rows");
      for (std::size_t j = 0; j < cols; ++j) set(i, j, rows[i][j]);
    }
  }

  static MatrixZm identity(Int m, std::size_t n) {
    MatrixZm id(m, n, n);
    for (std::size_t i = 0; i < n; ++i) id.set(i, i, 1);
    return id;
  }

  Int modulus() const { return m_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Int at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, Int x) { data_[i * cols_ + j] = mod(x, m_); }

  Vec row(std::size_t i) const { return {data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_}; }
  bool row_is_zero(std::size_t i) const {
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != 0) return false;
    return true;
  }

  MatrixZm transpose() const {
    MatrixZm t(m_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.set(j, i, at(i, j));
    return t;
  }

  friend MatrixZm operator*(const MatrixZm& a, const MatrixZm& b) {
    if (a.m_ != b.m_) throw TypeMismatch("matrix moduli differ");
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix dimensions do not match");
    MatrixZm c(a.m_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        Int x = a.at(i, k);
        if (x == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          c.data_[i * c.cols_ + j] = mod(c.data_[i * c.cols_ + j] + mulmod(x, b.at(k, j), a.m_), a.m_);
      }
    return c;
  }

  friend bool operator==(const MatrixZm&, const MatrixZm&) = default;

  // Elementary row operations.
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap(data_[a * cols_ + j], data_[b * cols_ + j]);
  }
  void scale_row(std::size_t i, Int u) {
    for (std::size_t j = 0; j < cols_; ++j) set(i, j, mulmod(at(i, j), mod(u, m_), m_));
  }
  /// row dst += f * row src
  void add_row_multiple(std::size_t dst, std::size_t src, Int f) {
    f = mod(f, m_);
    if (f == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) set(dst, j, at(dst, j) + mulmod(f, at(src, j), m_));
  }
  /// (row a, row b) <- (s*a + t*b, x*a + y*b)
  void combine_rows(std::size_t a, std::size_t b, Int s, Int t, Int x, Int y) {
    for (std::size_t j = 0; j < cols_; ++j) {
      Int ra = at(a, j), rb = at(b, j);
      set(a, j, mulmod(mod(s, m_), ra, m_) + mulmod(mod(t, m_), rb, m_));
      set(b, j, mulmod(mod(x, m_), ra, m_) + mulmod(mod(y, m_), rb, m_));
    }
  }

 private:
  Int m_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Int> data_;
};

struct HowellResult {
  /// Howell form of A padded below with cols(A) zero rows; nonzero rows first.
  MatrixZm form;
  /// Invertible (rows+cols) square matrix with form = transform * [A; 0].
  MatrixZm transform;
};

/// Howell normal form. Every pivot is a divisor of m, entries above a pivot
/// g lie in [0, g), and for each pivot row with pivot g the multiple
/// (m/g)*row lies in the span of the rows below it, which gives the Howell
/// property: the rows with leading column >= j span every vector of the row
/// span whose first j entries vanish.
inline HowellResult howell_form(const MatrixZm& a) {
  const Int m = a.modulus();
  const std::size_t r = a.rows(), c = a.cols(), big = r + c;
  MatrixZm h(m, big, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) h.set(i, j, a.at(i, j));
  MatrixZm u = MatrixZm::identity(m, big);

  std::size_t p = 0;
  for (std::size_t j = 0; j < c && p < big; ++j) {
    std::size_t k = p;
    while (k < big && h.at(k, j) == 0) ++k;
    if (k == big) continue;
    h.swap_rows(p, k);
    u.swap_rows(p, k);
    for (std::size_t i = p + 1; i < big; ++i) {
      Int b = h.at(i, j);
      if (b == 0) continue;
      Int av = h.at(p, j);
      auto [g, s, t] = egcd(av, b);
      // determinant s*(-av/g) - t*(b/g) = -1: unimodular
      h.combine_rows(p, i, s, t, b / g, -(av / g));
      u.combine_rows(p, i, s, t, b / g, -(av / g));
    }
    Int unit = unit_normalizer(h.at(p, j), m);
    h.scale_row(p, unit);
    u.scale_row(p, unit);
    const Int g = h.at(p, j);
    for (std::size_t i = 0; i < p; ++i) {
      Int q = h.at(i, j) / g;
      h.add_row_multiple(i, p, -q);
      u.add_row_multiple(i, p, -q);
    }
    if (g > 1) {
      std::size_t z = p + 1;
      while (z < big && !h.row_is_zero(z)) ++z;
      if (z == big) throw std::logic_error("howell_form: no free row for annihilator");
      h.add_row_multiple(z, p, m / g);
      u.add_row_multiple(z, p, m / g);
    }
    ++p;
  }
  return {std::move(h), std::move(u)};
}

namespace detail {

inline std::size_t leading_column(const MatrixZm& h, std::size_t i) {
  for (std::size_t j = 0; j < h.cols(); ++j)
    if (h.at(i, j) != 0) return j;
  return h.cols();
}

}  // namespace detail

/// Nonzero rows of the Howell form of the given vectors: a spanning set of
/// the same submodule with at most `len` members.
inline std::vector<Vec> compact_span(const std::vector<Vec>& gens, std::size_t len, Int m) {
  if (gens.empty()) return {};
  auto hf = howell_form(MatrixZm(m, gens, len)).form;
  std::vector<Vec> out;
  for (std::size_t i = 0; i < hf.rows(); ++i)
    if (!hf.row_is_zero(i)) out.push_back(hf.row(i));
  return out;
}

/// Generators of {x : A x = 0}. Not minimal, but at most cols(A) of them.
inline std::vector<Vec> kernel_generators(const MatrixZm& a) {
  const Int m = a.modulus();
  const std::size_t r = a.rows(), c = a.cols();
  if (c == 0) return {};
  // Row span of [A^T | I] is {((A y)^T, y^T)}; the rows vanishing on the
  // first r columns carry the kernel.
  MatrixZm aug(m, c, r + c);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < r; ++j) aug.set(i, j, a.at(j, i));
    aug.set(i, r + i, 1);
  }
  auto hf = howell_form(aug).form;
  std::vector<Vec> gens;
  for (std::size_t i = 0; i < hf.rows(); ++i) {
    if (hf.row_is_zero(i) || detail::leading_column(hf, i) < r) continue;
    gens.emplace_back(c);
    for (std::size_t j = 0; j < c; ++j) gens.back()[j] = hf.at(i, r + j);
  }
  return compact_span(gens, c, m);
}

/// Coefficients c with sum c_i gens_i = target, or nullopt if target is not
/// in the span.
inline std::optional<Vec> in_span(const std::vector<Vec>& gens, const Vec& target, Int m) {
  const std::size_t len = target.size(), k = gens.size();
  if (k == 0) {
    for (Int x : target)
      if (mod(x, m) != 0) return std::nullopt;
    return Vec{};
  }
  MatrixZm aug(m, k, len + k);
  for (std::size_t i = 0; i < k; ++i) {
    if (gens[i].size() != len) throw std::invalid_argument("in_span: vector lengths differ");
    for (std::size_t j = 0; j < len; ++j) aug.set(i, j, gens[i][j]);
    aug.set(i, len + i, 1);
  }
  auto hf = howell_form(aug).form;
  Vec rest(len);
  for (std::size_t j = 0; j < len; ++j) rest[j] = mod(target[j], m);
  Vec coeffs(k, 0);
  std::size_t row = 0;
  for (std::size_t j = 0; j < len; ++j) {
    while (row < hf.rows() && !hf.row_is_zero(row) && detail::leading_column(hf, row) < j) ++row;
    bool pivot = row < hf.rows() && !hf.row_is_zero(row) && detail::leading_column(hf, row) == j;
    if (rest[j] == 0) continue;
    if (!pivot) return std::nullopt;
    Int g = hf.at(row, j);
    if (rest[j] % g != 0) return std::nullopt;
    Int q = rest[j] / g;
    for (std::size_t jj = j; jj < len; ++jj) rest[jj] = mod(rest[jj] - mulmod(q, hf.at(row, jj), m), m);
    for (std::size_t i = 0; i < k; ++i) coeffs[i] = mod(coeffs[i] + mulmod(q, hf.at(row, len + i), m), m);
  }
  return coeffs;
}

}  // namespace kolyvagin
