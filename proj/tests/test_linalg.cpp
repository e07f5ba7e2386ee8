#include <gtest/gtest.h>

#include <kolyvagin/linalg.hpp>
#include <kolyvagin/random.hpp>

#include "oracles.hpp"

using namespace kolyvagin;

namespace {

std::vector<Vec> rows_of(const MatrixZm& a) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < a.rows(); ++i) out.push_back(a.row(i));
  return out;
}

std::vector<Vec> nonzero_rows(const MatrixZm& a) {
  std::vector<Vec> out;
  for (std::size_t i = 0; i < a.rows(); ++i)
    if (!a.row_is_zero(i)) out.push_back(a.row(i));
  return out;
}

MatrixZm padded(const MatrixZm& a) {
  MatrixZm out(a.modulus(), a.rows() + a.cols(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, a.at(i, j));
  return out;
}

}  // namespace

TEST(Linalg, HowellPreservesSpan) {
  MatrixZm a(4, {{2, 0}, {0, 1}}, 2);
  auto h = howell_form(a);
  auto span = oracle::span(nonzero_rows(h.form), 2, 4);
  std::set<oracle::Vec> expected;
  for (Int x = 0; x < 4; x += 2)
    for (Int y = 0; y < 4; ++y) expected.insert({x, y});
  EXPECT_EQ(span, expected);
  // the transform really produces the form from the input
  EXPECT_EQ(rows_of(h.transform * padded(a)), rows_of(h.form));
}

TEST(Linalg, HowellDegenerate) {
  auto z = howell_form(MatrixZm(9, 2, 2));
  for (std::size_t i = 0; i < z.form.rows(); ++i) EXPECT_TRUE(z.form.row_is_zero(i));
  auto id = howell_form(MatrixZm::identity(9, 3));
  EXPECT_EQ(nonzero_rows(id.form), rows_of(MatrixZm::identity(9, 3)));
}

TEST(Linalg, KernelExamples) {
  EXPECT_EQ(kernel_generators(MatrixZm(4, {{2}}, 1)), (std::vector<Vec>{{2}}));
  for (const auto& g : kernel_generators(MatrixZm::identity(5, 3))) EXPECT_EQ(g, Vec(3, 0));
  EXPECT_EQ(kernel_generators(MatrixZm(9, {{0}}, 1)), (std::vector<Vec>{{1}}));
}

TEST(Linalg, InSpanExamples) {
  auto c = in_span({{1, 1}, {0, 1}}, {2, 0}, 4);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(*c, (Vec{2, 2}));
  auto e = in_span({}, {0, 0}, 4);
  ASSERT_TRUE(e.has_value());
  EXPECT_TRUE(e->empty());
  EXPECT_FALSE(in_span({{2}}, {1}, 4).has_value());
  EXPECT_FALSE(in_span({}, {1, 0}, 4).has_value());
}

TEST(Linalg, AgreesWithBruteForce) {
  Rng rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const Int m = rng.between(2, 9);
    const std::size_t r = rng.between(1, 3), c = rng.between(1, 3);
    std::vector<Vec> rows(r, Vec(c));
    for (auto& row : rows)
      for (auto& x : row) x = rng.below(m);
    auto gens = kernel_generators(MatrixZm(m, rows, c));
    EXPECT_EQ(oracle::span(gens, c, m), oracle::kernel(rows, c, m)) << "m=" << m;

    auto span = oracle::span(rows, c, m);
    for (const auto& target : oracle::all_vectors(c, m)) {
      auto coeff = in_span(rows, target, m);
      ASSERT_EQ(coeff.has_value(), span.count(target) == 1);
      if (!coeff) continue;
      Vec sum(c, 0);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) sum[j] = mod(sum[j] + (*coeff)[i] * rows[i][j], m);
      EXPECT_EQ(sum, target);
    }
  }
}

TEST(Linalg, CompactSpanKeepsSpan) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Int m = rng.between(2, 9);
    std::vector<Vec> gens(rng.between(0, 4), Vec(3));
    for (auto& g : gens)
      for (auto& x : g) x = rng.below(m);
    auto compact = compact_span(gens, 3, m);
    EXPECT_LE(compact.size(), 3u);
    EXPECT_EQ(oracle::span(compact, 3, m), oracle::span(gens, 3, m));
  }
}

TEST(Linalg, ModulusMismatch) {
  EXPECT_THROW(MatrixZm(4, 1, 1) * MatrixZm(9, 1, 1), TypeMismatch);
  EXPECT_THROW(MatrixZm(4, {{1, 2}, {3}}, 2), std::invalid_argument);
}
