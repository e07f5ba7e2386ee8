#include <gtest/gtest.h>

#include <kolyvagin/graded.hpp>
#include <kolyvagin/random.hpp>

using namespace kolyvagin;

namespace {

constexpr SubsetMask A = 1, B = 2;

Monomial mono(std::initializer_list<int> exps) { return Monomial(exps.begin(), exps.end()); }

GradedElement sample(const SiteSetPtr& s, Rng& rng) {
  GradedElement g(s);
  for (int d = 0; d <= s->dmax(); ++d)
    for (const auto& mm : monomials_of_degree(s->size(), s->full(), d))
      if (rng.chance(1, 2)) g.add_term(mm, rng.below(s->modulus()));
  return g;
}

}  // namespace

TEST(Graded, MultiplicationReducesCoefficients) {
  auto s = make_sites(9, {{"a", 3}});
  auto xa = GradedElement::generator(s, 0);
  // degree cap defaults to the number of sites, so raise it for x_a^2
  auto s2 = make_sites(9, {{"a", 3}}, 2);
  auto ya = GradedElement::generator(s2, 0);
  auto sq = ya * ya;
  EXPECT_EQ(sq.coefficient(mono({2})), 1);
  EXPECT_EQ(ya.scaled(4).coefficient(mono({1})), 1);
  EXPECT_TRUE((xa * xa).is_zero());
  EXPECT_EQ(xa * GradedElement::one(s), xa);
}

TEST(Graded, AdditionCancels) {
  auto s = make_sites(3, {{"a", 3}});
  auto lhs = GradedElement::constant(s, 2) + GradedElement::generator(s, 0);
  auto rhs = GradedElement::constant(s, 1) + GradedElement::generator(s, 0, 2);
  EXPECT_TRUE((lhs + rhs).is_zero());
}

TEST(Graded, DifferentAmbientsRejected) {
  auto s = make_sites(9, {{"a", 3}});
  auto t = make_sites(27, {{"a", 3}});
  EXPECT_THROW(GradedElement::one(s) + GradedElement::one(t), TypeMismatch);
}

TEST(Graded, Projection) {
  auto s = make_sites(9, {{"a", 9}, {"b", 9}});
  auto xa = GradedElement::generator(s, 0), xb = GradedElement::generator(s, 1);
  auto g = GradedElement::constant(s, 2) + xa + xa * xb;
  EXPECT_EQ(project(g, A), GradedElement::constant(s, 2) + xa);
  EXPECT_EQ(project(g, 0), GradedElement::constant(s, 2));
  EXPECT_EQ(graded_piece(g, 1), xa);
  EXPECT_EQ(graded_piece(g, 0), GradedElement::constant(s, 2));
}

TEST(Graded, ProjectionLawsRandom) {
  Rng rng(11);
  auto s = make_sites(27, {{"a", 9}, {"b", 27}, {"c", 3}});
  for (int i = 0; i < 200; ++i) {
    auto g = sample(s, rng), h = sample(s, rng);
    SubsetMask x = rng.below(8), y = rng.below(8);
    EXPECT_EQ(project(project(g, x), y), project(g, x & y));
    EXPECT_EQ(project(g * h, x), project(g, x) * project(h, x));
    EXPECT_EQ(project(g + h, x), project(g, x) + project(h, x));
    GradedElement sum(s);
    for (int d = 0; d <= s->dmax(); ++d) sum += graded_piece(g, d);
    EXPECT_EQ(sum, g);
  }
}

TEST(Graded, SOperator) {
  auto s = make_sites(9, {{"a", 9}, {"b", 9}});
  auto xa = GradedElement::generator(s, 0), xb = GradedElement::generator(s, 1);
  auto g = GradedElement::constant(s, 2) + xa;
  EXPECT_EQ(s_operator(g, A, A), xa);
  EXPECT_EQ(s_operator(g, A, 0), g);
  EXPECT_EQ(s_operator(xa * xb, A | B, A | B), xa * xb);
  EXPECT_THROW(s_operator(g, A, A | B), std::invalid_argument);
}

TEST(Graded, DeterminantD) {
  auto s = make_sites(9, {{"q1", 9}, {"q2", 9}});
  auto x1 = GradedElement::generator(s, 0), x2 = GradedElement::generator(s, 1);
  std::vector<GradedElement> p{x2, x1};
  EXPECT_EQ(det_D(A | B, A | B, p), -(x1 * x2));
  EXPECT_EQ(det_D(A | B, A, p), -x2);
  EXPECT_TRUE(det_D_reduced(A, p).is_zero());
  EXPECT_EQ(det_D(A | B, 0, p), GradedElement::one(s));
  EXPECT_EQ(det_D(A | B, A | B, p, {1, 0}), det_D(A | B, A | B, p));
  EXPECT_THROW(det_D(A | B, A, {x1, x1}), std::invalid_argument);
}

TEST(Graded, SubsetHelpers) {
  EXPECT_EQ(subsets_of(5u), (std::vector<SubsetMask>{0, 1, 4, 5}));
  EXPECT_EQ(members(6u), (std::vector<int>{1, 2}));
  auto s = make_sites(12, {{"a", 4}, {"b", 6}, {"c", 5}});
  EXPECT_EQ(s->divisor(0), 12);
  EXPECT_EQ(s->divisor(3), 2);
  EXPECT_EQ(s->divisor(4), 1);
  EXPECT_EQ(monomials_of_degree(3, 3, 2).size(), 3u);
  EXPECT_THROW(make_sites(9, {{"a", 3}, {"a", 3}}), std::invalid_argument);
}
