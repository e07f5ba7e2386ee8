#include <gtest/gtest.h>

#include <kolyvagin/cyclo.hpp>
#include <kolyvagin/random.hpp>

#include "oracles.hpp"

using namespace kolyvagin;
using namespace kolyvagin::cyclo;

namespace {

CycloConfig config(std::vector<Int> sigma) {
  CycloConfig c;
  c.p = 3;
  c.k = 1;
  c.sigma = std::move(sigma);
  c.roots = {};
  for (Int l : c.sigma) c.roots[l] = l == 13 ? 2 : 3;
  c.generators = {Rational::parse("2"), Rational::parse("5")};
  return c;
}

}  // namespace

TEST(Cyclo, SigmaPrimes) {
  EXPECT_EQ(sigma_primes(3, 1, 20), (std::vector<Int>{7, 13, 19}));
  EXPECT_EQ(sigma_primes(3, 2, 20), (std::vector<Int>{19}));
  EXPECT_TRUE(sigma_primes(5, 1, 10).empty());
  EXPECT_THROW(sigma_primes(4, 1, 10), std::invalid_argument);
}

TEST(Cyclo, Valuations) {
  EXPECT_EQ(v_ell(Rational::parse("63"), 7, 3), 1);
  EXPECT_EQ(v_ell(Rational::parse("2"), 7, 3), 0);
  EXPECT_EQ(v_ell(Rational::parse("1/49"), 7, 3), 1);
  EXPECT_THROW(Rational::parse("0"), std::invalid_argument);
  EXPECT_THROW(Rational::parse("3/x"), std::invalid_argument);
}

TEST(Cyclo, UnitPartClass) {
  EXPECT_EQ(u_ell(Rational::parse("2"), 7, 3, 3), 2);
  EXPECT_EQ(u_ell(Rational::parse("7"), 7, 3, 3), 0);
  // brute-force check of the first example: zeta = 3^2 = 2, 2^2 = 4 = zeta^2
  EXPECT_EQ(oracle::dlog(2, 4, 7), 2);
  EXPECT_THROW(u_ell(Rational::parse("2"), 7, 3, 2), std::invalid_argument);

  Rng rng(6);
  const Int primes[] = {2, 3, 5, 11, 13, 17, 19};
  for (int i = 0; i < 200; ++i) {
    Int a = primes[rng.below(7)], b = primes[rng.below(7)];
    for (Int l : {7, 13, 19, 31}) {
      Int g = smallest_primitive_root(l);
      Rational ab{a * b, 1};
      EXPECT_EQ(u_ell(ab, l, 3, g), mod(u_ell({a, 1}, l, 3, g) + u_ell({b, 1}, l, 3, g), 3));
      EXPECT_EQ(u_ell(Rational{a, b}, l, 3, g), mod(u_ell({a, 1}, l, 3, g) - u_ell({b, 1}, l, 3, g), 3));
    }
  }
}

TEST(Cyclo, FrobeniusDlog) {
  EXPECT_EQ(frobenius_dlog(13, 7, 3, 3), 0);
  EXPECT_EQ(oracle::dlog(3, 6, 7), 3);
  EXPECT_EQ(frobenius_dlog(31, 7, 3, 3), 1);
  EXPECT_EQ(frobenius_dlog(29, 7, 3, 3), 0);  // 29 = 1 mod 7
  EXPECT_EQ(frobenius_dlog(7, 13, 2, 3), oracle::dlog(2, 7, 13) % 3);
  EXPECT_THROW(frobenius_dlog(14, 7, 3, 3), std::invalid_argument);
}

TEST(Cyclo, ComputeQ) {
  for (Int l : {7, 13, 31}) EXPECT_EQ(compute_Q({1, -l}, 3), (std::vector<Int>{2}));
  EXPECT_THROW(compute_Q({1, 1}, 3), std::invalid_argument);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Int M = i % 2 ? 9 : 27;
    std::vector<Int> p(rng.between(1, 6));
    Int sum = 0;
    for (std::size_t j = 1; j < p.size(); ++j) sum += p[j] = rng.below(M);
    p[0] = mod(-sum, M);
    auto q = compute_Q(p, M);
    // (x - 1) Q(x) == P(x)
    std::vector<Int> back(p.size(), 0);
    for (std::size_t j = 0; j < q.size(); ++j) {
      back[j + 1] = mod(back[j + 1] + q[j], M);
      back[j] = mod(back[j] - q[j], M);
    }
    for (auto& c : p) c = mod(c, M);
    EXPECT_EQ(back, p);
  }
}

TEST(Cyclo, PElement) {
  auto c = config({7, 31});
  auto T = build_cyclotomic_instance(c);
  EXPECT_EQ(T.p[1], GradedElement::generator(T.sites, 0, 2));
  auto d = config({7, 13});
  auto U = build_cyclotomic_instance(d);
  EXPECT_TRUE(U.p[1].is_zero());
  for (std::size_t i = 0; i < 2; ++i) EXPECT_TRUE(project(U.p[i], SubsetMask{1} << i).is_zero());
}

TEST(Cyclo, BuiltInstance) {
  auto c = config({7, 13, 31});
  auto T = build_cyclotomic_instance(c);
  EXPECT_NO_THROW(T.validate());
  EXPECT_EQ(T.modulus(), 3);
  EXPECT_EQ(T.h, 2);
  EXPECT_EQ(T.sites->site(0).label, "7");
  EXPECT_EQ(T.sites->site(1).t, 3);
  EXPECT_EQ(T.v[0], (Vec{0, 0}));
  for (int q = 0; q < 3; ++q)
    for (Int x : T.u[q]) EXPECT_LT(x, T.sites->divisor(SubsetMask{1} << q));
  EXPECT_EQ(T.u[0][0], 2);
}

TEST(Cyclo, ConfigValidation) {
  auto c = config({7, 11});
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config({7});
  c.roots[7] = 2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config({7});
  c.generators.push_back(Rational::parse("4"));
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config({7});
  c.roots.clear();
  EXPECT_EQ(c.root(7), 3);
  EXPECT_NO_THROW(c.validate());
}
