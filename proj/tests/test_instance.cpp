#include <gtest/gtest.h>

#include <kolyvagin/instance.hpp>

#include "oracles.hpp"

using namespace kolyvagin;

namespace {

// Two sites q, q' over Z/9 with t = 9, H = O^2.
SevenTuple two_site() {
  SevenTuple T;
  T.sites = make_sites(9, {{"q", 9}, {"q'", 9}});
  T.h = 2;
  T.v = {{1, 0}, {0, 3}};
  T.u = {{1, 4}, {2, 0}};
  T.p = {GradedElement::generator(T.sites, 1), GradedElement::generator(T.sites, 0, 5)};
  return T;
}

}  // namespace

TEST(Instance, PhiExamples) {
  auto T = two_site();
  T.validate();
  auto xq = GradedElement::generator(T.sites, 0), xq2 = GradedElement::generator(T.sites, 1);
  EXPECT_EQ(phi(T, 0, {1, 0}), -xq - xq2);
  EXPECT_TRUE(phi(T, 0, {0, 0}).is_zero());
  EXPECT_EQ(phi_n(T, 0, T.sites->full(), {2, 7}), phi(T, 0, {2, 7}));
  EXPECT_TRUE(phi_n(T, 0, 0, {2, 7}).is_zero());
  // phi_q^q only sees the u-part
  EXPECT_EQ(phi_n(T, 0, 1, {2, 7}), xq.scaled(-(2 * 1 + 7 * 4)));
  EXPECT_EQ(phi_n(T, 1, 1 | 2, {1, 1}), phi_n(T, 1, 1, {1, 1}) + phi_n(T, 1, 2, {1, 1}));
  EXPECT_THROW(phi(T, 2, {0, 0}), std::invalid_argument);
}

TEST(Instance, ValidateRejects) {
  auto T = two_site();
  T.p[0] = GradedElement::generator(T.sites, 0);
  EXPECT_THROW(T.validate(), std::invalid_argument);
  T = two_site();
  T.u[0][0] = 9;
  EXPECT_THROW(T.validate(), std::invalid_argument);
  T = two_site();
  T.p[1] = GradedElement::one(T.sites);
  EXPECT_THROW(T.validate(), std::invalid_argument);
  T = two_site();
  T.v.pop_back();
  EXPECT_THROW(T.validate(), std::invalid_argument);
}

TEST(Instance, SelmerGenerators) {
  auto T = two_site();
  EXPECT_EQ(oracle::span(selmer_generators(T, 3), 2, 9).size(), 81u);
  // S^{q'} = ker v_q = {(0, b)}
  auto s = oracle::span(selmer_generators(T, 2), 2, 9);
  EXPECT_EQ(s, oracle::kernel({T.v[0]}, 2, 9));
  // v_{q'} = (0, 3): S^{q} has 27 elements
  EXPECT_EQ(oracle::span(selmer_generators(T, 1), 2, 9).size(), 27u);
  T.v[1] = {0, 0};
  EXPECT_EQ(oracle::span(selmer_generators(T, 1), 2, 9).size(), 81u);

  SevenTuple U;
  U.sites = make_sites(4, {{"q", 2}});
  U.h = 2;
  U.v = {{1, 0}};
  U.u = {{0, 0}};
  U.p = {GradedElement(U.sites)};
  EXPECT_EQ(oracle::span(selmer_generators(U, 0), 2, 4), oracle::span({{0, 1}}, 2, 4));
}

TEST(Instance, RandomIsDeterministicAndValid) {
  InstanceParams params{27, {3, 9, 27}, 5, {}, {}};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto a = random_instance(seed, params), b = random_instance(seed, params);
    EXPECT_EQ(a.v, b.v);
    EXPECT_EQ(a.u, b.u);
    EXPECT_EQ(a.p, b.p);
    EXPECT_NO_THROW(a.validate());
    for (int q = 0; q < 3; ++q) {
      EXPECT_TRUE(project(a.p[q], SubsetMask{1} << q).is_zero());
      for (Int x : a.u[q]) EXPECT_LT(x, gcd(27, params.t[q]));
    }
  }
  EXPECT_THROW(random_instance(1, {9, {3, 3}, 4, {"a"}, {}}), std::invalid_argument);
  EXPECT_THROW(random_instance(1, {1, {3}, 4, {}, {}}), std::invalid_argument);
}
