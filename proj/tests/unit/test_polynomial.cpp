#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "orlicz/errors.hpp"
#include "orlicz/polynomial.hpp"
#include "orlicz/quadrature.hpp"

using namespace orlicz;

TEST(Polynomial, SpaceSizesAndOrder) {
  EXPECT_EQ((PolynomialSpace{1, 3}).size(), 4u);
  EXPECT_EQ((PolynomialSpace{2, 2}).size(), 6u);
  EXPECT_EQ((PolynomialSpace{2, 0}).size(), 1u);
  const auto idx = PolynomialSpace{2, 2}.multi_indices();
  ASSERT_EQ(idx.size(), 6u);
  const std::vector<std::array<int, 2>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    EXPECT_EQ(idx[i].exps, expected[i]) << i;
    EXPECT_EQ(index_of(PolynomialSpace{2, 2}, idx[i]), i);
  }
  EXPECT_DOUBLE_EQ((MultiIndex{{2, 3}}).factorial(), 12.0);
}

TEST(Polynomial, EvaluationAndRecentering) {
  const Polynomial p(PolynomialSpace{1, 2}, {1.0}, {1.0, 2.0, 3.0});
  const double t = 2.0;
  EXPECT_DOUBLE_EQ(p(std::span<const double>(&t, 1)), 6.0);
  const double origin = 0.0;
  const auto q = p.recentered(std::span<const double>(&origin, 1));
  EXPECT_NEAR(q.coeffs()[0], 2.0, 1e-15);
  EXPECT_NEAR(q.coeffs()[1], -4.0, 1e-15);
  EXPECT_NEAR(q.coeffs()[2], 3.0, 1e-15);
  EXPECT_NEAR(q(std::span<const double>(&t, 1)), 6.0, 1e-14);
  EXPECT_NEAR(coefficient_distance(p, q), 0.0, 1e-14);
}

TEST(Polynomial, TwoVariableEvaluation) {
  Polynomial p(PolynomialSpace{2, 2}, {1.0, -1.0});
  p.coefficient(MultiIndex{{0, 0}}) = 1.0;
  p.coefficient(MultiIndex{{1, 1}}) = 2.0;
  p.coefficient(MultiIndex{{0, 2}}) = -1.0;
  const double t[2] = {3.0, 1.0};
  // 1 + 2 * 2 * 2 - 2^2
  EXPECT_DOUBLE_EQ(p(t), 5.0);
  const double c[2] = {0.0, 0.0};
  EXPECT_NEAR(p.recentered(c)(t), 5.0, 1e-13);
}

TEST(Polynomial, Arithmetic) {
  const Polynomial a(PolynomialSpace{1, 1}, {0.0}, {1.0, 2.0});
  const Polynomial b(PolynomialSpace{1, 1}, {0.0}, {0.5, -1.0});
  const auto c = a + 2.0 * b;
  EXPECT_DOUBLE_EQ(c.coeffs()[0], 2.0);
  EXPECT_DOUBLE_EQ(c.coeffs()[1], 0.0);
  EXPECT_TRUE((a - a).is_zero());
  EXPECT_DOUBLE_EQ(coefficient_distance(a, b), 3.0);
  const Polynomial other(PolynomialSpace{1, 2}, {0.0});
  EXPECT_ANY_THROW(a + other);
}

TEST(Polynomial, Norms) {
  const auto d = QuadDomain::interval(-1.0, 1.0, 1000);
  const Polynomial p(PolynomialSpace{1, 1}, {0.0}, {0.0, 1.0});
  const auto n = poly_norms(p, d);
  EXPECT_NEAR(n.sup_norm, 1.0 - 1e-3, 1e-14);
  EXPECT_NEAR(n.l1_norm, 1.0, 1e-13);
  const auto v = poly_eval(p, d);
  ASSERT_EQ(v.size(), d.size());
  EXPECT_DOUBLE_EQ(v[0], d.point(0)[0]);
}

TEST(Polynomial, NormEquivalenceConstants) {
  const auto d = QuadDomain::interval(-1.0, 1.0, 2048);
  EXPECT_NEAR(estimate_norm_equivalence(PolynomialSpace{1, 0}, d, 1000, 7), 1.0, 1e-12);
  // min over c of ||x + c||_1 / (2 ||x + c||_inf) = sqrt(2) - 1, attained at c = sqrt(2) - 1
  const double c1 = estimate_norm_equivalence(PolynomialSpace{1, 1}, d, 20000, 7);
  EXPECT_GE(c1, std::sqrt(2.0) - 1.0 - 1e-3);
  EXPECT_LE(c1, std::sqrt(2.0) - 1.0 + 5e-3);
  EXPECT_EQ(c1, estimate_norm_equivalence(PolynomialSpace{1, 1}, d, 20000, 7));
  EXPECT_LE(estimate_norm_equivalence(PolynomialSpace{1, 1}, d, 40000, 7), c1);
}
