#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "aniso/quadrature.hpp"

using namespace aniso;

namespace {

// Exact integral of x^p over [-1, 1].
double monomial_integral(int p) { return p % 2 ? 0.0 : 2.0 / (p + 1); }

}  // namespace

TEST(Gauss, ExactUpToDegree2nMinus1) {
  for (int n = 1; n <= 5; ++n) {
    const QuadratureRule1D rule = gauss_rule(n);
    ASSERT_EQ(rule.size(), static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.points[q], p);
      EXPECT_NEAR(s, monomial_integral(p), 1e-15) << "n=" << n << " p=" << p;
    }
  }
}

TEST(Gauss, NotExactBeyondDegree) {
  const QuadratureRule1D rule = gauss_rule(2);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * std::pow(rule.points[q], 4);
  EXPECT_GT(std::abs(s - monomial_integral(4)), 1e-3);
}

TEST(Gauss, TensorRuleIntegratesBilinearProducts) {
  // degree 5 in each variable with the 3-point rule
  const QuadratureRule1D rule = gauss_rule(3);
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const double x = rule.points[i], y = rule.points[j];
      s += rule.weights[i] * rule.weights[j] * (std::pow(x, 4) * y * y + std::pow(x * y, 5));
    }
  }
  EXPECT_NEAR(s, 0.4 * (2.0 / 3.0), 1e-15);
}

TEST(Gauss, RejectsUnsupportedOrder) {
  EXPECT_THROW(gauss_rule(0), std::invalid_argument);
  EXPECT_THROW(gauss_rule(6), std::invalid_argument);
}

TEST(Shapes, Q1PartitionOfUnityAndGradients) {
  for (double xi : {-1.0, -0.7, 0.0, 0.31, 1.0}) {
    for (double eta : {-1.0, -0.2, 0.5, 0.9}) {
      const Q1Eval e = q1_eval(xi, eta);
      double s = 0.0, gx = 0.0, gy = 0.0;
      for (int l = 0; l < 4; ++l) {
        s += e.values[l];
        gx += e.d_dxi[l];
        gy += e.d_deta[l];
      }
      EXPECT_NEAR(s, 1.0, 1e-14);
      EXPECT_NEAR(gx, 0.0, 1e-14);
      EXPECT_NEAR(gy, 0.0, 1e-14);
    }
  }
}

TEST(Shapes, Q1Kronecker) {
  const double cx[4] = {-1, 1, -1, 1}, cy[4] = {-1, -1, 1, 1};
  for (int c = 0; c < 4; ++c) {
    const Q1Eval e = q1_eval(cx[c], cy[c]);
    for (int l = 0; l < 4; ++l) EXPECT_DOUBLE_EQ(e.values[l], l == c ? 1.0 : 0.0);
  }
}

TEST(Shapes, Q1GradientMatchesFiniteDifference) {
  const double xi = 0.23, eta = -0.41, h = 1e-6;
  const Q1Eval e = q1_eval(xi, eta);
  const Q1Eval ep = q1_eval(xi + h, eta), em = q1_eval(xi - h, eta);
  const Q1Eval fp = q1_eval(xi, eta + h), fm = q1_eval(xi, eta - h);
  for (int l = 0; l < 4; ++l) {
    EXPECT_NEAR(e.d_dxi[l], (ep.values[l] - em.values[l]) / (2 * h), 1e-9);
    EXPECT_NEAR(e.d_deta[l], (fp.values[l] - fm.values[l]) / (2 * h), 1e-9);
  }
}

TEST(Shapes, P1PartitionOfUnity) {
  for (double xi : {-1.0, -0.5, 0.0, 0.8, 1.0}) {
    const P1Eval e = p1_eval(xi);
    EXPECT_NEAR(e.values[0] + e.values[1], 1.0, 1e-14);
    EXPECT_NEAR(e.gradients[0] + e.gradients[1], 0.0, 1e-14);
  }
  EXPECT_DOUBLE_EQ(p1_eval(-1.0).values[0], 1.0);
  EXPECT_DOUBLE_EQ(p1_eval(1.0).values[1], 1.0);
}

TEST(Shapes, MapToInterval) {
  EXPECT_DOUBLE_EQ(map_to_interval(-1.0, 2.0, 5.0), 2.0);
  EXPECT_DOUBLE_EQ(map_to_interval(1.0, 2.0, 5.0), 5.0);
  EXPECT_DOUBLE_EQ(map_to_interval(0.0, 2.0, 5.0), 3.5);
}
