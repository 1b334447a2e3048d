#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "aniso/problem.hpp"

using namespace aniso;

namespace {

// Fourth-order central difference.
double d4(const std::function<double(double)>& f, double t, double h) {
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
}

// -(A_x u_x)_x - (A_z/eps u_z)_z from the exact solution and coefficients only.
double fd_source(const ManufacturedProblem& p, double x, double z) {
  const double h = 2.5e-4;
  auto flux_x = [&](double xx, double zz) {
    return p.coeffs.ax(xx, zz) * d4([&](double s) { return p.u_exact(s, zz); }, xx, h);
  };
  auto flux_z = [&](double xx, double zz) {
    return p.coeffs.az(xx, zz) / p.eps(zz) *
           d4([&](double s) { return p.u_exact(xx, s); }, zz, h);
  };
  return -d4([&](double s) { return flux_x(s, z); }, x, h) -
         d4([&](double s) { return flux_z(x, s); }, z, h);
}

void check_source(const ManufacturedProblem& p, double z_lo, double z_hi) {
  const Domain& d = p.domain;
  for (int a = 1; a <= 4; ++a) {
    for (int b = 0; b <= 4; ++b) {
      const double x = d.x_minus + d.lx() * a / 5.0;
      const double z = z_lo + (z_hi - z_lo) * b / 4.0;
      const double f = p.f(x, z);
      const double ref = fd_source(p, x, z);
      EXPECT_NEAR(f, ref, 1e-6 * std::max(1.0, std::abs(ref)))
          << p.name << " at (" << x << ", " << z << ")";
    }
  }
}

}  // namespace

TEST(Eps, TanhMatchesHighPrecisionValues) {
  // reference values computed with 40-digit arithmetic
  const EpsProfile e = EpsProfile::tanh(1e-8, 1.0, 30.0);
  EXPECT_NEAR(e(-0.3) / 2.5229979360460563e-08, 1.0, 1e-13);
  EXPECT_NEAR(e(0.05) / 0.952574127296692, 1.0, 1e-14);
  const EpsProfile e2 = EpsProfile::tanh(1e-10, 1e-5, 30.0);
  EXPECT_NEAR(e2(-1.2) / 1e-10, 1.0, 1e-13);
  EXPECT_NEAR(eps_tanh(0.05, 1e-8, 1.0, 30.0), e(0.05), 1e-15);
}

TEST(Eps, DerivativesMatchFiniteDifferences) {
  const EpsProfile e = EpsProfile::tanh(1e-3, 1.0, 30.0);
  for (double z : {-0.2, -0.05, 0.0, 0.03, 0.1}) {
    EXPECT_NEAR(e.derivative(z), d4([&](double s) { return e(s); }, z, 1e-4),
                1e-7 * std::max(1.0, std::abs(e.derivative(z))));
    EXPECT_NEAR(e.second_derivative(z), d4([&](double s) { return e.derivative(s); }, z, 1e-4),
                1e-6 * std::max(1.0, std::abs(e.second_derivative(z))));
    EXPECT_NEAR(e.log_derivative(z), e.derivative(z) / e(z), 1e-9 * std::abs(e.log_derivative(z)));
  }
}

TEST(Eps, ConstantProfile) {
  const EpsProfile e = EpsProfile::constant(0.25);
  EXPECT_DOUBLE_EQ(e(-3.0), 0.25);
  EXPECT_DOUBLE_EQ(e.derivative(1.0), 0.0);
  EXPECT_THROW(EpsProfile::constant(0.0), std::invalid_argument);
  EXPECT_THROW(EpsProfile::tanh(1.0, 1e-3, 30.0), std::invalid_argument);
}

TEST(Manufactured, SetupASourceMatchesFiniteDifferences) {
  check_source(setup_a(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0)), -0.1, 0.4);
  check_source(setup_a(Domain::preset_a(), EpsProfile::constant(1.0)), -0.9, 0.9);
  check_source(setup_a(Domain::preset_a(), EpsProfile::constant(1e-2)), -0.9, 0.9);
}

TEST(Manufactured, SetupBSourceMatchesFiniteDifferences) {
  check_source(setup_b(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0)), -0.1, 0.4);
  check_source(setup_b(Domain::preset_a(), EpsProfile::constant(1.0)), -0.9, 0.9);
}

TEST(Manufactured, ZeroFluctuationSource) {
  check_source(setup_zero_fluctuation(Domain::preset_b()), -1.4, 0.4);
}

TEST(Manufactured, GradientAndBoundaryFlux) {
  const ManufacturedProblem p = setup_a(Domain::preset_b(), EpsProfile::tanh(1e-4, 1.0, 30.0));
  for (double x : {0.1, 0.35, 0.8}) {
    for (double z : {-0.1, 0.0, 0.2}) {
      const auto g = p.grad_u_exact(x, z);
      EXPECT_NEAR(g[0], d4([&](double s) { return p.u_exact(s, z); }, x, 1e-3), 1e-8);
      EXPECT_NEAR(g[1], d4([&](double s) { return p.u_exact(x, s); }, z, 1e-3), 1e-8);
    }
    const double zp = p.domain.z_plus;
    const double flux = p.coeffs.az(x, zp) / p.eps(zp) * p.grad_u_exact(x, zp)[1];
    EXPECT_NEAR(p.g_plus(x), flux, 1e-12 * std::max(1.0, std::abs(flux)));
  }
}

TEST(Manufactured, HomogeneousDirichletInX) {
  for (const ManufacturedProblem& p :
       {setup_a(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0)),
        setup_b(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0))}) {
    for (double z : {-1.5, -0.3, 0.0, 0.5}) {
      EXPECT_NEAR(p.u_exact(p.domain.x_minus, z), 0.0, 1e-14);
      EXPECT_NEAR(p.u_exact(p.domain.x_plus, z), 0.0, 1e-14);
    }
  }
}

TEST(Manufactured, CoefficientsBoundedAwayFromZero) {
  const ManufacturedProblem p = setup_a(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0));
  const CoefficientBounds b = sample_coefficient_bounds(p);
  EXPECT_GT(b.min_ax, 0.0);
  EXPECT_GT(b.min_az, 0.0);
}
