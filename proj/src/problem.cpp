#include "aniso/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aniso {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double logistic(double y) { return 1.0 / (1.0 + std::exp(-y)); }

void check_eps_bounds(double eps_min, double eps_max) {
  if (!(eps_min > 0.0) || !(eps_min <= eps_max) || !(eps_max <= 1.0)) {
    throw std::invalid_argument("eps profile: require 0 < eps_min <= eps_max <= 1");
  }
}

void require_positive(const ManufacturedProblem& p) {
  const CoefficientBounds b = sample_coefficient_bounds(p);
  if (!(b.min_ax > 0.0) || !(b.min_az > 0.0)) {
    throw std::invalid_argument("setup '" + p.name +
                                "': diffusion coefficients must stay positive (min A_x=" +
                                std::to_string(b.min_ax) + ", min A_z=" +
                                std::to_string(b.min_az) + ")");
  }
}

}  // namespace

double eps_tanh(double z, double eps_min, double eps_max, double r) {
  check_eps_bounds(eps_min, eps_max);
  const double y = 2.0 * r * z;
  return eps_max * logistic(y) + eps_min * logistic(-y);
}

EpsProfile EpsProfile::constant(double value) {
  check_eps_bounds(value, value);
  return EpsProfile(Kind::Constant, value, value, 0.0);
}

EpsProfile EpsProfile::tanh(double eps_min, double eps_max, double r) {
  check_eps_bounds(eps_min, eps_max);
  if (!(r >= 0.0)) throw std::invalid_argument("eps profile: rate r must be non-negative");
  return EpsProfile(Kind::Tanh, eps_min, eps_max, r);
}

double EpsProfile::operator()(double z) const {
  if (kind_ == Kind::Constant) return eps_min_;
  const double y = 2.0 * r_ * z;
  return eps_max_ * logistic(y) + eps_min_ * logistic(-y);
}

// sech^2(rz) = 4 s(2rz) s(-2rz)
double EpsProfile::derivative(double z) const {
  if (kind_ == Kind::Constant) return 0.0;
  const double y = 2.0 * r_ * z;
  return 2.0 * r_ * (eps_max_ - eps_min_) * logistic(y) * logistic(-y);
}

double EpsProfile::second_derivative(double z) const {
  if (kind_ == Kind::Constant) return 0.0;
  const double y = 2.0 * r_ * z;
  const double th = logistic(y) - logistic(-y);
  return -2.0 * r_ * th * derivative(z);
}

double EpsProfile::log_derivative(double z) const {
  if (kind_ == Kind::Constant) return 0.0;
  return derivative(z) / (*this)(z);
}

double EpsProfile::log_derivative_dz(double z) const {
  if (kind_ == Kind::Constant) return 0.0;
  const double q = log_derivative(z);
  return second_derivative(z) / (*this)(z) - q * q;
}

CoefficientBounds sample_coefficient_bounds(const ManufacturedProblem& p, int n) {
  CoefficientBounds b{HUGE_VAL, -HUGE_VAL, HUGE_VAL, -HUGE_VAL};
  const Domain& d = p.domain;
  for (int i = 0; i < n; ++i) {
    const double x = d.x_minus + d.lx() * i / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double z = d.z_minus + d.lz() * k / (n - 1);
      const double ax = p.coeffs.ax(x, z);
      const double az = p.coeffs.az(x, z);
      b.min_ax = std::min(b.min_ax, ax);
      b.max_ax = std::max(b.max_ax, ax);
      b.min_az = std::min(b.min_az, az);
      b.max_az = std::max(b.max_az, az);
    }
  }
  return b;
}

ManufacturedProblem setup_a(const Domain& domain, const EpsProfile& eps) {
  return setup_a(domain, eps, domain.lz(), domain.lz());
}

ManufacturedProblem setup_a(const Domain& domain, const EpsProfile& eps, double c1, double c2) {
  domain.validate();
  const double a = kTwoPi / domain.lx();
  const double b = kTwoPi / domain.lz();

  ManufacturedProblem p;
  p.name = "a";
  p.domain = domain;
  p.eps = eps;
  p.coeffs.c1 = c1;
  p.coeffs.c2 = c2;
  p.coeffs.ax = [c1](double x, double z) { return c1 + x * z * z; };
  p.coeffs.az = [c2](double x, double z) { return c2 + x * z; };
  p.coeffs.ax_dx = [](double, double z) { return z * z; };
  p.coeffs.ax_dz = [](double x, double z) { return 2.0 * x * z; };
  p.coeffs.az_dx = [](double, double z) { return z; };
  p.coeffs.az_dz = [](double x, double) { return x; };

  p.u_exact = [a, b, eps](double x, double z) {
    return std::sin(a * x) * (1.0 + eps(z) * std::sin(b * z));
  };
  p.grad_u_exact = [a, b, eps](double x, double z) -> std::array<double, 2> {
    const double e = eps(z);
    const double t = std::sin(b * z);
    return {a * std::cos(a * x) * (1.0 + e * t),
            std::sin(a * x) * (eps.derivative(z) * t + e * b * std::cos(b * z))};
  };

  // (1/eps) du/dz = S (q T + b Tc) with q = eps'/eps, so no 1/eps factor
  // ever multiplies a small difference.
  p.f = [a, b, c1, c2, eps](double x, double z) {
    const double s = std::sin(a * x);
    const double c = std::cos(a * x);
    const double t = std::sin(b * z);
    const double tc = std::cos(b * z);
    const double e = eps(z);
    const double q = eps.log_derivative(z);
    const double qp = eps.log_derivative_dz(z);

    const double ax = c1 + x * z * z;
    const double ux = a * c * (1.0 + e * t);
    const double uxx = -a * a * s * (1.0 + e * t);
    const double div_x = z * z * ux + ax * uxx;

    const double az = c2 + x * z;
    const double uz_over_eps = s * (q * t + b * tc);
    const double d_uz_over_eps = s * (qp * t + q * b * tc - b * b * t);
    const double div_z = x * uz_over_eps + az * d_uz_over_eps;
    return -div_x - div_z;
  };

  auto flux = [a, b, c2, eps](double x, double z) {
    const double uz_over_eps =
        std::sin(a * x) * (eps.log_derivative(z) * std::sin(b * z) + b * std::cos(b * z));
    return (c2 + x * z) * uz_over_eps;
  };
  const double zp = domain.z_plus;
  const double zm = domain.z_minus;
  p.g_plus = [flux, zp](double x) { return flux(x, zp); };
  p.g_minus = [flux, zm](double x) { return flux(x, zm); };

  require_positive(p);
  return p;
}

ManufacturedProblem setup_b(const Domain& domain, const EpsProfile& eps) {
  return setup_b(domain, eps, domain.lz(), domain.lz());
}

ManufacturedProblem setup_b(const Domain& domain, const EpsProfile& eps, double c1, double c2) {
  domain.validate();
  const double a = kTwoPi / domain.lx();
  const double b = kTwoPi / domain.lz();

  ManufacturedProblem p;
  p.name = "b";
  p.domain = domain;
  p.eps = eps;
  p.coeffs.c1 = c1;
  p.coeffs.c2 = c2;
  p.coeffs.ax = [c1](double x, double z) { return 1.0 + std::cos(c1 + x * z); };
  p.coeffs.az = [c2](double x, double z) {
    const double s = std::sin(c2 + x * z);
    return 1.0 + s * s;
  };
  p.coeffs.ax_dx = [c1](double x, double z) { return -z * std::sin(c1 + x * z); };
  p.coeffs.ax_dz = [c1](double x, double z) { return -x * std::sin(c1 + x * z); };
  p.coeffs.az_dx = [c2](double x, double z) { return z * std::sin(2.0 * (c2 + x * z)); };
  p.coeffs.az_dz = [c2](double x, double z) { return x * std::sin(2.0 * (c2 + x * z)); };

  p.u_exact = [a, b, eps](double x, double z) {
    return std::sin(a * x) * (1.0 + std::sin(b * eps(z) * z));
  };
  p.grad_u_exact = [a, b, eps](double x, double z) -> std::array<double, 2> {
    const double phi = b * eps(z) * z;
    const double dphi = b * (eps.derivative(z) * z + eps(z));
    return {a * std::cos(a * x) * (1.0 + std::sin(phi)), std::sin(a * x) * std::cos(phi) * dphi};
  };

  p.f = [a, b, c1, c2, eps](double x, double z) {
    const double s = std::sin(a * x);
    const double c = std::cos(a * x);
    const double e = eps(z);
    const double q = eps.log_derivative(z);
    const double qp = eps.log_derivative_dz(z);
    const double phi = b * e * z;
    const double dphi = b * (eps.derivative(z) * z + e);

    const double ax = 1.0 + std::cos(c1 + x * z);
    const double ax_dx = -z * std::sin(c1 + x * z);
    const double ux = a * c * (1.0 + std::sin(phi));
    const double uxx = -a * a * s * (1.0 + std::sin(phi));
    const double div_x = ax_dx * ux + ax * uxx;

    const double sz = std::sin(c2 + x * z);
    const double az = 1.0 + sz * sz;
    const double az_dz = x * std::sin(2.0 * (c2 + x * z));
    const double uz_over_eps = s * std::cos(phi) * b * (q * z + 1.0);
    const double d_uz_over_eps =
        s * b * (-std::sin(phi) * dphi * (q * z + 1.0) + std::cos(phi) * (qp * z + q));
    const double div_z = az_dz * uz_over_eps + az * d_uz_over_eps;
    return -div_x - div_z;
  };

  auto flux = [a, b, c2, eps](double x, double z) {
    const double sz = std::sin(c2 + x * z);
    const double phi = b * eps(z) * z;
    return (1.0 + sz * sz) * std::sin(a * x) * std::cos(phi) * b *
           (eps.log_derivative(z) * z + 1.0);
  };
  const double zp = domain.z_plus;
  const double zm = domain.z_minus;
  p.g_plus = [flux, zp](double x) { return flux(x, zp); };
  p.g_minus = [flux, zm](double x) { return flux(x, zm); };

  require_positive(p);
  return p;
}

ManufacturedProblem setup_zero_fluctuation(const Domain& domain, const EpsProfile& eps) {
  domain.validate();
  const double a = kTwoPi / domain.lx();
  ManufacturedProblem p;
  p.name = "zero-fluct";
  p.domain = domain;
  p.eps = eps;
  p.coeffs.c1 = 1.0;
  p.coeffs.c2 = 1.0;
  p.coeffs.ax = [](double, double) { return 1.0; };
  p.coeffs.az = [](double, double) { return 1.0; };
  p.coeffs.ax_dx = p.coeffs.ax_dz = p.coeffs.az_dx = p.coeffs.az_dz = [](double, double) {
    return 0.0;
  };
  p.u_exact = [a](double x, double) { return std::sin(a * x); };
  p.grad_u_exact = [a](double x, double) -> std::array<double, 2> {
    return {a * std::cos(a * x), 0.0};
  };
  p.f = [a](double x, double) { return a * a * std::sin(a * x); };
  p.g_plus = [](double) { return 0.0; };
  p.g_minus = [](double) { return 0.0; };
  return p;
}

ManufacturedProblem setup_zero_data(const Domain& domain, const EpsProfile& eps) {
  ManufacturedProblem p = setup_a(domain, eps);
  p.name = "zero";
  p.u_exact = [](double, double) { return 0.0; };
  p.grad_u_exact = [](double, double) -> std::array<double, 2> { return {0.0, 0.0}; };
  p.f = [](double, double) { return 0.0; };
  p.g_plus = [](double) { return 0.0; };
  p.g_minus = [](double) { return 0.0; };
  return p;
}

}  // namespace aniso
