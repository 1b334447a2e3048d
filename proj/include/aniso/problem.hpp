#pragma once

#include <array>
#include <functional>
#include <string>

#include "aniso/mesh.hpp"

namespace aniso {

using ScalarField2D = std::function<double(double, double)>;
using GradientField2D = std::function<std::array<double, 2>(double, double)>;
using ScalarField1D = std::function<double(double)>;

/// eps(z) = (eps_max (1 + tanh(r z)) + eps_min (1 - tanh(r z))) / 2.
double eps_tanh(double z, double eps_min, double eps_max, double r);

/**
 * Anisotropy strength as a function of z. The tanh profile is evaluated as
 * eps_max * s(2rz) + eps_min * s(-2rz) with the logistic s(y) = 1/(1+e^-y),
 * which keeps full relative precision where eps is close to eps_min.
 */
class EpsProfile {
 public:
  enum class Kind { Constant, Tanh };

  static EpsProfile constant(double value);
  static EpsProfile tanh(double eps_min, double eps_max, double r);

  Kind kind() const { return kind_; }
  double eps_min() const { return eps_min_; }
  double eps_max() const { return eps_max_; }
  double rate() const { return r_; }

  double operator()(double z) const;
  double derivative(double z) const;
  double second_derivative(double z) const;
  /// eps'/eps, finite even where eps is at its floor.
  double log_derivative(double z) const;
  /// d/dz (eps'/eps).
  double log_derivative_dz(double z) const;

 private:
  EpsProfile(Kind kind, double eps_min, double eps_max, double r)
      : kind_(kind), eps_min_(eps_min), eps_max_(eps_max), r_(r) {}

  Kind kind_;
  double eps_min_;
  double eps_max_;
  double r_;
};

/// Diffusion coefficients with their analytic first partials.
struct Coefficients {
  ScalarField2D ax;
  ScalarField2D az;
  ScalarField2D ax_dx;
  ScalarField2D ax_dz;
  ScalarField2D az_dx;
  ScalarField2D az_dz;
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Exact solution plus the sources it induces in the anisotropic problem.
struct ManufacturedProblem {
  std::string name;
  Domain domain;
  EpsProfile eps = EpsProfile::constant(1.0);
  Coefficients coeffs;
  ScalarField2D u_exact;
  GradientField2D grad_u_exact;
  ScalarField2D f;
  ScalarField1D g_plus;
  ScalarField1D g_minus;
};

struct CoefficientBounds {
  double min_ax, max_ax, min_az, max_az;
};

/// Extremes of A_x and A_z sampled on an n x n lattice covering the domain.
CoefficientBounds sample_coefficient_bounds(const ManufacturedProblem& problem, int n = 101);

/// A_x = c1 + x z^2, A_z = c2 + x z, u = sin(2 pi x/Lx)(1 + eps(z) sin(2 pi z/Lz)).
ManufacturedProblem setup_a(const Domain& domain, const EpsProfile& eps);
ManufacturedProblem setup_a(const Domain& domain, const EpsProfile& eps, double c1, double c2);

/// A_x = 1 + cos(c1 + xz), A_z = 1 + sin^2(c2 + xz),
/// u = sin(2 pi x/Lx)(1 + sin(2 pi eps(z) z/Lz)).
ManufacturedProblem setup_b(const Domain& domain, const EpsProfile& eps);
ManufacturedProblem setup_b(const Domain& domain, const EpsProfile& eps, double c1, double c2);

/// z-independent solution u = sin(2 pi x/Lx) with A_x = A_z = 1 and g = 0.
ManufacturedProblem setup_zero_fluctuation(const Domain& domain,
                                           const EpsProfile& eps = EpsProfile::constant(1.0));

/// f = 0, g = 0, u = 0 with the coefficients of setup_a.
ManufacturedProblem setup_zero_data(const Domain& domain, const EpsProfile& eps);

}  // namespace aniso
