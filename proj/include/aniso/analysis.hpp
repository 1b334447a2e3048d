#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "aniso/mesh.hpp"
#include "aniso/models.hpp"
#include "aniso/problem.hpp"

namespace aniso {

struct ErrorReport {
  double rel_l2 = 0.0;
  double rel_h1 = 0.0;
  double abs_l2 = 0.0;
  double abs_h1 = 0.0;
  double h = 0.0;  ///< sqrt(dx * dz)
  ModelKind model = ModelKind::P;
  double eps_min = 0.0;
  double eps_max = 0.0;
  std::optional<double> eps_iota;
};

/// Cell-wise 3x3 Gauss quadrature of |u_h - u_e|^2 and |grad(u_h - u_e)|^2,
/// relative to the same norms of u_e. When u_e vanishes the relative
/// errors fall back to the absolute ones.
ErrorReport error_norms(const SolutionField& field, const ManufacturedProblem& problem);

/// Least-squares slope of log(error) against log(h). Throws
/// std::invalid_argument with fewer than two points, non-positive values or
/// a single distinct h.
double eoc(const std::vector<std::pair<double, double>>& h_error);

/// Least-squares slope of log(y) against log(x); same preconditions as eoc.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ScanPoint {
  int iota = 0;
  double eps_iota = 0.0;
  double rel_h1 = 0.0;
  double rel_l2 = 0.0;
};

struct ScanResult {
  std::vector<ScanPoint> points;  ///< sorted by decreasing eps_iota
  double min_error = 0.0;
  double eps_star = 0.0;
  int iota_star = 0;
  /// The smallest-eps three points all lie within the plateau tolerance.
  bool plateau_reached = false;
};

/// eps_star = max{eps : error(eps) <= (1 + tol) * min error}. Throws on an empty set.
ScanResult select_eps_star(std::vector<ScanPoint> points, double plateau_tol = 0.10);

/// One APL solve per candidate interface, followed by select_eps_star.
ScanResult interface_scan(const TensorMesh& mesh, const ManufacturedProblem& problem,
                          const std::vector<int>& iota_candidates, double plateau_tol = 0.10,
                          const SolveOptions& opts = {});

/// Distinct interface indices hitting each eps target (largest iota with eps <= target).
std::vector<int> interfaces_for_eps_targets(const TensorMesh& mesh, const EpsProfile& eps,
                                            const std::vector<double>& targets);

struct Theorem1Point {
  int iota = 0;
  double eps_iota = 0.0;
  double xi_dx = 0.0;
  double xi_dz = 0.0;
};

struct Theorem1Fit {
  std::vector<Theorem1Point> points;  ///< sorted by decreasing eps_iota
  double slope_dx = 0.0;
  double slope_dz = 0.0;
  bool monotone_dx = false;
  bool monotone_dz = false;
};

/// Uses a single AP solve; throws std::invalid_argument if the eps(z_iota)
/// values span fewer than `min_decades` decades.
Theorem1Fit theorem1_fit(const SolutionField& ap, const std::vector<int>& iotas,
                         const EpsProfile& eps, double min_decades = 3.0,
                         double noise = 0.05);
Theorem1Fit theorem1_fit(const TensorMesh& mesh, const ManufacturedProblem& problem,
                         const std::vector<int>& iotas, const SolveOptions& opts = {});

struct Theorem2Point {
  int iota = 0;
  double eps_iota = 0.0;
  double distance = 0.0;
  double apl_rel_h1 = 0.0;
};

struct Theorem2Fit {
  std::vector<Theorem2Point> points;  ///< sorted by decreasing eps_iota
  double slope = 0.0;
  double ap_abs_h1 = 0.0;  ///< discretization error of the AP reference
  double ap_rel_h1 = 0.0;
};

Theorem2Fit theorem2_fit(const SolutionField& ap, const ManufacturedProblem& problem,
                         const std::vector<int>& iotas, double min_decades = 3.0,
                         const SolveOptions& opts = {});
Theorem2Fit theorem2_fit(const TensorMesh& mesh, const ManufacturedProblem& problem,
                         const std::vector<int>& iotas, const SolveOptions& opts = {});

/// True when values (ordered by decreasing eps) never grow by more than `noise` relative.
bool non_increasing(const std::vector<double>& values, double noise);

}  // namespace aniso
