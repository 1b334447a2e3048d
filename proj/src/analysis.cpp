#include "aniso/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "aniso/quadrature.hpp"

namespace aniso {

ErrorReport error_norms(const SolutionField& field, const ManufacturedProblem& problem) {
  const TensorMesh& mesh = field.mesh;
  const QuadratureRule1D rule = gauss_rule(3);
  const double dx = mesh.dx(), dz = mesh.dz();
  double e_l2 = 0.0, e_grad = 0.0, u_l2 = 0.0, u_grad = 0.0;

  for (int ic = 0; ic < mesh.x_cell_count(); ++ic) {
    for (int kc = 0; kc < mesh.z_cell_count(); ++kc) {
      const double c[4] = {field.at(ic, kc), field.at(ic + 1, kc), field.at(ic, kc + 1),
                           field.at(ic + 1, kc + 1)};
      for (std::size_t qz = 0; qz < rule.size(); ++qz) {
        const double z = map_to_interval(rule.points[qz], mesh.z(kc), mesh.z(kc + 1));
        for (std::size_t qx = 0; qx < rule.size(); ++qx) {
          const double x = map_to_interval(rule.points[qx], mesh.x(ic), mesh.x(ic + 1));
          const Q1Eval e = q1_eval(rule.points[qx], rule.points[qz]);
          const double w = rule.weights[qx] * rule.weights[qz] * 0.25 * dx * dz;
          double v = 0.0, vx = 0.0, vz = 0.0;
          for (int l = 0; l < 4; ++l) {
            v += c[l] * e.values[l];
            vx += c[l] * e.d_dxi[l] * 2.0 / dx;
            vz += c[l] * e.d_deta[l] * 2.0 / dz;
          }
          const double ue = problem.u_exact(x, z);
          const auto g = problem.grad_u_exact(x, z);
          e_l2 += w * (v - ue) * (v - ue);
          e_grad += w * ((vx - g[0]) * (vx - g[0]) + (vz - g[1]) * (vz - g[1]));
          u_l2 += w * ue * ue;
          u_grad += w * (g[0] * g[0] + g[1] * g[1]);
        }
      }
    }
  }

  ErrorReport r;
  r.abs_l2 = std::sqrt(e_l2);
  r.abs_h1 = std::sqrt(e_l2 + e_grad);
  const double n_l2 = std::sqrt(u_l2);
  const double n_h1 = std::sqrt(u_l2 + u_grad);
  r.rel_l2 = n_l2 > 0.0 ? r.abs_l2 / n_l2 : r.abs_l2;
  r.rel_h1 = n_h1 > 0.0 ? r.abs_h1 / n_h1 : r.abs_h1;
  r.h = mesh.h();
  r.model = field.kind;
  r.eps_min = problem.eps.eps_min();
  r.eps_max = problem.eps.eps_max();
  if (field.split) r.eps_iota = problem.eps(field.split->z_iota);
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("loglog_slope: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("loglog_slope: values must be positive");
    }
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("loglog_slope: abscissae are all equal");
  return sxy / sxx;
}

double eoc(const std::vector<std::pair<double, double>>& h_error) {
  std::vector<double> h, e;
  for (const auto& [hh, ee] : h_error) {
    h.push_back(hh);
    e.push_back(ee);
  }
  return loglog_slope(h, e);
}

bool non_increasing(const std::vector<double>& values, double noise) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > (1.0 + noise) * values[i - 1]) return false;
  }
  return true;
}

ScanResult select_eps_star(std::vector<ScanPoint> points, double plateau_tol) {
  if (points.empty()) throw std::invalid_argument("interface scan: empty candidate set");
  std::stable_sort(points.begin(), points.end(),
                   [](const ScanPoint& a, const ScanPoint& b) { return a.eps_iota > b.eps_iota; });
  ScanResult r;
  r.min_error = points.front().rel_h1;
  for (const ScanPoint& p : points) r.min_error = std::min(r.min_error, p.rel_h1);
  const double bound = (1.0 + plateau_tol) * r.min_error;
  for (const ScanPoint& p : points) {
    if (p.rel_h1 <= bound) {
      r.eps_star = p.eps_iota;
      r.iota_star = p.iota;
      break;
    }
  }
  const std::size_t n = points.size();
  r.plateau_reached = n >= 3;
  for (std::size_t i = n >= 3 ? n - 3 : 0; i < n; ++i) {
    if (points[i].rel_h1 > bound) r.plateau_reached = false;
  }
  r.points = std::move(points);
  return r;
}

ScanResult interface_scan(const TensorMesh& mesh, const ManufacturedProblem& problem,
                          const std::vector<int>& iota_candidates, double plateau_tol,
                          const SolveOptions& opts) {
  if (iota_candidates.empty()) throw std::invalid_argument("interface scan: empty candidate set");
  std::vector<ScanPoint> pts;
  for (int iota : iota_candidates) {
    const SubdomainSplit split = split_at_interface(mesh, iota);
    const SolutionField sol = solve_model(ModelKind::APL, mesh, &split, problem, opts);
    const ErrorReport e = error_norms(sol, problem);
    pts.push_back({iota, problem.eps(split.z_iota), e.rel_h1, e.rel_l2});
  }
  return select_eps_star(std::move(pts), plateau_tol);
}

std::vector<int> interfaces_for_eps_targets(const TensorMesh& mesh, const EpsProfile& eps,
                                            const std::vector<double>& targets) {
  std::set<int> seen;
  std::vector<int> out;
  const auto f = [&eps](double z) { return eps(z); };
  for (double t : targets) {
    const int iota = find_interface_for_eps(mesh, f, t);
    if (seen.insert(iota).second) out.push_back(iota);
  }
  return out;
}

namespace {

void require_decades(const std::vector<double>& eps, double min_decades) {
  if (eps.empty()) throw std::invalid_argument("sweep is empty");
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  if (!(*lo > 0.0) || std::log10(*hi / *lo) < min_decades) {
    throw std::invalid_argument("sweep too narrow: eps(z_iota) must span at least " +
                                std::to_string(min_decades) + " decades");
  }
}

}  // namespace

Theorem1Fit theorem1_fit(const SolutionField& ap, const std::vector<int>& iotas,
                         const EpsProfile& eps, double min_decades, double noise) {
  Theorem1Fit fit;
  for (int iota : iotas) {
    const SubdomainSplit split = split_at_interface(ap.mesh, iota);
    const SeminormPair s = xi2_seminorms(ap.mesh, split, derive_xi2(ap, split));
    fit.points.push_back({iota, eps(split.z_iota), s.dx, s.dz});
  }
  std::sort(fit.points.begin(), fit.points.end(),
            [](const Theorem1Point& a, const Theorem1Point& b) { return a.eps_iota > b.eps_iota; });
  std::vector<double> e, dx, dz;
  for (const auto& p : fit.points) {
    e.push_back(p.eps_iota);
    dx.push_back(p.xi_dx);
    dz.push_back(p.xi_dz);
  }
  require_decades(e, min_decades);
  fit.slope_dx = loglog_slope(e, dx);
  fit.slope_dz = loglog_slope(e, dz);
  fit.monotone_dx = non_increasing(dx, noise);
  fit.monotone_dz = non_increasing(dz, noise);
  return fit;
}

Theorem1Fit theorem1_fit(const TensorMesh& mesh, const ManufacturedProblem& problem,
                         const std::vector<int>& iotas, const SolveOptions& opts) {
  const SolutionField ap = solve_model(ModelKind::AP, mesh, nullptr, problem, opts);
  return theorem1_fit(ap, iotas, problem.eps);
}

Theorem2Fit theorem2_fit(const SolutionField& ap, const ManufacturedProblem& problem,
                         const std::vector<int>& iotas, double min_decades,
                         const SolveOptions& opts) {
  Theorem2Fit fit;
  const ErrorReport ap_err = error_norms(ap, problem);
  fit.ap_abs_h1 = ap_err.abs_h1;
  fit.ap_rel_h1 = ap_err.rel_h1;
  for (int iota : iotas) {
    const SubdomainSplit split = split_at_interface(ap.mesh, iota);
    const SolutionField apl = solve_model(ModelKind::APL, ap.mesh, &split, problem, opts);
    fit.points.push_back({iota, problem.eps(split.z_iota), ess_distance(ap, apl, split),
                          error_norms(apl, problem).rel_h1});
  }
  std::sort(fit.points.begin(), fit.points.end(),
            [](const Theorem2Point& a, const Theorem2Point& b) { return a.eps_iota > b.eps_iota; });
  std::vector<double> e, d;
  for (const auto& p : fit.points) {
    e.push_back(p.eps_iota);
    d.push_back(p.distance);
  }
  require_decades(e, min_decades);
  fit.slope = loglog_slope(e, d);
  return fit;
}

Theorem2Fit theorem2_fit(const TensorMesh& mesh, const ManufacturedProblem& problem,
                         const std::vector<int>& iotas, const SolveOptions& opts) {
  const SolutionField ap = solve_model(ModelKind::AP, mesh, nullptr, problem, opts);
  return theorem2_fit(ap, problem, iotas, 3.0, opts);
}

}  // namespace aniso
