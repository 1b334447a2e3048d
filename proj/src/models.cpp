#include "aniso/models.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aniso/quadrature.hpp"

namespace aniso {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Trapezoidal z-average of a nodal column, exact for the Q1 interpolant.
double column_mean(const TensorMesh& mesh, const std::vector<double>& nodal, int i) {
  const int nz = mesh.nz();
  double s = 0.0;
  for (int k = 0; k <= nz; ++k) {
    s += 0.5 * (nodal[mesh.node_index(i, k)] + nodal[mesh.node_index(i, k + 1)]);
  }
  return s * mesh.dz() / mesh.domain().lz();
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::P: return "P";
    case ModelKind::AP: return "AP";
    case ModelKind::APL: return "APL";
    case ModelKind::L1D: return "L1D";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "p") return ModelKind::P;
  if (s == "ap") return ModelKind::AP;
  if (s == "apl" || s == "ap/l") return ModelKind::APL;
  if (s == "l1d" || s == "l") return ModelKind::L1D;
  throw std::invalid_argument("unknown model '" + name + "' (expected p, ap, apl or l1d)");
}

ModelSystem build_p_system(const TensorMesh& mesh, const ManufacturedProblem& problem,
                           int quad_order) {
  const Assembler as(mesh, problem, quad_order);
  const SparseMatrix axf = as.assemble_form({FormKind::Axf, Subdomain::Full});
  const SparseMatrix az = as.assemble_form({FormKind::Az, Subdomain::Full});

  ModelSystem ms;
  ms.kind = ModelKind::P;
  ms.layout.fluct = FluctLayout::full(mesh);
  ms.system = compose_blocks({ms.layout.fluct.size()}, {{0, 0, &axf}, {0, 0, &az}},
                             {as.assemble_rhs_fluct(RhsModel::P, nullptr)});
  return ms;
}

ModelSystem build_ap_system(const TensorMesh& mesh, const ManufacturedProblem& problem,
                            int quad_order) {
  const Assembler as(mesh, problem, quad_order);
  const double lz = mesh.domain().lz();
  const SparseMatrix axa = as.assemble_form({FormKind::Axa});
  const SparseMatrix ca = as.assemble_form({FormKind::Ca, Subdomain::Full});
  const SparseMatrix cf = as.assemble_form({FormKind::Cf, Subdomain::Full});
  const SparseMatrix axf = as.assemble_form({FormKind::Axf, Subdomain::Full});
  const SparseMatrix az = as.assemble_form({FormKind::Az, Subdomain::Full});
  const SparseMatrix bl = as.assemble_form({FormKind::Bl, Subdomain::Full});
  SparseMatrix bc = as.assemble_form({FormKind::Bc, Subdomain::Full});

  ModelSystem ms;
  ms.kind = ModelKind::AP;
  ms.layout = make_dof_layout(mesh, Subdomain::Full, nullptr);
  const int nx = mesh.nx();
  const int nf = ms.layout.fluct.size();
  ms.system = compose_blocks(
      {nx, nf, nx},
      {{0, 0, &axa}, {0, 1, &ca, 1.0 / lz}, {1, 0, &cf}, {1, 1, &axf}, {1, 1, &az}, {1, 2, &bl},
       {2, 1, &bc}},
      {as.assemble_rhs_mean(), as.assemble_rhs_fluct(RhsModel::AP, nullptr),
       std::vector<double>(static_cast<std::size_t>(nx), 0.0)});
  ms.constraint = std::move(bc);
  return ms;
}

ModelSystem build_apl_system(const TensorMesh& mesh, const SubdomainSplit& split,
                             const ManufacturedProblem& problem, int quad_order) {
  if (split.iota < 1 || split.iota > mesh.nz()) {
    throw std::invalid_argument("APL system: interface index out of range");
  }
  const Assembler as(mesh, problem, quad_order);
  const double lz = mesh.domain().lz();
  const SparseMatrix axa = as.assemble_form({FormKind::Axa});
  const SparseMatrix ca1 = as.assemble_form({FormKind::Ca, Subdomain::Omega1}, &split);
  const SparseMatrix ca2 = as.assemble_expanded_trace(FormKind::Ca, split);
  const SparseMatrix cf1 = as.assemble_form({FormKind::Cf, Subdomain::Omega1}, &split);
  const SparseMatrix axf1 = as.assemble_form({FormKind::Axf, Subdomain::Omega1}, &split);
  const SparseMatrix az1 = as.assemble_form({FormKind::Az, Subdomain::Omega1}, &split);
  const SparseMatrix bl1 = as.assemble_form({FormKind::Bl, Subdomain::Omega1}, &split);
  const SparseMatrix bc1 = as.assemble_form({FormKind::Bc, Subdomain::Omega1}, &split);
  const SparseMatrix bc2 = as.assemble_expanded_trace(FormKind::Bc, split);

  ModelSystem ms;
  ms.kind = ModelKind::APL;
  ms.split = split;
  ms.layout = make_dof_layout(mesh, Subdomain::Omega1, &split);
  const int nx = mesh.nx();
  const int nf = ms.layout.fluct.size();
  ms.system = compose_blocks({nx, nf, nx},
                             {{0, 0, &axa},
                              {0, 1, &ca1, 1.0 / lz},
                              {0, 1, &ca2, 1.0 / lz},
                              {1, 0, &cf1},
                              {1, 1, &axf1},
                              {1, 1, &az1},
                              {1, 2, &bl1},
                              {2, 1, &bc1},
                              {2, 1, &bc2}},
                             {as.assemble_rhs_mean(), as.assemble_rhs_fluct(RhsModel::APL, &split),
                              std::vector<double>(static_cast<std::size_t>(nx), 0.0)});
  std::vector<Triplet> c = bc1.to_triplets();
  for (const Triplet& t : bc2.to_triplets()) c.push_back(t);
  ms.constraint = SparseMatrix::from_triplets(nx, nf, std::move(c));
  return ms;
}

std::vector<double> solve_limit_1d(const TensorMesh& mesh, const ManufacturedProblem& problem,
                                   int quad_order) {
  const Assembler as(mesh, problem, quad_order);
  const SparseMatrix axa = as.assemble_form({FormKind::Axa});
  const std::vector<double> alpha = lu_solve(axa, as.assemble_rhs_mean());
  std::vector<double> out(static_cast<std::size_t>(mesh.nx() + 2), 0.0);
  std::copy(alpha.begin(), alpha.end(), out.begin() + 1);
  return out;
}

SolutionField solve_model(ModelKind kind, const TensorMesh& mesh, const SubdomainSplit* split,
                          const ManufacturedProblem& problem, const SolveOptions& opts) {
  if (kind == ModelKind::APL && split == nullptr) {
    throw std::invalid_argument("APL solve requires an interface split");
  }
  SolutionField sol{mesh, kind, std::nullopt, {}, {}, {}, {}, {}, {}, 0.0, {}};
  if (kind == ModelKind::APL) sol.split = *split;

  const int nx = mesh.nx();
  const int nz = mesh.nz();
  sol.u.assign(mesh.node_count(), 0.0);
  sol.fluct.assign(mesh.node_count(), 0.0);
  sol.mean.assign(static_cast<std::size_t>(nx + 2), 0.0);

  if (kind == ModelKind::L1D) {
    auto t0 = Clock::now();
    const Assembler as(mesh, problem, opts.quad_order);
    const SparseMatrix axa = as.assemble_form({FormKind::Axa});
    const std::vector<double> rhs = as.assemble_rhs_mean();
    sol.report.assemble_seconds = seconds_since(t0);
    t0 = Clock::now();
    const LuFactorization lu(axa);
    sol.report.factorize_seconds = seconds_since(t0);
    t0 = Clock::now();
    sol.unknowns = lu.solve(rhs);
    sol.report.solve_seconds = seconds_since(t0);
    sol.report.rows = axa.rows();
    sol.report.nnz = axa.nnz();
    sol.report.factor_nnz = lu.factor_nnz();
    if (opts.estimate_condition) sol.report.cond1 = cond1_estimate(axa, lu);
    sol.report.residual = relative_residual(axa, sol.unknowns, rhs);
    for (int i = 1; i <= nx; ++i) {
      sol.mean[static_cast<std::size_t>(i)] = sol.unknowns[static_cast<std::size_t>(i - 1)];
      for (int k = 0; k <= nz + 1; ++k) sol.u[mesh.node_index(i, k)] = sol.mean[i];
    }
    return sol;
  }

  auto t0 = Clock::now();
  ModelSystem ms;
  switch (kind) {
    case ModelKind::P: ms = build_p_system(mesh, problem, opts.quad_order); break;
    case ModelKind::AP: ms = build_ap_system(mesh, problem, opts.quad_order); break;
    default: ms = build_apl_system(mesh, *split, problem, opts.quad_order); break;
  }
  sol.report.assemble_seconds = seconds_since(t0);
  const SparseMatrix& a = ms.system.matrix;
  const std::vector<double>& b = ms.system.rhs;
  sol.report.rows = a.rows();
  sol.report.nnz = a.nnz();

  Equilibration eq;
  SparseMatrix scaled;
  if (opts.equilibrate) {
    eq = equilibrate(a);
    scaled = apply_equilibration(a, eq);
  }
  const SparseMatrix& solved = opts.equilibrate ? scaled : a;

  t0 = Clock::now();
  const LuFactorization lu(solved);
  sol.report.factorize_seconds = seconds_since(t0);
  sol.report.factor_nnz = lu.factor_nnz();

  t0 = Clock::now();
  if (opts.equilibrate) {
    std::vector<double> rb(b.size());
    for (std::size_t r = 0; r < b.size(); ++r) rb[r] = eq.row_scale[r] * b[r];
    sol.unknowns = lu.solve(rb);
    for (std::size_t c = 0; c < sol.unknowns.size(); ++c) sol.unknowns[c] *= eq.col_scale[c];
  } else {
    sol.unknowns = lu.solve(b);
  }
  sol.report.solve_seconds = seconds_since(t0);

  if (opts.estimate_condition) sol.report.cond1 = cond1_estimate(solved, lu);
  sol.report.residual = relative_residual(a, sol.unknowns, b);
  const bool finite = std::all_of(sol.unknowns.begin(), sol.unknowns.end(),
                                  [](double v) { return std::isfinite(v); });
  sol.report.breakdown = !finite || !(sol.report.residual <= 1e-9) ||
                         sol.report.cond1 * std::numeric_limits<double>::epsilon() > 1.0;

  const FluctLayout& lay = ms.layout.fluct;
  const auto fl = std::span<const double>(sol.unknowns).subspan(
      static_cast<std::size_t>(ms.fluct_offset()), static_cast<std::size_t>(lay.size()));

  if (kind == ModelKind::P) {
    for (int i = 1; i <= nx; ++i) {
      for (int k = 0; k <= nz + 1; ++k) sol.u[mesh.node_index(i, k)] = fl[lay.index(i, k)];
      const double m = column_mean(mesh, sol.u, i);
      sol.mean[static_cast<std::size_t>(i)] = m;
      for (int k = 0; k <= nz + 1; ++k) {
        sol.fluct[mesh.node_index(i, k)] = sol.u[mesh.node_index(i, k)] - m;
      }
    }
    return sol;
  }

  for (int i = 1; i <= nx; ++i) {
    sol.mean[static_cast<std::size_t>(i)] = sol.unknowns[static_cast<std::size_t>(i - 1)];
  }
  sol.multiplier.assign(sol.unknowns.begin() + ms.multiplier_offset(), sol.unknowns.end());
  if (kind == ModelKind::APL) sol.trace.assign(static_cast<std::size_t>(nx + 2), 0.0);
  for (int i = 1; i <= nx; ++i) {
    for (int k = 0; k <= nz + 1; ++k) {
      const int kk = std::max(k, lay.k_first);
      sol.fluct[mesh.node_index(i, k)] = fl[lay.index(i, kk)];
    }
    if (kind == ModelKind::APL) sol.trace[i] = fl[lay.index(i, lay.k_first)];
    for (int k = 0; k <= nz + 1; ++k) {
      sol.u[mesh.node_index(i, k)] = sol.mean[i] + sol.fluct[mesh.node_index(i, k)];
    }
  }
  sol.constraint_residual = max_abs(ms.constraint.multiply(fl));
  return sol;
}

std::vector<double> derive_xi2(const SolutionField& ap, const SubdomainSplit& split) {
  const TensorMesh& mesh = ap.mesh;
  const int m = split.iota + 1;
  std::vector<double> xi(static_cast<std::size_t>(mesh.nx() + 2) * m, 0.0);
  for (int i = 0; i <= mesh.nx() + 1; ++i) {
    const double tr = ap.fluct[mesh.node_index(i, split.iota)];
    for (int k = 0; k < split.iota; ++k) {
      xi[static_cast<std::size_t>(i) * m + k] = ap.fluct[mesh.node_index(i, k)] - tr;
    }
  }
  return xi;
}

double FieldNorms::h1() const { return std::sqrt(l2 * l2 + dx * dx + dz * dz); }

namespace {

// Quadrature of a Q1 nodal field given by an accessor value(i, k).
template <class Value>
FieldNorms integrate_norms(const TensorMesh& mesh, Value&& value, int kc_begin, int kc_end) {
  static const QuadratureRule1D rule = gauss_rule(3);
  double l2 = 0.0, gx = 0.0, gz = 0.0;
  const double dx = mesh.dx(), dz = mesh.dz();
  for (int ic = 0; ic < mesh.x_cell_count(); ++ic) {
    for (int kc = kc_begin; kc <= kc_end; ++kc) {
      const double c[4] = {value(ic, kc), value(ic + 1, kc), value(ic, kc + 1),
                           value(ic + 1, kc + 1)};
      for (std::size_t qz = 0; qz < rule.size(); ++qz) {
        for (std::size_t qx = 0; qx < rule.size(); ++qx) {
          const Q1Eval e = q1_eval(rule.points[qx], rule.points[qz]);
          const double w = rule.weights[qx] * rule.weights[qz] * 0.25 * dx * dz;
          double v = 0.0, vx = 0.0, vz = 0.0;
          for (int l = 0; l < 4; ++l) {
            v += c[l] * e.values[l];
            vx += c[l] * e.d_dxi[l] * 2.0 / dx;
            vz += c[l] * e.d_deta[l] * 2.0 / dz;
          }
          l2 += w * v * v;
          gx += w * vx * vx;
          gz += w * vz * vz;
        }
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(gx), std::sqrt(gz)};
}

std::pair<int, int> region_cells(const TensorMesh& mesh, Region region,
                                 const SubdomainSplit* split) {
  if (region == Region::Full) return {0, mesh.nz()};
  if (split == nullptr) throw std::invalid_argument("sub-domain region requires a split");
  if (region == Region::Omega1) return {split->iota, mesh.nz()};
  return {0, split->iota - 1};
}

}  // namespace

FieldNorms field_norms(const TensorMesh& mesh, const std::vector<double>& nodal, int kc_begin,
                       int kc_end) {
  return integrate_norms(
      mesh, [&](int i, int k) { return nodal[mesh.node_index(i, k)]; }, kc_begin, kc_end);
}

SeminormPair xi2_seminorms(const TensorMesh& mesh, const SubdomainSplit& split,
                           const std::vector<double>& xi2) {
  const int m = split.iota + 1;
  const FieldNorms n = integrate_norms(
      mesh, [&](int i, int k) { return xi2[static_cast<std::size_t>(i) * m + k]; }, 0,
      split.iota - 1);
  return {n.dx, n.dz};
}

double h1_distance(const SolutionField& a, const SolutionField& b, Region region,
                   const SubdomainSplit* split) {
  if (!a.mesh.same_grid(b.mesh)) throw std::invalid_argument("h1_distance: mesh mismatch");
  const auto [k0, k1] = region_cells(a.mesh, region, split);
  return integrate_norms(
             a.mesh,
             [&](int i, int k) {
               const std::size_t n = a.mesh.node_index(i, k);
               return a.u[n] - b.u[n];
             },
             k0, k1)
      .h1();
}

double ess_distance(const SolutionField& a, const SolutionField& b, const SubdomainSplit& split) {
  if (!a.mesh.same_grid(b.mesh)) throw std::invalid_argument("ess_distance: mesh mismatch");
  const TensorMesh& mesh = a.mesh;
  double mean_dx = 0.0;
  for (int ic = 0; ic < mesh.x_cell_count(); ++ic) {
    const double d = (a.mean[ic + 1] - b.mean[ic + 1]) - (a.mean[ic] - b.mean[ic]);
    mean_dx += d * d / mesh.dx();
  }
  const FieldNorms f = integrate_norms(
      mesh,
      [&](int i, int k) {
        const std::size_t n = mesh.node_index(i, k);
        return a.fluct[n] - b.fluct[n];
      },
      split.iota, mesh.nz());
  return std::sqrt(mean_dx) + f.dx + f.dz;
}

}  // namespace aniso
