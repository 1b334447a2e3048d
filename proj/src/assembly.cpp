#include "aniso/assembly.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace aniso {

std::string to_string(FormKind kind) {
  switch (kind) {
    case FormKind::Az: return "a_z";
    case FormKind::Axf: return "a_xf";
    case FormKind::Axa: return "a_xa";
    case FormKind::Bl: return "b_l";
    case FormKind::Bc: return "b_c";
    case FormKind::Cf: return "c_f";
    case FormKind::Ca: return "c_a";
    case FormKind::DIota: return "d_iota";
  }
  return "?";
}

std::string to_string(Subdomain sub) {
  switch (sub) {
    case Subdomain::Full: return "full";
    case Subdomain::Omega1: return "1";
    case Subdomain::Omega2: return "2";
  }
  return "?";
}

FluctLayout FluctLayout::full(const TensorMesh& mesh) {
  return {mesh.nx(), 0, mesh.nz() + 1};
}

FluctLayout FluctLayout::omega1(const TensorMesh& mesh, const SubdomainSplit& split) {
  return {mesh.nx(), split.iota, mesh.nz() + 1};
}

FluctLayout FluctLayout::omega2(const TensorMesh& mesh, const SubdomainSplit& split) {
  return {mesh.nx(), 0, split.iota};
}

FluctLayout FluctLayout::for_subdomain(const TensorMesh& mesh, Subdomain sub,
                                       const SubdomainSplit* split) {
  if (sub == Subdomain::Full) return full(mesh);
  if (split == nullptr) {
    throw std::invalid_argument("sub-domain " + to_string(sub) + " requires an interface split");
  }
  return sub == Subdomain::Omega1 ? omega1(mesh, *split) : omega2(mesh, *split);
}

DofLayout make_dof_layout(const TensorMesh& mesh, Subdomain sub, const SubdomainSplit* split) {
  DofLayout layout;
  layout.mean_dofs = mesh.nx();
  layout.fluct = FluctLayout::for_subdomain(mesh, sub, split);
  layout.lagrange_dofs = mesh.nx();
  layout.trace_dofs.reserve(static_cast<std::size_t>(mesh.nx()));
  for (int i = 1; i <= mesh.nx(); ++i) {
    layout.trace_dofs.push_back(layout.fluct.index(i, layout.fluct.k_first));
  }
  return layout;
}

namespace {

// Reference data at one tensor quadrature point: Q1 values and physical
// gradients, plus the P1 values and x-derivatives of the two x-hats.
struct RefPoint {
  int qx, qz;
  double weight;  // includes the Jacobian dx*dz/4
  std::array<double, 4> phi;
  std::array<double, 4> dphi_dx;
  std::array<double, 4> dphi_dz;
  std::array<double, 2> chi;
  std::array<double, 2> dchi_dx;
};

std::vector<RefPoint> reference_points(const QuadratureRule1D& rule, double dx, double dz) {
  std::vector<RefPoint> pts;
  const int n = static_cast<int>(rule.size());
  for (int qz = 0; qz < n; ++qz) {
    for (int qx = 0; qx < n; ++qx) {
      const Q1Eval q = q1_eval(rule.points[qx], rule.points[qz]);
      const P1Eval p = p1_eval(rule.points[qx]);
      RefPoint r{};
      r.qx = qx;
      r.qz = qz;
      r.weight = rule.weights[qx] * rule.weights[qz] * 0.25 * dx * dz;
      for (int l = 0; l < 4; ++l) {
        r.phi[l] = q.values[l];
        r.dphi_dx[l] = q.d_dxi[l] * 2.0 / dx;
        r.dphi_dz[l] = q.d_deta[l] * 2.0 / dz;
      }
      for (int l = 0; l < 2; ++l) {
        r.chi[l] = p.values[l];
        r.dchi_dx[l] = p.gradients[l] * 2.0 / dx;
      }
      pts.push_back(r);
    }
  }
  return pts;
}

// Local corner l of cell (ic, kc) sits at node (ic + (l & 1), kc + (l >> 1)).
inline int corner_i(int ic, int l) { return ic + (l & 1); }
inline int corner_k(int kc, int l) { return kc + (l >> 1); }

}  // namespace

Assembler::Assembler(const TensorMesh& mesh, const ManufacturedProblem& problem, int quad_order)
    : mesh_(mesh), problem_(problem), rule_(gauss_rule(quad_order)) {
  const std::size_t n = rule_.size();
  qx_.resize(static_cast<std::size_t>(mesh.x_cell_count()) * n);
  for (int ic = 0; ic < mesh.x_cell_count(); ++ic) {
    for (std::size_t q = 0; q < n; ++q) {
      qx_[ic * n + q] = map_to_interval(rule_.points[q], mesh.x(ic), mesh.x(ic + 1));
    }
  }
  qz_.resize(static_cast<std::size_t>(mesh.z_cell_count()) * n);
  eps_qz_.resize(qz_.size());
  for (int kc = 0; kc < mesh.z_cell_count(); ++kc) {
    for (std::size_t q = 0; q < n; ++q) {
      const double z = map_to_interval(rule_.points[q], mesh.z(kc), mesh.z(kc + 1));
      qz_[kc * n + q] = z;
      const double e = problem.eps(z);
      if (!(e > 0.0)) {
        throw std::domain_error("eps(z) must be positive; got " + std::to_string(e) +
                                " at z=" + std::to_string(z));
      }
      eps_qz_[kc * n + q] = e;
    }
  }
  mean_ax_.resize(qx_.size());
  const double half_dz = 0.5 * mesh.dz();
  const double lz = mesh.domain().lz();
  for (std::size_t p = 0; p < qx_.size(); ++p) {
    double s = 0.0;
    for (std::size_t j = 0; j < qz_.size(); ++j) {
      s += rule_.weights[j % n] * half_dz * problem.coeffs.ax(qx_[p], qz_[j]);
    }
    mean_ax_[p] = s / lz;
  }
}

double Assembler::mean_ax(double x) const {
  const std::size_t n = rule_.size();
  const double half_dz = 0.5 * mesh_.dz();
  double s = 0.0;
  for (std::size_t j = 0; j < qz_.size(); ++j) {
    s += rule_.weights[j % n] * half_dz * problem_.coeffs.ax(x, qz_[j]);
  }
  return s / mesh_.domain().lz();
}

std::pair<int, int> Assembler::cell_range(Subdomain sub, const SubdomainSplit* split) const {
  const FluctLayout l = FluctLayout::for_subdomain(mesh_, sub, split);
  return {l.k_first, l.k_last - 1};
}

SparseMatrix Assembler::assemble_form(FormId form, const SubdomainSplit* split) const {
  const int nx = mesh_.nx();
  const std::size_t n = rule_.size();
  const double lz = mesh_.domain().lz();

  if (form.kind == FormKind::DIota) {
    throw std::logic_error("d_iota is not assembled: the interface flux datum is zero");
  }

  if (form.kind == FormKind::Axa) {
    TripletList t(nx, nx);
    t.reserve(static_cast<std::size_t>(4 * (nx + 1)));
    for (int ic = 0; ic < mesh_.x_cell_count(); ++ic) {
      std::array<std::array<double, 2>, 2> loc{};
      for (std::size_t q = 0; q < n; ++q) {
        const P1Eval p = p1_eval(rule_.points[q]);
        const double w = rule_.weights[q] * 0.5 * mesh_.dx() * mean_ax_at(ic, static_cast<int>(q));
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            loc[a][b] += w * (p.gradients[a] * 2.0 / mesh_.dx()) * (p.gradients[b] * 2.0 / mesh_.dx());
      }
      for (int a = 0; a < 2; ++a) {
        const int ia = ic + a;
        if (ia < 1 || ia > nx) continue;
        for (int b = 0; b < 2; ++b) {
          const int ib = ic + b;
          if (ib < 1 || ib > nx) continue;
          t.add(ia - 1, ib - 1, loc[a][b]);
        }
      }
    }
    return std::move(t).build();
  }

  const FluctLayout lay = FluctLayout::for_subdomain(mesh_, form.sub, split);
  const auto [kc_begin, kc_end] = cell_range(form.sub, split);
  const std::vector<RefPoint> pts = reference_points(rule_, mesh_.dx(), mesh_.dz());
  const Coefficients& co = problem_.coeffs;

  int rows = 0;
  int cols = 0;
  switch (form.kind) {
    case FormKind::Az:
    case FormKind::Axf: rows = cols = lay.size(); break;
    case FormKind::Bl:
    case FormKind::Cf: rows = lay.size(); cols = nx; break;
    case FormKind::Bc:
    case FormKind::Ca: rows = nx; cols = lay.size(); break;
    default: break;
  }
  TripletList t(rows, cols);
  const bool fluct_fluct = form.kind == FormKind::Az || form.kind == FormKind::Axf;
  t.reserve(static_cast<std::size_t>(mesh_.x_cell_count()) *
            static_cast<std::size_t>(kc_end - kc_begin + 1) * (fluct_fluct ? 16u : 8u));

  for (int ic = 0; ic < mesh_.x_cell_count(); ++ic) {
    for (int kc = kc_begin; kc <= kc_end; ++kc) {
      // loc[l][a]: corner l of the fluctuation element, hat a in x.
      std::array<std::array<double, 4>, 4> ff{};
      std::array<std::array<double, 2>, 4> fm{};
      for (const RefPoint& r : pts) {
        const double x = qx_[ic * n + r.qx];
        const double z = qz_[kc * n + r.qz];
        const double e = eps_qz_[kc * n + r.qz];
        switch (form.kind) {
          case FormKind::Az: {
            const double c = r.weight * co.az(x, z) / e;
            for (int a = 0; a < 4; ++a)
              for (int b = 0; b < 4; ++b) ff[a][b] += c * r.dphi_dz[a] * r.dphi_dz[b];
            break;
          }
          case FormKind::Axf: {
            const double c = r.weight * co.ax(x, z);
            for (int a = 0; a < 4; ++a)
              for (int b = 0; b < 4; ++b) ff[a][b] += c * r.dphi_dx[a] * r.dphi_dx[b];
            break;
          }
          case FormKind::Cf: {
            const double c = r.weight * co.ax(x, z);
            for (int l = 0; l < 4; ++l)
              for (int a = 0; a < 2; ++a) fm[l][a] += c * r.dphi_dx[l] * r.dchi_dx[a];
            break;
          }
          case FormKind::Ca: {
            const double c = r.weight * (co.ax(x, z) - mean_ax_at(ic, r.qx));
            for (int l = 0; l < 4; ++l)
              for (int a = 0; a < 2; ++a) fm[l][a] += c * r.dphi_dx[l] * r.dchi_dx[a];
            break;
          }
          case FormKind::Bl: {
            const double c = r.weight / e;
            for (int l = 0; l < 4; ++l)
              for (int a = 0; a < 2; ++a) fm[l][a] += c * r.phi[l] * r.chi[a];
            break;
          }
          case FormKind::Bc: {
            const double c = r.weight / lz;
            for (int l = 0; l < 4; ++l)
              for (int a = 0; a < 2; ++a) fm[l][a] += c * r.phi[l] * r.chi[a];
            break;
          }
          default: break;
        }
      }

      if (fluct_fluct) {
        for (int a = 0; a < 4; ++a) {
          const int ia = corner_i(ic, a);
          if (ia < 1 || ia > nx) continue;
          const int row = lay.index(ia, corner_k(kc, a));
          for (int b = 0; b < 4; ++b) {
            const int ib = corner_i(ic, b);
            if (ib < 1 || ib > nx) continue;
            t.add(row, lay.index(ib, corner_k(kc, b)), ff[a][b]);
          }
        }
        continue;
      }
      const bool fluct_rows = form.kind == FormKind::Cf || form.kind == FormKind::Bl;
      for (int l = 0; l < 4; ++l) {
        const int il = corner_i(ic, l);
        if (il < 1 || il > nx) continue;
        const int f = lay.index(il, corner_k(kc, l));
        for (int a = 0; a < 2; ++a) {
          const int ia = ic + a;
          if (ia < 1 || ia > nx) continue;
          if (fluct_rows) {
            t.add(f, ia - 1, fm[l][a]);
          } else {
            t.add(ia - 1, f, fm[l][a]);
          }
        }
      }
    }
  }
  return std::move(t).build();
}

SparseMatrix Assembler::assemble_expanded_trace(FormKind kind, const SubdomainSplit& split) const {
  if (kind != FormKind::Ca && kind != FormKind::Bc) {
    throw std::invalid_argument("expanded trace forms are c_a(2) and b_c(2); got " +
                                to_string(kind));
  }
  const int nx = mesh_.nx();
  const std::size_t n = rule_.size();
  const double lz = mesh_.domain().lz();
  const FluctLayout lay = FluctLayout::omega1(mesh_, split);
  const double half_dz = 0.5 * mesh_.dz();

  TripletList t(nx, lay.size());
  t.reserve(static_cast<std::size_t>(4 * (nx + 1)));
  for (int ic = 0; ic < mesh_.x_cell_count(); ++ic) {
    std::array<std::array<double, 2>, 2> loc{};
    for (std::size_t q = 0; q < n; ++q) {
      const double x = qx_[ic * n + q];
      // z-integral over Omega_2 of the coefficient multiplying the trace.
      double zint = 0.0;
      for (int kc = 0; kc < split.iota; ++kc) {
        for (std::size_t qz = 0; qz < n; ++qz) {
          const double w = rule_.weights[qz] * half_dz;
          if (kind == FormKind::Ca) {
            zint += w * (problem_.coeffs.ax(x, qz_[kc * n + qz]) - mean_ax_at(ic, static_cast<int>(q)));
          } else {
            zint += w;
          }
        }
      }
      const P1Eval p = p1_eval(rule_.points[q]);
      const double wx = rule_.weights[q] * 0.5 * mesh_.dx();
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          if (kind == FormKind::Ca) {
            const double ga = p.gradients[a] * 2.0 / mesh_.dx();
            const double gb = p.gradients[b] * 2.0 / mesh_.dx();
            loc[a][b] += wx * zint * ga * gb;
          } else {
            loc[a][b] += wx * zint / lz * p.values[a] * p.values[b];
          }
        }
      }
    }
    for (int a = 0; a < 2; ++a) {
      const int row = ic + a;
      if (row < 1 || row > nx) continue;
      for (int b = 0; b < 2; ++b) {
        const int ib = ic + b;
        if (ib < 1 || ib > nx) continue;
        t.add(row - 1, lay.index(ib, split.iota), loc[a][b]);
      }
    }
  }
  return std::move(t).build();
}

std::vector<double> Assembler::assemble_rhs_mean() const {
  const int nx = mesh_.nx();
  const std::size_t n = rule_.size();
  const double lz = mesh_.domain().lz();
  const double half_dz = 0.5 * mesh_.dz();
  std::vector<double> rhs(static_cast<std::size_t>(nx), 0.0);
  for (int ic = 0; ic < mesh_.x_cell_count(); ++ic) {
    for (std::size_t q = 0; q < n; ++q) {
      const double x = qx_[ic * n + q];
      double fsum = 0.0;
      for (std::size_t j = 0; j < qz_.size(); ++j) {
        fsum += rule_.weights[j % n] * half_dz * problem_.f(x, qz_[j]);
      }
      const double data = (fsum + problem_.g_plus(x) - problem_.g_minus(x)) / lz;
      const P1Eval p = p1_eval(rule_.points[q]);
      const double wx = rule_.weights[q] * 0.5 * mesh_.dx();
      for (int a = 0; a < 2; ++a) {
        const int i = ic + a;
        if (i < 1 || i > nx) continue;
        rhs[static_cast<std::size_t>(i - 1)] += wx * data * p.values[a];
      }
    }
  }
  return rhs;
}

std::vector<double> Assembler::assemble_rhs_fluct(RhsModel which,
                                                  const SubdomainSplit* split) const {
  if (which == RhsModel::APL && split == nullptr) {
    throw std::invalid_argument("APL right-hand side requires an interface split");
  }
  if (which != RhsModel::APL && split != nullptr) {
    throw std::invalid_argument("P and AP right-hand sides live on the full domain; no split");
  }
  const Subdomain sub = which == RhsModel::APL ? Subdomain::Omega1 : Subdomain::Full;
  const FluctLayout lay = FluctLayout::for_subdomain(mesh_, sub, split);
  const auto [kc_begin, kc_end] = cell_range(sub, split);
  const int nx = mesh_.nx();
  const std::size_t n = rule_.size();
  const std::vector<RefPoint> pts = reference_points(rule_, mesh_.dx(), mesh_.dz());

  std::vector<double> rhs(static_cast<std::size_t>(lay.size()), 0.0);
  for (int ic = 0; ic < mesh_.x_cell_count(); ++ic) {
    for (int kc = kc_begin; kc <= kc_end; ++kc) {
      std::array<double, 4> loc{};
      for (const RefPoint& r : pts) {
        const double fv = r.weight * problem_.f(qx_[ic * n + r.qx], qz_[kc * n + r.qz]);
        for (int l = 0; l < 4; ++l) loc[l] += fv * r.phi[l];
      }
      for (int l = 0; l < 4; ++l) {
        const int i = corner_i(ic, l);
        if (i < 1 || i > nx) continue;
        rhs[static_cast<std::size_t>(lay.index(i, corner_k(kc, l)))] += loc[l];
      }
    }
  }

  // Neumann data on z = z_+ (and z = z_- for the full-domain models).
  const bool with_bottom = which != RhsModel::APL;
  for (int ic = 0; ic < mesh_.x_cell_count(); ++ic) {
    for (std::size_t q = 0; q < n; ++q) {
      const double x = qx_[ic * n + q];
      const P1Eval p = p1_eval(rule_.points[q]);
      const double wx = rule_.weights[q] * 0.5 * mesh_.dx();
      const double top = problem_.g_plus(x);
      const double bottom = with_bottom ? problem_.g_minus(x) : 0.0;
      for (int a = 0; a < 2; ++a) {
        const int i = ic + a;
        if (i < 1 || i > nx) continue;
        rhs[static_cast<std::size_t>(lay.index(i, mesh_.nz() + 1))] += wx * top * p.values[a];
        if (with_bottom) {
          rhs[static_cast<std::size_t>(lay.index(i, 0))] -= wx * bottom * p.values[a];
        }
      }
    }
  }
  return rhs;
}

SparseMatrix assemble_form(FormId form, const TensorMesh& mesh, const SubdomainSplit* split,
                           const ManufacturedProblem& problem) {
  return Assembler(mesh, problem).assemble_form(form, split);
}

SparseMatrix assemble_expanded_trace(FormKind kind, const TensorMesh& mesh,
                                     const SubdomainSplit& split,
                                     const ManufacturedProblem& problem) {
  return Assembler(mesh, problem).assemble_expanded_trace(kind, split);
}

std::vector<double> assemble_rhs_mean(const TensorMesh& mesh, const ManufacturedProblem& problem) {
  return Assembler(mesh, problem).assemble_rhs_mean();
}

std::vector<double> assemble_rhs_fluct(const TensorMesh& mesh, const SubdomainSplit* split,
                                       const ManufacturedProblem& problem, RhsModel which) {
  return Assembler(mesh, problem).assemble_rhs_fluct(which, split);
}

}  // namespace aniso
