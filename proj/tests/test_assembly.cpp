#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "aniso/assembly.hpp"
#include "aniso/quadrature.hpp"

using namespace aniso;

namespace {

using Dense = std::vector<std::vector<double>>;

// Global 1D hat centred at node `idx`, evaluated in cell [c, c+1].
struct Hat {
  double v, d;
};

Hat hat(double t, int idx, int c, double t0, double h) {
  if (idx == c) return {(t0 + h - t) / h, -1.0 / h};
  if (idx == c + 1) return {(t - t0) / h, 1.0 / h};
  return {0.0, 0.0};
}

struct QP {
  double x, z, w;
  int ic, kc;
};

// All 3x3 Gauss points of the cells with z-cell index in [kc0, kc1].
std::vector<QP> points(const TensorMesh& m, int kc0, int kc1) {
  const QuadratureRule1D g = gauss_rule(3);
  std::vector<QP> out;
  for (int ic = 0; ic < m.x_cell_count(); ++ic) {
    for (int kc = kc0; kc <= kc1; ++kc) {
      for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
          out.push_back({map_to_interval(g.points[a], m.x(ic), m.x(ic + 1)),
                         map_to_interval(g.points[b], m.z(kc), m.z(kc + 1)),
                         g.weights[a] * g.weights[b] * 0.25 * m.dx() * m.dz(), ic, kc});
        }
      }
    }
  }
  return out;
}

double mean_ax(const TensorMesh& m, const ManufacturedProblem& p, double x) {
  const QuadratureRule1D g = gauss_rule(3);
  double s = 0.0;
  for (int kc = 0; kc < m.z_cell_count(); ++kc) {
    for (std::size_t b = 0; b < 3; ++b) {
      s += g.weights[b] * 0.5 * m.dz() * p.coeffs.ax(x, map_to_interval(g.points[b], m.z(kc), m.z(kc + 1)));
    }
  }
  return s / m.domain().lz();
}

struct Fixture {
  TensorMesh mesh{Domain::preset_b(), 3, 5};
  ManufacturedProblem problem = setup_a(Domain::preset_b(), EpsProfile::tanh(1e-3, 1.0, 5.0));

  Hat hx(const QP& q, int i) const { return hat(q.x, i, q.ic, mesh.x(q.ic), mesh.dx()); }
  Hat hz(const QP& q, int k) const { return hat(q.z, k, q.kc, mesh.z(q.kc), mesh.dz()); }

  // rows: test function, cols: trial function
  Dense fluct_fluct(const FluctLayout& lay, bool z_deriv) const {
    Dense d(lay.size(), std::vector<double>(lay.size(), 0.0));
    for (const QP& q : points(mesh, lay.k_first, lay.k_last - 1)) {
      const double c = z_deriv ? problem.coeffs.az(q.x, q.z) / problem.eps(q.z)
                               : problem.coeffs.ax(q.x, q.z);
      for (int i = 1; i <= lay.nx; ++i) {
        for (int k = lay.k_first; k <= lay.k_last; ++k) {
          for (int j = 1; j <= lay.nx; ++j) {
            for (int l = lay.k_first; l <= lay.k_last; ++l) {
              const double gi = z_deriv ? hx(q, i).v * hz(q, k).d : hx(q, i).d * hz(q, k).v;
              const double gj = z_deriv ? hx(q, j).v * hz(q, l).d : hx(q, j).d * hz(q, l).v;
              d[lay.index(i, k)][lay.index(j, l)] += q.w * c * gi * gj;
            }
          }
        }
      }
    }
    return d;
  }

  // rows: fluct layout, cols: x-hats 1..Nx; integrand(q, fluct hat, x hat)
  Dense fluct_x(const FluctLayout& lay,
                const std::function<double(const QP&, Hat, Hat, Hat)>& f) const {
    Dense d(lay.size(), std::vector<double>(lay.nx, 0.0));
    for (const QP& q : points(mesh, lay.k_first, lay.k_last - 1)) {
      for (int i = 1; i <= lay.nx; ++i) {
        for (int k = lay.k_first; k <= lay.k_last; ++k) {
          for (int j = 1; j <= lay.nx; ++j) {
            d[lay.index(i, k)][j - 1] += q.w * f(q, hx(q, i), hz(q, k), hx(q, j));
          }
        }
      }
    }
    return d;
  }
};

Dense transpose(const Dense& a) {
  Dense t(a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

void expect_matches(const SparseMatrix& a, const Dense& d, double rel = 1e-13) {
  ASSERT_EQ(static_cast<std::size_t>(a.rows()), d.size());
  ASSERT_EQ(static_cast<std::size_t>(a.cols()), d[0].size());
  double scale = 0.0;
  for (const auto& row : d)
    for (double v : row) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      EXPECT_NEAR(a.coeff(i, j), d[i][j], rel * scale) << "entry (" << i << ", " << j << ")";
    }
  }
}

double symmetry_defect(const SparseMatrix& a) {
  const SparseMatrix t = a.transpose();
  double diff = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) diff = std::max(diff, std::abs(a.coeff(i, j) - t.coeff(i, j)));
  return diff / a.max_abs();
}

}  // namespace

TEST(Assembly, LayoutsAndDofCounts) {
  const TensorMesh m(Domain::preset_b(), 250, 250);
  const SubdomainSplit s = split_at_interface(m, 150);
  EXPECT_EQ(FluctLayout::full(m).size(), 250 * 252);
  EXPECT_EQ(FluctLayout::omega1(m, s).mz(), 102);
  EXPECT_EQ(FluctLayout::omega2(m, s).mz(), 151);
  const DofLayout ap = make_dof_layout(m, Subdomain::Full, nullptr);
  EXPECT_EQ(ap.total(), 63500);
  const DofLayout apl = make_dof_layout(m, Subdomain::Omega1, &s);
  EXPECT_EQ(apl.total(), 26000);
  EXPECT_EQ(apl.trace_dofs.size(), 250u);
}

TEST(Assembly, StiffnessFormsMatchGlobalBasisOracle) {
  Fixture fx;
  const Assembler as(fx.mesh, fx.problem);
  const SubdomainSplit s = split_at_interface(fx.mesh, 2);
  for (Subdomain sub : {Subdomain::Full, Subdomain::Omega1, Subdomain::Omega2}) {
    const FluctLayout lay = FluctLayout::for_subdomain(fx.mesh, sub, &s);
    SCOPED_TRACE(to_string(sub));
    expect_matches(as.assemble_form({FormKind::Az, sub}, &s), fx.fluct_fluct(lay, true));
    expect_matches(as.assemble_form({FormKind::Axf, sub}, &s), fx.fluct_fluct(lay, false));
  }
}

TEST(Assembly, CouplingFormsMatchGlobalBasisOracle) {
  Fixture fx;
  const Assembler as(fx.mesh, fx.problem);
  const SubdomainSplit s = split_at_interface(fx.mesh, 3);
  const double lz = fx.mesh.domain().lz();
  const auto& p = fx.problem;
  for (Subdomain sub : {Subdomain::Full, Subdomain::Omega1}) {
    const FluctLayout lay = FluctLayout::for_subdomain(fx.mesh, sub, &s);
    SCOPED_TRACE(to_string(sub));
    const Dense bl = fx.fluct_x(lay, [&](const QP& q, Hat hi, Hat hk, Hat hj) {
      return hi.v * hk.v * hj.v / p.eps(q.z);
    });
    const Dense bc = fx.fluct_x(lay, [&](const QP&, Hat hi, Hat hk, Hat hj) {
      return hi.v * hk.v * hj.v / lz;
    });
    const Dense cf = fx.fluct_x(lay, [&](const QP& q, Hat hi, Hat hk, Hat hj) {
      return p.coeffs.ax(q.x, q.z) * hi.d * hk.v * hj.d;
    });
    const Dense ca = fx.fluct_x(lay, [&](const QP& q, Hat hi, Hat hk, Hat hj) {
      return (p.coeffs.ax(q.x, q.z) - mean_ax(fx.mesh, p, q.x)) * hi.d * hk.v * hj.d;
    });
    expect_matches(as.assemble_form({FormKind::Bl, sub}, &s), bl);
    expect_matches(as.assemble_form({FormKind::Bc, sub}, &s), transpose(bc));
    expect_matches(as.assemble_form({FormKind::Cf, sub}, &s), cf);
    expect_matches(as.assemble_form({FormKind::Ca, sub}, &s), transpose(ca), 1e-12);
  }
}

TEST(Assembly, MeanStiffnessMatchesOracle) {
  Fixture fx;
  const Assembler as(fx.mesh, fx.problem);
  const int nx = fx.mesh.nx();
  Dense d(nx, std::vector<double>(nx, 0.0));
  const QuadratureRule1D g = gauss_rule(3);
  for (int ic = 0; ic < fx.mesh.x_cell_count(); ++ic) {
    for (std::size_t a = 0; a < 3; ++a) {
      const double x = map_to_interval(g.points[a], fx.mesh.x(ic), fx.mesh.x(ic + 1));
      const double w = g.weights[a] * 0.5 * fx.mesh.dx() * mean_ax(fx.mesh, fx.problem, x);
      for (int i = 1; i <= nx; ++i)
        for (int j = 1; j <= nx; ++j)
          d[i - 1][j - 1] += w * hat(x, i, ic, fx.mesh.x(ic), fx.mesh.dx()).d *
                             hat(x, j, ic, fx.mesh.x(ic), fx.mesh.dx()).d;
    }
  }
  expect_matches(as.assemble_form({FormKind::Axa, Subdomain::Full}), d);
}

TEST(Assembly, SymmetricForms) {
  const TensorMesh m(Domain::preset_b(), 12, 17);
  const ManufacturedProblem p = setup_b(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0));
  const Assembler as(m, p);
  const SubdomainSplit s = split_at_interface(m, 9);
  for (Subdomain sub : {Subdomain::Full, Subdomain::Omega1, Subdomain::Omega2}) {
    EXPECT_LT(symmetry_defect(as.assemble_form({FormKind::Az, sub}, &s)), 1e-13);
    EXPECT_LT(symmetry_defect(as.assemble_form({FormKind::Axf, sub}, &s)), 1e-13);
  }
  EXPECT_LT(symmetry_defect(as.assemble_form({FormKind::Axa, Subdomain::Full})), 1e-13);
}

TEST(Assembly, ConstraintOfConstantFluctuation) {
  // v' = 1 at every interior node and 0 on the Dirichlet columns:
  // (1/Lz) int chi_j v' = dx, or 5 dx / 6 next to the boundary
  const TensorMesh m(Domain::preset_b(), 7, 9);
  const ManufacturedProblem p = setup_a(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0));
  const Assembler as(m, p);
  const auto full = as.assemble_form({FormKind::Bc, Subdomain::Full});
  auto expected = [&](std::size_t j) {
    return (j == 0 || j + 1 == static_cast<std::size_t>(m.nx())) ? 5.0 * m.dx() / 6.0 : m.dx();
  };
  const auto r = full.multiply(std::vector<double>(full.cols(), 1.0));
  for (std::size_t j = 0; j < r.size(); ++j) EXPECT_NEAR(r[j], expected(j), 1e-14);

  const SubdomainSplit s = split_at_interface(m, 4);
  const auto b1 = as.assemble_form({FormKind::Bc, Subdomain::Omega1}, &s);
  const auto b2 = as.assemble_expanded_trace(FormKind::Bc, s);
  const std::vector<double> ones(b1.cols(), 1.0);
  const auto r1 = b1.multiply(ones), r2 = b2.multiply(ones);
  for (std::size_t j = 0; j < r1.size(); ++j) EXPECT_NEAR(r1[j] + r2[j], expected(j), 1e-14);
}

TEST(Assembly, MeanFreeCouplingAnnihilatesZIndependentFields) {
  // A_x - mean_z(A_x) integrates to zero along z, so Ca maps w(x) to zero.
  const TensorMesh m(Domain::preset_b(), 8, 11);
  const ManufacturedProblem p = setup_a(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0));
  const Assembler as(m, p);
  const FluctLayout lay = FluctLayout::full(m);
  std::vector<double> w(lay.size());
  for (int i = 1; i <= lay.nx; ++i)
    for (int k = lay.k_first; k <= lay.k_last; ++k) w[lay.index(i, k)] = std::sin(1.0 + i);
  const auto ca = as.assemble_form({FormKind::Ca, Subdomain::Full});
  for (double v : ca.multiply(w)) EXPECT_NEAR(v, 0.0, 1e-12 * ca.max_abs());

  const SubdomainSplit s = split_at_interface(m, 5);
  const FluctLayout l1 = FluctLayout::omega1(m, s);
  std::vector<double> w1(l1.size());
  for (int i = 1; i <= l1.nx; ++i)
    for (int k = l1.k_first; k <= l1.k_last; ++k) w1[l1.index(i, k)] = std::sin(1.0 + i);
  const auto a1 = as.assemble_form({FormKind::Ca, Subdomain::Omega1}, &s).multiply(w1);
  const auto a2 = as.assemble_expanded_trace(FormKind::Ca, s).multiply(w1);
  for (std::size_t j = 0; j < a1.size(); ++j) EXPECT_NEAR(a1[j] + a2[j], 0.0, 1e-12 * ca.max_abs());
}

TEST(Assembly, ExpandedTraceTouchesOnlyTraceColumns) {
  const TensorMesh m(Domain::preset_b(), 6, 9);
  const ManufacturedProblem p = setup_a(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0));
  const SubdomainSplit s = split_at_interface(m, 4);
  const FluctLayout lay = FluctLayout::omega1(m, s);
  for (FormKind kind : {FormKind::Ca, FormKind::Bc}) {
    const SparseMatrix t = assemble_expanded_trace(kind, m, s, p);
    for (const Triplet& e : t.to_triplets()) EXPECT_EQ(e.col % lay.mz(), 0) << to_string(kind);
  }
  EXPECT_THROW(assemble_expanded_trace(FormKind::Az, m, s, p), std::invalid_argument);
}

TEST(Assembly, ErrorCases) {
  const TensorMesh m(Domain::preset_b(), 4, 4);
  const ManufacturedProblem p = setup_a(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0));
  const Assembler as(m, p);
  EXPECT_THROW(as.assemble_form({FormKind::DIota, Subdomain::Full}), std::logic_error);
  EXPECT_THROW(as.assemble_form({FormKind::Az, Subdomain::Omega1}), std::invalid_argument);
  EXPECT_THROW(as.assemble_rhs_fluct(RhsModel::APL, nullptr), std::invalid_argument);
}

TEST(Assembly, LoadVectorsMatchOracle) {
  Fixture fx;
  const auto& m = fx.mesh;
  const auto& p = fx.problem;
  const Assembler as(m, p);
  const QuadratureRule1D g = gauss_rule(3);
  const FluctLayout lay = FluctLayout::full(m);
  std::vector<double> ref(lay.size(), 0.0);
  for (const QP& q : points(m, 0, m.z_cell_count() - 1)) {
    for (int i = 1; i <= m.nx(); ++i)
      for (int k = 0; k <= m.nz() + 1; ++k)
        ref[lay.index(i, k)] += q.w * p.f(q.x, q.z) * fx.hx(q, i).v * fx.hz(q, k).v;
  }
  std::vector<double> mean_ref(m.nx(), 0.0);
  for (int ic = 0; ic < m.x_cell_count(); ++ic) {
    for (std::size_t a = 0; a < 3; ++a) {
      const double x = map_to_interval(g.points[a], m.x(ic), m.x(ic + 1));
      const double w = g.weights[a] * 0.5 * m.dx();
      double fbar = 0.0;
      for (int kc = 0; kc < m.z_cell_count(); ++kc)
        for (std::size_t b = 0; b < 3; ++b)
          fbar += g.weights[b] * 0.5 * m.dz() * p.f(x, map_to_interval(g.points[b], m.z(kc), m.z(kc + 1)));
      fbar /= m.domain().lz();
      for (int i = 1; i <= m.nx(); ++i) {
        const double phi = hat(x, i, ic, m.x(ic), m.dx()).v;
        ref[lay.index(i, m.nz() + 1)] += w * p.g_plus(x) * phi;
        ref[lay.index(i, 0)] -= w * p.g_minus(x) * phi;
        mean_ref[i - 1] += w * phi * (fbar + (p.g_plus(x) - p.g_minus(x)) / m.domain().lz());
      }
    }
  }
  const auto rhs = as.assemble_rhs_fluct(RhsModel::P, nullptr);
  ASSERT_EQ(rhs.size(), ref.size());
  for (std::size_t n = 0; n < ref.size(); ++n) EXPECT_NEAR(rhs[n], ref[n], 1e-12);
  const auto mean = as.assemble_rhs_mean();
  for (std::size_t n = 0; n < mean_ref.size(); ++n) EXPECT_NEAR(mean[n], mean_ref[n], 1e-12);
}

TEST(Assembly, NonzeroFormulasOnSmallMeshes) {
  const ManufacturedProblem p = setup_a(Domain::preset_b(), EpsProfile::tanh(1e-8, 1.0, 30.0));
  for (int nx : {2, 5}) {
    for (int nz : {2, 7}) {
      const TensorMesh m(Domain::preset_b(), nx, nz);
      const Assembler as(m, p);
      const auto az = as.assemble_form({FormKind::Az, Subdomain::Full});
      EXPECT_EQ(az.nnz(), static_cast<std::size_t>((3 * nz + 4) * (3 * nx - 2)));
    }
  }
}
