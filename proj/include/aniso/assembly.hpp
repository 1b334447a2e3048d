#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aniso/mesh.hpp"
#include "aniso/problem.hpp"
#include "aniso/quadrature.hpp"
#include "aniso/sparse.hpp"

namespace aniso {

enum class Subdomain { Full, Omega1, Omega2 };

/**
 * Bilinear forms of the mean/fluctuation formulation. With psi' a Q1
 * fluctuation test function, v' a fluctuation trial function, chi a P1 hat
 * in x and A_x' = A_x - mean_z(A_x):
 *
 *   Az  : int A_z/eps dz(v') dz(psi')          (fluct x fluct)
 *   Axf : int A_x dx(v') dx(psi')              (fluct x fluct)
 *   Axa : int mean(A_x) dx(v) dx(psi)          (mean  x mean, 1D)
 *   Bl  : int P int psi'/eps dz dx             (rows fluct, cols multiplier)
 *   Bc  : 1/Lz int Q int v' dz dx              (rows multiplier, cols fluct)
 *   Cf  : int A_x dx(v) dx(psi')               (rows fluct, cols mean)
 *   Ca  : int A_x' dx(v') dx(psi)              (rows mean, cols fluct)
 *   DIota : interface flux pairing; catalogued only, never assembled.
 */
enum class FormKind { Az, Axf, Axa, Bl, Bc, Cf, Ca, DIota };

struct FormId {
  FormKind kind;
  Subdomain sub = Subdomain::Full;
};

std::string to_string(FormKind kind);
std::string to_string(Subdomain sub);

/// Fluctuation unknowns on interior x-nodes i = 1..Nx and z-nodes
/// k = k_first..k_last, ordered x-major: index = (i-1)*mz + (k-k_first).
struct FluctLayout {
  int nx = 0;
  int k_first = 0;
  int k_last = 0;

  int mz() const { return k_last - k_first + 1; }
  int size() const { return nx * mz(); }
  bool contains(int i, int k) const { return i >= 1 && i <= nx && k >= k_first && k <= k_last; }
  int index(int i, int k) const { return (i - 1) * mz() + (k - k_first); }

  static FluctLayout full(const TensorMesh& mesh);
  static FluctLayout omega1(const TensorMesh& mesh, const SubdomainSplit& split);
  static FluctLayout omega2(const TensorMesh& mesh, const SubdomainSplit& split);
  static FluctLayout for_subdomain(const TensorMesh& mesh, Subdomain sub,
                                   const SubdomainSplit* split);
};

/// Unknown layout of a mean/fluctuation/multiplier system.
struct DofLayout {
  int mean_dofs = 0;
  FluctLayout fluct;
  int lagrange_dofs = 0;
  std::vector<int> trace_dofs;  ///< fluct indices with k = k_first

  int total() const { return mean_dofs + fluct.size() + lagrange_dofs; }
};

DofLayout make_dof_layout(const TensorMesh& mesh, Subdomain sub, const SubdomainSplit* split);

enum class RhsModel { P, AP, APL };

/**
 * Assembles forms and load vectors with a tensor n x n Gauss rule per cell
 * (n = 3 by default). mean_z(A_x) is computed once per x quadrature point by
 * z-line quadrature over the whole of Omega_z.
 */
class Assembler {
 public:
  Assembler(const TensorMesh& mesh, const ManufacturedProblem& problem, int quad_order = 3);

  const TensorMesh& mesh() const { return mesh_; }
  const ManufacturedProblem& problem() const { return problem_; }
  int quad_order() const { return static_cast<int>(rule_.size()); }

  /// Throws std::invalid_argument for sub-domain forms without a split,
  /// std::domain_error if eps is non-positive at a quadrature point, and
  /// std::logic_error for DIota.
  SparseMatrix assemble_form(FormId form, const SubdomainSplit* split = nullptr) const;

  /**
   * Ca(2) or Bc(2) evaluated on the trace v'(x, z_iota), held constant in z
   * across Omega_2. Columns are the Omega_1 fluctuation layout; only the
   * trace columns (k = iota) carry entries.
   */
  SparseMatrix assemble_expanded_trace(FormKind kind, const SubdomainSplit& split) const;

  /// (mean_z f, chi_i) + (g_+ - g_-, chi_i)/Lz, i = 1..Nx.
  std::vector<double> assemble_rhs_mean() const;

  /// P and AP: (f, phi)_Omega + (g_+, phi(z_+)) - (g_-, phi(z_-)) on the full layout.
  /// APL: (f, phi)_Omega1 + (g_+, phi(z_+)) on the Omega_1 layout.
  std::vector<double> assemble_rhs_fluct(RhsModel which, const SubdomainSplit* split) const;

  /// mean_z(A_x) at the q-th quadrature point of x-cell ic.
  double mean_ax_at(int ic, int q) const { return mean_ax_[qx_index(ic, q)]; }
  double mean_ax(double x) const;

 private:
  std::size_t qx_index(int ic, int q) const {
    return static_cast<std::size_t>(ic) * rule_.size() + static_cast<std::size_t>(q);
  }
  std::pair<int, int> cell_range(Subdomain sub, const SubdomainSplit* split) const;

  const TensorMesh& mesh_;
  const ManufacturedProblem& problem_;
  QuadratureRule1D rule_;
  std::vector<double> qx_;       ///< x at (x-cell, q)
  std::vector<double> qz_;       ///< z at (z-cell, q)
  std::vector<double> eps_qz_;   ///< eps at (z-cell, q)
  std::vector<double> mean_ax_;  ///< mean_z A_x at (x-cell, q)
};

SparseMatrix assemble_form(FormId form, const TensorMesh& mesh, const SubdomainSplit* split,
                           const ManufacturedProblem& problem);
SparseMatrix assemble_expanded_trace(FormKind kind, const TensorMesh& mesh,
                                     const SubdomainSplit& split,
                                     const ManufacturedProblem& problem);
std::vector<double> assemble_rhs_mean(const TensorMesh& mesh, const ManufacturedProblem& problem);
std::vector<double> assemble_rhs_fluct(const TensorMesh& mesh, const SubdomainSplit* split,
                                       const ManufacturedProblem& problem, RhsModel which);

}  // namespace aniso
