#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aniso/assembly.hpp"
#include "aniso/mesh.hpp"
#include "aniso/problem.hpp"
#include "aniso/sparse.hpp"

namespace aniso {

enum class ModelKind { P, AP, APL, L1D };

std::string to_string(ModelKind kind);
/// Accepts "p", "ap", "apl" and "l1d" in any case; throws std::invalid_argument otherwise.
ModelKind parse_model_kind(const std::string& name);

/**
 * Assembled linear system plus its unknown layout. Block order is
 * (mean, fluctuation, multiplier) for AP and APL; the P system has a single
 * fluctuation-shaped block holding the full nodal unknown.
 */
struct ModelSystem {
  ModelKind kind = ModelKind::P;
  BlockSystem system;
  DofLayout layout;
  std::optional<SubdomainSplit> split;
  /// Constraint block (B_c, or B_c1 + B_c2^iota); empty for P.
  SparseMatrix constraint;

  int mean_offset() const { return 0; }
  int fluct_offset() const { return kind == ModelKind::P ? 0 : layout.mean_dofs; }
  int multiplier_offset() const { return fluct_offset() + layout.fluct.size(); }
};

ModelSystem build_p_system(const TensorMesh& mesh, const ManufacturedProblem& problem,
                           int quad_order = 3);
ModelSystem build_ap_system(const TensorMesh& mesh, const ManufacturedProblem& problem,
                            int quad_order = 3);
ModelSystem build_apl_system(const TensorMesh& mesh, const SubdomainSplit& split,
                             const ManufacturedProblem& problem, int quad_order = 3);

struct SolveOptions {
  int quad_order = 3;
  bool estimate_condition = true;
  /// Solve the row/column equilibrated system; the condition estimate then
  /// refers to that scaled matrix.
  bool equilibrate = true;
};

struct SolveReport {
  int rows = 0;
  std::size_t nnz = 0;
  std::size_t factor_nnz = 0;
  double cond1 = 0.0;
  double residual = 0.0;
  /// Non-finite values, residual above 1e-9, or a condition estimate beyond
  /// the reciprocal of the unit roundoff.
  bool breakdown = false;
  double assemble_seconds = 0.0;
  double factorize_seconds = 0.0;
  double solve_seconds = 0.0;
};

/**
 * Reconstructed discrete solution on the whole mesh. Nodal arrays use
 * TensorMesh::node_index; the Dirichlet columns i = 0 and i = Nx+1 are zero.
 */
struct SolutionField {
  TensorMesh mesh;
  ModelKind kind = ModelKind::P;
  std::optional<SubdomainSplit> split;
  std::vector<double> u;           ///< u_h = mean + fluct at every node
  std::vector<double> mean;        ///< per x-node, size Nx+2
  std::vector<double> fluct;       ///< per node
  std::vector<double> multiplier;  ///< size Nx (AP/APL), empty otherwise
  std::vector<double> trace;       ///< APL: u'_1(x_i, z_iota), size Nx+2
  std::vector<double> unknowns;    ///< raw solution vector of the linear system
  /// max-norm of the constraint block applied to the fluctuation unknowns.
  double constraint_residual = 0.0;
  SolveReport report;

  double at(int i, int k) const { return u[mesh.node_index(i, k)]; }
};

/// APL requires a split; the other kinds ignore it. Throws SingularMatrixError.
SolutionField solve_model(ModelKind kind, const TensorMesh& mesh, const SubdomainSplit* split,
                          const ManufacturedProblem& problem, const SolveOptions& opts = {});

/// P1 solve of -(mean A_x u0')' = mean f + (g_+ - g_-)/Lz; returns Nx+2 nodal values.
std::vector<double> solve_limit_1d(const TensorMesh& mesh, const ManufacturedProblem& problem,
                                   int quad_order = 3);

/// xi'_2 = u' - u'(., z_iota) on Omega_2 nodes, index i*(iota+1) + k.
std::vector<double> derive_xi2(const SolutionField& ap, const SubdomainSplit& split);

struct SeminormPair {
  double dx = 0.0;  ///< || d/dx ||_L2
  double dz = 0.0;  ///< || d/dz ||_L2
};

SeminormPair xi2_seminorms(const TensorMesh& mesh, const SubdomainSplit& split,
                           const std::vector<double>& xi2);

/// L2 norm and gradient seminorms of a nodal Q1 field over z-cells [kc_begin, kc_end].
struct FieldNorms {
  double l2 = 0.0;
  double dx = 0.0;
  double dz = 0.0;
  double h1() const;
};

FieldNorms field_norms(const TensorMesh& mesh, const std::vector<double>& nodal, int kc_begin,
                       int kc_end);

enum class Region { Full, Omega1, Omega2 };

/// (||a-b||^2 + ||grad(a-b)||^2)^(1/2) over the region, with broken gradients.
double h1_distance(const SolutionField& a, const SolutionField& b, Region region,
                   const SubdomainSplit* split = nullptr);

/// ||dx(mean_a - mean_b)|| + ||dx(fl_a - fl_b)||_Omega1 + ||dz(fl_a - fl_b)||_Omega1.
double ess_distance(const SolutionField& a, const SolutionField& b, const SubdomainSplit& split);

}  // namespace aniso
