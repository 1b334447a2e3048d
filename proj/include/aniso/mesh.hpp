#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace aniso {

/// Rectangle [x_minus, x_plus] x [z_minus, z_plus].
struct Domain {
  double x_minus = 0.0;
  double x_plus = 1.0;
  double z_minus = -1.0;
  double z_plus = 1.0;

  double lx() const { return x_plus - x_minus; }
  double lz() const { return z_plus - z_minus; }

  /// Throws std::invalid_argument unless both intervals are non-degenerate.
  void validate() const;

  /// [0,1] x [-1,1], used for constant anisotropy runs.
  static Domain preset_a() { return {0.0, 1.0, -1.0, 1.0}; }
  /// [0,1] x [-1.5,0.5], used with the tanh anisotropy profile.
  static Domain preset_b() { return {0.0, 1.0, -1.5, 0.5}; }
};

/**
 * Uniform tensor grid. Nx and Nz count interior nodes: there are Nx+2 nodes
 * along x (indices 0..Nx+1) and Nz+2 along z, with spacing L/(N+1). A run
 * quoted as "64x64 cells" therefore uses Nx = Nz = 63.
 */
class TensorMesh {
 public:
  TensorMesh(const Domain& domain, int nx, int nz);

  const Domain& domain() const { return domain_; }
  int nx() const { return nx_; }
  int nz() const { return nz_; }
  double dx() const { return dx_; }
  double dz() const { return dz_; }
  double x(int i) const { return x_nodes_[static_cast<std::size_t>(i)]; }
  double z(int k) const { return z_nodes_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& x_nodes() const { return x_nodes_; }
  const std::vector<double>& z_nodes() const { return z_nodes_; }

  int x_node_count() const { return nx_ + 2; }
  int z_node_count() const { return nz_ + 2; }
  int x_cell_count() const { return nx_ + 1; }
  int z_cell_count() const { return nz_ + 1; }

  /// Flat index of node (i, k), x-major.
  std::size_t node_index(int i, int k) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nz_ + 2) +
           static_cast<std::size_t>(k);
  }
  std::size_t node_count() const {
    return static_cast<std::size_t>(nx_ + 2) * static_cast<std::size_t>(nz_ + 2);
  }

  /// Mesh size h = sqrt(dx * dz).
  double h() const;

  bool same_grid(const TensorMesh& other) const;

 private:
  Domain domain_;
  int nx_;
  int nz_;
  double dx_;
  double dz_;
  std::vector<double> x_nodes_;
  std::vector<double> z_nodes_;
};

TensorMesh build_mesh(const Domain& domain, int nx, int nz);

/// Cell counts per direction: build_mesh(domain, cells - 1, cells - 1).
TensorMesh build_mesh_from_cells(const Domain& domain, int cells);

/**
 * Interface at z-node iota. Omega_1 (AP part) spans z-cells iota..Nz, i.e.
 * nodes iota..Nz+1; Omega_2 (limit part) spans z-cells 0..iota-1.
 */
struct SubdomainSplit {
  int iota = 1;
  double z_iota = 0.0;
  int mz = 0;              ///< Omega_1 z-node count, Nz + 2 - iota
  double len_omega2 = 0.0; ///< z_iota - z_minus
  double len_omega1 = 0.0; ///< z_plus - z_iota

  int first_cell_omega1() const { return iota; }
};

SubdomainSplit split_at_interface(const TensorMesh& mesh, int iota);

/**
 * Largest iota in [1, Nz] with eps(z_iota) <= eps_target, assuming eps is
 * increasing along z. Clamps to 1 when even eps(z_1) exceeds the target.
 */
int find_interface_for_eps(const TensorMesh& mesh,
                           const std::function<double(double)>& eps,
                           double eps_target);

/// iota = round((1 - fraction) * Nz), clamped to [1, Nz]; fraction 0.4 gives iota = 150 at Nz = 250.
int interface_for_omega1_fraction(const TensorMesh& mesh, double fraction);

}  // namespace aniso
