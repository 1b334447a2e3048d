#include "aniso/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aniso {

void Domain::validate() const {
  if (!(x_minus < x_plus) || !(z_minus < z_plus)) {
    throw std::invalid_argument("domain: require x_minus < x_plus and z_minus < z_plus");
  }
}

namespace {

std::vector<double> uniform_nodes(double lo, double hi, int interior) {
  const int n = interior + 2;
  const double step = (hi - lo) / static_cast<double>(interior + 1);
  std::vector<double> nodes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) nodes[static_cast<std::size_t>(i)] = lo + i * step;
  nodes.back() = hi;
  return nodes;
}

}  // namespace

TensorMesh::TensorMesh(const Domain& domain, int nx, int nz)
    : domain_(domain), nx_(nx), nz_(nz) {
  domain_.validate();
  if (nx < 1 || nz < 1) {
    throw std::invalid_argument("mesh: Nx and Nz must be at least 1 (got " +
                                std::to_string(nx) + ", " + std::to_string(nz) + ")");
  }
  dx_ = domain_.lx() / static_cast<double>(nx + 1);
  dz_ = domain_.lz() / static_cast<double>(nz + 1);
  x_nodes_ = uniform_nodes(domain_.x_minus, domain_.x_plus, nx);
  z_nodes_ = uniform_nodes(domain_.z_minus, domain_.z_plus, nz);
}

double TensorMesh::h() const { return std::sqrt(dx_ * dz_); }

bool TensorMesh::same_grid(const TensorMesh& other) const {
  return nx_ == other.nx_ && nz_ == other.nz_ &&
         domain_.x_minus == other.domain_.x_minus && domain_.x_plus == other.domain_.x_plus &&
         domain_.z_minus == other.domain_.z_minus && domain_.z_plus == other.domain_.z_plus;
}

TensorMesh build_mesh(const Domain& domain, int nx, int nz) { return TensorMesh(domain, nx, nz); }

TensorMesh build_mesh_from_cells(const Domain& domain, int cells) {
  return TensorMesh(domain, cells - 1, cells - 1);
}

SubdomainSplit split_at_interface(const TensorMesh& mesh, int iota) {
  if (iota < 1 || iota > mesh.nz()) {
    throw std::out_of_range("split_at_interface: iota=" + std::to_string(iota) +
                            " outside [1, " + std::to_string(mesh.nz()) + "]");
  }
  SubdomainSplit s;
  s.iota = iota;
  s.z_iota = mesh.z(iota);
  s.mz = mesh.nz() + 2 - iota;
  s.len_omega2 = s.z_iota - mesh.domain().z_minus;
  s.len_omega1 = mesh.domain().z_plus - s.z_iota;
  return s;
}

int find_interface_for_eps(const TensorMesh& mesh, const std::function<double(double)>& eps,
                           double eps_target) {
  int best = 1;
  for (int k = 1; k <= mesh.nz(); ++k) {
    if (eps(mesh.z(k)) <= eps_target) best = k;
  }
  return best;
}

int interface_for_omega1_fraction(const TensorMesh& mesh, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("omega1 fraction must lie in (0, 1)");
  }
  int iota = static_cast<int>(std::lround((1.0 - fraction) * mesh.nz()));
  if (iota < 1) iota = 1;
  if (iota > mesh.nz()) iota = mesh.nz();
  return iota;
}

}  // namespace aniso
