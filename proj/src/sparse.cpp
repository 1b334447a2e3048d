#include "aniso/sparse.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace aniso {

SparseMatrix::SparseMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), row_offsets_(static_cast<std::size_t>(rows) + 1, 0) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
}

SparseMatrix SparseMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets) {
  SparseMatrix m(rows, cols);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw std::out_of_range("SparseMatrix::from_triplets: entry (" + std::to_string(t.row) +
                              ", " + std::to_string(t.col) + ") outside " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::vector<std::size_t> counts(static_cast<std::size_t>(rows), 0);
  for (std::size_t n = 0; n < triplets.size();) {
    const int r = triplets[n].row;
    const int c = triplets[n].col;
    double sum = 0.0;
    while (n < triplets.size() && triplets[n].row == r && triplets[n].col == c) {
      sum += triplets[n].value;
      ++n;
    }
    m.col_indices_.push_back(c);
    m.values_.push_back(sum);
    ++counts[static_cast<std::size_t>(r)];
  }
  for (int r = 0; r < rows; ++r) {
    m.row_offsets_[static_cast<std::size_t>(r) + 1] =
        m.row_offsets_[static_cast<std::size_t>(r)] + counts[static_cast<std::size_t>(r)];
  }
  return m;
}

SparseMatrix SparseMatrix::identity(int n) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return from_triplets(n, n, std::move(t));
}

bool SparseMatrix::has_entry(int r, int c) const {
  const auto begin = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r]);
  const auto end = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r + 1]);
  return std::binary_search(begin, end, c);
}

double SparseMatrix::coeff(int r, int c) const {
  const auto begin = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r]);
  const auto end = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r + 1]);
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(cols_)) {
    throw std::invalid_argument("SparseMatrix::multiply: size mismatch");
  }
  std::vector<double> y(static_cast<std::size_t>(rows_), 0.0);
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t n = row_offsets_[r]; n < row_offsets_[r + 1]; ++n) {
      s += values_[n] * x[static_cast<std::size_t>(col_indices_[n])];
    }
    y[static_cast<std::size_t>(r)] = s;
  }
  return y;
}

std::vector<double> SparseMatrix::multiply_transpose(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(rows_)) {
    throw std::invalid_argument("SparseMatrix::multiply_transpose: size mismatch");
  }
  std::vector<double> y(static_cast<std::size_t>(cols_), 0.0);
  for (int r = 0; r < rows_; ++r) {
    for (std::size_t n = row_offsets_[r]; n < row_offsets_[r + 1]; ++n) {
      y[static_cast<std::size_t>(col_indices_[n])] += values_[n] * x[static_cast<std::size_t>(r)];
    }
  }
  return y;
}

std::vector<Triplet> SparseMatrix::to_triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (int r = 0; r < rows_; ++r) {
    for (std::size_t n = row_offsets_[r]; n < row_offsets_[r + 1]; ++n) {
      t.push_back({r, col_indices_[n], values_[n]});
    }
  }
  return t;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t = to_triplets();
  for (Triplet& e : t) std::swap(e.row, e.col);
  return from_triplets(cols_, rows_, std::move(t));
}

SparseMatrix SparseMatrix::scaled(double factor) const {
  SparseMatrix m = *this;
  for (double& v : m.values_) v *= factor;
  return m;
}

double SparseMatrix::norm1() const {
  std::vector<double> colsum(static_cast<std::size_t>(cols_), 0.0);
  for (std::size_t n = 0; n < values_.size(); ++n) {
    colsum[static_cast<std::size_t>(col_indices_[n])] += std::abs(values_[n]);
  }
  return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

double SparseMatrix::norm_inf() const {
  double best = 0.0;
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::size_t n = row_offsets_[r]; n < row_offsets_[r + 1]; ++n) s += std::abs(values_[n]);
    best = std::max(best, s);
  }
  return best;
}

double SparseMatrix::norm_frobenius() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s);
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), 0.0);
  for (int r = 0; r < rows_; ++r) {
    for (std::size_t n = row_offsets_[r]; n < row_offsets_[r + 1]; ++n) {
      d[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
        static_cast<std::size_t>(col_indices_[n])] = values_[n];
    }
  }
  return d;
}

void TripletList::append(const TripletList& other) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw std::invalid_argument("TripletList::append: dimension mismatch");
  }
  triplets_.insert(triplets_.end(), other.triplets_.begin(), other.triplets_.end());
}

SparseMatrix TripletList::build() && {
  return SparseMatrix::from_triplets(rows_, cols_, std::move(triplets_));
}

SparseMatrix TripletList::build() const& { return SparseMatrix::from_triplets(rows_, cols_, triplets_); }

MatrixStats matrix_stats(const SparseMatrix& a) { return {a.rows(), a.cols(), a.nnz()}; }

BlockSystem compose_blocks(const std::vector<int>& block_sizes,
                           const std::vector<BlockPlacement>& blocks,
                           const std::vector<std::vector<double>>& rhs_parts) {
  const int nb = static_cast<int>(block_sizes.size());
  if (rhs_parts.size() != block_sizes.size()) {
    throw std::invalid_argument("compose_blocks: rhs part count does not match block count");
  }
  BlockSystem sys;
  sys.block_offsets.assign(static_cast<std::size_t>(nb) + 1, 0);
  for (int b = 0; b < nb; ++b) {
    if (block_sizes[b] < 0) throw std::invalid_argument("compose_blocks: negative block size");
    if (rhs_parts[b].size() != static_cast<std::size_t>(block_sizes[b])) {
      throw std::invalid_argument("compose_blocks: rhs part " + std::to_string(b) +
                                  " has wrong length");
    }
    sys.block_offsets[b + 1] = sys.block_offsets[b] + block_sizes[b];
  }
  const int n = sys.block_offsets.back();

  std::vector<bool> row_covered(static_cast<std::size_t>(nb), false);
  std::size_t total = 0;
  for (const BlockPlacement& p : blocks) {
    if (p.block_row < 0 || p.block_row >= nb || p.block_col < 0 || p.block_col >= nb) {
      throw std::invalid_argument("compose_blocks: block index out of range");
    }
    if (p.matrix->rows() != block_sizes[p.block_row] ||
        p.matrix->cols() != block_sizes[p.block_col]) {
      throw std::invalid_argument(
          "compose_blocks: block (" + std::to_string(p.block_row) + "," +
          std::to_string(p.block_col) + ") is " + std::to_string(p.matrix->rows()) + "x" +
          std::to_string(p.matrix->cols()) + ", layout expects " +
          std::to_string(block_sizes[p.block_row]) + "x" + std::to_string(block_sizes[p.block_col]));
    }
    row_covered[static_cast<std::size_t>(p.block_row)] = true;
    total += p.matrix->nnz();
  }
  for (int b = 0; b < nb; ++b) {
    if (!row_covered[static_cast<std::size_t>(b)] && block_sizes[b] > 0) {
      throw std::invalid_argument("compose_blocks: block row " + std::to_string(b) +
                                  " has no placement");
    }
  }

  std::vector<Triplet> t;
  t.reserve(total);
  for (const BlockPlacement& p : blocks) {
    const int r0 = sys.block_offsets[p.block_row];
    const int c0 = sys.block_offsets[p.block_col];
    const SparseMatrix& m = *p.matrix;
    for (int r = 0; r < m.rows(); ++r) {
      for (std::size_t k = m.row_offsets()[r]; k < m.row_offsets()[r + 1]; ++k) {
        t.push_back({r0 + r, c0 + m.col_indices()[k], p.scale * m.values()[k]});
      }
    }
  }
  sys.matrix = SparseMatrix::from_triplets(n, n, std::move(t));
  sys.rhs.reserve(static_cast<std::size_t>(n));
  for (const auto& part : rhs_parts) sys.rhs.insert(sys.rhs.end(), part.begin(), part.end());
  return sys;
}

Equilibration equilibrate(const SparseMatrix& a) {
  Equilibration eq;
  eq.row_scale.assign(static_cast<std::size_t>(a.rows()), 1.0);
  eq.col_scale.assign(static_cast<std::size_t>(a.cols()), 1.0);
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (int r = 0; r < a.rows(); ++r) {
    double m = 0.0;
    for (std::size_t n = off[r]; n < off[r + 1]; ++n) m = std::max(m, std::abs(val[n]));
    if (m > 0.0) eq.row_scale[static_cast<std::size_t>(r)] = 1.0 / m;
  }
  std::vector<double> cmax(static_cast<std::size_t>(a.cols()), 0.0);
  for (int r = 0; r < a.rows(); ++r) {
    for (std::size_t n = off[r]; n < off[r + 1]; ++n) {
      auto& c = cmax[static_cast<std::size_t>(col[n])];
      c = std::max(c, std::abs(val[n]) * eq.row_scale[static_cast<std::size_t>(r)]);
    }
  }
  for (int c = 0; c < a.cols(); ++c) {
    if (cmax[static_cast<std::size_t>(c)] > 0.0) {
      eq.col_scale[static_cast<std::size_t>(c)] = 1.0 / cmax[static_cast<std::size_t>(c)];
    }
  }
  return eq;
}

SparseMatrix apply_equilibration(const SparseMatrix& a, const Equilibration& eq) {
  SparseMatrix s = a;
  const auto& off = s.row_offsets();
  const auto& col = s.col_indices();
  auto& val = s.values();
  for (int r = 0; r < s.rows(); ++r) {
    for (std::size_t n = off[r]; n < off[r + 1]; ++n) {
      val[n] *= eq.row_scale[static_cast<std::size_t>(r)] *
                eq.col_scale[static_cast<std::size_t>(col[n])];
    }
  }
  return s;
}

struct LuFactorization::Impl {
  using Matrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu;
  int n = 0;
};

LuFactorization::LuFactorization(const SparseMatrix& a) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("LuFactorization: matrix is not square");
  impl_->n = a.rows();
  Impl::Matrix m(a.rows(), a.cols());
  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(a.nnz());
  for (const Triplet& e : a.to_triplets()) t.emplace_back(e.row, e.col, e.value);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  impl_->lu.analyzePattern(m);
  impl_->lu.factorize(m);
  if (impl_->lu.info() != Eigen::Success) {
    throw SingularMatrixError("sparse LU failed: " + impl_->lu.lastErrorMessage());
  }
}

LuFactorization::~LuFactorization() = default;
LuFactorization::LuFactorization(LuFactorization&&) noexcept = default;
LuFactorization& LuFactorization::operator=(LuFactorization&&) noexcept = default;

int LuFactorization::size() const { return impl_->n; }

std::vector<double> LuFactorization::solve(std::span<const double> b) const {
  if (b.size() != static_cast<std::size_t>(impl_->n)) {
    throw std::invalid_argument("LuFactorization::solve: rhs size mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), impl_->n);
  const Eigen::VectorXd x = impl_->lu.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

std::vector<double> LuFactorization::solve_transpose(std::span<const double> b) const {
  if (b.size() != static_cast<std::size_t>(impl_->n)) {
    throw std::invalid_argument("LuFactorization::solve_transpose: rhs size mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), impl_->n);
  // transpose() only builds a view holding a pointer; the solve itself is read-only.
  auto& lu = const_cast<decltype(impl_->lu)&>(impl_->lu);
  const Eigen::VectorXd x = lu.transpose().solve(rhs);
  return {x.data(), x.data() + x.size()};
}

std::size_t LuFactorization::factor_nnz() const {
  return static_cast<std::size_t>(impl_->lu.nnzL() + impl_->lu.nnzU());
}

std::vector<double> lu_solve(const SparseMatrix& a, std::span<const double> b) {
  return LuFactorization(a).solve(b);
}

namespace {

double norm1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

std::vector<double> signs(const std::vector<double>& v) {
  std::vector<double> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] >= 0.0 ? 1.0 : -1.0;
  return s;
}

std::size_t argmax_abs(const std::vector<double>& v) {
  std::size_t j = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[j])) j = i;
  }
  return j;
}

}  // namespace

double inverse_norm1_estimate(const LuFactorization& lu) {
  const int n = lu.size();
  if (n == 0) return 0.0;
  const auto un = static_cast<std::size_t>(n);

  std::vector<double> x(un, 1.0 / n);
  std::vector<double> y = lu.solve(x);
  double est = norm1(y);
  if (n == 1) return est;

  std::vector<double> xi = signs(y);
  std::vector<double> z = lu.solve_transpose(xi);
  std::size_t j = argmax_abs(z);

  for (int iter = 2; iter <= 5; ++iter) {
    std::fill(x.begin(), x.end(), 0.0);
    x[j] = 1.0;
    y = lu.solve(x);
    const double previous = est;
    est = norm1(y);
    std::vector<double> xi_new = signs(y);
    if (xi_new == xi || est <= previous) {
      est = std::max(est, previous);
      break;
    }
    xi = std::move(xi_new);
    z = lu.solve_transpose(xi);
    const std::size_t j_last = j;
    j = argmax_abs(z);
    if (std::abs(z[j_last]) == std::abs(z[j])) break;
  }

  // Alternating-sign probe guards against the power iteration stalling.
  for (std::size_t i = 0; i < un; ++i) {
    const double mag = 1.0 + static_cast<double>(i) / static_cast<double>(n - 1);
    x[i] = (i % 2 == 0) ? mag : -mag;
  }
  y = lu.solve(x);
  return std::max(est, 2.0 * norm1(y) / (3.0 * n));
}

double cond1_estimate(const SparseMatrix& a, const LuFactorization& lu) {
  return a.norm1() * inverse_norm1_estimate(lu);
}

double cond1_estimate(const SparseMatrix& a) { return cond1_estimate(a, LuFactorization(a)); }

double relative_residual(const SparseMatrix& a, std::span<const double> x,
                         std::span<const double> b) {
  const std::vector<double> ax = a.multiply(x);
  double rr = 0.0, xx = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double d = ax[i] - b[i];
    rr += d * d;
    bb += b[i] * b[i];
  }
  for (double v : x) xx += v * v;
  const double denom = a.norm_frobenius() * std::sqrt(xx) + std::sqrt(bb);
  return denom > 0.0 ? std::sqrt(rr) / denom : std::sqrt(rr);
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  os << std::setprecision(17) << std::scientific;
  for (int r = 0; r < a.rows(); ++r) {
    for (std::size_t n = a.row_offsets()[r]; n < a.row_offsets()[r + 1]; ++n) {
      os << (r + 1) << ' ' << (a.col_indices()[n] + 1) << ' ' << a.values()[n] << '\n';
    }
  }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_matrix_market(os, a);
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  std::getline(is, line);
  if (line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0) {
    throw std::runtime_error(path + ": unsupported MatrixMarket header");
  }
  while (std::getline(is, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream head(line);
  int rows = 0, cols = 0;
  std::size_t nnz = 0;
  if (!(head >> rows >> cols >> nnz)) throw std::runtime_error(path + ": bad size line");
  std::vector<Triplet> t;
  t.reserve(nnz);
  for (std::size_t n = 0; n < nnz; ++n) {
    int r = 0, c = 0;
    double v = 0.0;
    if (!(is >> r >> c >> v)) throw std::runtime_error(path + ": truncated entry list");
    t.push_back({r - 1, c - 1, v});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

}  // namespace aniso
