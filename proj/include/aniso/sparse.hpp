#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aniso {

struct Triplet {
  int row;
  int col;
  double value;
};

/**
 * Compressed-row matrix. Column indices are sorted and unique within each
 * row. Entries are structural: a stored value may be exactly zero, so nnz()
 * depends on the sparsity pattern only.
 */
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols);

  /// Duplicates are summed; explicit zeros are kept.
  static SparseMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);
  static SparseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_indices() const { return col_indices_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Stored value at (r, c), or 0 when (r, c) is outside the pattern.
  double coeff(int r, int c) const;
  bool has_entry(int r, int c) const;

  std::vector<double> multiply(std::span<const double> x) const;
  std::vector<double> multiply_transpose(std::span<const double> x) const;
  SparseMatrix transpose() const;
  SparseMatrix scaled(double factor) const;

  double norm1() const;          ///< max column abs sum
  double norm_inf() const;       ///< max row abs sum
  double norm_frobenius() const;
  double max_abs() const;

  /// Row-major dense copy, for tests on small matrices.
  std::vector<double> to_dense() const;

  std::vector<Triplet> to_triplets() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> values_;
};

/// Accumulates (row, col, value) contributions during assembly.
class TripletList {
 public:
  TripletList(int rows, int cols) : rows_(rows), cols_(cols) {}

  void reserve(std::size_t n) { triplets_.reserve(n); }
  void add(int r, int c, double v) { triplets_.push_back({r, c, v}); }
  void append(const TripletList& other);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return triplets_.size(); }

  SparseMatrix build() &&;
  SparseMatrix build() const&;

 private:
  int rows_;
  int cols_;
  std::vector<Triplet> triplets_;
};

struct MatrixStats {
  int rows;
  int cols;
  std::size_t nnz;
};

MatrixStats matrix_stats(const SparseMatrix& a);

/// One block of a block matrix: `scale * matrix` placed at (block_row, block_col).
struct BlockPlacement {
  int block_row;
  int block_col;
  const SparseMatrix* matrix;
  double scale = 1.0;
};

/**
 * Square block system. Overlapping placements are summed entrywise and the
 * pattern of the result is the union of the placed patterns.
 */
struct BlockSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
  std::vector<int> block_offsets;  ///< size = block count + 1

  int block_size(int b) const { return block_offsets[b + 1] - block_offsets[b]; }
};

/// Throws std::invalid_argument on any dimension mismatch or an empty block row.
BlockSystem compose_blocks(const std::vector<int>& block_sizes,
                           const std::vector<BlockPlacement>& blocks,
                           const std::vector<std::vector<double>>& rhs_parts);

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diagonal scalings: row scaling then column scaling, each to unit max-abs.
struct Equilibration {
  std::vector<double> row_scale;
  std::vector<double> col_scale;
};

Equilibration equilibrate(const SparseMatrix& a);
SparseMatrix apply_equilibration(const SparseMatrix& a, const Equilibration& eq);

/**
 * Sparse LU with a COLAMD fill-reducing column ordering and partial
 * pivoting. Immutable after construction; solve() and solve_transpose() may
 * be called concurrently.
 */
class LuFactorization {
 public:
  /// Throws SingularMatrixError on a zero pivot.
  explicit LuFactorization(const SparseMatrix& a);
  ~LuFactorization();
  LuFactorization(LuFactorization&&) noexcept;
  LuFactorization& operator=(LuFactorization&&) noexcept;

  int size() const;
  std::vector<double> solve(std::span<const double> b) const;
  std::vector<double> solve_transpose(std::span<const double> b) const;
  /// Stored entries of the L and U factors.
  std::size_t factor_nnz() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<double> lu_solve(const SparseMatrix& a, std::span<const double> b);

/// Estimate of ||A^-1||_1 by Hager's method with Higham's refinements.
double inverse_norm1_estimate(const LuFactorization& lu);

/// ||A||_1 * estimate of ||A^-1||_1.
double cond1_estimate(const SparseMatrix& a, const LuFactorization& lu);
double cond1_estimate(const SparseMatrix& a);

/// ||Ax - b||_2 / (||A||_F ||x||_2 + ||b||_2).
double relative_residual(const SparseMatrix& a, std::span<const double> x,
                         std::span<const double> b);

/// MatrixMarket "coordinate real general", 1-based indices.
void write_matrix_market(std::ostream& os, const SparseMatrix& a);
void write_matrix_market(const std::string& path, const SparseMatrix& a);
SparseMatrix read_matrix_market(const std::string& path);

}  // namespace aniso
