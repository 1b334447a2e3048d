#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "aniso/sparse.hpp"

using namespace aniso;

namespace {

using Dense = std::vector<std::vector<double>>;

Dense to_rows(const SparseMatrix& a) {
  const std::vector<double> flat = a.to_dense();
  Dense d(a.rows(), std::vector<double>(a.cols()));
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) d[i][j] = flat[static_cast<std::size_t>(i) * a.cols() + j];
  }
  return d;
}

// Gauss-Jordan inverse with partial pivoting.
Dense dense_inverse(Dense a) {
  const int n = static_cast<int>(a.size());
  Dense inv(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const double d = a[c][c];
    for (int j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

double dense_norm1(const Dense& a) {
  double m = 0.0;
  for (std::size_t j = 0; j < a[0].size(); ++j) {
    double s = 0.0;
    for (const auto& row : a) s += std::abs(row[j]);
    m = std::max(m, s);
  }
  return m;
}

SparseMatrix random_sparse(int n, double density, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0), coin(0.0, 1.0);
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    t.push_back({i, i, 4.0 + val(rng)});
    for (int j = 0; j < n; ++j) {
      if (j != i && coin(rng) < density) t.push_back({i, j, val(rng)});
    }
  }
  return SparseMatrix::from_triplets(n, n, t);
}

}  // namespace

TEST(Sparse, TripletsSumDuplicatesAndKeepZeros) {
  const SparseMatrix a =
      SparseMatrix::from_triplets(2, 3, {{0, 1, 1.5}, {0, 1, 2.0}, {1, 2, 0.0}, {1, 0, -1.0}});
  EXPECT_EQ(a.nnz(), 3u);
  EXPECT_DOUBLE_EQ(a.coeff(0, 1), 3.5);
  EXPECT_TRUE(a.has_entry(1, 2));
  EXPECT_DOUBLE_EQ(a.coeff(1, 2), 0.0);
  EXPECT_FALSE(a.has_entry(0, 0));
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), std::out_of_range);
}

TEST(Sparse, MultiplyAndTransposeAgreeWithDense) {
  const SparseMatrix a = random_sparse(7, 0.3, 3);
  const Dense d = to_rows(a);
  const std::vector<double> x = {1, -2, 0.5, 3, 0, -1, 2};
  const auto y = a.multiply(x);
  const auto yt = a.multiply_transpose(x);
  for (int i = 0; i < 7; ++i) {
    double s = 0.0, st = 0.0;
    for (int j = 0; j < 7; ++j) {
      s += d[i][j] * x[j];
      st += d[j][i] * x[j];
    }
    EXPECT_NEAR(y[i], s, 1e-14);
    EXPECT_NEAR(yt[i], st, 1e-14);
  }
  const SparseMatrix at = a.transpose();
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) EXPECT_EQ(at.coeff(i, j), a.coeff(j, i));
  }
}

TEST(Sparse, LuSolveMatchesDenseInverse) {
  const SparseMatrix a = random_sparse(30, 0.15, 11);
  const Dense inv = dense_inverse(to_rows(a));
  std::vector<double> b(30);
  for (int i = 0; i < 30; ++i) b[i] = std::sin(i + 1.0);
  const LuFactorization lu(a);
  const auto x = lu.solve(b);
  const auto xt = lu.solve_transpose(b);
  for (int i = 0; i < 30; ++i) {
    double s = 0.0, st = 0.0;
    for (int j = 0; j < 30; ++j) {
      s += inv[i][j] * b[j];
      st += inv[j][i] * b[j];
    }
    EXPECT_NEAR(x[i], s, 1e-12);
    EXPECT_NEAR(xt[i], st, 1e-12);
  }
  EXPECT_LT(relative_residual(a, x, b), 1e-15);
  EXPECT_GE(lu.factor_nnz(), a.nnz() / 2);
}

TEST(Sparse, ConditionEstimateWithinFactorOfExact) {
  for (unsigned seed : {1u, 2u, 5u}) {
    const SparseMatrix a = random_sparse(25, 0.2, seed);
    const double exact = dense_norm1(to_rows(a)) * dense_norm1(dense_inverse(to_rows(a)));
    const double est = cond1_estimate(a);
    // Hager's estimate is a lower bound and usually exact on small matrices
    EXPECT_LE(est, exact * (1 + 1e-10));
    EXPECT_GE(est, exact / 3.0);
  }
}

TEST(Sparse, ConditionOfScaledIdentity) {
  const SparseMatrix a = SparseMatrix::identity(5).scaled(3.0);
  EXPECT_NEAR(cond1_estimate(a), 1.0, 1e-14);
}

TEST(Sparse, SingularMatrixIsReported) {
  const SparseMatrix a = SparseMatrix::from_triplets(3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 1, 1.0}});
  EXPECT_THROW(LuFactorization lu(a), SingularMatrixError);
}

TEST(Sparse, EquilibrationGivesUnitMaxAbs) {
  const SparseMatrix a = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 1e-12}, {0, 1, 2e-12}, {1, 0, 5e6}, {1, 1, 1.0}});
  const SparseMatrix s = apply_equilibration(a, equilibrate(a));
  for (int i = 0; i < 2; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < 2; ++j) {
      row = std::max(row, std::abs(s.coeff(i, j)));
      col = std::max(col, std::abs(s.coeff(j, i)));
    }
    EXPECT_LE(row, 1.0 + 1e-15);
    EXPECT_NEAR(col, 1.0, 1e-15);
  }
}

TEST(Sparse, BlockComposition) {
  const SparseMatrix a = SparseMatrix::identity(2);
  const SparseMatrix b = SparseMatrix::from_triplets(2, 1, {{0, 0, 1.0}, {1, 0, 2.0}});
  const SparseMatrix bt = b.transpose();
  const BlockSystem s = compose_blocks({2, 1}, {{0, 0, &a, 2.0}, {0, 1, &b}, {1, 0, &bt}},
                                      {{1.0, 2.0}, {3.0}});
  EXPECT_EQ(s.matrix.rows(), 3);
  EXPECT_EQ(s.matrix.nnz(), 6u);
  EXPECT_DOUBLE_EQ(s.matrix.coeff(1, 1), 2.0);
  EXPECT_DOUBLE_EQ(s.matrix.coeff(2, 1), 2.0);
  EXPECT_EQ(s.rhs, (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_THROW(compose_blocks({2, 1}, {{0, 0, &a}, {0, 1, &bt}}, {{0, 0}, {0}}),
               std::invalid_argument);
}

TEST(Sparse, MatrixMarketRoundTrip) {
  const SparseMatrix a = random_sparse(9, 0.3, 4);
  const auto path = std::filesystem::temp_directory_path() / "aniso_roundtrip.mtx";
  write_matrix_market(path.string(), a);
  const SparseMatrix b = read_matrix_market(path.string());
  std::filesystem::remove(path);
  ASSERT_EQ(b.rows(), a.rows());
  ASSERT_EQ(b.nnz(), a.nnz());
  EXPECT_EQ(b.col_indices(), a.col_indices());
  EXPECT_EQ(b.values(), a.values());

  std::ostringstream os;
  write_matrix_market(os, SparseMatrix::from_triplets(2, 2, {{1, 0, 0.5}}));
  EXPECT_EQ(os.str().rfind("%%MatrixMarket matrix coordinate real general", 0), 0u);
  EXPECT_NE(os.str().find("2 2 1\n"), std::string::npos);
  EXPECT_NE(os.str().find("2 1 "), std::string::npos);
}
