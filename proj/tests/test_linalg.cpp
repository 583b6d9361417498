#include <gtest/gtest.h>

#include <cmath>

#include "gnbp/errors.hpp"
#include "gnbp/linalg.hpp"
#include "gnbp/rng.hpp"

namespace gnbp {
namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (double& v : m.values()) v = rng.uniform(-1.0, 1.0);
  return m;
}

TEST(Matrix, RejectsEmptyAndMismatchedShapes) {
  EXPECT_THROW(Matrix(0, 2), DimensionMismatch);
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1, 2, 3}), DimensionMismatch);
  EXPECT_THROW((Matrix{{1, 2}, {3}}), DimensionMismatch);
}

TEST(Matmul, Examples) {
  const Matrix a{{1, 2}, {3, 4}};
  EXPECT_EQ(matmul(Matrix::identity(2), a), a);
  EXPECT_EQ(matmul(a, Matrix{{0}, {0}}), (Matrix{{0}, {0}}));
  // 1*5 + 2*6, 3*5 + 4*6
  EXPECT_EQ(matmul(a, Matrix{{5}, {6}}), (Matrix{{17}, {39}}));
  EXPECT_THROW(matmul(a, Matrix(3, 1)), DimensionMismatch);
}

TEST(Matmul, AssociativeOnRandomTriples) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t p = 1 + rng.below(5), q = 1 + rng.below(5), r = 1 + rng.below(5),
                      s = 1 + rng.below(5);
    const Matrix a = random_matrix(rng, p, q), b = random_matrix(rng, q, r),
                 c = random_matrix(rng, r, s);
    const Matrix left = matmul(matmul(a, b), c), right = matmul(a, matmul(b, c));
    for (std::size_t i = 0; i < left.values().size(); ++i) {
      const double scale = std::max(1.0, std::abs(left.values()[i]));
      EXPECT_NEAR(left.values()[i], right.values()[i], 1e-10 * scale);
    }
  }
}

TEST(Transpose, Examples) {
  EXPECT_EQ(transpose(Matrix{{1, 2}}), (Matrix{{1}, {2}}));
  EXPECT_EQ(transpose(Matrix{{1, 2}, {3, 4}}), (Matrix{{1, 3}, {2, 4}}));
}

TEST(Transpose, IsAnInvolution) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(rng, 1 + rng.below(6), 1 + rng.below(6));
    EXPECT_EQ(transpose(transpose(a)), a);
  }
}

TEST(Matvec, TransposedProductMatchesExplicitTranspose) {
  Rng rng(3);
  const Matrix a = random_matrix(rng, 4, 3);
  const Vector x{0.5, -1.0, 2.0, 0.25};
  const Vector direct = matvec_transposed(a, x);
  const Vector via = matvec(transpose(a), x);
  for (std::size_t i = 0; i < direct.size(); ++i) EXPECT_NEAR(direct[i], via[i], 1e-15);
  EXPECT_THROW(matvec(a, x), DimensionMismatch);
}

TEST(Gram, IsExactlySymmetricAndMatchesProduct) {
  Rng rng(5);
  const Matrix a = random_matrix(rng, 6, 4);
  const Matrix g = gram(a);
  const Matrix ref = matmul(transpose(a), a);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(g(i, j), g(j, i));
      EXPECT_NEAR(g(i, j), ref(i, j), 1e-14);
    }
}

TEST(SolveSpd, Examples) {
  EXPECT_EQ(solve_spd(Matrix::identity(2), Vector{3, 4}, 0.0), (Vector{3, 4}));

  const Vector x = solve_spd(Matrix{{2, 1}, {1, 2}}, Vector{3, 3}, 0.0);
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);

  EXPECT_THROW(solve_spd(Matrix{{1, 1}, {1, 1}}, Vector{1, 1}, 0.0), NotPositiveDefinite);
}

TEST(SolveSpd, RidgeExampleAgainstExplicitInverse) {
  // (a + I) = [[2,1],[1,2]]; inverse of [[p,q],[r,s]] is [[s,-q],[-r,p]] / (ps - qr).
  const double p = 2, q = 1, r = 1, s = 2;
  const double det = p * s - q * r;
  const double b0 = 2, b1 = 2;
  const double x0 = (s * b0 - q * b1) / det, x1 = (-r * b0 + p * b1) / det;

  const Vector x = solve_spd(Matrix{{1, 1}, {1, 1}}, Vector{b0, b1}, 1.0);
  EXPECT_NEAR(x[0], x0, 1e-15);
  EXPECT_NEAR(x[1], x1, 1e-15);
  EXPECT_NEAR(x[0], 2.0 / 3.0, 1e-15);
}

TEST(SolveSpd, ErrorPaths) {
  EXPECT_THROW(solve_spd(Matrix(2, 3), Vector{1, 1}), DimensionMismatch);
  EXPECT_THROW(solve_spd(Matrix::identity(2), Vector{1, 1, 1}), DimensionMismatch);
  EXPECT_THROW(solve_spd(Matrix{{1, 0.5}, {0.4, 1}}, Vector{1, 1}), std::invalid_argument);
  EXPECT_THROW(solve_spd(Matrix::identity(2), Vector{1, 1}, -1.0), std::invalid_argument);
  EXPECT_THROW(solve_spd(Matrix{{0}}, Vector{1}), NotPositiveDefinite);
}

TEST(SolveSpd, ResidualBoundOnRandomSpdSystems) {
  Rng rng(19);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const Matrix m = random_matrix(rng, n + 2, n);
    Matrix a = gram(m);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
    Vector b(n);
    for (double& v : b) v = rng.uniform(-5.0, 5.0);
    const double ridge = trial % 2 ? 0.0 : rng.uniform(0.0, 2.0);

    const Vector x = solve_spd(a, b, ridge);
    Vector ax = matvec(a, x);
    for (std::size_t i = 0; i < n; ++i) ax[i] += ridge * x[i];
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(ax[i] - b[i]));
    EXPECT_LE(worst, 1e-8 * (1.0 + norm_inf(b)));

    // Ridge r on a equals ridge 0 on a + r I.
    Matrix shifted = a;
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) += ridge;
    EXPECT_EQ(x, solve_spd(shifted, b, 0.0));
  }
}

}  // namespace
}  // namespace gnbp
