#pragma once

// Dense row-major matrix kernel: just enough for forward passes, Jacobian
// products and the normal-equations solve of the Gauss-Newton step.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace gnbp {

using Vector = std::vector<double>;

class Matrix {
 public:
  /// rows and cols must both be at least 1.
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> values_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// a * x
Vector matvec(const Matrix& a, std::span<const double> x);
/// a^T * x, without materializing the transpose.
Vector matvec_transposed(const Matrix& a, std::span<const double> x);
/// a^T * a
Matrix gram(const Matrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> a);

/// Solves (a + ridge*I) x = b with a Cholesky factorization.
///
/// `a` must be square and symmetric to within 1e-9 (scaled by its largest
/// entry when that exceeds 1). Throws NotPositiveDefinite when a pivot falls
/// to kPivotFloor or below, DimensionMismatch on shape errors.
Vector solve_spd(const Matrix& a, std::span<const double> b, double ridge = 0.0);

inline constexpr double kPivotFloor = 1e-12;

}  // namespace gnbp
