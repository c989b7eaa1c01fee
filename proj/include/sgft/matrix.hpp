#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sgft {

using Vector = std::vector<double>;

// Dense row-major real matrix. Operators that produce symmetric results
// (covariance, precision, Laplacians) write both triangles, so callers can
// rely on m(i, j) == m(j, i) bit-for-bit.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  explicit Matrix(std::size_t order) : Matrix(order, order) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  // Writes (i, j) and (j, i).
  void set_sym(std::size_t i, std::size_t j, double v) {
    (*this)(i, j) = v;
    (*this)(j, i) = v;
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Vector column(std::size_t j) const;
  Matrix transpose() const;
  double max_abs() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);

// Max-norm of a - b; dimensions must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

// True when |a_ij - a_ji| <= rel_tol * max|a| for all i, j.
bool is_symmetric(const Matrix& a, double rel_tol = 0.0);

// Gauss-Jordan inverse with partial pivoting. Throws kSingularBlock when a
// pivot falls below pivot_tol * max|a|.
Matrix inverse(const Matrix& a, double pivot_tol = 1e-14);

// Determinant by LU with partial pivoting.
double determinant(const Matrix& a);

// Rows/columns of `a` selected by `index`, in the given order.
Matrix submatrix(const Matrix& a, std::span<const std::size_t> row_index,
                 std::span<const std::size_t> col_index);

}  // namespace sgft
