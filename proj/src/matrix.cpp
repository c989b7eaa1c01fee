#include "sgft/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "sgft/error.hpp"

namespace sgft {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInfiniteVariance: return "infinite-first-variance";
    case ErrorCode::kDegenerateCovariance: return "degenerate-covariance";
    case ErrorCode::kInvalidLink: return "invalid-link";
    case ErrorCode::kSingularBlock: return "singular-block";
    case ErrorCode::kAsymmetricInput: return "asymmetric-input";
    case ErrorCode::kUnsupportedSize: return "unsupported-size";
    case ErrorCode::kTruncatedStream: return "truncated-stream";
    case ErrorCode::kOutOfBounds: return "out-of-bounds";
    case ErrorCode::kMalformedHeader: return "malformed-header";
    case ErrorCode::kTruncatedPayload: return "truncated-payload";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << "matrix shape mismatch: " << a.rows() << "x" << a.cols() << " vs "
       << b.rows() << "x" << b.cols();
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      throw Error(ErrorCode::kInvalidArgument, "ragged matrix initializer");
    }
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix product shape mismatch");
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix-vector shape mismatch");
  }
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] += bd[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
  return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  double m = 0.0;
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < ad.size(); ++i) m = std::max(m, std::abs(ad[i] - bd[i]));
  return m;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (!a.square()) return false;
  const double tol = rel_tol * a.max_abs();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

Matrix inverse(const Matrix& a, double pivot_tol) {
  if (!a.square()) {
    throw Error(ErrorCode::kDimensionMismatch, "inverse of non-square matrix");
  }
  const std::size_t n = a.rows();
  Matrix work = a;
  Matrix inv = Matrix::identity(n);
  const double tol = pivot_tol * a.max_abs();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    if (!(std::abs(work(pivot, col)) > tol)) {
      throw Error(ErrorCode::kSingularBlock, "matrix is numerically singular");
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const double p = work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) /= p;
      inv(col, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = work(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

double determinant(const Matrix& a) {
  if (!a.square()) {
    throw Error(ErrorCode::kDimensionMismatch, "determinant of non-square matrix");
  }
  const std::size_t n = a.rows();
  Matrix lu = a;
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(pivot, col))) pivot = r;
    if (lu(pivot, col) == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(pivot, j), lu(col, j));
      det = -det;
    }
    det *= lu(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / lu(col, col);
      for (std::size_t j = col; j < n; ++j) lu(r, j) -= f * lu(col, j);
    }
  }
  return det;
}

Matrix submatrix(const Matrix& a, std::span<const std::size_t> row_index,
                 std::span<const std::size_t> col_index) {
  Matrix s(row_index.size(), col_index.size());
  for (std::size_t i = 0; i < row_index.size(); ++i)
    for (std::size_t j = 0; j < col_index.size(); ++j)
      s(i, j) = a(row_index[i], col_index[j]);
  return s;
}

}  // namespace sgft
