#include "sgft/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include "sgft/error.hpp"

namespace sgft {

Vector Basis::analyze(std::span<const double> x) const {
  const std::size_t n = order();
  if (x.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "signal length does not match basis");
  }
  Vector c(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += vectors(i, j) * x[i];
    c[j] = s;
  }
  return c;
}

Vector Basis::synthesize(std::span<const double> c) const {
  const std::size_t n = order();
  if (c.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "coefficient count does not match basis");
  }
  Vector x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += vectors(i, j) * c[j];
    x[i] = s;
  }
  return x;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

// One Jacobi rotation annihilating a(p, q), p < q.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const std::size_t n = a.rows();
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = std::abs(theta) > 1e150
                       ? 0.5 / theta
                       : (theta >= 0.0 ? 1.0 : -1.0) /
                             (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    const double np = arp - s * (arq + tau * arp);
    const double nq = arq + s * (arp - tau * arq);
    a(r, p) = np;
    a(p, r) = np;
    a(r, q) = nq;
    a(q, r) = nq;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = vrp - s * (vrq + tau * vrp);
    v(r, q) = vrq + s * (vrp - tau * vrq);
  }
}

void normalize_sign(Matrix& vectors, std::size_t col) {
  for (std::size_t i = 0; i < vectors.rows(); ++i) {
    const double e = vectors(i, col);
    if (std::abs(e) > 1e-12) {
      if (e < 0.0)
        for (std::size_t r = 0; r < vectors.rows(); ++r)
          vectors(r, col) = -vectors(r, col);
      return;
    }
  }
}

}  // namespace

Basis eigendecompose(const Matrix& m, const JacobiOptions& options) {
  if (!m.square()) {
    throw Error(ErrorCode::kAsymmetricInput, "eigendecompose: matrix is not square");
  }
  if (!is_symmetric(m, 1e-12)) {
    throw Error(ErrorCode::kAsymmetricInput, "eigendecompose: matrix is not symmetric");
  }
  const std::size_t n = m.rows();
  Matrix a = m;
  // Symmetrize exactly so rotations see one value per pair.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
  Matrix v = Matrix::identity(n);

  const double norm = frobenius_norm(a);
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    if (off_diagonal_norm(a) <= options.tolerance * norm) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  for (std::size_t j = 0; j < n; ++j) normalize_sign(v, j);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  // Near-degenerate eigenvalues: order by the sign-normalized vectors.
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
  const double tie_tol = 1e-10 * std::max(scale, 1e-300);
  auto lex_less = [&](std::size_t x, std::size_t y) {
    for (std::size_t r = 0; r < n; ++r) {
      if (v(r, x) < v(r, y)) return true;
      if (v(r, x) > v(r, y)) return false;
    }
    return false;
  };
  for (std::size_t begin = 0; begin < n;) {
    std::size_t end = begin + 1;
    while (end < n && a(order[end], order[end]) - a(order[end - 1], order[end - 1]) <= tie_tol)
      ++end;
    if (end - begin > 1)
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                       order.begin() + static_cast<std::ptrdiff_t>(end), lex_less);
    begin = end;
  }

  // Eigenvalues stay in sorted order; only vectors move within a cluster.
  Vector sorted_values(n);
  for (std::size_t j = 0; j < n; ++j) sorted_values[j] = a(j, j);
  std::sort(sorted_values.begin(), sorted_values.end());

  Basis basis;
  basis.eigenvalues = std::move(sorted_values);
  basis.vectors = Matrix(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t r = 0; r < n; ++r) basis.vectors(r, j) = v(r, order[j]);
  return basis;
}

double spectral_residual(const Matrix& m, const Basis& basis) {
  const std::size_t n = basis.order();
  const Matrix mv = m * basis.vectors;
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      r = std::max(r, std::abs(mv(i, j) - basis.vectors(i, j) * basis.eigenvalues[j]));
  return r;
}

double orthonormality_error(const Basis& basis) {
  const Matrix g = basis.vectors.transpose() * basis.vectors;
  return max_abs_diff(g, Matrix::identity(basis.order()));
}

Vector pwc_vector(std::size_t n, std::size_t k) {
  if (k < 2 || k > n) {
    throw Error(ErrorCode::kInvalidArgument, "pwc_vector: k must lie in [2, n]");
  }
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = (i + 1 < k) ? 1.0 : -1.0;
  return v;
}

PsdReport psd_check(const Matrix& m) {
  const Basis b = eigendecompose(m);
  PsdReport report;
  if (b.order() == 0) return report;
  double scale = 0.0;
  for (double l : b.eigenvalues) scale = std::max(scale, std::abs(l));
  report.min_eigenvalue = b.eigenvalues.front();
  report.psd = report.min_eigenvalue >= -1e-9 * scale;
  return report;
}

std::shared_ptr<const Basis> BasisCache::get_or_compute(
    const std::string& key, const std::function<Basis()>& compute) {
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it != entries_.end()) return it->second;
  auto basis = std::make_shared<const Basis>(compute());
  entries_.emplace(key, basis);
  return basis;
}

std::size_t BasisCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void BasisCache::clear() {
  std::unique_lock lock(mutex_);
  entries_.clear();
}

}  // namespace sgft
