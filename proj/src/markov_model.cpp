#include "sgft/markov_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sgft/error.hpp"

namespace sgft {

MarkovModel1D MarkovModel1D::create(std::vector<double> sigma_sq, int break_index,
                                    bool first_precision_zero) {
  const auto n = static_cast<int>(sigma_sq.size());
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument, "Markov model needs at least 2 samples");
  }
  if (break_index < 2 || break_index > n) {
    std::ostringstream os;
    os << "break index " << break_index << " outside [2, " << n << "]";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  for (int i = 0; i < n; ++i) {
    const double s = sigma_sq[static_cast<std::size_t>(i)];
    const bool infinite_ok = i == 0 && first_precision_zero && std::isinf(s) && s > 0;
    if (!infinite_ok && !(s > 0.0 && std::isfinite(s))) {
      std::ostringstream os;
      os << "variance " << i << " must be positive and finite";
      throw Error(ErrorCode::kInvalidArgument, os.str());
    }
  }
  return MarkovModel1D(std::move(sigma_sq), break_index, first_precision_zero);
}

double MarkovModel1D::inverse_variance(std::size_t i) const {
  if (i == 0 && first_precision_zero_) return 0.0;
  return 1.0 / sigma_sq_[i];
}

Matrix difference_matrix(const MarkovModel1D& model) {
  const std::size_t n = model.size();
  const auto k = static_cast<std::size_t>(model.break_index()) - 1;  // zero-based row
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    if (i > 0) m(i, i - 1) = (i == k) ? 1.0 : -1.0;
  }
  return m;
}

namespace {

// M^-1 is lower triangular with entries in {0, +1, -1}: x_i depends on z_j
// (j <= i) with sign (-1)^[j < k <= i], k the zero-based break row.
Matrix difference_matrix_inverse(const MarkovModel1D& model) {
  const std::size_t n = model.size();
  const auto k = static_cast<std::size_t>(model.break_index()) - 1;
  Matrix inv(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) inv(i, j) = (j < k && k <= i) ? -1.0 : 1.0;
  return inv;
}

void require_finite_first_variance(const MarkovModel1D& model, const char* what) {
  if (model.first_precision_zero()) {
    throw Error(ErrorCode::kInfiniteVariance,
                std::string(what) + " requires a finite first variance");
  }
}

}  // namespace

Matrix covariance(const MarkovModel1D& model) {
  require_finite_first_variance(model, "covariance");
  const std::size_t n = model.size();
  const Matrix minv = difference_matrix_inverse(model);
  const auto s = model.sigma_sq();
  Matrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t <= j; ++t) acc += minv(i, t) * s[t] * minv(j, t);
      c.set_sym(i, j, acc);
    }
  }
  return c;
}

Matrix precision(const MarkovModel1D& model) {
  // Accumulate (1/sigma_r^2) m_r m_r^T over the rows m_r of M. Row r touches
  // only columns r and r-1, so P is tridiagonal by construction.
  const std::size_t n = model.size();
  const auto k = static_cast<std::size_t>(model.break_index()) - 1;
  Matrix p(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double w = model.inverse_variance(r);
    p(r, r) += w;
    if (r > 0) {
      const double sign = (r == k) ? 1.0 : -1.0;
      p(r - 1, r - 1) += w;
      p.set_sym(r, r - 1, sign * w);
    }
  }
  return p;
}

Vector synthesize(const MarkovModel1D& model, std::span<const double> innovations) {
  const std::size_t n = model.size();
  if (innovations.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "innovation count must equal model size");
  }
  const auto k = static_cast<std::size_t>(model.break_index()) - 1;
  Vector x(n);
  x[0] = innovations[0];
  for (std::size_t i = 1; i < n; ++i)
    x[i] = (i == k) ? innovations[i] - x[i - 1] : innovations[i] + x[i - 1];
  return x;
}

std::vector<Vector> MarkovSampler::draw(const MarkovModel1D& model, std::size_t count) {
  require_finite_first_variance(model, "sampling");
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto s = model.sigma_sq();
  std::vector<double> sd(s.size());
  std::transform(s.begin(), s.end(), sd.begin(), [](double v) { return std::sqrt(v); });

  std::vector<Vector> out;
  out.reserve(count);
  Vector z(model.size());
  for (std::size_t c = 0; c < count; ++c) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = sd[i] * gauss(engine_);
    out.push_back(synthesize(model, z));
  }
  return out;
}

std::vector<Vector> sample(const MarkovModel1D& model, std::uint64_t seed,
                           std::size_t count) {
  MarkovSampler sampler(seed);
  return sampler.draw(model, count);
}

Matrix empirical_covariance(std::span<const Vector> samples) {
  if (samples.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "empirical covariance needs >= 2 samples");
  }
  const std::size_t n = samples.front().size();
  Vector mean(n, 0.0);
  for (const auto& x : samples) {
    if (x.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "samples differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) mean[i] += x[i];
  }
  for (double& m : mean) m /= static_cast<double>(samples.size());

  Matrix c(n);
  for (const auto& x : samples)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) c(i, j) += (x[i] - mean[i]) * (x[j] - mean[j]);
  const double denom = static_cast<double>(samples.size() - 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) c.set_sym(i, j, c(i, j) / denom);
  return c;
}

Basis empirical_klt(std::span<const Vector> samples) {
  const Matrix c = empirical_covariance(samples);
  const Basis by_variance = eigendecompose(c);
  const std::size_t n = by_variance.order();
  const double largest = by_variance.eigenvalues.back();
  const double smallest = by_variance.eigenvalues.front();
  if (!(largest > 0.0) || smallest <= 1e-9 * largest) {
    throw Error(ErrorCode::kDegenerateCovariance,
                "empirical covariance is numerically singular");
  }
  // Reverse: largest variance = smallest precision first.
  Basis out;
  out.eigenvalues.resize(n);
  out.vectors = Matrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = n - 1 - j;
    out.eigenvalues[j] = 1.0 / by_variance.eigenvalues[src];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, j) = by_variance.vectors(r, src);
  }
  return out;
}

}  // namespace sgft
