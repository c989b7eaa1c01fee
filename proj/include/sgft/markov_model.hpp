#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sgft/matrix.hpp"
#include "sgft/spectral.hpp"

namespace sgft {

// One-state Markov process of length n with a single anti-correlated pair.
//
//   x_1             = z_1
//   x_i - x_{i-1}   = z_i      (i != k)
//   x_k + x_{k-1}   = z_k
//
// z_i ~ N(0, sigma_sq[i]). Indices in the formula are 1-based; break_index()
// returns k in that convention, so the anti-correlated pair is (k-2, k-1) in
// zero-based node numbering.
//
// With first_precision_zero the first innovation variance is taken as
// infinite: precision() uses 0 for 1/sigma_1^2 and covariance() refuses.
class MarkovModel1D {
 public:
  static MarkovModel1D create(std::vector<double> sigma_sq, int break_index,
                              bool first_precision_zero = false);

  std::size_t size() const { return sigma_sq_.size(); }
  int break_index() const { return break_index_; }
  bool first_precision_zero() const { return first_precision_zero_; }
  std::span<const double> sigma_sq() const { return sigma_sq_; }

  // 1/sigma_i^2 for zero-based i; 0 for i == 0 under the flag.
  double inverse_variance(std::size_t i) const;

 private:
  MarkovModel1D(std::vector<double> sigma_sq, int break_index, bool flag)
      : sigma_sq_(std::move(sigma_sq)),
        break_index_(break_index),
        first_precision_zero_(flag) {}

  std::vector<double> sigma_sq_;
  int break_index_;
  bool first_precision_zero_;
};

// Unit lower-bidiagonal M with M x = z.
Matrix difference_matrix(const MarkovModel1D& model);

// C = M^-1 diag(sigma^2) M^-T. Throws kInfiniteVariance under the flag.
Matrix covariance(const MarkovModel1D& model);

// P = M^T diag(1/sigma^2) M, tridiagonal.
Matrix precision(const MarkovModel1D& model);

// x = M^-1 z by forward substitution.
Vector synthesize(const MarkovModel1D& model, std::span<const double> innovations);

// Deterministic Gaussian sampler. Owns its generator; not shareable while
// drawing.
class MarkovSampler {
 public:
  explicit MarkovSampler(std::uint64_t seed) : engine_(seed) {}

  std::vector<Vector> draw(const MarkovModel1D& model, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

std::vector<Vector> sample(const MarkovModel1D& model, std::uint64_t seed,
                           std::size_t count);

// Mean-removed sample covariance (unbiased).
Matrix empirical_covariance(std::span<const Vector> samples);

// Eigenvectors of the empirical covariance, returned as a Basis whose
// eigenvalues are the inverse variances (ascending, so the highest-variance
// direction comes first). Test oracle for the SGFT.
// Throws kDegenerateCovariance when the smallest variance is below 1e-9 of the
// largest.
Basis empirical_klt(std::span<const Vector> samples);

}  // namespace sgft
