#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "sgft/matrix.hpp"

namespace sgft {

// Orthonormal eigenbasis of a symmetric matrix. Column i of `vectors` pairs
// with eigenvalues[i]; eigenvalues ascend. The first entry of each column
// whose magnitude exceeds 1e-12 is positive.
//
// Ordering and signs are part of the bitstream contract: encoder and decoder
// derive the same basis from the same matrix bits.
struct Basis {
  Vector eigenvalues;
  Matrix vectors;

  std::size_t order() const { return eigenvalues.size(); }
  Vector vector(std::size_t i) const { return vectors.column(i); }

  // Phi^T x
  Vector analyze(std::span<const double> x) const;
  // Phi c
  Vector synthesize(std::span<const double> c) const;
};

struct JacobiOptions {
  double tolerance = 1e-14;  // off-diagonal Frobenius norm / matrix norm
  int max_sweeps = 100;
};

// Cyclic Jacobi eigendecomposition. Throws kAsymmetricInput when the input is
// not symmetric within 1e-12 relative. Bit-deterministic.
Basis eigendecompose(const Matrix& m, const JacobiOptions& options = {});

// Residual max|M Phi - Phi diag(lambda)|.
double spectral_residual(const Matrix& m, const Basis& basis);

// Largest |entry| of Phi^T Phi - I.
double orthonormality_error(const Basis& basis);

// v_i = 1 for i < k, -1 for i >= k (1-based i, k). Null vector of the loopy
// Laplacian built from a flagged Markov model.
Vector pwc_vector(std::size_t n, std::size_t k);

struct PsdReport {
  bool psd = true;
  double min_eigenvalue = 0.0;
};

// PSD iff min eigenvalue >= -1e-9 * max|eigenvalue|.
PsdReport psd_check(const Matrix& m);

// Thread-safe memo of bases keyed by an opaque canonical string. Lookups take
// a shared lock; the first miss for a key computes under a unique lock so
// concurrent misses never solve the same matrix twice.
class BasisCache {
 public:
  std::shared_ptr<const Basis> get_or_compute(
      const std::string& key, const std::function<Basis()>& compute);

  std::size_t size() const;
  void clear();

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const Basis>> entries_;
};

}  // namespace sgft
