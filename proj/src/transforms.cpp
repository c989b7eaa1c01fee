#include "sgft/transforms.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "sgft/error.hpp"

namespace sgft {

double quantize_weight(double w) { return std::round(w / kWeightStep) * kWeightStep; }

namespace {

Basis solve_graph_basis(GraphKind kind, const BlockContour& contour, double w) {
  if (kind == GraphKind::kSigned) return eigendecompose(loopy_laplacian(block_graph(contour, w)));
  return eigendecompose(graph_laplacian(positive_block_graph(contour, w)));
}

void require_square(const Block& b) {
  if (b.pixels.size() != b.size * b.size) {
    throw Error(ErrorCode::kDimensionMismatch, "block pixel count is not size^2");
  }
}

void require_match(std::size_t block_size, const BlockContour& contour) {
  if (block_size != contour.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "contour size differs from block size");
  }
}

CoeffBlock graph_forward(GraphKind kind, const Block& block, const BlockContour& contour,
                         double w, BasisCache* cache) {
  require_square(block);
  require_match(block.size, contour);
  const auto basis = graph_basis(kind, contour, w, cache);
  return {block.size, basis->analyze(block.pixels)};
}

Block graph_inverse(GraphKind kind, const CoeffBlock& coeffs, const BlockContour& contour,
                    double w, BasisCache* cache) {
  require_match(coeffs.size, contour);
  if (coeffs.coeffs.size() != coeffs.size * coeffs.size) {
    throw Error(ErrorCode::kDimensionMismatch, "coefficient count is not size^2");
  }
  const auto basis = graph_basis(kind, contour, w, cache);
  return {coeffs.size, basis->synthesize(coeffs.coeffs)};
}

// Orthonormal DCT-II matrix: row u is frequency u.
Matrix dct_matrix(std::size_t n) {
  Matrix c(n);
  const double nn = static_cast<double>(n);
  for (std::size_t u = 0; u < n; ++u) {
    const double a = u == 0 ? std::sqrt(1.0 / nn) : std::sqrt(2.0 / nn);
    for (std::size_t x = 0; x < n; ++x)
      c(u, x) = a * std::cos(std::numbers::pi * (2.0 * static_cast<double>(x) + 1.0) *
                             static_cast<double>(u) / (2.0 * nn));
  }
  return c;
}

const Matrix& cached_dct_matrix(std::size_t n) {
  static const Matrix m4 = dct_matrix(4);
  static const Matrix m8 = dct_matrix(8);
  if (n == 4) return m4;
  if (n == 8) return m8;
  throw Error(ErrorCode::kUnsupportedSize, "DCT supports block sizes 4 and 8");
}

std::vector<std::size_t> make_zigzag(std::size_t n) {
  std::vector<std::size_t> order;
  order.reserve(n * n);
  for (std::size_t s = 0; s < 2 * n - 1; ++s) {
    // Even anti-diagonals run bottom-left to top-right.
    for (std::size_t t = 0; t <= s; ++t) {
      const std::size_t y = (s % 2 == 0) ? s - t : t;
      const std::size_t x = s - y;
      if (x < n && y < n) order.push_back(y * n + x);
    }
  }
  return order;
}

}  // namespace

std::shared_ptr<const Basis> graph_basis(GraphKind kind, const BlockContour& contour,
                                         double w, BasisCache* cache) {
  if (cache == nullptr) return std::make_shared<const Basis>(solve_graph_basis(kind, contour, w));
  const double wq = quantize_weight(w);
  if (!(wq > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "edge weight rounds to zero on the 1/256 grid");
  }
  std::string key = kind == GraphKind::kSigned ? "S" : "P";
  key += std::to_string(static_cast<long>(std::lround(wq / kWeightStep)));
  key.push_back('|');
  key += contour.signature();
  return cache->get_or_compute(key, [&] { return solve_graph_basis(kind, contour, wq); });
}

CoeffBlock sgft_forward(const Block& block, const BlockContour& contour, double w,
                        BasisCache* cache) {
  return graph_forward(GraphKind::kSigned, block, contour, w, cache);
}

Block sgft_inverse(const CoeffBlock& coeffs, const BlockContour& contour, double w,
                   BasisCache* cache) {
  return graph_inverse(GraphKind::kSigned, coeffs, contour, w, cache);
}

CoeffBlock wgft_forward(const Block& block, const BlockContour& contour, double w_pos,
                        BasisCache* cache) {
  if (!(w_pos > 0.0 && w_pos <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "WGFT weight must lie in (0, 1]");
  }
  return graph_forward(GraphKind::kPositive, block, contour, w_pos, cache);
}

Block wgft_inverse(const CoeffBlock& coeffs, const BlockContour& contour, double w_pos,
                   BasisCache* cache) {
  if (!(w_pos > 0.0 && w_pos <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "WGFT weight must lie in (0, 1]");
  }
  return graph_inverse(GraphKind::kPositive, coeffs, contour, w_pos, cache);
}

CoeffBlock dct_forward(const Block& block) {
  require_square(block);
  const std::size_t n = block.size;
  const Matrix& c = cached_dct_matrix(n);
  // tmp = C X, out = tmp C^T
  std::vector<double> tmp(n * n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t x = 0; x < n; ++x) {
      double s = 0.0;
      for (std::size_t y = 0; y < n; ++y) s += c(u, y) * block.at(x, y);
      tmp[u * n + x] = s;
    }
  std::vector<double> freq(n * n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (std::size_t x = 0; x < n; ++x) s += tmp[u * n + x] * c(v, x);
      freq[u * n + v] = s;  // vertical frequency u, horizontal v
    }
  const auto& zz = zigzag_order(n);
  CoeffBlock out{n, std::vector<double>(n * n)};
  for (std::size_t i = 0; i < zz.size(); ++i) out.coeffs[i] = freq[zz[i]];
  return out;
}

Block dct_inverse(const CoeffBlock& coeffs) {
  const std::size_t n = coeffs.size;
  const Matrix& c = cached_dct_matrix(n);
  if (coeffs.coeffs.size() != n * n) {
    throw Error(ErrorCode::kDimensionMismatch, "coefficient count is not size^2");
  }
  const auto& zz = zigzag_order(n);
  std::vector<double> freq(n * n);
  for (std::size_t i = 0; i < zz.size(); ++i) freq[zz[i]] = coeffs.coeffs[i];
  // X = C^T F C
  std::vector<double> tmp(n * n, 0.0);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (std::size_t u = 0; u < n; ++u) s += c(u, y) * freq[u * n + v];
      tmp[y * n + v] = s;
    }
  Block out = Block::zeros(n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      double s = 0.0;
      for (std::size_t v = 0; v < n; ++v) s += tmp[y * n + v] * c(v, x);
      out.at(x, y) = s;
    }
  return out;
}

const std::vector<std::size_t>& zigzag_order(std::size_t n) {
  static const std::vector<std::size_t> z4 = make_zigzag(4);
  static const std::vector<std::size_t> z8 = make_zigzag(8);
  if (n == 4) return z4;
  if (n == 8) return z8;
  throw Error(ErrorCode::kUnsupportedSize, "zig-zag scan defined for sizes 4 and 8");
}

BasisCache& shared_basis_cache() {
  static BasisCache cache;
  return cache;
}

}  // namespace sgft
