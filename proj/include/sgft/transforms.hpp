#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sgft/signed_graph.hpp"
#include "sgft/spectral.hpp"

namespace sgft {

// n x n residual-domain samples in raster order.
struct Block {
  std::size_t size = 0;
  std::vector<double> pixels;

  static Block zeros(std::size_t n) { return {n, std::vector<double>(n * n, 0.0)}; }
  double& at(std::size_t x, std::size_t y) { return pixels[y * size + x]; }
  double at(std::size_t x, std::size_t y) const { return pixels[y * size + x]; }
};

// Transform coefficients in scan order: eigenvalue-ascending for graph
// transforms, zig-zag for the DCT.
struct CoeffBlock {
  std::size_t size = 0;
  std::vector<double> coeffs;
};

enum class GraphKind { kSigned, kPositive };

// Fixed-point step used for cache keys and the bitstream's w field.
inline constexpr double kWeightStep = 1.0 / 256.0;
double quantize_weight(double w);

// Basis of the block graph. With a cache, w is first snapped to the
// 1/256 grid so that equal keys always mean equal bases.
std::shared_ptr<const Basis> graph_basis(GraphKind kind, const BlockContour& contour,
                                         double w, BasisCache* cache = nullptr);

CoeffBlock sgft_forward(const Block& block, const BlockContour& contour, double w,
                        BasisCache* cache = nullptr);
Block sgft_inverse(const CoeffBlock& coeffs, const BlockContour& contour, double w,
                   BasisCache* cache = nullptr);

CoeffBlock wgft_forward(const Block& block, const BlockContour& contour, double w_pos,
                        BasisCache* cache = nullptr);
Block wgft_inverse(const CoeffBlock& coeffs, const BlockContour& contour, double w_pos,
                   BasisCache* cache = nullptr);

// Orthonormal separable DCT-II / DCT-III, sizes 4 and 8 only.
CoeffBlock dct_forward(const Block& block);
Block dct_inverse(const CoeffBlock& coeffs);

// Raster index visited at each zig-zag scan position.
const std::vector<std::size_t>& zigzag_order(std::size_t n);

// Process-wide cache shared by encoder and decoder instances.
BasisCache& shared_basis_cache();

}  // namespace sgft
