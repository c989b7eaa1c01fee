#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sgft/contour_map.hpp"
#include "sgft/spectral.hpp"
#include "sgft/transforms.hpp"

namespace sgft {

// 8-bit depth image, row-major.
struct DepthImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> samples;

  DepthImage() = default;
  DepthImage(std::size_t w, std::size_t h, std::uint8_t fill = 0)
      : width(w), height(h), samples(w * h, fill) {}

  std::uint8_t& at(std::size_t x, std::size_t y) { return samples[y * width + x]; }
  std::uint8_t at(std::size_t x, std::size_t y) const { return samples[y * width + x]; }

  bool operator==(const DepthImage&) const = default;
};

// Transform used for blocks that contain a broken link. Smooth blocks always
// use the 8x8 DCT.
enum class Method : std::uint8_t { kSgft = 0, kWgft = 1, kDct = 2 };

const char* method_name(Method m);
Method parse_method(const std::string& name);

inline constexpr std::size_t kGraphBlock = 4;
inline constexpr std::size_t kDctBlock = 8;
inline constexpr double kPredictionFallback = 128.0;

struct CodecConfig {
  Method method = Method::kSgft;
  int qp = 32;
  // Graph weight carried in the header: the negative-edge magnitude for SGFT,
  // the positive contour weight for WGFT. Must lie in (0, 1].
  double w = 0.5;
  int contour_threshold = 30;
};

// A link is broken when the absolute sample difference reaches `threshold`.
// Broken links that touch no other broken link are dropped as noise.
ContourMap detect_contours(const DepthImage& img, int threshold);

// Edge-aware intra prediction of the size x size block at (x0, y0) from the
// already reconstructed row above and column to the left. Each pixel copies
// the nearest boundary sample it can reach without crossing a broken link
// (breadth-first over the block, seeds ordered top row then left column).
// Pixels that reach none get the mean of the boundary samples that do reach
// the block, else the mean of all available boundary samples, else 128.
Block intra_predict(const DepthImage& reconstructed, const ContourMap& contours,
                    std::size_t x0, std::size_t y0, std::size_t size);

double quantizer_step(int qp);
std::vector<std::int32_t> quantize(std::span<const double> coeffs, int qp);
std::vector<double> dequantize(std::span<const std::int32_t> levels, int qp);

// Byte-exact container (little-endian):
//   "SGFT" | version u8 | method u8 | width u16 | height u16 | qp u8 |
//   threshold u8 | w u16 (1/256 units) | contour length u32 | contours |
//   block length u32 | block payload
// The block payload is one arithmetic-coded stream holding, per 8x8 block in
// raster order, the mode flag and then the quantized coefficients of either
// the 8x8 DCT or the four 4x4 graph sub-blocks.
struct Bitstream {
  std::vector<std::uint8_t> bytes;
  std::size_t size_bits() const { return bytes.size() * 8; }
};

inline constexpr std::uint8_t kBitstreamVersion = 1;
inline constexpr std::size_t kHeaderBytes = 18;

struct BlockStats {
  std::size_t dct_blocks = 0;
  std::size_t graph_blocks = 0;  // 8x8 blocks split into graph sub-blocks
  std::size_t significant_coeffs = 0;
  std::size_t contour_bytes = 0;
};

struct EncodeResult {
  Bitstream bitstream;
  DepthImage reconstruction;  // encoder-side closed-loop output
  std::vector<std::uint8_t> modes;  // per 8x8 block, raster order
  BlockStats stats;
};

struct DecodeResult {
  DepthImage image;
  CodecConfig config;
  ContourMap contours;
  std::vector<std::uint8_t> modes;
};

EncodeResult encode(const DepthImage& img, const CodecConfig& config,
                    BasisCache* cache = &shared_basis_cache());

DecodeResult decode_stream(std::span<const std::uint8_t> bytes,
                           BasisCache* cache = &shared_basis_cache());
DepthImage decode(const Bitstream& bs, BasisCache* cache = &shared_basis_cache());

// Replicates the last column/row up to multiples of `multiple`.
DepthImage pad_to_multiple(const DepthImage& img, std::size_t multiple);

}  // namespace sgft
