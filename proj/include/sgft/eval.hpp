#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgft/codec.hpp"

namespace sgft {

// Returned for identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();
// RD points must be finite; lossless reconstructions are reported at this cap.
inline constexpr double kPsnrCap = 100.0;

// 10 log10(255^2 / MSE). Throws kDimensionMismatch.
double psnr(const DepthImage& a, const DepthImage& b);

struct RDPoint {
  Method method = Method::kSgft;
  int qp = 0;
  std::size_t bits_total = 0;  // whole bitstream, header and contours included
  double bits_per_pixel = 0.0;
  double psnr_db = 0.0;
};

struct SweepConfig {
  double w = 0.5;      // SGFT negative-edge magnitude
  double w_pos = 0.1;  // WGFT contour weight
  int contour_threshold = 30;
};

const std::vector<int>& default_qps(Method m);

// One encode/decode per qp, run concurrently, returned in qp-list order.
// Throws kInvalidArgument if a decode disagrees with the encoder.
std::vector<RDPoint> rd_sweep(const DepthImage& img, Method method, std::span<const int> qps,
                              const SweepConfig& config = {});

struct WSearch {
  double w = 0.0;
  double psnr_db = 0.0;
  std::size_t bits_total = 0;
};

// Grid 0.05, 0.10, ..., 1.00 at fixed qp; highest PSNR wins, ties go to
// fewer bits, then to the smaller w.
std::vector<double> w_search_grid();
WSearch search_w(const DepthImage& img, int qp = 32, int contour_threshold = 30);

// CSV with leading `# key=value` metadata lines and the columns
// method,qp,bpp,psnr.
void write_csv(std::ostream& out, std::span<const RDPoint> points,
               std::span<const std::pair<std::string, std::string>> metadata = {});

// Operational RD curve: the points not dominated by another point with fewer
// or equal bits and higher PSNR, sorted by bpp.
std::vector<RDPoint> operational_curve(std::span<const RDPoint> points);

// Linear interpolation of PSNR over the points sorted by bpp. Empty outside
// the covered bpp range.
std::optional<double> psnr_at_bpp(std::span<const RDPoint> curve, double bpp);

}  // namespace sgft
