#include "sgft/eval.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <ostream>

#include "sgft/error.hpp"

namespace sgft {

double psnr(const DepthImage& a, const DepthImage& b) {
  if (a.width != b.width || a.height != b.height || a.samples.size() != b.samples.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "psnr: image sizes differ");
  }
  if (a.samples.empty()) throw Error(ErrorCode::kDimensionMismatch, "psnr: empty images");
  double sse = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - b.samples[i];
    sse += d * d;
  }
  if (sse == 0.0) return kPsnrIdentical;
  const double mse = sse / static_cast<double>(a.samples.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

const std::vector<int>& default_qps(Method m) {
  static const std::vector<int> graph = {16, 24, 32, 40, 48};
  static const std::vector<int> dct = {40, 42, 44, 46, 48};
  return m == Method::kDct ? dct : graph;
}

namespace {

RDPoint run_point(const DepthImage& img, const CodecConfig& cfg) {
  const EncodeResult enc = encode(img, cfg);
  const DepthImage dec = decode(enc.bitstream);
  if (dec != enc.reconstruction) {
    throw Error(ErrorCode::kInvalidArgument, "decoder output drifted from the encoder");
  }
  RDPoint p;
  p.method = cfg.method;
  p.qp = cfg.qp;
  p.bits_total = enc.bitstream.size_bits();
  p.bits_per_pixel =
      static_cast<double>(p.bits_total) / static_cast<double>(img.width * img.height);
  p.psnr_db = std::min(psnr(img, dec), kPsnrCap);
  return p;
}

}  // namespace

std::vector<RDPoint> rd_sweep(const DepthImage& img, Method method, std::span<const int> qps,
                              const SweepConfig& config) {
  std::vector<std::future<RDPoint>> jobs;
  for (const int qp : qps) {
    CodecConfig cfg;
    cfg.method = method;
    cfg.qp = qp;
    cfg.w = method == Method::kWgft ? config.w_pos : config.w;
    cfg.contour_threshold = config.contour_threshold;
    jobs.push_back(std::async(std::launch::async, [&img, cfg] { return run_point(img, cfg); }));
  }
  std::vector<RDPoint> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::vector<double> w_search_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
  return grid;
}

WSearch search_w(const DepthImage& img, int qp, int contour_threshold) {
  const auto grid = w_search_grid();
  std::vector<std::future<RDPoint>> jobs;
  for (const double w : grid) {
    CodecConfig cfg;
    cfg.method = Method::kSgft;
    cfg.qp = qp;
    cfg.w = w;
    cfg.contour_threshold = contour_threshold;
    jobs.push_back(std::async(std::launch::async, [&img, cfg] { return run_point(img, cfg); }));
  }
  WSearch best;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const RDPoint p = jobs[i].get();
    const bool better = i == 0 || p.psnr_db > best.psnr_db ||
                        (p.psnr_db == best.psnr_db && p.bits_total < best.bits_total);
    if (better) best = {grid[i], p.psnr_db, p.bits_total};
  }
  return best;
}

void write_csv(std::ostream& out, std::span<const RDPoint> points,
               std::span<const std::pair<std::string, std::string>> metadata) {
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  out << "method,qp,bpp,psnr\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed;
  for (const auto& p : points) {
    out << method_name(p.method) << ',' << p.qp << ',' << std::setprecision(6)
        << p.bits_per_pixel << ',' << std::setprecision(4) << p.psnr_db << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

std::vector<RDPoint> operational_curve(std::span<const RDPoint> points) {
  std::vector<RDPoint> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const RDPoint& a, const RDPoint& b) {
    if (a.bits_total != b.bits_total) return a.bits_total < b.bits_total;
    return a.psnr_db > b.psnr_db;
  });
  std::vector<RDPoint> out;
  for (const RDPoint& p : pts) {
    if (out.empty() || p.psnr_db > out.back().psnr_db) out.push_back(p);
  }
  return out;
}

std::optional<double> psnr_at_bpp(std::span<const RDPoint> curve, double bpp) {
  std::vector<RDPoint> pts(curve.begin(), curve.end());
  if (pts.empty()) return std::nullopt;
  std::sort(pts.begin(), pts.end(), [](const RDPoint& a, const RDPoint& b) {
    return a.bits_per_pixel < b.bits_per_pixel;
  });
  if (bpp < pts.front().bits_per_pixel || bpp > pts.back().bits_per_pixel) return std::nullopt;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const RDPoint& a = pts[i];
    const RDPoint& b = pts[i + 1];
    if (bpp > b.bits_per_pixel) continue;
    const double span = b.bits_per_pixel - a.bits_per_pixel;
    if (span <= 0.0) return std::max(a.psnr_db, b.psnr_db);
    const double t = (bpp - a.bits_per_pixel) / span;
    return a.psnr_db + t * (b.psnr_db - a.psnr_db);
  }
  return pts.back().psnr_db;
}

}  // namespace sgft
