#include "sgft/codec.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "sgft/entropy.hpp"
#include "sgft/error.hpp"

namespace sgft {

const char* method_name(Method m) {
  switch (m) {
    case Method::kSgft: return "SGFT";
    case Method::kWgft: return "WGFT";
    case Method::kDct: return "DCT";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "sgft") return Method::kSgft;
  if (s == "wgft") return Method::kWgft;
  if (s == "dct") return Method::kDct;
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + name + "'");
}

ContourMap detect_contours(const DepthImage& img, int threshold) {
  if (threshold < 1) {
    throw Error(ErrorCode::kInvalidArgument, "contour threshold must be >= 1");
  }
  const std::size_t w = img.width, h = img.height;
  ContourMap map(w, h);
  auto differs = [&](std::uint8_t a, std::uint8_t b) {
    return std::abs(static_cast<int>(a) - static_cast<int>(b)) >= threshold;
  };
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      if (x + 1 < w && differs(img.at(x, y), img.at(x + 1, y))) map.set_horizontal(x, y);
      if (y + 1 < h && differs(img.at(x, y), img.at(x, y + 1))) map.set_vertical(x, y);
    }

  // Each link is an edge of the pixel-corner lattice. A link is isolated
  // when both of its corners have degree 1.
  const std::size_t cw = w + 1;
  std::vector<int> degree(cw * (h + 1), 0);
  auto corner = [cw](std::size_t cx, std::size_t cy) { return cy * cw + cx; };
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      if (x + 1 < w && map.horizontal(x, y)) {
        ++degree[corner(x + 1, y)];
        ++degree[corner(x + 1, y + 1)];
      }
      if (y + 1 < h && map.vertical(x, y)) {
        ++degree[corner(x, y + 1)];
        ++degree[corner(x + 1, y + 1)];
      }
    }
  ContourMap cleaned(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      if (x + 1 < w && map.horizontal(x, y) &&
          (degree[corner(x + 1, y)] > 1 || degree[corner(x + 1, y + 1)] > 1))
        cleaned.set_horizontal(x, y);
      if (y + 1 < h && map.vertical(x, y) &&
          (degree[corner(x, y + 1)] > 1 || degree[corner(x + 1, y + 1)] > 1))
        cleaned.set_vertical(x, y);
    }
  return cleaned;
}

Block intra_predict(const DepthImage& reconstructed, const ContourMap& contours,
                    std::size_t x0, std::size_t y0, std::size_t size) {
  if (x0 + size > reconstructed.width || y0 + size > reconstructed.height) {
    throw Error(ErrorCode::kOutOfBounds, "prediction block extends past image");
  }
  Block pred = Block::zeros(size);
  const bool has_top = y0 > 0;
  const bool has_left = x0 > 0;
  if (!has_top && !has_left) {
    std::fill(pred.pixels.begin(), pred.pixels.end(), kPredictionFallback);
    return pred;
  }

  const std::size_t n = size * size;
  std::vector<double> value(n, 0.0);
  std::vector<bool> reached(n, false);
  std::deque<std::size_t> queue;
  double reach_sum = 0.0, all_sum = 0.0;
  std::size_t reach_count = 0, all_count = 0;

  auto seed = [&](std::size_t pixel, double sample, bool link_broken) {
    all_sum += sample;
    ++all_count;
    if (link_broken) return;
    reach_sum += sample;
    ++reach_count;
    if (!reached[pixel]) {
      reached[pixel] = true;
      value[pixel] = sample;
      queue.push_back(pixel);
    }
  };
  if (has_top)
    for (std::size_t x = 0; x < size; ++x)
      seed(x, reconstructed.at(x0 + x, y0 - 1), contours.vertical(x0 + x, y0 - 1));
  if (has_left)
    for (std::size_t y = 0; y < size; ++y)
      seed(y * size, reconstructed.at(x0 - 1, y0 + y), contours.horizontal(x0 - 1, y0 + y));

  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    const std::size_t px = p % size, py = p / size;
    constexpr int kSteps[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto& step : kSteps) {
      const auto nx = static_cast<std::int64_t>(px) + step[0];
      const auto ny = static_cast<std::int64_t>(py) + step[1];
      if (nx < 0 || ny < 0 || nx >= static_cast<std::int64_t>(size) ||
          ny >= static_cast<std::int64_t>(size))
        continue;
      const auto q = static_cast<std::size_t>(ny) * size + static_cast<std::size_t>(nx);
      if (reached[q]) continue;
      if (contours.broken_between(x0 + px, y0 + py, step[0], step[1])) continue;
      reached[q] = true;
      value[q] = value[p];
      queue.push_back(q);
    }
  }

  const double fallback = reach_count > 0 ? reach_sum / static_cast<double>(reach_count)
                          : all_count > 0 ? all_sum / static_cast<double>(all_count)
                                          : kPredictionFallback;
  for (std::size_t i = 0; i < n; ++i) pred.pixels[i] = reached[i] ? value[i] : fallback;
  return pred;
}

double quantizer_step(int qp) {
  if (qp < 0 || qp > 51) {
    throw Error(ErrorCode::kInvalidArgument, "qp must lie in [0, 51]");
  }
  return std::exp2((qp - 4) / 6.0);
}

std::vector<std::int32_t> quantize(std::span<const double> coeffs, int qp) {
  const double step = quantizer_step(qp);
  constexpr double kMaxLevel = 1 << 24;
  std::vector<std::int32_t> out(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double level = std::clamp(std::round(coeffs[i] / step), -kMaxLevel, kMaxLevel);
    out[i] = static_cast<std::int32_t>(level);
  }
  return out;
}

std::vector<double> dequantize(std::span<const std::int32_t> levels, int qp) {
  const double step = quantizer_step(qp);
  std::vector<double> out(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) out[i] = levels[i] * step;
  return out;
}

DepthImage pad_to_multiple(const DepthImage& img, std::size_t multiple) {
  const std::size_t pw = (img.width + multiple - 1) / multiple * multiple;
  const std::size_t ph = (img.height + multiple - 1) / multiple * multiple;
  DepthImage out(pw, ph);
  for (std::size_t y = 0; y < ph; ++y)
    for (std::size_t x = 0; x < pw; ++x)
      out.at(x, y) = img.at(std::min(x, img.width - 1), std::min(y, img.height - 1));
  return out;
}

namespace {

void validate(const CodecConfig& c) {
  if (c.qp < 0 || c.qp > 51) throw Error(ErrorCode::kInvalidArgument, "qp must lie in [0, 51]");
  if (!(c.w > 0.0 && c.w <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "w must lie in (0, 1]");
  if (std::lround(c.w / kWeightStep) < 1) {
    throw Error(ErrorCode::kInvalidArgument, "w rounds to zero in 1/256 fixed point");
  }
  if (c.contour_threshold < 1 || c.contour_threshold > 255) {
    throw Error(ErrorCode::kInvalidArgument, "contour threshold must lie in [1, 255]");
  }
}

struct PayloadContexts {
  AdaptiveBitModel mode;
  CoefficientContexts dct;
  CoefficientContexts graph;
};

// State shared by the encoder and decoder reconstruction loops. Both sides
// run exactly this code on the same levels, which is what keeps them in
// lock-step.
class BlockCoder {
 public:
  BlockCoder(const CodecConfig& config, const ContourMap& contours, DepthImage& recon,
             BasisCache* cache)
      : config_(config), contours_(contours), recon_(recon), cache_(cache) {}

  bool is_graph_block(std::size_t x0, std::size_t y0) const {
    return config_.method != Method::kDct && contours_.any_in_block(x0, y0, kDctBlock);
  }

  Block predict(std::size_t x0, std::size_t y0, std::size_t size) const {
    return intra_predict(recon_, contours_, x0, y0, size);
  }

  CoeffBlock forward(const Block& residual, std::size_t x0, std::size_t y0) const {
    if (residual.size == kDctBlock) return dct_forward(residual);
    const BlockContour c = contours_.block_view(x0, y0, residual.size);
    return config_.method == Method::kSgft ? sgft_forward(residual, c, config_.w, cache_)
                                           : wgft_forward(residual, c, config_.w, cache_);
  }

  void reconstruct(const Block& pred, std::span<const std::int32_t> levels, std::size_t x0,
                   std::size_t y0) {
    const std::size_t size = pred.size;
    const CoeffBlock deq{size, dequantize(levels, config_.qp)};
    Block residual;
    if (size == kDctBlock) {
      residual = dct_inverse(deq);
    } else {
      const BlockContour c = contours_.block_view(x0, y0, size);
      residual = config_.method == Method::kSgft ? sgft_inverse(deq, c, config_.w, cache_)
                                                 : wgft_inverse(deq, c, config_.w, cache_);
    }
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x) {
        const double v = std::round(pred.at(x, y) + residual.at(x, y));
        recon_.at(x0 + x, y0 + y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
  }

 private:
  const CodecConfig& config_;
  const ContourMap& contours_;
  DepthImage& recon_;
  BasisCache* cache_;
};

void put_u16(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  put_u16(out, v & 0xFFFF);
  put_u16(out, v >> 16);
}

std::uint32_t get_u16(std::span<const std::uint8_t> in, std::size_t pos) {
  return static_cast<std::uint32_t>(in[pos]) | (static_cast<std::uint32_t>(in[pos + 1]) << 8);
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t pos) {
  return get_u16(in, pos) | (get_u16(in, pos + 2) << 16);
}

DepthImage crop(const DepthImage& padded, std::size_t w, std::size_t h) {
  DepthImage out(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) out.at(x, y) = padded.at(x, y);
  return out;
}

}  // namespace

EncodeResult encode(const DepthImage& img, const CodecConfig& config, BasisCache* cache) {
  validate(config);
  if (img.width == 0 || img.height == 0 || img.width > 0xFFFF || img.height > 0xFFFF ||
      img.samples.size() != img.width * img.height) {
    throw Error(ErrorCode::kInvalidArgument, "image dimensions must lie in [1, 65535]");
  }
  CodecConfig cfg = config;
  cfg.w = quantize_weight(config.w);

  const DepthImage padded = pad_to_multiple(img, kDctBlock);
  const ContourMap contours = detect_contours(padded, cfg.contour_threshold);
  const auto contour_payload =
      encode_contours(trace_chains(contours), padded.width, padded.height);

  EncodeResult result;
  DepthImage recon(padded.width, padded.height);
  BlockCoder coder(cfg, contours, recon, cache);
  PayloadContexts ctx;
  RangeEncoder enc;

  auto code_block = [&](std::size_t x0, std::size_t y0, std::size_t size,
                        CoefficientContexts& cctx) {
    const Block pred = coder.predict(x0, y0, size);
    Block residual = Block::zeros(size);
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x)
        residual.at(x, y) = padded.at(x0 + x, y0 + y) - pred.at(x, y);
    const CoeffBlock coeffs = coder.forward(residual, x0, y0);
    const auto levels = quantize(coeffs.coeffs, cfg.qp);
    encode_block_coeffs(enc, cctx, levels);
    result.stats.significant_coeffs += static_cast<std::size_t>(
        std::count_if(levels.begin(), levels.end(), [](std::int32_t l) { return l != 0; }));
    coder.reconstruct(pred, levels, x0, y0);
  };

  for (std::size_t by = 0; by < padded.height; by += kDctBlock) {
    for (std::size_t bx = 0; bx < padded.width; bx += kDctBlock) {
      const bool graph = coder.is_graph_block(bx, by);
      enc.encode(graph, ctx.mode);
      result.modes.push_back(graph ? 1 : 0);
      if (!graph) {
        ++result.stats.dct_blocks;
        code_block(bx, by, kDctBlock, ctx.dct);
        continue;
      }
      ++result.stats.graph_blocks;
      for (std::size_t sy = 0; sy < kDctBlock; sy += kGraphBlock)
        for (std::size_t sx = 0; sx < kDctBlock; sx += kGraphBlock)
          code_block(bx + sx, by + sy, kGraphBlock, ctx.graph);
    }
  }
  const auto block_payload = enc.finish();

  auto& out = result.bitstream.bytes;
  out = {'S', 'G', 'F', 'T', kBitstreamVersion, static_cast<std::uint8_t>(cfg.method)};
  put_u16(out, static_cast<std::uint32_t>(img.width));
  put_u16(out, static_cast<std::uint32_t>(img.height));
  out.push_back(static_cast<std::uint8_t>(cfg.qp));
  out.push_back(static_cast<std::uint8_t>(cfg.contour_threshold));
  put_u16(out, static_cast<std::uint32_t>(std::lround(cfg.w / kWeightStep)));
  put_u32(out, static_cast<std::uint32_t>(contour_payload.size()));
  out.insert(out.end(), contour_payload.begin(), contour_payload.end());
  put_u32(out, static_cast<std::uint32_t>(block_payload.size()));
  out.insert(out.end(), block_payload.begin(), block_payload.end());

  result.stats.contour_bytes = contour_payload.size();
  result.reconstruction = crop(recon, img.width, img.height);
  return result;
}

DecodeResult decode_stream(std::span<const std::uint8_t> bytes, BasisCache* cache) {
  if (bytes.size() < kHeaderBytes) {
    if (bytes.size() >= 4 && !std::equal(bytes.begin(), bytes.begin() + 4, "SGFT")) {
      throw Error(ErrorCode::kMalformedHeader, "bad magic");
    }
    throw Error(ErrorCode::kTruncatedPayload, "stream shorter than the header");
  }
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "SGFT")) {
    throw Error(ErrorCode::kMalformedHeader, "bad magic");
  }
  if (bytes[4] != kBitstreamVersion) {
    throw Error(ErrorCode::kMalformedHeader, "unsupported bitstream version");
  }
  if (bytes[5] > static_cast<std::uint8_t>(Method::kDct)) {
    throw Error(ErrorCode::kMalformedHeader, "unknown transform method");
  }
  DecodeResult result;
  CodecConfig& cfg = result.config;
  cfg.method = static_cast<Method>(bytes[5]);
  const std::size_t width = get_u16(bytes, 6);
  const std::size_t height = get_u16(bytes, 8);
  cfg.qp = bytes[10];
  cfg.contour_threshold = bytes[11];
  const std::uint32_t w_fixed = get_u16(bytes, 12);
  cfg.w = w_fixed * kWeightStep;
  if (width == 0 || height == 0 || cfg.qp > 51 || cfg.contour_threshold == 0 || w_fixed == 0 ||
      w_fixed > 256) {
    throw Error(ErrorCode::kMalformedHeader, "header field out of range");
  }

  std::size_t pos = 14;
  const std::size_t contour_len = get_u32(bytes, pos);
  pos += 4;
  if (bytes.size() - pos < contour_len) {
    throw Error(ErrorCode::kTruncatedPayload, "contour payload is truncated");
  }
  const auto contour_bytes = bytes.subspan(pos, contour_len);
  pos += contour_len;
  if (bytes.size() - pos < 4) {
    throw Error(ErrorCode::kTruncatedPayload, "block payload length is missing");
  }
  const std::size_t block_len = get_u32(bytes, pos);
  pos += 4;
  if (bytes.size() - pos < block_len) {
    throw Error(ErrorCode::kTruncatedPayload, "block payload is truncated");
  }
  if (bytes.size() - pos > block_len) {
    throw Error(ErrorCode::kMalformedHeader, "trailing bytes after block payload");
  }
  const auto block_bytes = bytes.subspan(pos, block_len);

  const std::size_t pw = (width + kDctBlock - 1) / kDctBlock * kDctBlock;
  const std::size_t ph = (height + kDctBlock - 1) / kDctBlock * kDctBlock;
  try {
    result.contours = decode_contours(contour_bytes, pw, ph);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kTruncatedStream) {
      throw Error(ErrorCode::kTruncatedPayload, std::string("contour payload: ") + e.what());
    }
    throw;
  }

  DepthImage recon(pw, ph);
  BlockCoder coder(cfg, result.contours, recon, cache);
  PayloadContexts ctx;
  try {
    RangeDecoder dec(block_bytes);
    auto decode_block = [&](std::size_t x0, std::size_t y0, std::size_t size,
                            CoefficientContexts& cctx) {
      const Block pred = coder.predict(x0, y0, size);
      const auto levels = decode_block_coeffs(dec, cctx, size * size);
      coder.reconstruct(pred, levels, x0, y0);
    };
    for (std::size_t by = 0; by < ph; by += kDctBlock) {
      for (std::size_t bx = 0; bx < pw; bx += kDctBlock) {
        const bool graph = dec.decode(ctx.mode);
        if (graph != coder.is_graph_block(bx, by)) {
          throw Error(ErrorCode::kMalformedHeader,
                      "block mode disagrees with the coded contours");
        }
        result.modes.push_back(graph ? 1 : 0);
        if (!graph) {
          decode_block(bx, by, kDctBlock, ctx.dct);
          continue;
        }
        for (std::size_t sy = 0; sy < kDctBlock; sy += kGraphBlock)
          for (std::size_t sx = 0; sx < kDctBlock; sx += kGraphBlock)
            decode_block(bx + sx, by + sy, kGraphBlock, ctx.graph);
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kTruncatedStream) {
      throw Error(ErrorCode::kTruncatedPayload, std::string("block payload: ") + e.what());
    }
    throw;
  }
  result.image = crop(recon, width, height);
  return result;
}

DepthImage decode(const Bitstream& bs, BasisCache* cache) {
  return decode_stream(bs.bytes, cache).image;
}

}  // namespace sgft
