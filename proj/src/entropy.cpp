#include "sgft/entropy.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "sgft/error.hpp"

namespace sgft {

// --- Bit packing -----------------------------------------------------------

void BitWriter::write(bool bit) {
  if (bits_ % 8 == 0) bytes_.push_back(0);
  if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
  ++bits_;
}

void BitWriter::write_bits(std::uint32_t value, int count) {
  for (int i = count - 1; i >= 0; --i) write(((value >> i) & 1u) != 0);
}

bool BitReader::read() {
  if (bits_ >= bytes_.size() * 8) {
    throw Error(ErrorCode::kTruncatedStream, "bit reader ran past end of data");
  }
  const bool bit = (bytes_[bits_ / 8] & (0x80u >> (bits_ % 8))) != 0;
  ++bits_;
  return bit;
}

std::uint32_t BitReader::read_bits(int count) {
  std::uint32_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | (read() ? 1u : 0u);
  return v;
}

// --- Range coder -------------------------------------------------------------

namespace {

constexpr std::uint32_t kTop = 1u << 24;
constexpr std::uint32_t kHalveAt = 1u << 15;
constexpr std::size_t kMaxPhantomBytes = 3;

}  // namespace

void AdaptiveBitModel::update(bool bit) {
  if (bit) {
    ++ones;
  } else {
    ++zeros;
  }
  if (zeros + ones >= kHalveAt) {
    zeros = (zeros + 1) / 2;
    ones = (ones + 1) / 2;
  }
}

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t temp = cache_;
    do {
      if (first_byte_) {
        first_byte_ = false;  // always zero: the code value lies in [0, 1)
      } else {
        out_.push_back(static_cast<std::uint8_t>(temp + carry));
      }
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::normalize() {
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::encode(bool bit, AdaptiveBitModel& model) {
  any_symbol_ = true;
  const std::uint32_t bound = (range_ / (model.zeros + model.ones)) * model.zeros;
  if (bit) {
    low_ += bound;
    range_ -= bound;
  } else {
    range_ = bound;
  }
  model.update(bit);
  normalize();
}

void RangeEncoder::encode_bypass(bool bit) {
  any_symbol_ = true;
  range_ >>= 1;
  if (bit) low_ += range_;
  normalize();
}

void RangeEncoder::encode_bypass_bits(std::uint32_t value, int count) {
  for (int i = count - 1; i >= 0; --i) encode_bypass(((value >> i) & 1u) != 0);
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  if (!any_symbol_) return {};
  // Pick the point of [low, low + range) whose low 24 bits are zero; range >=
  // 2^24 guarantees one exists. Only its top byte needs to be written.
  low_ = (low_ + 0x00FFFFFFu) & ~static_cast<std::uint64_t>(0x00FFFFFFu);
  shift_low();
  shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ < bytes_.size()) return bytes_[pos_++];
  ++phantom_;
  return 0;
}

void RangeDecoder::check() {
  if (phantom_ > kMaxPhantomBytes) {
    throw Error(ErrorCode::kTruncatedStream, "arithmetic-coded stream is truncated");
  }
}

void RangeDecoder::normalize() {
  while (range_ < kTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | next_byte();
  }
  check();
}

bool RangeDecoder::decode(AdaptiveBitModel& model) {
  check();
  const std::uint32_t bound = (range_ / (model.zeros + model.ones)) * model.zeros;
  bool bit;
  if (code_ < bound) {
    range_ = bound;
    bit = false;
  } else {
    code_ -= bound;
    range_ -= bound;
    bit = true;
  }
  model.update(bit);
  normalize();
  return bit;
}

bool RangeDecoder::decode_bypass() {
  check();
  range_ >>= 1;
  bool bit = false;
  if (code_ >= range_) {
    code_ -= range_;
    bit = true;
  }
  normalize();
  return bit;
}

std::uint32_t RangeDecoder::decode_bypass_bits(int count) {
  std::uint32_t v = 0;
  for (int i = 0; i < count; ++i) v = (v << 1) | (decode_bypass() ? 1u : 0u);
  return v;
}

std::vector<std::uint8_t> ac_encode(std::span<const ContextBit> symbols) {
  std::uint32_t max_ctx = 0;
  for (const auto& s : symbols) max_ctx = std::max(max_ctx, s.context);
  std::vector<AdaptiveBitModel> models(symbols.empty() ? 0 : max_ctx + 1);
  RangeEncoder enc;
  for (const auto& s : symbols) enc.encode(s.bit, models[s.context]);
  return enc.finish();
}

std::vector<bool> ac_decode(std::span<const std::uint8_t> bytes,
                            std::span<const std::uint32_t> contexts) {
  std::vector<bool> bits;
  if (contexts.empty()) return bits;
  const std::uint32_t max_ctx = *std::max_element(contexts.begin(), contexts.end());
  std::vector<AdaptiveBitModel> models(max_ctx + 1);
  RangeDecoder dec(bytes);
  bits.reserve(contexts.size());
  for (std::uint32_t c : contexts) bits.push_back(dec.decode(models[c]));
  return bits;
}

// --- Contour chains ----------------------------------------------------------

namespace {

struct LinkRef {
  bool horizontal = false;  // which ContourMap link family
  std::size_t x = 0;
  std::size_t y = 0;
  std::int64_t next_x = 0;
  std::int64_t next_y = 0;
};

// The pixel link crossed by the corner-lattice edge leaving (cx, cy) in
// direction d, if that edge separates two image pixels.
std::optional<LinkRef> edge_link(std::int64_t cx, std::int64_t cy, Direction d,
                                 std::size_t width, std::size_t height) {
  const auto w = static_cast<std::int64_t>(width);
  const auto h = static_cast<std::int64_t>(height);
  switch (d) {
    case Direction::kEast:
      if (cx >= 0 && cx < w && cy >= 1 && cy <= h - 1)
        return LinkRef{false, static_cast<std::size_t>(cx), static_cast<std::size_t>(cy - 1),
                       cx + 1, cy};
      break;
    case Direction::kWest:
      if (cx >= 1 && cx <= w && cy >= 1 && cy <= h - 1)
        return LinkRef{false, static_cast<std::size_t>(cx - 1),
                       static_cast<std::size_t>(cy - 1), cx - 1, cy};
      break;
    case Direction::kSouth:
      if (cx >= 1 && cx <= w - 1 && cy >= 0 && cy < h)
        return LinkRef{true, static_cast<std::size_t>(cx - 1), static_cast<std::size_t>(cy),
                       cx, cy + 1};
      break;
    case Direction::kNorth:
      if (cx >= 1 && cx <= w - 1 && cy >= 1 && cy <= h)
        return LinkRef{true, static_cast<std::size_t>(cx - 1),
                       static_cast<std::size_t>(cy - 1), cx, cy - 1};
      break;
  }
  return std::nullopt;
}

bool is_set(const ContourMap& m, const LinkRef& l) {
  return l.horizontal ? m.horizontal(l.x, l.y) : m.vertical(l.x, l.y);
}

void set_link(ContourMap& m, const LinkRef& l, bool broken) {
  if (l.horizontal) {
    m.set_horizontal(l.x, l.y, broken);
  } else {
    m.set_vertical(l.x, l.y, broken);
  }
}

Direction turned(Direction d, Turn t) {
  const int v = static_cast<int>(d);
  switch (t) {
    case Turn::kStraight: return d;
    case Turn::kLeft: return static_cast<Direction>((v + 3) % 4);
    case Turn::kRight: return static_cast<Direction>((v + 1) % 4);
  }
  return d;
}

constexpr std::array<Direction, 4> kAllDirections = {Direction::kEast, Direction::kSouth,
                                                     Direction::kWest, Direction::kNorth};
constexpr std::array<Turn, 3> kTurnPreference = {Turn::kStraight, Turn::kLeft, Turn::kRight};

std::optional<LinkRef> present_edge(const ContourMap& m, std::int64_t cx, std::int64_t cy,
                                    Direction d) {
  auto l = edge_link(cx, cy, d, m.width(), m.height());
  if (l && is_set(m, *l)) return l;
  return std::nullopt;
}

int corner_degree(const ContourMap& m, std::int64_t cx, std::int64_t cy) {
  int deg = 0;
  for (Direction d : kAllDirections)
    if (present_edge(m, cx, cy, d)) ++deg;
  return deg;
}

ContourChain trace_one(ContourMap& remaining, std::int64_t cx, std::int64_t cy) {
  ContourChain chain;
  chain.x = static_cast<std::uint32_t>(cx);
  chain.y = static_cast<std::uint32_t>(cy);
  std::optional<LinkRef> edge;
  for (Direction d : kAllDirections) {
    edge = present_edge(remaining, cx, cy, d);
    if (edge) {
      chain.first = d;
      break;
    }
  }
  Direction dir = chain.first;
  while (edge) {
    set_link(remaining, *edge, false);
    cx = edge->next_x;
    cy = edge->next_y;
    edge.reset();
    for (Turn t : kTurnPreference) {
      const Direction nd = turned(dir, t);
      edge = present_edge(remaining, cx, cy, nd);
      if (edge) {
        chain.turns.push_back(t);
        dir = nd;
        break;
      }
    }
  }
  return chain;
}

int bits_for(std::size_t values) {
  int b = 1;
  while ((std::size_t{1} << b) < values) ++b;
  return b;
}

void write_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  do {
    std::uint8_t byte = v & 0x7F;
    v >>= 7;
    if (v != 0) byte |= 0x80;
    out.push_back(byte);
  } while (v != 0);
}

std::uint64_t read_varint(std::span<const std::uint8_t> in, std::size_t& pos) {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    if (pos >= in.size()) {
      throw Error(ErrorCode::kTruncatedStream, "varint runs past end of data");
    }
    const std::uint8_t byte = in[pos++];
    v |= static_cast<std::uint64_t>(byte & 0x7F) << shift;
    if ((byte & 0x80) == 0) return v;
  }
  throw Error(ErrorCode::kTruncatedStream, "varint too long");
}

// Move alphabet: the three turns plus end-of-chain.
struct MoveContexts {
  // [previous turn][binarization step]
  AdaptiveBitModel m[3][3];
};

void encode_move(RangeEncoder& enc, MoveContexts& ctx, Turn prev, std::optional<Turn> move) {
  auto& c = ctx.m[static_cast<int>(prev)];
  const bool straight = move == Turn::kStraight;
  enc.encode(straight, c[0]);
  if (straight) return;
  const bool left = move == Turn::kLeft;
  enc.encode(left, c[1]);
  if (left) return;
  enc.encode(move == Turn::kRight, c[2]);
}

std::optional<Turn> decode_move(RangeDecoder& dec, MoveContexts& ctx, Turn prev) {
  auto& c = ctx.m[static_cast<int>(prev)];
  if (dec.decode(c[0])) return Turn::kStraight;
  if (dec.decode(c[1])) return Turn::kLeft;
  if (dec.decode(c[2])) return Turn::kRight;
  return std::nullopt;
}

// Walks the chain, calling on_edge for every traversed link.
template <typename OnEdge>
void walk_chain(const ContourChain& chain, std::size_t width, std::size_t height,
                OnEdge&& on_edge) {
  std::int64_t cx = chain.x, cy = chain.y;
  Direction dir = chain.first;
  for (std::size_t i = 0; i <= chain.turns.size(); ++i) {
    if (i > 0) dir = turned(dir, chain.turns[i - 1]);
    const auto l = edge_link(cx, cy, dir, width, height);
    if (!l) {
      throw Error(ErrorCode::kOutOfBounds, "contour chain leaves the image link lattice");
    }
    on_edge(*l);
    cx = l->next_x;
    cy = l->next_y;
  }
}

}  // namespace

std::vector<ContourChain> trace_chains(const ContourMap& map) {
  ContourMap remaining = map;
  std::vector<ContourChain> chains;
  const auto w = static_cast<std::int64_t>(map.width());
  const auto h = static_cast<std::int64_t>(map.height());
  for (int pass = 0; pass < 2; ++pass) {
    for (std::int64_t cy = 0; cy <= h; ++cy) {
      for (std::int64_t cx = 0; cx <= w; ++cx) {
        for (;;) {
          const int deg = corner_degree(remaining, cx, cy);
          const bool start = pass == 0 ? (deg % 2 == 1) : deg > 0;
          if (!start) break;
          chains.push_back(trace_one(remaining, cx, cy));
        }
      }
    }
  }
  return chains;
}

ContourMap chains_to_map(std::span<const ContourChain> chains, std::size_t width,
                         std::size_t height) {
  ContourMap map(width, height);
  for (const auto& c : chains)
    walk_chain(c, width, height, [&](const LinkRef& l) { set_link(map, l, true); });
  return map;
}

std::vector<std::uint8_t> encode_contours(std::span<const ContourChain> chains,
                                          std::size_t width, std::size_t height) {
  for (const auto& c : chains) walk_chain(c, width, height, [](const LinkRef&) {});

  std::vector<std::uint8_t> out;
  write_varint(out, chains.size());
  if (chains.empty()) return out;

  const int xbits = bits_for(width + 1);
  const int ybits = bits_for(height + 1);
  BitWriter starts;
  for (const auto& c : chains) {
    starts.write_bits(c.x, xbits);
    starts.write_bits(c.y, ybits);
    starts.write_bits(static_cast<std::uint32_t>(c.first), 2);
  }
  const auto start_bytes = starts.finish();
  out.insert(out.end(), start_bytes.begin(), start_bytes.end());

  RangeEncoder enc;
  MoveContexts ctx;
  for (const auto& c : chains) {
    Turn prev = Turn::kStraight;
    for (Turn t : c.turns) {
      encode_move(enc, ctx, prev, t);
      prev = t;
    }
    encode_move(enc, ctx, prev, std::nullopt);
  }
  const auto moves = enc.finish();
  out.insert(out.end(), moves.begin(), moves.end());
  return out;
}

std::vector<ContourChain> decode_chains(std::span<const std::uint8_t> bytes,
                                        std::size_t width, std::size_t height) {
  std::size_t pos = 0;
  const std::uint64_t count = read_varint(bytes, pos);
  std::vector<ContourChain> chains;
  if (count == 0) return chains;
  // Every chain covers at least one distinct link.
  const std::uint64_t max_links = 2ull * width * height;
  if (count > max_links) {
    throw Error(ErrorCode::kOutOfBounds, "contour chain count exceeds link count");
  }

  const int xbits = bits_for(width + 1);
  const int ybits = bits_for(height + 1);
  BitReader starts(bytes.subspan(pos));
  chains.resize(count);
  for (auto& c : chains) {
    c.x = starts.read_bits(xbits);
    c.y = starts.read_bits(ybits);
    c.first = static_cast<Direction>(starts.read_bits(2));
    if (c.x > width || c.y > height) {
      throw Error(ErrorCode::kOutOfBounds, "contour chain starts outside the image");
    }
  }
  pos += starts.bytes_consumed();

  RangeDecoder dec(bytes.subspan(pos));
  MoveContexts ctx;
  std::uint64_t total = 0;
  for (auto& c : chains) {
    Turn prev = Turn::kStraight;
    total += 1;
    while (auto t = decode_move(dec, ctx, prev)) {
      c.turns.push_back(*t);
      prev = *t;
      if (++total > max_links) {
        throw Error(ErrorCode::kOutOfBounds, "contour chains exceed the link count");
      }
    }
    walk_chain(c, width, height, [](const LinkRef&) {});
  }
  return chains;
}

ContourMap decode_contours(std::span<const std::uint8_t> bytes, std::size_t width,
                           std::size_t height) {
  const auto chains = decode_chains(bytes, width, height);
  return chains_to_map(chains, width, height);
}

// --- Coefficients --------------------------------------------------------------

std::size_t position_bucket(std::size_t position) {
  if (position == 0) return 0;
  std::size_t b = 1;
  while (b < CoefficientContexts::kBuckets - 1 && (std::size_t{1} << b) <= position) ++b;
  return b;
}

void encode_block_coeffs(RangeEncoder& enc, CoefficientContexts& ctx,
                         std::span<const std::int32_t> coeffs) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::int32_t c = coeffs[i];
    enc.encode(c != 0, ctx.significance[position_bucket(i)]);
    if (c == 0) continue;
    enc.encode_bypass(c < 0);
    // |c| - 1 in order-0 Exp-Golomb: value v = |c| has k = floor(log2 v)
    // prefix ones, a terminating zero, then the k low bits of v.
    const auto v = static_cast<std::uint32_t>(c < 0 ? -static_cast<std::int64_t>(c) : c);
    int k = 0;
    while ((v >> (k + 1)) != 0) ++k;
    for (int p = 0; p < k; ++p)
      enc.encode(true, ctx.prefix[std::min<std::size_t>(p, CoefficientContexts::kPrefixContexts - 1)]);
    enc.encode(false, ctx.prefix[std::min<std::size_t>(k, CoefficientContexts::kPrefixContexts - 1)]);
    if (k > 0) enc.encode_bypass_bits(v - (1u << k), k);
  }
}

std::vector<std::int32_t> decode_block_coeffs(RangeDecoder& dec, CoefficientContexts& ctx,
                                              std::size_t count) {
  std::vector<std::int32_t> out(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    if (!dec.decode(ctx.significance[position_bucket(i)])) continue;
    const bool negative = dec.decode_bypass();
    int k = 0;
    while (dec.decode(ctx.prefix[std::min<std::size_t>(k, CoefficientContexts::kPrefixContexts - 1)])) {
      if (++k > 30) {
        throw Error(ErrorCode::kTruncatedStream, "coefficient magnitude prefix too long");
      }
    }
    std::uint32_t v = 1u << k;
    if (k > 0) v += dec.decode_bypass_bits(k);
    const auto mag = static_cast<std::int32_t>(v);
    out[i] = negative ? -mag : mag;
  }
  return out;
}

std::vector<std::uint8_t> encode_coeffs(std::span<const std::int32_t> coeffs) {
  RangeEncoder enc;
  CoefficientContexts ctx;
  encode_block_coeffs(enc, ctx, coeffs);
  return enc.finish();
}

std::vector<std::int32_t> decode_coeffs(std::span<const std::uint8_t> bytes, std::size_t count) {
  RangeDecoder dec(bytes);
  CoefficientContexts ctx;
  return decode_block_coeffs(dec, ctx, count);
}

}  // namespace sgft
