#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sgft/contour_map.hpp"

namespace sgft {

// MSB-first bit packing.
class BitWriter {
 public:
  void write(bool bit);
  void write_bits(std::uint32_t value, int count);
  std::size_t bit_count() const { return bits_; }
  // Pads the final byte with zeros.
  std::vector<std::uint8_t> finish() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  // Throws kTruncatedStream past the end.
  bool read();
  std::uint32_t read_bits(int count);
  std::size_t bits_consumed() const { return bits_; }
  std::size_t bytes_consumed() const { return (bits_ + 7) / 8; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

// Frequency-count probability model: counts start at (1, 1) and both halve
// once their sum reaches 2^15.
struct AdaptiveBitModel {
  std::uint32_t zeros = 1;
  std::uint32_t ones = 1;

  void update(bool bit);
  double p_one() const { return static_cast<double>(ones) / (zeros + ones); }
};

// 32-bit binary range coder with carry propagation; renormalizes whenever
// range < 2^24. The implicit leading zero byte is not stored and the final
// interval is closed with a single byte, so a decoder legitimately reads up
// to three bytes past the end (as zeros).
class RangeEncoder {
 public:
  void encode(bool bit, AdaptiveBitModel& model);
  void encode_bypass(bool bit);
  void encode_bypass_bits(std::uint32_t value, int count);
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();
  void normalize();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  bool first_byte_ = true;
  bool any_symbol_ = false;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  // All decode calls throw kTruncatedStream once the coder needs more than
  // the three implicit trailing zero bytes.
  bool decode(AdaptiveBitModel& model);
  bool decode_bypass();
  std::uint32_t decode_bypass_bits(int count);

 private:
  std::uint8_t next_byte();
  void normalize();
  void check();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::size_t phantom_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

struct ContextBit {
  bool bit = false;
  std::uint32_t context = 0;
};

// One adaptive model per distinct context id. Empty input -> empty output.
std::vector<std::uint8_t> ac_encode(std::span<const ContextBit> symbols);
std::vector<bool> ac_decode(std::span<const std::uint8_t> bytes,
                            std::span<const std::uint32_t> contexts);

// --- Contour chains -------------------------------------------------------

// Directions on the pixel-corner lattice; y grows downward.
enum class Direction : std::uint8_t { kEast = 0, kSouth = 1, kWest = 2, kNorth = 3 };
enum class Turn : std::uint8_t { kStraight = 0, kLeft = 1, kRight = 2 };

// A walk along pixel-corner edges. Each traversed edge is one broken link.
// The walk covers 1 + turns.size() edges.
struct ContourChain {
  std::uint32_t x = 0;  // start corner, 0..width
  std::uint32_t y = 0;  // start corner, 0..height
  Direction first = Direction::kEast;
  std::vector<Turn> turns;

  bool operator==(const ContourChain&) const = default;
};

// Decomposes the broken links into chains: odd-degree corners start first,
// each step prefers straight, then left, then right.
std::vector<ContourChain> trace_chains(const ContourMap& map);

// Marks every edge of every chain. Throws kOutOfBounds when a chain steps on
// an edge that is not a link between two image pixels.
ContourMap chains_to_map(std::span<const ContourChain> chains, std::size_t width,
                         std::size_t height);

// Payload: LEB128 chain count; then per chain the start corner and first
// direction as fixed-length binary (byte aligned); then an arithmetic-coded
// move stream whose contexts depend on the previous move. An empty set is
// the single byte 0x00.
std::vector<std::uint8_t> encode_contours(std::span<const ContourChain> chains,
                                          std::size_t width, std::size_t height);
std::vector<ContourChain> decode_chains(std::span<const std::uint8_t> bytes,
                                        std::size_t width, std::size_t height);
ContourMap decode_contours(std::span<const std::uint8_t> bytes, std::size_t width,
                           std::size_t height);

// --- Quantized coefficients ----------------------------------------------

// Context state for one coefficient family (e.g. 8x8 DCT or 4x4 graph).
struct CoefficientContexts {
  static constexpr std::size_t kBuckets = 8;
  static constexpr std::size_t kPrefixContexts = 16;

  AdaptiveBitModel significance[kBuckets];
  AdaptiveBitModel prefix[kPrefixContexts];
};

// Scan positions 0, 1, 2-3, 4-7, 8-15, 16-31, 32-63, 64+.
std::size_t position_bucket(std::size_t position);

// Per coefficient: significance flag; if set, a bypass sign bit and
// |c| - 1 as order-0 Exp-Golomb (adaptive prefix, bypass suffix).
void encode_block_coeffs(RangeEncoder& enc, CoefficientContexts& ctx,
                         std::span<const std::int32_t> coeffs);
std::vector<std::int32_t> decode_block_coeffs(RangeDecoder& dec, CoefficientContexts& ctx,
                                              std::size_t count);

std::vector<std::uint8_t> encode_coeffs(std::span<const std::int32_t> coeffs);
std::vector<std::int32_t> decode_coeffs(std::span<const std::uint8_t> bytes,
                                        std::size_t count);

}  // namespace sgft
