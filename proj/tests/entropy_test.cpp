#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sgft/entropy.hpp"
#include "sgft/error.hpp"

using namespace sgft;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sgft::Error thrown";
  return ErrorCode::kIo;
}

std::vector<ContextBit> single_context(const std::vector<bool>& bits) {
  std::vector<ContextBit> out;
  for (bool b : bits) out.push_back({b, 0});
  return out;
}

std::vector<std::uint32_t> contexts_of(const std::vector<ContextBit>& s) {
  std::vector<std::uint32_t> out;
  for (const auto& c : s) out.push_back(c.context);
  return out;
}

std::vector<bool> bits_of(const std::vector<ContextBit>& s) {
  std::vector<bool> out;
  for (const auto& c : s) out.push_back(c.bit);
  return out;
}

// Random walk over unused link edges from a random corner.
ContourChain random_chain(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  for (;;) {
    ContourChain c;
    c.x = static_cast<std::uint32_t>(rng() % (w + 1));
    c.y = static_cast<std::uint32_t>(rng() % (h + 1));
    c.first = static_cast<Direction>(rng() % 4);
    const std::size_t len = 1 + rng() % 30;
    for (std::size_t i = 1; i < len; ++i) {
      ContourChain next = c;
      next.turns.push_back(static_cast<Turn>(rng() % 3));
      try {
        chains_to_map(std::span(&next, 1), w, h);
      } catch (const Error&) {
        break;
      }
      c = next;
    }
    try {
      chains_to_map(std::span(&c, 1), w, h);
      return c;
    } catch (const Error&) {
      // Start edge itself was illegal; draw again.
    }
  }
}

ContourMap random_map(std::mt19937_64& rng, std::size_t w, std::size_t h, int one_in) {
  ContourMap m(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      if (x + 1 < w && rng() % one_in == 0) m.set_horizontal(x, y);
      if (y + 1 < h && rng() % one_in == 0) m.set_vertical(x, y);
    }
  return m;
}

}  // namespace

// -----------------------------------------------------------------------------
// Bit packing
// -----------------------------------------------------------------------------

TEST(BitIo, RoundTripAndTruncation) {
  BitWriter w;
  w.write(true);
  w.write_bits(0x5, 3);
  w.write_bits(0x1234, 16);
  EXPECT_EQ(w.bit_count(), 20u);
  const auto bytes = w.finish();
  ASSERT_EQ(bytes.size(), 3u);
  EXPECT_EQ(bytes[0], 0xD1);  // 1 101 0001
  BitReader r(bytes);
  EXPECT_TRUE(r.read());
  EXPECT_EQ(r.read_bits(3), 0x5u);
  EXPECT_EQ(r.read_bits(16), 0x1234u);
  EXPECT_EQ(r.read_bits(4), 0u);  // padding
  EXPECT_EQ(code_of([&] { r.read(); }), ErrorCode::kTruncatedStream);
}

TEST(AdaptiveBitModel, CountsStartAtOneAndHalve) {
  AdaptiveBitModel m;
  EXPECT_EQ(m.p_one(), 0.5);
  for (int i = 0; i < (1 << 15) - 3; ++i) m.update(true);
  EXPECT_EQ(m.ones + m.zeros, (1u << 15) - 1);
  m.update(false);
  EXPECT_LT(m.ones + m.zeros, 1u << 15);
  EXPECT_EQ(m.zeros, 1u);
}

// -----------------------------------------------------------------------------
// Arithmetic coder
// -----------------------------------------------------------------------------

TEST(ArithmeticCoder, RandomBitsAreIncompressible) {
  std::mt19937_64 rng(1);
  std::vector<bool> bits(10000);
  for (auto&& b : bits) b = rng() & 1;
  const auto sym = single_context(bits);
  const auto bytes = ac_encode(sym);
  EXPECT_NEAR(static_cast<double>(bytes.size()), 1250.0, 0.02 * 1250.0);
  EXPECT_EQ(ac_decode(bytes, contexts_of(sym)), bits);
}

TEST(ArithmeticCoder, ZerosCompressWell) {
  const auto sym = single_context(std::vector<bool>(10000, false));
  const auto bytes = ac_encode(sym);
  EXPECT_LT(bytes.size(), 100u);
  EXPECT_EQ(ac_decode(bytes, contexts_of(sym)), std::vector<bool>(10000, false));
}

TEST(ArithmeticCoder, EmptyInput) {
  const auto bytes = ac_encode({});
  EXPECT_TRUE(bytes.empty());
  EXPECT_TRUE(ac_decode(bytes, {}).empty());
}

TEST(ArithmeticCoder, ManyContextsRoundTrip) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    std::vector<ContextBit> sym(rng() % 3000);
    for (auto& s : sym) {
      s.context = static_cast<std::uint32_t>(rng() % 7);
      s.bit = (rng() % 10) < s.context;
    }
    EXPECT_EQ(ac_decode(ac_encode(sym), contexts_of(sym)), bits_of(sym));
  }
}

TEST(ArithmeticCoder, BiasedBitsNearEntropy) {
  std::mt19937_64 rng(3);
  for (double p : {0.02, 0.1, 0.3}) {
    std::bernoulli_distribution bern(p);
    std::vector<bool> bits(100000);
    std::size_t ones = 0;
    for (auto&& b : bits) ones += (b = bern(rng));
    const double q = static_cast<double>(ones) / bits.size();
    const double bound = bits.size() * -(q * std::log2(q) + (1 - q) * std::log2(1 - q));
    const auto bytes = ac_encode(single_context(bits));
    EXPECT_LE(bytes.size() * 8.0, 1.05 * bound) << "p=" << p;
  }
}

TEST(ArithmeticCoder, BypassRoundTrip) {
  RangeEncoder enc;
  AdaptiveBitModel m;
  enc.encode_bypass_bits(0xABCDE, 20);
  enc.encode(true, m);
  enc.encode_bypass(false);
  const auto bytes = enc.finish();
  RangeDecoder dec(bytes);
  AdaptiveBitModel m2;
  EXPECT_EQ(dec.decode_bypass_bits(20), 0xABCDEu);
  EXPECT_TRUE(dec.decode(m2));
  EXPECT_FALSE(dec.decode_bypass());
}

TEST(ArithmeticCoder, TruncatedStream) {
  std::mt19937_64 rng(4);
  std::vector<bool> bits(4000);
  for (auto&& b : bits) b = rng() & 1;
  const auto sym = single_context(bits);
  auto bytes = ac_encode(sym);
  bytes.resize(bytes.size() / 2);
  EXPECT_EQ(code_of([&] { ac_decode(bytes, contexts_of(sym)); }), ErrorCode::kTruncatedStream);
}

// -----------------------------------------------------------------------------
// Contour chains
// -----------------------------------------------------------------------------

TEST(ContourCoding, StraightVerticalChain) {
  // 17 x 17 image, chain runs down the corner column x = 8 crossing 16 links.
  ContourChain c{8, 0, Direction::kSouth, std::vector<Turn>(15, Turn::kStraight)};
  const auto bytes = encode_contours(std::span(&c, 1), 17, 17);
  EXPECT_LT(bytes.size(), 8u);
  const auto back = decode_chains(bytes, 17, 17);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], c);
  EXPECT_EQ(decode_contours(bytes, 17, 17).link_count(), 16u);
}

TEST(ContourCoding, EmptySetIsOneByte) {
  const auto bytes = encode_contours({}, 64, 64);
  EXPECT_EQ(bytes, std::vector<std::uint8_t>{0x00});
  EXPECT_TRUE(decode_contours(bytes, 64, 64).empty());
}

TEST(ContourCoding, RandomChainsRoundTrip) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    std::vector<ContourChain> chains;
    const std::size_t n = 1 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) chains.push_back(random_chain(rng, 20, 13));
    const auto bytes = encode_contours(chains, 20, 13);
    EXPECT_EQ(decode_chains(bytes, 20, 13), chains);
  }
}

TEST(ContourCoding, ExhaustiveShortChainsOnEightByEight) {
  // Every start corner, first direction and up to three turns.
  std::size_t legal = 0;
  for (std::uint32_t y = 0; y <= 8; ++y)
    for (std::uint32_t x = 0; x <= 8; ++x)
      for (int d = 0; d < 4; ++d)
        for (int len = 0; len <= 3; ++len) {
          const int combos = static_cast<int>(std::pow(3, len));
          for (int code = 0; code < combos; ++code) {
            ContourChain c{x, y, static_cast<Direction>(d), {}};
            for (int i = 0, v = code; i < len; ++i, v /= 3) c.turns.push_back(static_cast<Turn>(v % 3));
            std::vector<std::uint8_t> bytes;
            try {
              bytes = encode_contours(std::span(&c, 1), 8, 8);
            } catch (const Error& e) {
              ASSERT_EQ(e.code(), ErrorCode::kOutOfBounds);
              continue;
            }
            ++legal;
            ASSERT_EQ(decode_chains(bytes, 8, 8), std::vector<ContourChain>{c});
          }
        }
  EXPECT_GT(legal, 1000u);
}

TEST(ContourCoding, MapsSurviveTraceAndCode) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 200; ++t) {
    const std::size_t w = 1 + rng() % 24, h = 1 + rng() % 24;
    const ContourMap m = random_map(rng, w, h, 1 + static_cast<int>(rng() % 6));
    const auto chains = trace_chains(m);
    EXPECT_EQ(chains_to_map(chains, w, h), m);
    EXPECT_EQ(decode_contours(encode_contours(chains, w, h), w, h), m);
  }
}

TEST(ContourCoding, OutOfBoundsChain) {
  // Along the image border there is no link to break.
  ContourChain border{0, 0, Direction::kEast, {}};
  EXPECT_EQ(code_of([&] { encode_contours(std::span(&border, 1), 8, 8); }),
            ErrorCode::kOutOfBounds);
  ContourChain runaway{4, 1, Direction::kSouth, std::vector<Turn>(10, Turn::kStraight)};
  EXPECT_EQ(code_of([&] { chains_to_map(std::span(&runaway, 1), 8, 8); }),
            ErrorCode::kOutOfBounds);
}

TEST(ContourCoding, CorruptPayloadsAreRejected) {
  // Chain count far larger than the lattice.
  const std::vector<std::uint8_t> huge = {0xFF, 0xFF, 0x03};
  EXPECT_EQ(code_of([&] { decode_contours(huge, 4, 4); }), ErrorCode::kOutOfBounds);
  // Count promises a chain but the start bits are missing.
  const std::vector<std::uint8_t> cut = {0x01};
  EXPECT_EQ(code_of([&] { decode_contours(cut, 8, 8); }), ErrorCode::kTruncatedStream);
  EXPECT_EQ(code_of([&] { decode_contours({}, 8, 8); }), ErrorCode::kTruncatedStream);
}

// -----------------------------------------------------------------------------
// Coefficients
// -----------------------------------------------------------------------------

TEST(CoefficientCoding, PositionBuckets) {
  const std::size_t expect[] = {0, 1, 2, 2, 3, 3, 3, 3, 4};
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(position_bucket(i), expect[i]);
  EXPECT_EQ(position_bucket(31), 5u);
  EXPECT_EQ(position_bucket(63), 6u);
  EXPECT_EQ(position_bucket(64), 7u);
  EXPECT_EQ(position_bucket(1000), 7u);
}

TEST(CoefficientCoding, AllZeroBlockIsTiny) {
  const std::vector<std::int32_t> zeros(16, 0);
  const auto bytes = encode_coeffs(zeros);
  EXPECT_LT(bytes.size(), 3u);
  EXPECT_EQ(decode_coeffs(bytes, 16), zeros);
}

TEST(CoefficientCoding, SingleNegativeFive) {
  std::vector<std::int32_t> c(16, 0);
  c[1] = -5;
  EXPECT_EQ(decode_coeffs(encode_coeffs(c), 16), c);
}

TEST(CoefficientCoding, RandomSparseBlocks) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = t % 2 ? 16 : 64;
    std::vector<std::int32_t> c(n, 0);
    for (auto& v : c) {
      if (rng() % 5 == 0) {
        const int mag = 1 + static_cast<int>(rng() % (rng() % 8 == 0 ? 100000 : 20));
        v = rng() & 1 ? mag : -mag;
      }
    }
    ASSERT_EQ(decode_coeffs(encode_coeffs(c), n), c);
  }
}

TEST(CoefficientCoding, ExtremeMagnitudes) {
  const std::vector<std::int32_t> c = {1 << 24, -(1 << 24), 1, -1, 0, (1 << 30)};
  EXPECT_EQ(decode_coeffs(encode_coeffs(c), c.size()), c);
}

TEST(CoefficientCoding, Truncated) {
  std::mt19937_64 rng(8);
  std::vector<std::int32_t> c(64);
  for (auto& v : c) v = static_cast<std::int32_t>(rng() % 2001) - 1000;
  auto bytes = encode_coeffs(c);
  bytes.resize(bytes.size() / 3);
  EXPECT_EQ(code_of([&] { decode_coeffs(bytes, 64); }), ErrorCode::kTruncatedStream);
}
