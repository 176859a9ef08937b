#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace trapdoor {

/// A binary symbol: channel state, input or output.
enum class Bit : std::uint8_t { kZero = 0, kOne = 1 };

constexpr Bit operator^(Bit a, Bit b) {
  return static_cast<Bit>(static_cast<std::uint8_t>(a) ^
                          static_cast<std::uint8_t>(b));
}

constexpr Bit operator~(Bit a) { return a ^ Bit::kOne; }

constexpr int to_int(Bit b) { return static_cast<int>(b); }

/// Throws std::invalid_argument unless v is 0 or 1.
Bit bit_from_int(int v);

/// '0' or '1'; throws std::invalid_argument otherwise.
Bit bit_from_char(char c);

constexpr char to_char(Bit b) { return b == Bit::kZero ? '0' : '1'; }

/// The ball held by the trapdoor channel before the next input.
using ChannelState = Bit;

/// Random source used throughout the library, always passed by reference.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw, so
/// results do not depend on the standard library's distribution code.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by rejection, n > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

/// Fair coin from one draw.
inline Bit fair_bit(Rng& rng) {
  return (rng() >> 63) != 0 ? Bit::kOne : Bit::kZero;
}

namespace channel {

struct ChannelStep {
  Bit input;
  Bit output;
  ChannelState next_state;
};

/// p(y | x, s) of the trapdoor channel. Exactly one of {0, 0.5, 1}.
double output_prob(Bit x, ChannelState s, Bit y);

/// True when the tuple has positive probability.
bool feasible(ChannelState s, Bit x, Bit y);

/// s ^ x ^ y for a feasible tuple. Throws std::domain_error otherwise.
ChannelState next_state(ChannelState s, Bit x, Bit y);

/// One channel use: inserts x, releases one of the two held balls uniformly.
ChannelStep sample_step(ChannelState s, Bit x, Rng& rng);

}  // namespace channel
}  // namespace trapdoor
