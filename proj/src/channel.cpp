#include "trapdoor/channel.hpp"

#include <stdexcept>

namespace trapdoor {

Bit bit_from_int(int v) {
  if (v == 0) return Bit::kZero;
  if (v == 1) return Bit::kOne;
  throw std::invalid_argument("bit must be 0 or 1, got " + std::to_string(v));
}

Bit bit_from_char(char c) {
  if (c == '0') return Bit::kZero;
  if (c == '1') return Bit::kOne;
  throw std::invalid_argument(std::string("bit must be '0' or '1', got '") +
                              c + "'");
}

namespace channel {

double output_prob(Bit x, ChannelState s, Bit y) {
  if (x == s) return y == x ? 1.0 : 0.0;
  // Balls of both kinds are in the channel: each exits with probability 1/2.
  return 0.5;
}

bool feasible(ChannelState s, Bit x, Bit y) {
  return output_prob(x, s, y) > 0.0;
}

ChannelState next_state(ChannelState s, Bit x, Bit y) {
  if (!feasible(s, x, y)) {
    throw std::domain_error(
        std::string("infeasible channel tuple (s=") + to_char(s) +
        ", x=" + to_char(x) + ", y=" + to_char(y) + ")");
  }
  return s ^ x ^ y;
}

ChannelStep sample_step(ChannelState s, Bit x, Rng& rng) {
  const Bit y = (x == s) ? x : fair_bit(rng);
  return ChannelStep{x, y, s ^ x ^ y};
}

}  // namespace channel
}  // namespace trapdoor
