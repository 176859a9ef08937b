#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trapdoor/channel.hpp"

namespace trapdoor::codec {

/// Largest block length whose codebook size fits in 64 bits
/// (codebook_size(92) = F(93) = 12200160415121876738).
inline constexpr int kMaxBlockLength = 92;

using BitWord = std::vector<Bit>;

BitWord parse_word(std::string_view ascii);
std::string format_word(const BitWord& w);

/// Packs bits MSB-first; the final byte is zero-padded.
std::vector<std::uint8_t> pack_word(const BitWord& w);
BitWord unpack_word(const std::vector<std::uint8_t>& bytes, std::size_t bits);

/// Codeword of relative actions: bit k is 1 when the k-th input ball is the
/// opposite of the channel state. No "11" anywhere and the last bit is 0.
class ActionSequence {
 public:
  /// Throws std::invalid_argument if the word violates the constraint.
  explicit ActionSequence(BitWord bits);
  static ActionSequence parse(std::string_view ascii);

  static bool valid(const BitWord& bits);

  std::size_t size() const { return bits_.size(); }
  Bit operator[](std::size_t k) const { return bits_[k]; }
  const BitWord& bits() const { return bits_; }
  std::string str() const { return format_word(bits_); }

  friend bool operator==(const ActionSequence&, const ActionSequence&) = default;

 private:
  BitWord bits_;
};

/// XORs of consecutive outputs y_k ^ y_{k-1} for k >= 2 (1-based). The first
/// entry is undefined and not stored.
class DifferentialOutput {
 public:
  explicit DifferentialOutput(const BitWord& y);

  std::size_t block_length() const { return diffs_.size() + 1; }
  /// ~y_k for 1-based k; std::nullopt for k = 1.
  std::optional<Bit> at(std::size_t k) const;
  /// Rendered with '*' in the undefined first position.
  std::string str() const;

 private:
  BitWord diffs_;
};

struct Message {
  std::uint64_t index = 0;
  int block_length = 1;
};

/// Number of valid action sequences of length n, from the recursion
/// N0_{n+1} = N0_n + N1_n, N1_{n+1} = N0_n. Throws std::overflow_error above
/// kMaxBlockLength and std::invalid_argument for n < 1.
std::uint64_t codebook_size(int n);

/// The index-th valid sequence of the given length in lexicographic order.
/// Throws std::out_of_range if index >= codebook_size.
ActionSequence unrank(const Message& m);

/// Lexicographic index of c; inverse of unrank.
Message rank(const ActionSequence& c);

/// Channel input for action bit a in state s: a ^ s.
inline Bit encode_step(Bit action, ChannelState s) { return action ^ s; }

enum class DecodeCase { kGiven, kCase1, kCase2, kCase1Or2, kCase3 };

std::string_view case_label(DecodeCase c);

struct DecodeStep {
  std::size_t position = 0;  // 1-based k of the decided bit
  Bit decided = Bit::kZero;
  DecodeCase reason = DecodeCase::kGiven;
};

struct DecodeTrace {
  ActionSequence actions;
  std::vector<DecodeStep> steps;  // in decoding order, k = N down to 1
};

/**
 * Backward decoding from the last bit (0 by construction):
 *   ~y_{k+1} = 0            => a_k = 0
 *   a_{k+1} = 1             => a_k = 0
 *   ~y_{k+1} = 1, a_{k+1}=0 => a_k = 1
 * Any output word decodes to some valid sequence; no error detection is done.
 */
DecodeTrace decode_block_traced(const BitWord& y);
ActionSequence decode_block(const BitWord& y);

/// Early decoding: the first k action bits, decided from position k backward
/// without looking past y_{k+1}. Requires 1 <= k < N and ~y_{k+1} = 0.
BitWord decode_prefix(const BitWord& y, std::size_t k);

struct TransmissionRecord {
  BitWord inputs;
  BitWord outputs;
  std::vector<ChannelState> states;  // s_0 .. s_N
};

/// Sends the codeword through the trapdoor channel starting in s0, the
/// encoder tracking the state through feedback.
TransmissionRecord transmit(const ActionSequence& c, ChannelState s0, Rng& rng);

struct FlushResult {
  int uses = 0;
  ChannelState learned_state = Bit::kZero;
  ChannelState true_state = Bit::kZero;
  bool succeeded = false;
};

inline constexpr int kDefaultFlushCap = 10000;

/// Sends 0,1,0,1,... until an output differs from its input; the state is
/// then the input just sent. Stops with succeeded = false after max_uses.
FlushResult flush(Rng& rng, ChannelState hidden_state,
                  int max_uses = kDefaultFlushCap);

}  // namespace trapdoor::codec
