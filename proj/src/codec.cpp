#include "trapdoor/codec.hpp"

#include <array>
#include <stdexcept>

namespace trapdoor::codec {

namespace {

// counts[n] = number of valid sequences of length n; counts[0] = 1 stands for
// the empty suffix.
const std::array<std::uint64_t, kMaxBlockLength + 1>& suffix_counts() {
  static const auto table = [] {
    std::array<std::uint64_t, kMaxBlockLength + 1> t{};
    t[0] = 1;
    std::uint64_t ends0 = 1, ends1 = 1;  // length-1 words "0" and "1"
    t[1] = ends0;
    for (int n = 2; n <= kMaxBlockLength; ++n) {
      const std::uint64_t next0 = ends0 + ends1;
      ends1 = ends0;
      ends0 = next0;
      t[n] = ends0;
    }
    return t;
  }();
  return table;
}

void require_block_length(int n) {
  if (n < 1) throw std::invalid_argument("block length must be >= 1");
  if (n > kMaxBlockLength)
    throw std::overflow_error("block length " + std::to_string(n) +
                              " exceeds the 64-bit codebook limit of " +
                              std::to_string(kMaxBlockLength));
}

}  // namespace

BitWord parse_word(std::string_view ascii) {
  BitWord w;
  w.reserve(ascii.size());
  for (char c : ascii) w.push_back(bit_from_char(c));
  return w;
}

std::string format_word(const BitWord& w) {
  std::string s;
  s.reserve(w.size());
  for (Bit b : w) s.push_back(to_char(b));
  return s;
}

std::vector<std::uint8_t> pack_word(const BitWord& w) {
  std::vector<std::uint8_t> out((w.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] == Bit::kOne) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return out;
}

BitWord unpack_word(const std::vector<std::uint8_t>& bytes, std::size_t bits) {
  if (bits > bytes.size() * 8)
    throw std::invalid_argument("not enough bytes for the requested bit count");
  BitWord w(bits);
  for (std::size_t i = 0; i < bits; ++i)
    w[i] = (bytes[i / 8] & (0x80u >> (i % 8))) ? Bit::kOne : Bit::kZero;
  return w;
}

bool ActionSequence::valid(const BitWord& bits) {
  if (bits.empty() || bits.back() != Bit::kZero) return false;
  for (std::size_t i = 1; i < bits.size(); ++i)
    if (bits[i] == Bit::kOne && bits[i - 1] == Bit::kOne) return false;
  return true;
}

ActionSequence::ActionSequence(BitWord bits) : bits_(std::move(bits)) {
  if (!valid(bits_))
    throw std::invalid_argument("not a valid action sequence: '" +
                                format_word(bits_) +
                                "' (needs no \"11\" and a final 0)");
}

ActionSequence ActionSequence::parse(std::string_view ascii) {
  return ActionSequence(parse_word(ascii));
}

DifferentialOutput::DifferentialOutput(const BitWord& y) {
  if (y.empty()) throw std::invalid_argument("empty output word");
  diffs_.reserve(y.size() - 1);
  for (std::size_t i = 1; i < y.size(); ++i) diffs_.push_back(y[i] ^ y[i - 1]);
}

std::optional<Bit> DifferentialOutput::at(std::size_t k) const {
  if (k < 1 || k > block_length())
    throw std::out_of_range("differential output index out of range");
  if (k == 1) return std::nullopt;
  return diffs_[k - 2];
}

std::string DifferentialOutput::str() const { return "*" + format_word(diffs_); }

std::uint64_t codebook_size(int n) {
  require_block_length(n);
  return suffix_counts()[n];
}

ActionSequence unrank(const Message& m) {
  require_block_length(m.block_length);
  const auto& counts = suffix_counts();
  const int n = m.block_length;
  if (m.index >= counts[n])
    throw std::out_of_range("message index " + std::to_string(m.index) +
                            " out of range for N = " + std::to_string(n) +
                            " (codebook size " + std::to_string(counts[n]) +
                            ")");
  BitWord bits(n, Bit::kZero);
  std::uint64_t rest = m.index;
  Bit prev = Bit::kZero;
  for (int k = 0; k < n; ++k) {
    const int remaining = n - k - 1;
    // Completions after a 0 here: any valid word of length `remaining`.
    if (prev == Bit::kOne || rest < counts[remaining]) {
      prev = Bit::kZero;
    } else {
      rest -= counts[remaining];
      bits[k] = Bit::kOne;
      prev = Bit::kOne;
    }
  }
  return ActionSequence(std::move(bits));
}

Message rank(const ActionSequence& c) {
  const int n = static_cast<int>(c.size());
  require_block_length(n);
  const auto& counts = suffix_counts();
  std::uint64_t index = 0;
  for (int k = 0; k < n; ++k)
    if (c[k] == Bit::kOne) index += counts[n - k - 1];
  return Message{index, n};
}

std::string_view case_label(DecodeCase c) {
  switch (c) {
    case DecodeCase::kGiven: return "Given";
    case DecodeCase::kCase1: return "Case 1";
    case DecodeCase::kCase2: return "Case 2";
    case DecodeCase::kCase1Or2: return "Case 1 or 2";
    case DecodeCase::kCase3: return "Case 3";
  }
  return "?";
}

namespace {

// Decides a_k from ~y_{k+1} and a_{k+1}.
DecodeStep decide(std::size_t k, Bit diff_next, Bit action_next) {
  const bool c1 = diff_next == Bit::kZero;
  const bool c2 = action_next == Bit::kOne;
  if (c1 && c2) return {k, Bit::kZero, DecodeCase::kCase1Or2};
  if (c1) return {k, Bit::kZero, DecodeCase::kCase1};
  if (c2) return {k, Bit::kZero, DecodeCase::kCase2};
  return {k, Bit::kOne, DecodeCase::kCase3};
}

}  // namespace

DecodeTrace decode_block_traced(const BitWord& y) {
  const DifferentialOutput diff(y);
  const std::size_t n = y.size();
  BitWord a(n, Bit::kZero);
  std::vector<DecodeStep> steps;
  steps.reserve(n);
  steps.push_back({n, Bit::kZero, DecodeCase::kGiven});
  for (std::size_t k = n - 1; k >= 1; --k) {
    const DecodeStep s = decide(k, *diff.at(k + 1), a[k]);
    a[k - 1] = s.decided;
    steps.push_back(s);
  }
  return DecodeTrace{ActionSequence(std::move(a)), std::move(steps)};
}

ActionSequence decode_block(const BitWord& y) {
  return decode_block_traced(y).actions;
}

BitWord decode_prefix(const BitWord& y, std::size_t k) {
  const DifferentialOutput diff(y);
  if (k < 1 || k >= y.size())
    throw std::out_of_range("early decoding needs 1 <= k < N");
  if (*diff.at(k + 1) != Bit::kZero)
    throw std::invalid_argument(
        "early decoding can only start where the next differential output is 0");
  BitWord a(k, Bit::kZero);  // a_k = 0 by case 1
  for (std::size_t j = k - 1; j >= 1; --j)
    a[j - 1] = decide(j, *diff.at(j + 1), a[j]).decided;
  return a;
}

TransmissionRecord transmit(const ActionSequence& c, ChannelState s0,
                            Rng& rng) {
  TransmissionRecord rec;
  rec.inputs.reserve(c.size());
  rec.outputs.reserve(c.size());
  rec.states.reserve(c.size() + 1);
  rec.states.push_back(s0);
  ChannelState s = s0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Bit x = encode_step(c[k], s);
    const channel::ChannelStep step = channel::sample_step(s, x, rng);
    rec.inputs.push_back(x);
    rec.outputs.push_back(step.output);
    // The encoder learns y through feedback and tracks the state.
    s = channel::next_state(s, x, step.output);
    rec.states.push_back(s);
  }
  return rec;
}

FlushResult flush(Rng& rng, ChannelState hidden_state, int max_uses) {
  FlushResult r;
  ChannelState s = hidden_state;
  for (int t = 0; t < max_uses; ++t) {
    const Bit x = (t % 2 == 0) ? Bit::kZero : Bit::kOne;
    const channel::ChannelStep step = channel::sample_step(s, x, rng);
    s = step.next_state;
    r.uses = t + 1;
    if (step.output != x) {
      r.learned_state = x;
      r.true_state = s;
      r.succeeded = true;
      return r;
    }
  }
  r.true_state = s;
  return r;
}

}  // namespace trapdoor::codec
