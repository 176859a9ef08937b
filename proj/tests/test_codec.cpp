#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "trapdoor/codec.hpp"
#include "trapdoor/numeric.hpp"

using namespace trapdoor;
using namespace trapdoor::codec;

namespace {

// All valid words of length n in lexicographic order, by filtering 2^n.
std::vector<std::string> brute_force_words(int n) {
  std::vector<std::string> out;
  for (std::uint32_t w = 0; w < (1u << n); ++w) {
    std::string s(n, '0');
    for (int k = 0; k < n; ++k)
      if (w >> (n - 1 - k) & 1u) s[k] = '1';
    if (s.back() == '1' || s.find("11") != std::string::npos) continue;
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t fibonacci(int n) {  // F(1) = F(2) = 1
  std::uint64_t a = 0, b = 1;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t t = a + b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

TEST_CASE("codebook sizes match brute-force enumeration") {
  CHECK(codebook_size(1) == 1);
  CHECK(codebook_size(2) == 2);
  CHECK(codebook_size(10) == 89);
  for (int n = 1; n <= 20; ++n) {
    CHECK(codebook_size(n) == brute_force_words(n).size());
    CHECK(codebook_size(n) == fibonacci(n + 1));
  }
  CHECK(codebook_size(kMaxBlockLength) == 12200160415121876738ull);
  CHECK(codebook_size(kMaxBlockLength) == fibonacci(kMaxBlockLength + 1));
  CHECK_THROWS_AS(codebook_size(kMaxBlockLength + 1), std::overflow_error);
  CHECK_THROWS_AS(codebook_size(0), std::invalid_argument);
}

TEST_CASE("unrank follows lexicographic order") {
  for (int n = 1; n <= 14; ++n) {
    const auto words = brute_force_words(n);
    for (std::size_t m = 0; m < words.size(); ++m) {
      const auto c = unrank({m, n});
      CHECK(c.str() == words[m]);
      CHECK(rank(c).index == m);
    }
  }
  CHECK(unrank({0, 10}).str() == "0000000000");
  CHECK(unrank({88, 10}).str() == brute_force_words(10).back());
  CHECK_THROWS_AS(unrank({89, 10}), std::out_of_range);
}

TEST_CASE("rank and unrank are inverse at long block lengths") {
  Rng rng(3);
  for (int n : {30, 64, kMaxBlockLength}) {
    const std::uint64_t size = codebook_size(n);
    for (int t = 0; t < 200; ++t) {
      const std::uint64_t m = uniform_below(rng, size);
      CHECK(rank(unrank({m, n})).index == m);
    }
    CHECK(rank(unrank({size - 1, n})).index == size - 1);
  }
}

TEST_CASE("action sequences enforce the constraint") {
  CHECK_THROWS_AS(ActionSequence::parse("0110"), std::invalid_argument);
  CHECK_THROWS_AS(ActionSequence::parse("0101"), std::invalid_argument);
  CHECK_THROWS_AS(ActionSequence::parse(""), std::invalid_argument);
  CHECK(ActionSequence::parse("1010").str() == "1010");
  CHECK_THROWS_AS(parse_word("01x"), std::invalid_argument);
}

TEST_CASE("packed words") {
  const auto w = parse_word("1011010001");
  const auto bytes = pack_word(w);
  REQUIRE(bytes.size() == 2);
  CHECK(bytes[0] == 0xB4);
  CHECK(bytes[1] == 0x40);
  CHECK(unpack_word(bytes, w.size()) == w);
}

TEST_CASE("encoder XORs the action with the state") {
  CHECK(encode_step(Bit::kZero, Bit::kZero) == Bit::kZero);
  CHECK(encode_step(Bit::kOne, Bit::kZero) == Bit::kOne);
  CHECK(encode_step(Bit::kOne, Bit::kOne) == Bit::kZero);
  CHECK(encode_step(Bit::kZero, Bit::kOne) == Bit::kOne);
}

TEST_CASE("decoding example") {
  const auto y = parse_word("1011010001");
  CHECK(DifferentialOutput(y).str() == "*110111001");
  CHECK_FALSE(DifferentialOutput(y).at(1).has_value());
  CHECK(*DifferentialOutput(y).at(2) == Bit::kOne);
  const auto t = decode_block_traced(y);
  CHECK(t.actions.str() == "0101010010");
  const std::vector<std::string> labels = {
      "Given", "Case 3", "Case 1 or 2", "Case 1", "Case 3",
      "Case 2", "Case 3", "Case 1 or 2", "Case 3", "Case 2"};
  REQUIRE(t.steps.size() == labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(std::string(case_label(t.steps[i].reason)) == labels[i]);
    CHECK(t.steps[i].position == labels.size() - i);
  }
}

TEST_CASE("all-zero output decodes to all zeros") {
  const auto t = decode_block_traced(parse_word("0000000000"));
  CHECK(t.actions.str() == "0000000000");
  for (std::size_t i = 1; i < t.steps.size(); ++i)
    CHECK(t.steps[i].reason == DecodeCase::kCase1);
}

TEST_CASE("arbitrary words decode to valid sequences") {
  for (std::uint32_t w = 0; w < (1u << 10); ++w) {
    BitWord y(10);
    for (int k = 0; k < 10; ++k) y[k] = bit_from_int(w >> k & 1u);
    CHECK(ActionSequence::valid(decode_block(y).bits()));
  }
}

TEST_CASE("zero-error round trip for every message up to N = 12") {
  for (int n = 1; n <= 12; ++n) {
    const std::uint64_t size = codebook_size(n);
    std::uint64_t errors = 0, case_violations = 0;
    for (std::uint64_t m = 0; m < size; ++m) {
      const auto c = unrank({m, n});
      for (Bit s0 : {Bit::kZero, Bit::kOne}) {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
          Rng rng(derive_seed(seed, m * 2 + to_int(s0)));
          const auto tx = transmit(c, s0, rng);
          if (!(decode_block(tx.outputs) == c)) ++errors;
          // Case soundness against the true actions.
          for (int k = 1; k < n; ++k) {
            const Bit dy = tx.outputs[k] ^ tx.outputs[k - 1];
            if (dy == Bit::kZero && c[k - 1] != Bit::kZero) ++case_violations;
            if (dy == Bit::kOne && c[k] == Bit::kZero && c[k - 1] != Bit::kOne)
              ++case_violations;
          }
        }
      }
    }
    CHECK_MESSAGE(errors == 0, "N = " << n);
    CHECK_MESSAGE(case_violations == 0, "N = " << n);
  }
}

TEST_CASE("transmission record is consistent") {
  Rng rng(1);
  const auto c = unrank({42, 10});
  const auto tx = transmit(c, Bit::kOne, rng);
  REQUIRE(tx.states.size() == 11);
  CHECK(tx.states[0] == Bit::kOne);
  for (int k = 0; k < 10; ++k) {
    CHECK(tx.inputs[k] == encode_step(c[k], tx.states[k]));
    CHECK(tx.states[k + 1] == (tx.states[k] ^ tx.inputs[k] ^ tx.outputs[k]));
  }
}

TEST_CASE("early decoding matches full-block decoding") {
  Rng rng(6);
  int checked = 0;
  for (int t = 0; t < 2000; ++t) {
    const int n = 12;
    const auto c = unrank({uniform_below(rng, codebook_size(n)), n});
    const auto y = transmit(c, fair_bit(rng), rng).outputs;
    const auto full = decode_block(y).bits();
    for (int k = 1; k < n; ++k) {
      if ((y[k] ^ y[k - 1]) != Bit::kZero) continue;
      const auto prefix = decode_prefix(y, k);
      CHECK(prefix == BitWord(full.begin(), full.begin() + k));
      ++checked;
    }
  }
  CHECK(checked > 1000);
  const auto y = parse_word("1011010001");
  CHECK_THROWS(decode_prefix(y, 1));  // ~y_2 = 1
}

TEST_CASE("flushing") {
  SUBCASE("learned state is the true state") {
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
      Rng rng(seed);
      const auto f = flush(rng, seed & 1 ? Bit::kOne : Bit::kZero);
      REQUIRE(f.succeeded);
      CHECK(f.learned_state == f.true_state);
      CHECK(f.uses >= 1);
    }
  }
  SUBCASE("detection on the first use") {
    // Hidden state 1 and first input 0: output 1 with probability 1/2.
    int ones = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      Rng rng(seed);
      const auto f = flush(rng, Bit::kOne);
      if (f.uses == 1) {
        ++ones;
        CHECK(f.learned_state == Bit::kZero);
      }
    }
    CHECK(ones > 400);
    CHECK(ones < 600);
  }
  SUBCASE("cap signals failure") {
    Rng rng(0);
    const auto f = flush(rng, Bit::kZero, 1);
    CHECK_FALSE(f.succeeded);
    CHECK(f.uses == 1);
  }
  SUBCASE("mean length over uniform initial state") {
    Rng rng(2);
    double total = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) total += flush(rng, fair_bit(rng)).uses;
    CHECK(std::abs(total / n - 3.5) <= 0.1);
  }
  SUBCASE("communication after flushing is error free") {
    Rng rng(4);
    int errors = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto f = flush(rng, fair_bit(rng));
      REQUIRE(f.succeeded);
      const auto c = unrank({uniform_below(rng, 89), 10});
      if (!(decode_block(transmit(c, f.learned_state, rng).outputs) == c))
        ++errors;
    }
    CHECK(errors == 0);
  }
}
