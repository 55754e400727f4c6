// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <vector>

#include "mmkey/secrecy.hpp"

using namespace mmkey;

namespace {

// Carry-less multiply with polynomial reduction.
unsigned slow_mul(unsigned a, unsigned b, unsigned bits, unsigned poly) {
  unsigned r = 0;
  for (unsigned i = 0; i < bits; ++i)
    if (b >> i & 1u) r ^= a << i;
  for (int i = 2 * static_cast<int>(bits) - 2; i >= static_cast<int>(bits); --i)
    if (r >> i & 1u) r ^= poly << (i - bits);
  return r;
}

template <class F, unsigned Poly>
void check_field() {
  for (unsigned a = 0; a < F::size; ++a)
    for (unsigned b = 0; b < F::size; ++b) {
      ASSERT_EQ(F::mul(static_cast<typename F::Element>(a), static_cast<typename F::Element>(b)),
                slow_mul(a, b, F::bits, Poly))
          << a << "*" << b;
      ASSERT_EQ(F::add(a, b), a ^ b);
    }
  for (unsigned a = 1; a < F::size; ++a) {
    const auto e = static_cast<typename F::Element>(a);
    ASSERT_EQ(F::mul(e, F::inv(e)), 1);
  }
  // alpha = x generates the multiplicative group.
  std::vector<bool> seen(F::size, false);
  unsigned x = 1;
  for (unsigned i = 0; i < F::order; ++i) {
    ASSERT_EQ(F::alpha_pow(i), x);
    seen[x] = true;
    x = slow_mul(x, 2, F::bits, Poly);
  }
  for (unsigned a = 1; a < F::size; ++a) EXPECT_TRUE(seen[a]);
  EXPECT_THROW(F::inv(0), Error);
}

std::vector<std::size_t> bits_of(unsigned mask, std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (mask >> i & 1u) out.push_back(i);
  return out;
}

}  // namespace

TEST(Galois, GF2) { check_field<GF2, 0x3>(); }
TEST(Galois, GF4) { check_field<GF4, 0x7>(); }
TEST(Galois, GF8) { check_field<GF8, 0xB>(); }
TEST(Galois, GF16) { check_field<GF16, 0x13>(); }
TEST(Galois, GF256) { check_field<GF256, 0x11D>(); }

TEST(Galois, PowMatchesRepeatedMultiplication) {
  for (unsigned a = 0; a < 256; ++a) {
    unsigned acc = 1;
    for (unsigned e = 0; e < 20; ++e) {
      ASSERT_EQ(GF256::pow(static_cast<std::uint8_t>(a), e), acc);
      acc = slow_mul(acc, a, 8, 0x11D);
    }
  }
}

TEST(Galois, RankOfKnownMatrices) {
  FieldMatrix<GF2> id(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  EXPECT_EQ(rank(id), 3u);
  FieldMatrix<GF2> dup(2, 3, {1, 1, 0, 1, 1, 0});
  EXPECT_EQ(rank(dup), 1u);
  FieldMatrix<GF256> zero(2, 2);
  EXPECT_EQ(rank(zero), 0u);
  EXPECT_THROW((FieldMatrix<GF4>(1, 2, {1, 4})), Error);
}

TEST(Combiner, VandermondeStructure) {
  const auto g = build_combiner<GF256>(6, EveBound{2});
  ASSERT_EQ(g.rows(), 4u);
  ASSERT_EQ(g.cols(), 6u);
  for (std::size_t j = 0; j < 6; ++j) {
    EXPECT_EQ(g(0, j), 1);
    unsigned node = 1;
    for (std::size_t p = 0; p < j; ++p) node = slow_mul(node, 2, 8, 0x11D);
    unsigned v = 1;
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(g(i, j), v);
      v = slow_mul(v, node, 8, 0x11D);
    }
  }
}

TEST(Combiner, EveryComplementHasFullRank) {
  for (std::size_t m = 1; m <= 12; ++m)
    for (std::size_t e = 0; e < m; ++e) {
      const auto g = build_combiner<GF256>(m, EveBound{e});
      const std::size_t k = m - e;
      ASSERT_EQ(g.rows(), k);
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
        const auto cols = bits_of(mask, m);
        ASSERT_EQ(rank(g.select_columns(cols)), k) << "m=" << m << " e=" << e << " mask=" << mask;
      }
    }
}

TEST(Combiner, Errors) {
  EXPECT_THROW(build_combiner<GF256>(3, EveBound{3}), NoKeyError);
  EXPECT_THROW(build_combiner<GF256>(0, EveBound{0}), Error);
  // GF(2) has a single nonzero node: only one-row combiners exist.
  EXPECT_NO_THROW(build_combiner<GF2>(5, EveBound{4}));
  EXPECT_THROW(build_combiner<GF2>(3, EveBound{1}), Error);
  try {
    build_combiner<GF256>(2, EveBound{5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::no_key);
  }
}

TEST(SecrecyOracle, VandermondeIsSecureForSmallSessions) {
  for (std::size_t m = 1; m <= 6; ++m)
    for (std::size_t e = 0; e < m; ++e) {
      const auto g = build_combiner<GF8>(m, EveBound{e});
      EXPECT_TRUE(secrecy_oracle<GF8>(m, e, g)) << "m=" << m << " e=" << e;
      // Tolerates any smaller interception too.
      for (std::size_t f = 0; f < e; ++f) EXPECT_TRUE(secrecy_oracle<GF8>(m, f, g));
    }
}

TEST(SecrecyOracle, RejectsLeakyCombiners) {
  // Two equal columns: Eve holding the third packet learns key_0 - key_1 = 0 relation.
  FieldMatrix<GF4> leaky(2, 3, {1, 1, 1, 1, 1, 0});
  EXPECT_FALSE(secrecy_oracle<GF4>(3, 1, leaky));
  // A key longer than the unseen randomness cannot be uniform.
  const auto g = build_combiner<GF8>(4, EveBound{1});
  EXPECT_FALSE(secrecy_oracle<GF8>(4, 2, g));
  // Key that ignores an unseen packet but copies a seen one.
  FieldMatrix<GF2> copy(1, 2, {1, 0});
  EXPECT_FALSE(secrecy_oracle<GF2>(2, 1, copy));
}

TEST(SecrecyOracle, Budget) {
  const auto g = build_combiner<GF256>(3, EveBound{1});
  EXPECT_THROW(secrecy_oracle<GF256>(3, 1, g), Error);
}

TEST(BitString, BitsSymbolsHex) {
  auto s = BitString::from_bits({1, 0, 1, 1, 0, 0, 0, 1, 1, 1, 1, 1});
  EXPECT_EQ(s.size(), 12u);
  EXPECT_EQ(s.hex(), "b1f0");
  EXPECT_EQ(s.get_symbol(0, 3), 5u);
  EXPECT_EQ(s.get_symbol(3, 4), 8u);
  s.set_symbol(8, 4, 0x3);
  EXPECT_EQ(s.hex(), "b130");
  std::mt19937_64 rng(1);
  const auto r = BitString::random(13, rng);
  EXPECT_EQ(r.hex().size(), 4u);
  EXPECT_EQ(r.hex().back(), '0');  // tail bits cleared
}

TEST(Exchange, DeterministicAndIndependentStreams) {
  auto coin = [](std::size_t, std::mt19937_64& rng) { return std::bernoulli_distribution(0.5)(rng); };
  auto always = [](std::size_t, std::mt19937_64&) { return true; };
  const auto a = run_exchange(64, coin, coin, 9);
  const auto b = run_exchange(64, coin, coin, 9);
  EXPECT_EQ(a.bob_received, b.bob_received);
  EXPECT_EQ(a.eve_received, b.eve_received);
  const auto c = run_exchange(64, always, coin, 9);
  EXPECT_EQ(c.eve_received, a.eve_received);
  EXPECT_EQ(c.bob_received.size(), 64u);
  EXPECT_THROW(run_exchange(0, coin, coin, 1), Error);
}

TEST(Exchange, InterceptionAndBreak) {
  ReceptionLog log{5, {0, 2, 4}, {1, 2, 4}};
  EXPECT_EQ(log.intercepted(), (std::set<std::size_t>{2, 4}));
  EXPECT_FALSE(log.broken());
  log.eve_received.insert(0);
  EXPECT_TRUE(log.broken());
  EXPECT_EQ(worst_case_bound(log).max_intercepted, 2u);
}

TEST(ExtractKey, WorkedExampleIsXorOfReceivedPackets) {
  // Alice sends five packets, Bob acknowledges X1, X2, X3.
  const auto packets = random_packets(5, 1000, 42);
  ReceptionLog log{5, {0, 1, 2}, {0, 1}};
  const EveBound bound{2};
  const auto alice = extract_key<GF256>(log, packets, bound);
  std::vector<RandomPacket> held(packets.begin(), packets.begin() + 3);
  const auto bob = extract_key<GF256>(log, held, bound);
  ASSERT_EQ(alice.key_packets.size(), 1u);
  EXPECT_EQ(alice, bob);
  BitString x(1000);
  for (std::size_t i = 0; i < 1000; ++i)
    x.set(i, packets[0].payload.get(i) ^ packets[1].payload.get(i) ^ packets[2].payload.get(i));
  EXPECT_EQ(alice.key_packets[0], x);
  EXPECT_EQ(alice.bits(), 1000u);
  EXPECT_EQ(alice.source_ids, (std::vector<std::size_t>{0, 1, 2}));
  // Against every Eve missing a single one of Bob's packets.
  EXPECT_TRUE(secrecy_oracle<GF8>(3, 2, build_combiner<GF8>(3, bound)));
  EXPECT_TRUE(secrecy_oracle<GF2>(3, 2, build_combiner<GF2>(3, bound)));
}

TEST(ExtractKey, MatchesDirectCombination) {
  const auto packets = random_packets(8, 64, 3);
  ReceptionLog log{8, {1, 3, 4, 6, 7}, {}};
  const auto key = extract_key<GF256>(log, packets, EveBound{2});
  ASSERT_EQ(key.key_packets.size(), 3u);
  const std::vector<std::size_t> ids{1, 3, 4, 6, 7};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t off = 0; off < 64; off += 8) {
      unsigned acc = 0;
      for (std::size_t j = 0; j < ids.size(); ++j) {
        unsigned node = 1;
        for (std::size_t p = 0; p < j; ++p) node = slow_mul(node, 2, 8, 0x11D);
        unsigned coef = 1;
        for (std::size_t p = 0; p < r; ++p) coef = slow_mul(coef, node, 8, 0x11D);
        acc ^= slow_mul(coef, packets[ids[j]].payload.get_symbol(off, 8), 8, 0x11D);
      }
      EXPECT_EQ(key.key_packets[r].get_symbol(off, 8), acc);
    }
}

TEST(ExtractKey, Errors) {
  const auto packets = random_packets(4, 64, 1);
  EXPECT_THROW(extract_key<GF256>(ReceptionLog{4, {}, {}}, packets, EveBound{0}), NoKeyError);
  EXPECT_THROW(extract_key<GF256>(ReceptionLog{4, {0, 1}, {}}, packets, EveBound{2}), NoKeyError);
  std::vector<RandomPacket> partial(packets.begin(), packets.begin() + 1);
  EXPECT_THROW(extract_key<GF256>(ReceptionLog{4, {0, 1}, {}}, partial, EveBound{0}), Error);
  const auto odd = random_packets(3, 10, 1);
  EXPECT_THROW(extract_key<GF256>(ReceptionLog{3, {0, 1}, {}}, odd, EveBound{0}), Error);
  EXPECT_NO_THROW(extract_key<GF2>(ReceptionLog{3, {0, 1}, {}}, odd, EveBound{1}));
}

TEST(ExtractKey, KeyLengthProperty) {
  const auto packets = random_packets(10, 80, 11);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    ReceptionLog log{10, {}, {}};
    for (std::size_t i = 0; i < 10; ++i)
      if (rng() & 1u) log.bob_received.insert(i);
    if (log.bob_received.empty()) continue;
    const std::size_t m = log.bob_received.size();
    const std::size_t e = rng() % m;
    const auto key = extract_key<GF256>(log, packets, EveBound{e});
    EXPECT_EQ(key.bits(), (m - e) * 80);
  }
}
