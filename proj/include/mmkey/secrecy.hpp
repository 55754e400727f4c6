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

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <bit>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mmkey/error.hpp"
#include "mmkey/galois.hpp"

namespace mmkey {

/// Fixed-length bit string, MSB-first within each byte.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t bits) : bits_(bits), bytes_((bits + 7) / 8, 0) {}

  static BitString from_bits(std::initializer_list<int> bits) {
    BitString s(bits.size());
    std::size_t i = 0;
    for (int b : bits) s.set(i++, b != 0);
    return s;
  }

  static BitString random(std::size_t bits, std::mt19937_64& rng) {
    BitString s(bits);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& b : s.bytes_) b = static_cast<std::uint8_t>(byte(rng));
    s.clear_tail();
    return s;
  }

  std::size_t size() const { return bits_; }

  bool get(std::size_t i) const { return (bytes_[i / 8] >> (7 - i % 8)) & 1u; }
  void set(std::size_t i, bool v) {
    const auto mask = static_cast<std::uint8_t>(1u << (7 - i % 8));
    if (v)
      bytes_[i / 8] |= mask;
    else
      bytes_[i / 8] &= static_cast<std::uint8_t>(~mask);
  }

  /// `width` bits starting at `offset`, returned as an integer (first bit most significant).
  unsigned get_symbol(std::size_t offset, unsigned width) const {
    unsigned v = 0;
    for (unsigned b = 0; b < width; ++b) v = (v << 1) | static_cast<unsigned>(get(offset + b));
    return v;
  }
  void set_symbol(std::size_t offset, unsigned width, unsigned v) {
    for (unsigned b = 0; b < width; ++b) set(offset + b, (v >> (width - 1 - b)) & 1u);
  }

  std::string hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes_.size() * 2);
    for (auto b : bytes_) {
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 15]);
    }
    return out;
  }

  bool operator==(const BitString&) const = default;

 private:
  void clear_tail() {
    if (bits_ % 8 != 0) bytes_.back() &= static_cast<std::uint8_t>(0xFF << (8 - bits_ % 8));
  }

  std::size_t bits_ = 0;
  std::vector<std::uint8_t> bytes_;
};

inline constexpr std::size_t kDefaultPayloadBits = 1024;

struct RandomPacket {
  std::size_t id = 0;
  BitString payload;
};

/// Alice's random broadcast packets 0..n-1.
inline std::vector<RandomPacket> random_packets(std::size_t n, std::size_t bits, std::uint64_t seed) {
  std::seed_seq seq{seed, std::uint64_t{0x9a1b0c4e}};
  std::mt19937_64 rng(seq);
  std::vector<RandomPacket> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back({i, BitString::random(bits, rng)});
  return out;
}

/// Which of Alice's packets Bob and Eve decoded. Bob's acknowledgments are
/// public, so Eve knows `bob_received` exactly.
struct ReceptionLog {
  std::size_t n_sent = 0;
  std::set<std::size_t> bob_received;
  std::set<std::size_t> eve_received;

  std::set<std::size_t> intercepted() const {
    std::set<std::size_t> out;
    std::set_intersection(bob_received.begin(), bob_received.end(), eve_received.begin(),
                          eve_received.end(), std::inserter(out, out.end()));
    return out;
  }

  /// Eve holds everything Bob holds.
  bool broken() const { return intercepted().size() == bob_received.size(); }
};

/// Upper bound on how many of Bob's packets Eve decoded.
struct EveBound {
  std::size_t max_intercepted = 0;
};

/// Simulates Alice's broadcast of n packets. Each predicate is called as
/// `pred(index, rng)` with its own seeded stream, so receptions are
/// reproducible for a given seed.
template <class BobPredicate, class EvePredicate>
ReceptionLog run_exchange(std::size_t n, BobPredicate&& decode_bob, EvePredicate&& decode_eve,
                          std::uint64_t seed) {
  require(n >= 1, ErrorCategory::invalid_argument, "run_exchange needs at least one packet");
  std::seed_seq bob_seq{seed, std::uint64_t{1}};
  std::seed_seq eve_seq{seed, std::uint64_t{2}};
  std::mt19937_64 bob_rng(bob_seq);
  std::mt19937_64 eve_rng(eve_seq);
  ReceptionLog log;
  log.n_sent = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (decode_bob(i, bob_rng)) log.bob_received.insert(i);
    if (decode_eve(i, eve_rng)) log.eve_received.insert(i);
  }
  return log;
}

/// k x m combiner (k = m - e) whose every k-column submatrix is invertible:
/// row i holds node_j^i for distinct nonzero nodes alpha^j. Row 0 is all
/// ones, so a single key packet is the sum of the received packets.
template <class Field = GF256>
FieldMatrix<Field> build_combiner(std::size_t m, EveBound e) {
  require(m >= 1, ErrorCategory::invalid_argument, "combiner needs at least one packet");
  if (e.max_intercepted >= m)
    throw NoKeyError("eavesdropper bound " + std::to_string(e.max_intercepted) + " leaves no key from " +
                     std::to_string(m) + " packets");
  const std::size_t k = m - e.max_intercepted;
  require(k == 1 || m <= Field::order, ErrorCategory::invalid_argument,
          "combiner needs " + std::to_string(m) + " distinct nonzero field elements; GF(" +
              std::to_string(Field::size) + ") has " + std::to_string(Field::order) + "; raise the field size");
  FieldMatrix<Field> g(k, m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto node = Field::alpha_pow(static_cast<unsigned>(j));
    for (std::size_t i = 0; i < k; ++i) g(i, j) = Field::pow(node, static_cast<unsigned>(i));
  }
  return g;
}

template <class Field = GF256>
struct SecretKey {
  std::vector<BitString> key_packets;
  FieldMatrix<Field> combiner;
  std::vector<std::size_t> source_ids;  // packet id feeding each combiner column

  std::size_t bits() const { return key_packets.empty() ? 0 : key_packets.size() * key_packets[0].size(); }
  bool operator==(const SecretKey&) const = default;
};

/// Applies the combiner symbol-wise to the payloads of Bob's packets. `held`
/// may be Alice's full packet list or only what Bob received; both produce
/// the same key.
template <class Field = GF256>
SecretKey<Field> extract_key(const ReceptionLog& log, std::span<const RandomPacket> held, EveBound e) {
  const std::size_t m = log.bob_received.size();
  if (m == 0) throw NoKeyError("Bob received nothing; no key");
  if (e.max_intercepted >= m)
    throw NoKeyError("eavesdropper may hold all " + std::to_string(m) + " of Bob's packets; no key");

  std::map<std::size_t, const BitString*> by_id;
  for (const auto& p : held) by_id[p.id] = &p.payload;

  std::vector<const BitString*> cols;
  std::vector<std::size_t> ids;
  for (std::size_t id : log.bob_received) {
    auto it = by_id.find(id);
    require(it != by_id.end(), ErrorCategory::invalid_argument,
            "payload for acknowledged packet " + std::to_string(id) + " is missing");
    cols.push_back(it->second);
    ids.push_back(id);
  }
  const std::size_t bits = cols.front()->size();
  for (auto* c : cols)
    require(c->size() == bits, ErrorCategory::invalid_argument, "payload lengths differ within a session");
  require(bits % Field::bits == 0, ErrorCategory::invalid_argument,
          "payload length " + std::to_string(bits) + " is not a multiple of the field symbol width");

  SecretKey<Field> key;
  key.combiner = build_combiner<Field>(m, e);
  key.source_ids = std::move(ids);
  const std::size_t k = key.combiner.rows();
  key.key_packets.assign(k, BitString(bits));
  for (std::size_t off = 0; off < bits; off += Field::bits) {
    for (std::size_t r = 0; r < k; ++r) {
      typename Field::Element acc = 0;
      for (std::size_t j = 0; j < m; ++j) {
        const auto sym = static_cast<typename Field::Element>(cols[j]->get_symbol(off, Field::bits));
        acc = Field::add(acc, Field::mul(key.combiner(r, j), sym));
      }
      key.key_packets[r].set_symbol(off, Field::bits, acc);
    }
  }
  return key;
}

/// Worst case that still leaves a key: Eve missed exactly one of Bob's packets.
inline EveBound worst_case_bound(const ReceptionLog& log) {
  if (log.bob_received.empty()) throw NoKeyError("Bob received nothing; no key");
  return EveBound{log.bob_received.size() - 1};
}

/// Exhaustive secrecy check for single-symbol payloads over Field. True iff
/// for every set E of e packet indices and every value of the packets in E,
/// the key vector is uniform over the assignments of the remaining packets.
template <class Field>
bool secrecy_oracle(std::size_t m, std::size_t e, const FieldMatrix<Field>& combiner) {
  require(combiner.cols() == m, ErrorCategory::invalid_argument, "combiner width differs from m");
  require(e < m, ErrorCategory::invalid_argument, "secrecy_oracle needs e < m");
  require(m * Field::bits <= 20, ErrorCategory::budget_exceeded,
          "secrecy_oracle enumerates 2^(m*bits) payloads; m*bits must be <= 20");
  const std::size_t k = combiner.rows();
  require(k >= 1, ErrorCategory::invalid_argument, "combiner has no rows");
  const std::size_t q = Field::size;
  if (k > m - e) return false;  // more key symbols than unseen randomness

  auto ipow = [](std::size_t b, std::size_t x) {
    std::size_t r = 1;
    while (x--) r *= b;
    return r;
  };
  const std::size_t total = ipow(q, m);
  const std::size_t key_space = ipow(q, k);
  const std::size_t per_key = ipow(q, m - e) / key_space;

  // Iterate over e-subsets via a bitmask.
  std::vector<std::size_t> counts;
  std::vector<typename Field::Element> x(m);
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != e) continue;
    counts.assign(ipow(q, e) * key_space, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      std::size_t eve_index = 0;
      for (std::size_t j = 0; j < m; ++j) {
        x[j] = static_cast<typename Field::Element>(rest % q);
        rest /= q;
        if (mask >> j & 1u) eve_index = eve_index * q + x[j];
      }
      std::size_t key_index = 0;
      for (std::size_t r = 0; r < k; ++r) {
        typename Field::Element acc = 0;
        for (std::size_t j = 0; j < m; ++j) acc = Field::add(acc, Field::mul(combiner(r, j), x[j]));
        key_index = key_index * q + acc;
      }
      ++counts[eve_index * key_space + key_index];
    }
    for (std::size_t c : counts)
      if (c != per_key) return false;
  }
  return true;
}

}  // namespace mmkey
