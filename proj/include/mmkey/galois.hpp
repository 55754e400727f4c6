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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmkey/error.hpp"

namespace mmkey {

/// GF(2^Bits) with the given primitive reduction polynomial (including the
/// x^Bits term). Elements are stored in the low Bits of a byte; addition is
/// XOR and multiplication goes through log/antilog tables.
template <unsigned Bits, unsigned Poly>
struct GaloisField {
  static_assert(Bits >= 1 && Bits <= 8, "field elements must fit in a byte");

  using Element = std::uint8_t;

  static constexpr unsigned bits = Bits;
  static constexpr unsigned size = 1u << Bits;
  static constexpr unsigned order = size - 1;  // multiplicative group order

  struct Tables {
    std::array<Element, 2 * order> exp{};
    std::array<unsigned, size> log{};
  };

  static constexpr Tables make_tables() {
    Tables t{};
    unsigned x = 1;
    for (unsigned i = 0; i < order; ++i) {
      t.exp[i] = static_cast<Element>(x);
      t.exp[i + order] = static_cast<Element>(x);
      t.log[x] = i;
      x <<= 1;
      if (x & size) x ^= Poly;
    }
    return t;
  }

  static constexpr Tables tables = make_tables();

  static constexpr Element add(Element a, Element b) { return a ^ b; }
  static constexpr Element sub(Element a, Element b) { return a ^ b; }

  static constexpr Element mul(Element a, Element b) {
    if (a == 0 || b == 0) return 0;
    return tables.exp[tables.log[a] + tables.log[b]];
  }

  static Element inv(Element a) {
    require(a != 0, ErrorCategory::invalid_argument, "inverse of zero in GF(2^m)");
    return tables.exp[(order - tables.log[a]) % order];
  }

  static constexpr Element pow(Element a, unsigned e) {
    if (e == 0) return 1;
    if (a == 0) return 0;
    return tables.exp[(static_cast<unsigned long long>(tables.log[a]) * e) % order];
  }

  /// alpha^i for the primitive element alpha = x.
  static constexpr Element alpha_pow(unsigned i) { return tables.exp[i % order]; }
};

using GF2 = GaloisField<1, 0x3>;
using GF4 = GaloisField<2, 0x7>;
using GF8 = GaloisField<3, 0xB>;
using GF16 = GaloisField<4, 0x13>;
using GF256 = GaloisField<8, 0x11D>;

/// Dense row-major matrix over a Galois field.
template <class Field>
class FieldMatrix {
 public:
  using Element = typename Field::Element;

  FieldMatrix() = default;
  FieldMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
  FieldMatrix(std::size_t rows, std::size_t cols, std::vector<Element> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    require(data_.size() == rows_ * cols_, ErrorCategory::invalid_argument,
            "matrix data size does not match its shape");
    for (Element v : data_)
      require(v < Field::size, ErrorCategory::invalid_argument, "matrix entry outside the field");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Element& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Element operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const Element> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  FieldMatrix select_columns(std::span<const std::size_t> cols) const {
    FieldMatrix out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
    return out;
  }

  bool operator==(const FieldMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Element> data_;
};

/// Rank by Gaussian elimination.
template <class Field>
std::size_t rank(FieldMatrix<Field> m) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t pivot = r;
    while (pivot < m.rows() && m(pivot, c) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(pivot, j), m(r, j));
    const auto inv = Field::inv(m(r, c));
    for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) = Field::mul(m(r, j), inv);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const auto f = m(i, c);
      for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = Field::sub(m(i, j), Field::mul(f, m(r, j)));
    }
    ++r;
  }
  return r;
}

}  // namespace mmkey
