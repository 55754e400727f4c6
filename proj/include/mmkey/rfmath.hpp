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

#include <cmath>
#include <compare>
#include <limits>
#include <string>

#include "mmkey/error.hpp"

namespace mmkey {

struct RatioTag {};
struct PowerTag {};

/// A logarithmic quantity. The tag separates plain ratios (dB, dBi) from
/// absolute powers referenced to 1 mW (dBm).
template <class Tag>
struct Level {
  double value = 0.0;

  constexpr Level() = default;
  constexpr explicit Level(double v) : value(v) {}

  constexpr auto operator<=>(const Level&) const = default;
};

using Decibel = Level<RatioTag>;
using Dbm = Level<PowerTag>;

constexpr Decibel operator+(Decibel a, Decibel b) { return Decibel{a.value + b.value}; }
constexpr Decibel operator-(Decibel a, Decibel b) { return Decibel{a.value - b.value}; }
constexpr Decibel operator-(Decibel a) { return Decibel{-a.value}; }
constexpr Dbm operator+(Dbm a, Decibel b) { return Dbm{a.value + b.value}; }
constexpr Dbm operator-(Dbm a, Decibel b) { return Dbm{a.value - b.value}; }
constexpr Decibel operator-(Dbm a, Dbm b) { return Decibel{a.value - b.value}; }

namespace literals {
constexpr Decibel operator""_dB(long double v) { return Decibel{static_cast<double>(v)}; }
constexpr Decibel operator""_dB(unsigned long long v) { return Decibel{static_cast<double>(v)}; }
constexpr Dbm operator""_dBm(long double v) { return Dbm{static_cast<double>(v)}; }
constexpr Dbm operator""_dBm(unsigned long long v) { return Dbm{static_cast<double>(v)}; }
}  // namespace literals

inline double db_to_linear(Decibel x) { return std::pow(10.0, x.value / 10.0); }

inline Decibel linear_to_db(double ratio) {
  require(ratio > 0.0, ErrorCategory::invalid_argument, "linear_to_db: ratio must be positive");
  return Decibel{10.0 * std::log10(ratio)};
}

/// Threshold model of a wiretap code: receivers at or above th1 decode the
/// packet, receivers at or below th2 learn nothing about it.
struct WiretapCode {
  Decibel th1;
  Decibel th2;
  double bandwidth_hz = 1e9;

  void validate() const {
    require(std::isfinite(th1.value) && std::isfinite(th2.value), ErrorCategory::invalid_argument,
            "wiretap code thresholds must be finite");
    require(bandwidth_hz > 0.0, ErrorCategory::invalid_argument, "bandwidth must be positive");
    require(th1 >= th2, ErrorCategory::invalid_argument,
            "wiretap code requires th1 >= th2 (got th1=" + std::to_string(th1.value) +
                " dB, th2=" + std::to_string(th2.value) + " dB)");
  }

  bool decodes(Decibel snr) const { return snr >= th1; }
  bool erased(Decibel snr) const { return snr <= th2; }

  bool operator==(const WiretapCode&) const = default;
};

struct RateBreakdown {
  double decoding_rate_bps = 0.0;
  double secrecy_overhead_bps = 0.0;
  double r_max_bps = 0.0;

  /// Share of a coded payload that carries secret information.
  double secret_fraction() const {
    return decoding_rate_bps > 0.0 ? r_max_bps / decoding_rate_bps : 0.0;
  }
};

/// Gaussian-channel rate B*log2(1+snr).
inline double shannon_rate(Decibel snr, double bandwidth_hz) {
  return bandwidth_hz * std::log2(1.0 + db_to_linear(snr));
}

inline RateBreakdown secure_rate(const WiretapCode& code) {
  code.validate();
  RateBreakdown r;
  r.decoding_rate_bps = shannon_rate(code.th1, code.bandwidth_hz);
  r.secrecy_overhead_bps = shannon_rate(code.th2, code.bandwidth_hz);
  r.r_max_bps = r.decoding_rate_bps - r.secrecy_overhead_bps;
  return r;
}

/// Threshold whose Shannon rate equals `rate_bps`.
inline Decibel solve_th1(double decoding_rate_bps, double bandwidth_hz) {
  require(bandwidth_hz > 0.0, ErrorCategory::invalid_argument, "bandwidth must be positive");
  require(decoding_rate_bps > 0.0, ErrorCategory::invalid_argument,
          "decoding rate must be positive (zero maps to a -inf threshold)");
  return Decibel{10.0 * std::log10(std::expm1(decoding_rate_bps / bandwidth_hz * std::log(2.0)))};
}

inline Decibel solve_th2(double r_max_bps, Decibel th1, double bandwidth_hz) {
  require(bandwidth_hz > 0.0, ErrorCategory::invalid_argument, "bandwidth must be positive");
  require(r_max_bps >= 0.0, ErrorCategory::invalid_argument, "r_max must be nonnegative");
  const double decoding = shannon_rate(th1, bandwidth_hz);
  require(r_max_bps <= decoding, ErrorCategory::invalid_argument,
          "r_max exceeds the decoding rate of th1; no valid th2");
  if (r_max_bps == 0.0) return th1;
  const double overhead = decoding - r_max_bps;
  if (overhead <= 0.0) return Decibel{-std::numeric_limits<double>::infinity()};
  return Decibel{10.0 * std::log10(std::expm1(overhead / bandwidth_hz * std::log(2.0)))};
}

/// Wiretap code from the two rate targets (decoding rate, secure rate).
inline WiretapCode code_from_rates(double decoding_rate_bps, double r_max_bps, double bandwidth_hz) {
  WiretapCode c;
  c.bandwidth_hz = bandwidth_hz;
  c.th1 = solve_th1(decoding_rate_bps, bandwidth_hz);
  c.th2 = solve_th2(r_max_bps, c.th1, bandwidth_hz);
  return c;
}

}  // namespace mmkey
