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
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

#include "mmkey/error.hpp"
#include "mmkey/geometry.hpp"
#include "mmkey/rfmath.hpp"

namespace mmkey {

/// Mixes a list of integers into one 64-bit seed.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  words.reserve(parts.size() * 2);
  for (auto p : parts) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

enum class NoiseReference { integrated, per_hz };

struct LinkBudgetConfig {
  Dbm tx_power{30.0};
  Dbm noise_floor{-99.0};  // integrated noise power over the band
  double bandwidth_hz = 1e9;

  /// Budget whose noise is given either as total power or as a density
  /// that is integrated over the bandwidth.
  static LinkBudgetConfig with_noise(Dbm tx_power, double noise_dbm, NoiseReference ref, double bandwidth_hz) {
    require(bandwidth_hz > 0.0, ErrorCategory::invalid_argument, "bandwidth must be positive");
    const double n = ref == NoiseReference::per_hz ? noise_dbm + 10.0 * std::log10(bandwidth_hz) : noise_dbm;
    return {tx_power, Dbm{n}, bandwidth_hz};
  }

  void validate() const {
    require(bandwidth_hz > 0.0, ErrorCategory::invalid_argument, "bandwidth must be positive");
  }

  bool operator==(const LinkBudgetConfig&) const = default;
};

enum class LosMode { stochastic, always_los, always_nlos };

/// Outdoor mmWave model: distance-dependent LOS probability, log-distance
/// path loss anchored at the 1 m free-space loss, spatially correlated
/// log-normal shadowing and Rayleigh fading on NLOS links.
struct ChannelModelConfig {
  double carrier_hz = 73e9;
  double ple_los = 2.0;
  double ple_nlos = 3.3;
  double sigma_los_db = 4.0;
  double sigma_nlos_db = 7.8;
  double correlation_distance_m = 10.0;
  double los_d1_m = 18.0;
  double los_d2_m = 36.0;
  LosMode los_mode = LosMode::stochastic;
  bool shadowing = true;
  bool nlos_fading = true;
  std::size_t shadow_components = 128;

  void validate() const {
    require(carrier_hz > 0.0, ErrorCategory::invalid_argument, "carrier must be positive");
    require(ple_los > 0.0 && ple_nlos > 0.0, ErrorCategory::invalid_argument, "path loss exponents must be positive");
    require(sigma_los_db >= 0.0 && sigma_nlos_db >= 0.0, ErrorCategory::invalid_argument, "shadowing sigma must be >= 0");
    require(correlation_distance_m > 0.0, ErrorCategory::invalid_argument, "correlation distance must be positive");
    require(los_d1_m > 0.0 && los_d2_m > 0.0, ErrorCategory::invalid_argument, "LOS probability distances must be positive");
    require(shadow_components >= 1, ErrorCategory::invalid_argument, "shadow field needs at least one component");
  }

  /// No randomness at all: LOS everywhere, no shadowing, no fading.
  static ChannelModelConfig deterministic() {
    ChannelModelConfig c;
    c.los_mode = LosMode::always_los;
    c.shadowing = false;
    c.nlos_fading = false;
    return c;
  }

  bool operator==(const ChannelModelConfig&) const = default;
};

inline double fspl_db(double distance_m, double carrier_hz) {
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * carrier_hz / kSpeedOfLight);
}

inline double los_probability(double d, const ChannelModelConfig& cfg = {}) {
  const double e = std::exp(-d / cfg.los_d2_m);
  return std::min(cfg.los_d1_m / d, 1.0) * (1.0 - e) + e;
}

struct ChannelRealization {
  double pathloss_db = 0.0;
  double shadowing_db = 0.0;  // positive values attenuate
  double fading_db = 0.0;     // positive values attenuate
  bool los = true;

  bool operator==(const ChannelRealization&) const = default;
};

/// Zero-mean, unit-variance Gaussian field over the plane with isotropic
/// correlation exp(-d / correlation_distance). Realized as a sum of random
/// plane waves whose wavenumbers follow the 2-D spectrum of the exponential
/// kernel, so the correlation holds exactly across seeds.
class ShadowField {
 public:
  ShadowField() = default;

  ShadowField(double correlation_distance_m, std::uint64_t seed, std::size_t components = 128)
      : correlation_distance_m_(correlation_distance_m) {
    require(correlation_distance_m > 0.0, ErrorCategory::invalid_argument, "correlation distance must be positive");
    require(components >= 1, ErrorCategory::invalid_argument, "shadow field needs at least one component");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    waves_.reserve(components);
    for (std::size_t i = 0; i < components; ++i) {
      // Radial CDF of the spectrum: F(k) = 1 - (1 + (dc k)^2)^(-1/2).
      const double u = unit(rng);
      const double one_minus = 1.0 - u;
      const double k = std::sqrt(1.0 / (one_minus * one_minus) - 1.0) / correlation_distance_m;
      const double dir = 2.0 * std::numbers::pi * unit(rng);
      const double phase = 2.0 * std::numbers::pi * unit(rng);
      waves_.push_back({k * std::cos(dir), k * std::sin(dir), phase});
    }
    scale_ = std::sqrt(2.0 / static_cast<double>(components));
  }

  double value(const Vec3& p) const {
    double s = 0.0;
    for (const auto& w : waves_) s += std::cos(w.kx * p.x + w.ky * p.y + w.phase);
    return scale_ * s;
  }

  double correlation_distance() const { return correlation_distance_m_; }
  bool empty() const { return waves_.empty(); }

 private:
  struct Wave {
    double kx, ky, phase;
  };
  double correlation_distance_m_ = 10.0;
  double scale_ = 0.0;
  std::vector<Wave> waves_;
};

inline ShadowField make_shadow_field(const ChannelModelConfig& cfg, std::uint64_t seed) {
  return ShadowField(cfg.correlation_distance_m, seed, cfg.shadow_components);
}

/// One realization of the tx -> rx link. The field carries the transmitter's
/// shadowing map; `seed` drives the LOS draw and the NLOS fading.
inline ChannelRealization sample_realization(const Vec3& tx, const Vec3& rx, const ShadowField& field,
                                             std::uint64_t seed, const ChannelModelConfig& cfg = {}) {
  const double d = distance(tx, rx);
  require(d > 0.0, ErrorCategory::geometry, "transmitter and receiver positions coincide");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ChannelRealization r;
  const double u = unit(rng);
  switch (cfg.los_mode) {
    case LosMode::always_los: r.los = true; break;
    case LosMode::always_nlos: r.los = false; break;
    case LosMode::stochastic: r.los = u < los_probability(d, cfg); break;
  }
  const double n = r.los ? cfg.ple_los : cfg.ple_nlos;
  const double free_space = fspl_db(d, cfg.carrier_hz);
  r.pathloss_db = std::max(free_space, fspl_db(1.0, cfg.carrier_hz) + 10.0 * n * std::log10(d));
  if (cfg.shadowing && !field.empty()) r.shadowing_db = (r.los ? cfg.sigma_los_db : cfg.sigma_nlos_db) * field.value(rx);
  if (cfg.nlos_fading && !r.los) {
    std::exponential_distribution<double> power(1.0);
    r.fading_db = -10.0 * std::log10(std::max(power(rng), 1e-300));
  }
  return r;
}

inline Decibel snr(const LinkBudgetConfig& cfg, Decibel tx_gain, Decibel rx_gain, const ChannelRealization& r) {
  return (cfg.tx_power + tx_gain + rx_gain - Decibel{r.pathloss_db + r.shadowing_db + r.fading_db}) - cfg.noise_floor;
}

}  // namespace mmkey
