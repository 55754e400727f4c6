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
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "mmkey/error.hpp"
#include "mmkey/geometry.hpp"
#include "mmkey/rfmath.hpp"

namespace mmkey {

using Weights = std::vector<std::complex<double>>;

/// Single-element power pattern: parabolic horizontal and vertical cuts
/// clipped at side-lobe floors, combined and clipped at the front-to-back
/// limit.
struct ElementPattern {
  double peak_gain_dbi = 8.0;
  double h_beamwidth_deg = 65.0;
  double v_beamwidth_deg = 65.0;
  double front_to_back_db = 30.0;
  double vertical_sidelobe_db = 30.0;

  /// az in [-180, 180] from boresight, el in [-90, 90] above the horizon.
  Decibel gain(double az_deg, double el_deg) const {
    const double az = wrap_deg(az_deg);
    const double horiz = std::min(front_to_back_db, 12.0 * std::pow(az / h_beamwidth_deg, 2));
    const double vert = std::min(vertical_sidelobe_db, 12.0 * std::pow(el_deg / v_beamwidth_deg, 2));
    return Decibel{peak_gain_dbi - std::min(front_to_back_db, horiz + vert)};
  }

  bool operator==(const ElementPattern&) const = default;
};

inline Decibel element_gain(double az_deg, double el_deg, const ElementPattern& p = {}) {
  return p.gain(az_deg, el_deg);
}

/// Uniform planar array in the local y-z plane, boresight along local +x.
struct ArrayGeometry {
  std::size_t rows = 6;
  std::size_t cols = 6;
  double element_spacing = 0.5;  // wavelengths
  double carrier_hz = 73e9;

  void validate() const {
    require(rows >= 1 && cols >= 1, ErrorCategory::invalid_argument, "array needs at least one element");
    require(element_spacing > 0.0, ErrorCategory::invalid_argument, "element spacing must be positive");
    require(carrier_hz > 0.0, ErrorCategory::invalid_argument, "carrier frequency must be positive");
  }

  std::size_t size() const { return rows * cols; }

  /// Phase of element (r, c) relative to the array centre for a plane wave
  /// toward local direction (az, el). Element index = r * cols + c.
  double phase(std::size_t r, std::size_t c, double az_deg, double el_deg) const {
    const double k = 2.0 * std::numbers::pi * element_spacing;
    const double u = std::cos(deg2rad(el_deg)) * std::sin(deg2rad(az_deg));
    const double v = std::sin(deg2rad(el_deg));
    const double cy = static_cast<double>(c) - 0.5 * static_cast<double>(cols - 1);
    const double rz = static_cast<double>(r) - 0.5 * static_cast<double>(rows - 1);
    return k * (cy * u + rz * v);
  }

  bool operator==(const ArrayGeometry&) const = default;
};

/// Conjugate-phase (unit modulus) weights steering toward local (az, el).
inline Weights steering_weights(const ArrayGeometry& g, double az_deg, double el_deg) {
  Weights w(g.size());
  for (std::size_t r = 0; r < g.rows; ++r)
    for (std::size_t c = 0; c < g.cols; ++c) w[r * g.cols + c] = std::polar(1.0, -g.phase(r, c, az_deg, el_deg));
  return w;
}

inline Weights uniform_weights(const ArrayGeometry& g) { return Weights(g.size(), {1.0, 0.0}); }

inline constexpr double kArrayFactorFloorDb = -50.0;

/// 20 log10(|sum w_i e^{j phase_i}| / sqrt(N)), floored. With unit-modulus
/// weights the maximum is 10 log10(N).
inline Decibel array_factor(const ArrayGeometry& g, const Weights& w, double az_deg, double el_deg,
                            double floor_db = kArrayFactorFloorDb) {
  require(w.size() == g.size(), ErrorCategory::invalid_argument,
          "weights length " + std::to_string(w.size()) + " does not match " + std::to_string(g.size()) +
              " array elements");
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t r = 0; r < g.rows; ++r)
    for (std::size_t c = 0; c < g.cols; ++c) sum += w[r * g.cols + c] * std::polar(1.0, g.phase(r, c, az_deg, el_deg));
  const double mag = std::abs(sum) / std::sqrt(static_cast<double>(g.size()));
  if (mag <= 0.0) return Decibel{floor_db};
  return Decibel{std::max(floor_db, 20.0 * std::log10(mag))};
}

inline Decibel array_gain(const ArrayGeometry& g, const Weights& w, double az_deg, double el_deg,
                          const ElementPattern& element = {}, double floor_db = kArrayFactorFloorDb) {
  return element.gain(az_deg, el_deg) + array_factor(g, w, az_deg, el_deg, floor_db);
}

/// An array mounted with its boresight at a global azimuth.
struct PlanarArray {
  ArrayGeometry geometry;
  ElementPattern element;
  double boresight_az_deg = 0.0;
  double af_floor_db = kArrayFactorFloorDb;

  Decibel gain(const Weights& w, double global_az_deg, double el_deg) const {
    return array_gain(geometry, w, wrap_deg(global_az_deg - boresight_az_deg), el_deg, element, af_floor_db);
  }

  Weights steer(double global_az_deg, double el_deg) const {
    return steering_weights(geometry, wrap_deg(global_az_deg - boresight_az_deg), el_deg);
  }

  /// Upper bound over all directions.
  double max_gain_dbi() const { return element.peak_gain_dbi + 10.0 * std::log10(static_cast<double>(geometry.size())); }
};

struct CodebookConfig {
  std::size_t sectors = 36;
  double first_center_deg = 0.0;
  double separation_deg = 10.0;
  std::size_t arrays = 3;
  std::size_t array_first_sector = 0;  // sector where array 0's contiguous block starts
  double steer_el_deg = 0.0;

  void validate() const {
    require(sectors >= 1, ErrorCategory::invalid_argument, "codebook needs at least one sector");
    require(arrays >= 1 && sectors % arrays == 0, ErrorCategory::invalid_argument,
            "sector count must split evenly over the arrays");
    require(array_first_sector < sectors, ErrorCategory::invalid_argument, "array_first_sector out of range");
  }

  bool operator==(const CodebookConfig&) const = default;
};

/// Sector codebook of a multi-array station. Each array owns a contiguous
/// block of sectors and faces the middle of its block; a sector's weights
/// steer its array toward the sector centre.
class SectorCodebook {
 public:
  SectorCodebook() : SectorCodebook(CodebookConfig{}, ArrayGeometry{}) {}

  SectorCodebook(const CodebookConfig& cfg, const ArrayGeometry& geometry, const ElementPattern& element = {},
                 double af_floor_db = kArrayFactorFloorDb)
      : cfg_(cfg) {
    cfg.validate();
    geometry.validate();
    const std::size_t per_array = cfg.sectors / cfg.arrays;
    arrays_.resize(cfg.arrays);
    for (std::size_t a = 0; a < cfg.arrays; ++a) {
      // Circular mean of the block's sector centres.
      const double first = center(cfg.array_first_sector + a * per_array);
      const double span = cfg.separation_deg * static_cast<double>(per_array - 1);
      arrays_[a] = PlanarArray{geometry, element, wrap_deg(first + 0.5 * span), af_floor_db};
    }
    sector_array_.resize(cfg.sectors);
    weights_.resize(cfg.sectors);
    for (std::size_t s = 0; s < cfg.sectors; ++s) {
      const std::size_t rel = (s + cfg.sectors - cfg.array_first_sector) % cfg.sectors;
      sector_array_[s] = rel / per_array;
      weights_[s] = arrays_[sector_array_[s]].steer(center(s), cfg.steer_el_deg);
    }
  }

  std::size_t size() const { return cfg_.sectors; }
  const CodebookConfig& config() const { return cfg_; }

  double center(std::size_t sector) const {
    return wrap_deg(cfg_.first_center_deg + cfg_.separation_deg * static_cast<double>(sector));
  }

  std::size_t array_of(std::size_t sector) const {
    check(sector);
    return sector_array_[sector];
  }

  const PlanarArray& array(std::size_t a) const { return arrays_.at(a); }
  std::size_t array_count() const { return arrays_.size(); }

  const Weights& weights(std::size_t sector) const {
    check(sector);
    return weights_[sector];
  }

  /// Transmit gain of `sector` toward a global direction.
  Decibel gain(std::size_t sector, double global_az_deg, double el_deg) const {
    check(sector);
    return arrays_[sector_array_[sector]].gain(weights_[sector], global_az_deg, el_deg);
  }

  /// Array-factor part only (no element taper).
  Decibel array_factor_gain(std::size_t sector, double global_az_deg, double el_deg) const {
    check(sector);
    const auto& a = arrays_[sector_array_[sector]];
    return array_factor(a.geometry, weights_[sector], wrap_deg(global_az_deg - a.boresight_az_deg), el_deg,
                        a.af_floor_db);
  }

 private:
  void check(std::size_t sector) const {
    require(sector < cfg_.sectors, ErrorCategory::invalid_argument,
            "sector id " + std::to_string(sector) + " out of range [0, " + std::to_string(cfg_.sectors) + ")");
  }

  CodebookConfig cfg_;
  std::vector<PlanarArray> arrays_;
  std::vector<std::size_t> sector_array_;
  std::vector<Weights> weights_;
};

inline const Weights& sector_weights(const SectorCodebook& codebook, std::size_t sector_id) {
  return codebook.weights(sector_id);
}

/// Direction-independent reception pattern.
struct QuasiOmni {
  double gain_dbi = 0.0;
  Decibel gain(double /*az_deg*/ = 0.0, double /*el_deg*/ = 0.0) const { return Decibel{gain_dbi}; }

  bool operator==(const QuasiOmni&) const = default;
};

inline Decibel quasi_omni_gain(const QuasiOmni& q = {}) { return q.gain(); }

/// CSV of (az, el, dBi) over a regular angular grid.
template <class GainFn>
std::string pattern_csv(GainFn&& gain, double az_step_deg, double el_step_deg, double el_min = -90.0,
                        double el_max = 90.0) {
  require(az_step_deg > 0.0 && el_step_deg > 0.0, ErrorCategory::invalid_argument, "angular steps must be positive");
  std::ostringstream out;
  out.precision(10);
  out << "az_deg,el_deg,gain_dbi\n";
  const auto n_el = static_cast<long>(std::floor((el_max - el_min) / el_step_deg + 1e-9));
  const auto n_az = static_cast<long>(std::floor(360.0 / az_step_deg + 1e-9));
  for (long i = 0; i <= n_el; ++i) {
    const double el = el_min + el_step_deg * static_cast<double>(i);
    for (long j = 0; j < n_az; ++j) {
      const double az = -180.0 + az_step_deg * static_cast<double>(j);
      out << az << ',' << el << ',' << gain(az, el).value << '\n';
    }
  }
  return out.str();
}

}  // namespace mmkey
