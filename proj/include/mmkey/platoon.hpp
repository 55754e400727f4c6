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
#include <limits>
#include <string>
#include <vector>

#include "mmkey/antenna.hpp"
#include "mmkey/channel.hpp"
#include "mmkey/error.hpp"
#include "mmkey/raytrace.hpp"

namespace mmkey {

/// Where a link's arrays sit: the transmitter on car `car`, the receiver on
/// the car behind it.
struct PlatoonLinkSpec {
  std::string name;
  std::size_t car = 0;
  Mount tx_mount{0.5, 0.0, 0.3};
  Mount rx_mount{0.5, 0.0, 3.0};
  double target_snr_db = 50.0;  // calibration target at the legitimate receiver

  bool operator==(const PlatoonLinkSpec&) const = default;
};

/// A calibrated rear-facing link between consecutive cars.
struct PlatoonLink {
  std::string name;
  PlatoonGeometry geometry;
  std::vector<Box> bodies;
  std::vector<Reflector> reflectors;
  TraceConfig trace;
  LinkBudgetConfig budget;
  PlanarArray tx_array;
  Weights weights;
  QuasiOmni rx_antenna;
  Vec3 tx;
  Vec3 rx;
  double calibration_db = 0.0;

  /// Uncalibrated SNR at p, in dB.
  double raw_snr_db(const Vec3& p) const {
    const auto paths = trace_paths(bodies, reflectors, tx, p, trace);
    if (paths.empty()) return -std::numeric_limits<double>::infinity();
    const auto g = combine_paths(
        paths, tx_array.geometry.carrier_hz, [&](double az, double el) { return tx_array.gain(weights, az, el); },
        [&](double az, double el) { return rx_antenna.gain(az, el); }, trace);
    return budget.tx_power.value + g.coherent_db - budget.noise_floor.value;
  }

  Decibel snr_at(const Vec3& p) const { return Decibel{raw_snr_db(p) + calibration_db}; }
  Decibel legitimate_snr() const { return snr_at(rx); }
};

/// Builds the link, steers the transmit array at the receiver and picks the
/// additive calibration that puts the receiver at `spec.target_snr_db`.
inline PlatoonLink make_platoon_link(const PlatoonGeometry& geom, const PlatoonLinkSpec& spec, const ArrayGeometry& array,
                                     const ElementPattern& element, const LinkBudgetConfig& budget, const TraceConfig& trace,
                                     const QuasiOmni& rx_antenna = {}) {
  geom.validate();
  array.validate();
  require(spec.car + 1 < geom.cars, ErrorCategory::geometry, "link " + spec.name + " needs a car behind the transmitter");
  PlatoonLink link;
  link.name = spec.name;
  link.geometry = geom;
  link.bodies = geom.bodies();
  link.reflectors = geom.reflectors();
  link.trace = trace;
  link.budget = budget;
  link.rx_antenna = rx_antenna;
  link.tx = geom.mount_position(spec.car, spec.tx_mount);
  link.rx = geom.mount_position(spec.car + 1, spec.rx_mount);
  link.tx_array = PlanarArray{array, element, 180.0, kArrayFactorFloorDb};
  const Vec3 d = link.rx - link.tx;
  link.weights = link.tx_array.steer(azimuth_deg(d), elevation_deg(d));
  const double raw = link.raw_snr_db(link.rx);
  require(std::isfinite(raw), ErrorCategory::geometry, "link " + spec.name + " has no propagation path to its receiver");
  link.calibration_db = spec.target_snr_db - raw;
  return link;
}

}  // namespace mmkey
