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
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mmkey/error.hpp"
#include "mmkey/geometry.hpp"
#include "mmkey/rfmath.hpp"

namespace mmkey {

struct Box {
  Vec3 lo;
  Vec3 hi;

  bool contains(const Vec3& p, double eps = 0.0) const {
    return p.x > lo.x + eps && p.x < hi.x - eps && p.y > lo.y + eps && p.y < hi.y - eps && p.z > lo.z + eps &&
           p.z < hi.z - eps;
  }

  /// Does the open segment a->b pass through the box interior?
  bool blocks(const Vec3& a, const Vec3& b, double eps = 1e-9) const {
    double t0 = eps, t1 = 1.0 - eps;
    const double o[3] = {a.x, a.y, a.z};
    const double d[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
    const double l[3] = {lo.x + eps, lo.y + eps, lo.z + eps};
    const double h[3] = {hi.x - eps, hi.y - eps, hi.z - eps};
    for (int i = 0; i < 3; ++i) {
      if (std::abs(d[i]) < 1e-15) {
        if (o[i] <= l[i] || o[i] >= h[i]) return false;
        continue;
      }
      double ta = (l[i] - o[i]) / d[i];
      double tb = (h[i] - o[i]) / d[i];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
      if (t0 >= t1) return false;
    }
    return true;
  }
};

enum class Axis { x = 0, y = 1, z = 2 };

/// Axis-aligned finite reflecting rectangle. `outward` is +1 or -1: the side
/// of the plane that waves reflect on.
struct Reflector {
  std::string name;
  Axis axis = Axis::z;
  double offset = 0.0;
  int outward = 1;
  // Bounds on the two remaining coordinates, in x, y, z order.
  double u_min = 0, u_max = 0, v_min = 0, v_max = 0;

  static double coord(const Vec3& p, Axis a) { return a == Axis::x ? p.x : a == Axis::y ? p.y : p.z; }

  double side(const Vec3& p) const { return (coord(p, axis) - offset) * outward; }

  Vec3 mirror(const Vec3& p) const {
    Vec3 m = p;
    const double d = 2.0 * (offset - coord(p, axis));
    if (axis == Axis::x) m.x += d;
    else if (axis == Axis::y) m.y += d;
    else m.z += d;
    return m;
  }

  std::pair<double, double> in_plane(const Vec3& p) const {
    if (axis == Axis::x) return {p.y, p.z};
    if (axis == Axis::y) return {p.x, p.z};
    return {p.x, p.y};
  }

  /// Intersection of segment a->b with the bounded rectangle.
  std::optional<Vec3> hit(const Vec3& a, const Vec3& b) const {
    const double ca = coord(a, axis) - offset, cb = coord(b, axis) - offset;
    if (ca * cb > 0.0 || ca == cb) return std::nullopt;
    const double t = ca / (ca - cb);
    const Vec3 p = a + (b - a) * t;
    const auto [u, v] = in_plane(p);
    if (u < u_min || u > u_max || v < v_min || v > v_max) return std::nullopt;
    return p;
  }
};

struct CarShape {
  double length = 4.5;
  double width = 1.8;
  double roof_height = 1.5;
  double hood_height = 1.0;
  double hood_length = 1.2;

  bool operator==(const CarShape&) const = default;
};

/// Antenna position on a car roof: height above the roof, lateral offset and
/// distance from the rear of the car.
struct Mount {
  double height_above_roof = 0.5;
  double lateral_m = 0.0;
  double from_rear_m = 0.5;

  bool operator==(const Mount&) const = default;
};

/// Cars in a line along +x (the driving direction), car 0 in front.
struct PlatoonGeometry {
  CarShape car;
  std::size_t cars = 2;
  double gap_m = 5.0;
  bool reflect_roof = true;
  bool reflect_hood = true;
  bool reflect_back = true;

  void validate() const {
    require(cars >= 1, ErrorCategory::geometry, "platoon needs at least one car");
    require(gap_m > 0.0, ErrorCategory::geometry, "inter-vehicle gap must be positive");
    require(car.length > 0 && car.width > 0 && car.roof_height > 0, ErrorCategory::geometry, "car dimensions must be positive");
    require(car.hood_length >= 0 && car.hood_length < car.length, ErrorCategory::geometry, "hood must be shorter than the car");
    require(car.hood_height > 0 && car.hood_height <= car.roof_height, ErrorCategory::geometry,
            "hood height must lie in (0, roof height]");
  }

  double rear_x(std::size_t i) const { return -static_cast<double>(i) * (car.length + gap_m); }
  double front_x(std::size_t i) const { return rear_x(i) + car.length; }
  double cabin_front_x(std::size_t i) const { return front_x(i) - car.hood_length; }

  std::vector<Box> bodies() const {
    std::vector<Box> out;
    const double w = 0.5 * car.width;
    for (std::size_t i = 0; i < cars; ++i) {
      out.push_back({{rear_x(i), -w, 0.0}, {cabin_front_x(i), w, car.roof_height}});
      if (car.hood_length > 0) out.push_back({{cabin_front_x(i), -w, 0.0}, {front_x(i), w, car.hood_height}});
    }
    return out;
  }

  std::vector<Reflector> reflectors() const {
    std::vector<Reflector> out;
    const double w = 0.5 * car.width;
    for (std::size_t i = 0; i < cars; ++i) {
      const std::string tag = "car" + std::to_string(i) + ".";
      if (reflect_roof) out.push_back({tag + "roof", Axis::z, car.roof_height, +1, rear_x(i), cabin_front_x(i), -w, w});
      if (reflect_hood && car.hood_length > 0)
        out.push_back({tag + "hood", Axis::z, car.hood_height, +1, cabin_front_x(i), front_x(i), -w, w});
      if (reflect_back) out.push_back({tag + "back", Axis::x, rear_x(i), -1, -w, w, 0.0, car.roof_height});
    }
    return out;
  }

  Vec3 mount_position(std::size_t car_index, const Mount& m) const {
    require(car_index < cars, ErrorCategory::geometry, "mount on a car outside the platoon");
    require(m.height_above_roof >= 0.0, ErrorCategory::geometry, "mount height must be >= 0");
    const double cabin = car.length - car.hood_length;
    require(m.from_rear_m >= 0.0 && m.from_rear_m <= cabin && std::abs(m.lateral_m) <= 0.5 * car.width,
            ErrorCategory::geometry, "mount point is not on the roof");
    return {rear_x(car_index) + m.from_rear_m, m.lateral_m, car.roof_height + m.height_above_roof};
  }

  bool inside_body(const Vec3& p) const {
    for (const auto& b : bodies())
      if (b.contains(p)) return true;
    return false;
  }

  bool operator==(const PlatoonGeometry&) const = default;
};

struct TraceConfig {
  double reflection_loss_db = 6.0;
  double reflection_phase_deg = 180.0;
  int max_order = 1;

  bool operator==(const TraceConfig&) const = default;
};

struct PropagationPath {
  double length_m = 0.0;
  int bounces = 0;
  double reflection_loss_db = 0.0;
  double departure_az_deg = 0.0;
  double departure_el_deg = 0.0;
  double arrival_az_deg = 0.0;  // direction the wave arrives from, seen at the receiver
  double arrival_el_deg = 0.0;
  std::vector<std::string> via;
};

namespace detail {

inline bool occluded(const std::vector<Box>& bodies, const Vec3& a, const Vec3& b) {
  for (const auto& box : bodies)
    if (box.blocks(a, b)) return true;
  return false;
}

inline PropagationPath make_path(const std::vector<Vec3>& pts, int bounces, double loss_db, std::vector<std::string> via) {
  PropagationPath p;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) p.length_m += distance(pts[i], pts[i + 1]);
  p.bounces = bounces;
  p.reflection_loss_db = loss_db * bounces;
  const Vec3 dep = pts[1] - pts[0];
  const Vec3 arr = pts[pts.size() - 2] - pts.back();
  p.departure_az_deg = azimuth_deg(dep);
  p.departure_el_deg = elevation_deg(dep);
  p.arrival_az_deg = azimuth_deg(arr);
  p.arrival_el_deg = elevation_deg(arr);
  p.via = std::move(via);
  return p;
}

}  // namespace detail

/// Image-method tracing between two points: the direct path when no car
/// body blocks it, plus specular reflections off the platoon's roof, hood
/// and back surfaces up to `max_order` bounces.
inline std::vector<PropagationPath> trace_paths(const std::vector<Box>& bodies, const std::vector<Reflector>& reflectors,
                                                const Vec3& tx, const Vec3& rx, const TraceConfig& cfg = {}) {
  require(cfg.max_order >= 0 && cfg.max_order <= 2, ErrorCategory::invalid_argument, "reflection order must be 0, 1 or 2");
  for (const auto& b : bodies) {
    require(!b.contains(rx), ErrorCategory::geometry, "receiver lies inside a car body");
    require(!b.contains(tx), ErrorCategory::geometry, "transmitter lies inside a car body");
  }
  require(distance(tx, rx) > 0.0, ErrorCategory::geometry, "transmitter and receiver coincide");

  std::vector<PropagationPath> out;
  if (!detail::occluded(bodies, tx, rx)) out.push_back(detail::make_path({tx, rx}, 0, 0.0, {}));

  if (cfg.max_order >= 1) {
    for (const auto& r : reflectors) {
      if (r.side(tx) <= 0.0 || r.side(rx) <= 0.0) continue;
      const auto p = r.hit(r.mirror(tx), rx);
      if (!p) continue;
      if (detail::occluded(bodies, tx, *p) || detail::occluded(bodies, *p, rx)) continue;
      out.push_back(detail::make_path({tx, *p, rx}, 1, cfg.reflection_loss_db, {r.name}));
    }
  }
  if (cfg.max_order >= 2) {
    for (std::size_t i = 0; i < reflectors.size(); ++i) {
      for (std::size_t j = 0; j < reflectors.size(); ++j) {
        if (i == j) continue;
        const auto& r1 = reflectors[i];
        const auto& r2 = reflectors[j];
        if (r1.side(tx) <= 0.0 || r2.side(rx) <= 0.0) continue;
        const Vec3 img1 = r1.mirror(tx);
        const Vec3 img2 = r2.mirror(img1);
        const auto p2 = r2.hit(img2, rx);
        if (!p2) continue;
        const auto p1 = r1.hit(img1, *p2);
        if (!p1) continue;
        if (r2.side(*p1) <= 0.0 || r1.side(*p2) <= 0.0) continue;
        if (detail::occluded(bodies, tx, *p1) || detail::occluded(bodies, *p1, *p2) || detail::occluded(bodies, *p2, rx))
          continue;
        out.push_back(detail::make_path({tx, *p1, *p2, rx}, 2, cfg.reflection_loss_db, {r1.name, r2.name}));
      }
    }
  }
  return out;
}

inline std::vector<PropagationPath> trace_platoon(const PlatoonGeometry& geom, const Vec3& tx, const Vec3& rx,
                                                  const TraceConfig& cfg = {}) {
  geom.validate();
  return trace_paths(geom.bodies(), geom.reflectors(), tx, rx, cfg);
}

/// Complex baseband amplitude of one path including antenna gains.
inline std::complex<double> path_amplitude(const PropagationPath& p, double carrier_hz, Decibel tx_gain, Decibel rx_gain,
                                           const TraceConfig& cfg = {}) {
  const double lambda = wavelength(carrier_hz);
  const double mag = lambda / (4.0 * std::numbers::pi * p.length_m) *
                     std::pow(10.0, (tx_gain.value + rx_gain.value - p.reflection_loss_db) / 20.0);
  const double phase = -2.0 * std::numbers::pi * p.length_m / lambda + deg2rad(cfg.reflection_phase_deg) * p.bounces;
  return std::polar(mag, phase);
}

struct MultipathGain {
  double coherent_db = -std::numeric_limits<double>::infinity();    // 20 log10 |sum a_i|
  double incoherent_db = -std::numeric_limits<double>::infinity();  // 10 log10 sum |a_i|^2
  double amplitude_sum_db = -std::numeric_limits<double>::infinity();  // 20 log10 sum |a_i|
};

/// Sums path amplitudes. `tx_gain(az, el)` is evaluated at each departure
/// direction, `rx_gain(az, el)` at each arrival direction.
template <class TxGain, class RxGain>
MultipathGain combine_paths(const std::vector<PropagationPath>& paths, double carrier_hz, TxGain&& tx_gain,
                            RxGain&& rx_gain, const TraceConfig& cfg = {}) {
  std::complex<double> sum{0.0, 0.0};
  double power = 0.0, amp = 0.0;
  for (const auto& p : paths) {
    const auto a = path_amplitude(p, carrier_hz, tx_gain(p.departure_az_deg, p.departure_el_deg),
                                  rx_gain(p.arrival_az_deg, p.arrival_el_deg), cfg);
    sum += a;
    power += std::norm(a);
    amp += std::abs(a);
  }
  MultipathGain g;
  if (paths.empty()) return g;
  const double s = std::abs(sum);
  g.coherent_db = s > 0.0 ? 20.0 * std::log10(s) : -std::numeric_limits<double>::infinity();
  g.incoherent_db = power > 0.0 ? 10.0 * std::log10(power) : g.incoherent_db;
  g.amplitude_sum_db = amp > 0.0 ? 20.0 * std::log10(amp) : g.amplitude_sum_db;
  return g;
}

}  // namespace mmkey
