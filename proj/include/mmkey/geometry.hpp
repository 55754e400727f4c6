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
#include <numbers>

namespace mmkey {

inline constexpr double kSpeedOfLight = 299792458.0;

constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Wraps an angle to [-180, 180).
inline double wrap_deg(double a) {
  double w = std::fmod(a + 180.0, 360.0);
  if (w < 0.0) w += 360.0;
  return w - 180.0;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Direction of v in degrees: azimuth counter-clockwise from +x, elevation above the x-y plane.
inline double azimuth_deg(const Vec3& v) { return rad2deg(std::atan2(v.y, v.x)); }
inline double elevation_deg(const Vec3& v) { return rad2deg(std::atan2(v.z, std::hypot(v.x, v.y))); }

inline Vec3 direction(double az_deg, double el_deg) {
  const double a = deg2rad(az_deg), e = deg2rad(el_deg);
  return {std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)};
}

inline double wavelength(double carrier_hz) { return kSpeedOfLight / carrier_hz; }

}  // namespace mmkey
