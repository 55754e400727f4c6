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

#include <cmath>
#include <numbers>

#include "mmkey/channel.hpp"
#include "mmkey/raytrace.hpp"

using namespace mmkey;

namespace {

Reflector ground(double extent = 1e4) { return {"ground", Axis::z, 0.0, +1, -extent, extent, -extent, extent}; }

auto flat = [](double, double) { return Decibel{0.0}; };

const PropagationPath* find_path(const std::vector<PropagationPath>& ps, int bounces) {
  for (const auto& p : ps)
    if (p.bounces == bounces) return &p;
  return nullptr;
}

}  // namespace

TEST(Trace, TwoRayGeometry) {
  const Vec3 tx{0, 0, 2.0}, rx{30, 0, 1.0};
  const auto paths = trace_paths({}, {ground()}, tx, rx);
  ASSERT_EQ(paths.size(), 2u);
  const auto* direct = find_path(paths, 0);
  const auto* bounce = find_path(paths, 1);
  ASSERT_TRUE(direct && bounce);
  EXPECT_NEAR(direct->length_m, std::hypot(30.0, 1.0), 1e-12);
  EXPECT_NEAR(bounce->length_m, std::hypot(30.0, 3.0), 1e-12);
  EXPECT_NEAR(bounce->reflection_loss_db, 6.0, 1e-12);
  EXPECT_NEAR(bounce->departure_el_deg, -rad2deg(std::atan2(3.0, 30.0)), 1e-9);
  EXPECT_NEAR(bounce->arrival_el_deg, -rad2deg(std::atan2(3.0, 30.0)), 1e-9);
  EXPECT_NEAR(std::abs(direct->arrival_az_deg), 180.0, 1e-9);
  EXPECT_EQ(bounce->via, std::vector<std::string>{"ground"});
}

TEST(Trace, FiniteReflectorAndWrongSide) {
  const Vec3 tx{0, 0, 2.0}, rx{30, 0, 1.0};
  // Specular point is at x = 20; a plate covering x in [0, 10] misses it.
  const Reflector plate{"plate", Axis::z, 0.0, +1, 0.0, 10.0, -5.0, 5.0};
  EXPECT_EQ(trace_paths({}, {plate}, tx, rx).size(), 1u);
  const Reflector below{"below", Axis::z, 0.0, -1, -1e3, 1e3, -1e3, 1e3};
  EXPECT_EQ(trace_paths({}, {below}, tx, rx).size(), 1u);
}

TEST(Trace, OcclusionByBox) {
  const Box wall{{10, -5, 0}, {11, 5, 5}};
  const auto paths = trace_paths({wall}, {ground()}, {0, 0, 2}, {30, 0, 1});
  EXPECT_TRUE(paths.empty());
  // A kerb under the specular point removes only the ground bounce.
  const Box low{{19.5, -5, 0}, {20.5, 5, 0.5}};
  const auto some = trace_paths({low}, {ground()}, {0, 0, 2}, {30, 0, 1});
  ASSERT_EQ(some.size(), 1u);
  EXPECT_EQ(some[0].bounces, 0);
  EXPECT_THROW(trace_paths({wall}, {}, {10.5, 0, 1}, {30, 0, 1}), Error);
  EXPECT_THROW(trace_paths({}, {}, {1, 1, 1}, {1, 1, 1}), Error);
  EXPECT_THROW(trace_paths({}, {}, {0, 0, 1}, {1, 1, 1}, TraceConfig{6, 180, 3}), Error);
}

TEST(Trace, SecondOrderBetweenParallelPlates) {
  const double H = 4.0, a = 1.0, b = 3.0, d = 20.0;
  const Reflector floor_{"floor", Axis::z, 0.0, +1, -1e3, 1e3, -1e3, 1e3};
  const Reflector ceil_{"ceiling", Axis::z, H, -1, -1e3, 1e3, -1e3, 1e3};
  const auto paths = trace_paths({}, {floor_, ceil_}, {0, 0, a}, {d, 0, b}, TraceConfig{6, 180, 2});
  ASSERT_EQ(paths.size(), 5u);
  bool fc = false, cf = false;
  for (const auto& p : paths) {
    if (p.via == std::vector<std::string>{"floor", "ceiling"}) {
      fc = true;
      EXPECT_NEAR(p.length_m, std::hypot(d, 2 * H + a - b), 1e-9);
      EXPECT_NEAR(p.reflection_loss_db, 12.0, 1e-12);
    }
    if (p.via == std::vector<std::string>{"ceiling", "floor"}) {
      cf = true;
      EXPECT_NEAR(p.length_m, std::hypot(d, 2 * H - a + b), 1e-9);
    }
  }
  EXPECT_TRUE(fc && cf);
}

TEST(Combine, SinglePathIsFriis) {
  const auto paths = trace_paths({}, {}, {0, 0, 0}, {50, 0, 0});
  const auto g = combine_paths(paths, 70e9, [](double, double) { return Decibel{10.0}; }, flat);
  EXPECT_NEAR(g.coherent_db, 10.0 - fspl_db(50.0, 70e9), 1e-9);
  EXPECT_NEAR(g.incoherent_db, g.coherent_db, 1e-9);
  EXPECT_TRUE(std::isinf(combine_paths({}, 70e9, flat, flat).coherent_db));
}

TEST(Combine, TwoRayNullAndPeak) {
  const double f = 70e9, lambda = wavelength(f), h = 0.5;
  const TraceConfig lossless{0.0, 0.0, 1};
  for (double delta : {lambda / 2.0, lambda}) {
    const double d = (4 * h * h - delta * delta) / (2 * delta);
    const auto paths = trace_paths({}, {ground()}, {0, 0, h}, {d, 0, h}, lossless);
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_NEAR(paths[1].length_m - paths[0].length_m, delta, 1e-6);
    const auto g = combine_paths(paths, f, flat, flat, lossless);
    if (delta < lambda) EXPECT_LT(g.coherent_db, g.incoherent_db - 40.0);
    else EXPECT_NEAR(g.coherent_db, g.incoherent_db + 10 * std::log10(2.0), 0.01);
  }
}

TEST(Combine, CoherentSumBoundedByAmplitudeSum) {
  const PlatoonGeometry geom;
  const Vec3 tx = geom.mount_position(0, Mount{0.5, 0.0, 0.3});
  for (double x = -12; x <= 6; x += 1.5)
    for (double z = 0.2; z <= 4.0; z += 0.7) {
      const Vec3 p{x, 1.3, z};
      if (geom.inside_body(p)) continue;
      const auto paths = trace_platoon(geom, tx, p, TraceConfig{6, 180, 2});
      if (paths.empty()) continue;
      const auto g = combine_paths(paths, 70e9, flat, flat);
      EXPECT_LE(g.coherent_db, g.amplitude_sum_db + 1e-9);
      EXPECT_LE(g.incoherent_db, g.amplitude_sum_db + 1e-9);
    }
}

TEST(Platoon, GeometryAndMounts) {
  const PlatoonGeometry g;
  EXPECT_DOUBLE_EQ(g.rear_x(0), 0.0);
  EXPECT_DOUBLE_EQ(g.front_x(0), 4.5);
  EXPECT_DOUBLE_EQ(g.rear_x(1), -9.5);
  EXPECT_EQ(g.bodies().size(), 4u);
  EXPECT_EQ(g.reflectors().size(), 6u);
  const Vec3 m = g.mount_position(1, Mount{0.5, 0.2, 3.0});
  EXPECT_NEAR(m.x, -6.5, 1e-12);
  EXPECT_NEAR(m.z, 2.0, 1e-12);
  EXPECT_TRUE(g.inside_body({1.0, 0.0, 1.0}));
  EXPECT_FALSE(g.inside_body({4.0, 0.0, 1.2}));  // above the hood
  EXPECT_THROW(g.mount_position(0, Mount{0.5, 0.0, 4.0}), Error);  // over the hood
  EXPECT_THROW(g.mount_position(2, Mount{}), Error);
  PlatoonGeometry bad;
  bad.gap_m = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Platoon, LinkPathsOverTheRoofs) {
  const PlatoonGeometry g;
  const Vec3 tx = g.mount_position(0, Mount{0.5, 0.0, 0.3});
  const Vec3 rx = g.mount_position(1, Mount{0.5, 0.0, 3.0});
  const auto paths = trace_platoon(g, tx, rx);
  ASSERT_FALSE(paths.empty());
  EXPECT_EQ(paths[0].bounces, 0);
  EXPECT_NEAR(paths[0].length_m, distance(tx, rx), 1e-12);
  for (const auto& p : paths) EXPECT_GE(p.length_m, distance(tx, rx) - 1e-12);
  // Just behind the lead car at bumper height its own body blocks the direct ray.
  const auto low = trace_platoon(g, tx, {-0.5, 0.0, 0.2});
  EXPECT_EQ(find_path(low, 0), nullptr);
}
