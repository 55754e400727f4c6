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
#include <random>

#include "mmkey/channel.hpp"

using namespace mmkey;

namespace {

double oracle_fspl(double d, double f) { return 20.0 * std::log10(d) + 20.0 * std::log10(f) - 147.55221677811664; }

}  // namespace

TEST(PathLoss, FreeSpaceReference) {
  EXPECT_NEAR(fspl_db(1.0, 73e9), 69.714, 1e-3);
  EXPECT_NEAR(fspl_db(1.0, 70e9), 69.350, 1e-3);
  for (double d : {0.3, 1.0, 7.0, 120.0}) EXPECT_NEAR(fspl_db(d, 28e9), oracle_fspl(d, 28e9), 1e-9);
  EXPECT_NEAR(fspl_db(2.0, 73e9) - fspl_db(1.0, 73e9), 6.0206, 1e-4);
}

TEST(PathLoss, LogDistanceAnchoredAtOneMetre) {
  const ChannelModelConfig los = [] {
    auto c = ChannelModelConfig::deterministic();
    return c;
  }();
  ShadowField none;
  const auto r = sample_realization({0, 0, 0}, {10, 0, 0}, none, 1, los);
  EXPECT_NEAR(r.pathloss_db, fspl_db(1.0, 73e9) + 20.0, 1e-9);
  EXPECT_TRUE(r.los);
  EXPECT_DOUBLE_EQ(r.shadowing_db, 0.0);
  EXPECT_DOUBLE_EQ(r.fading_db, 0.0);

  auto nlos = los;
  nlos.los_mode = LosMode::always_nlos;
  const auto n = sample_realization({0, 0, 0}, {10, 0, 0}, none, 1, nlos);
  EXPECT_FALSE(n.los);
  EXPECT_NEAR(n.pathloss_db, fspl_db(1.0, 73e9) + 33.0, 1e-9);
  // Below one metre the free-space loss dominates.
  const auto close = sample_realization({0, 0, 0}, {0.5, 0, 0}, none, 1, nlos);
  EXPECT_NEAR(close.pathloss_db, fspl_db(0.5, 73e9), 1e-9);
  EXPECT_THROW(sample_realization({1, 1, 0}, {1, 1, 0}, none, 1, los), Error);
}

TEST(PathLoss, NeverBelowFreeSpace) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 300.0);
  ChannelModelConfig cfg;
  cfg.shadowing = false;
  cfg.nlos_fading = false;
  ShadowField none;
  for (int i = 0; i < 500; ++i) {
    const double d = u(rng);
    const auto r = sample_realization({0, 0, 0}, {d, 0, 0}, none, rng(), cfg);
    EXPECT_GE(r.pathloss_db, fspl_db(d, cfg.carrier_hz) - 1e-12);
  }
}

TEST(LosProbability, Shape) {
  EXPECT_DOUBLE_EQ(los_probability(1.0), 1.0);
  EXPECT_DOUBLE_EQ(los_probability(18.0), 1.0);
  EXPECT_NEAR(los_probability(36.0), 0.5 + 0.5 * std::exp(-1.0), 1e-12);
  double prev = 1.0;
  for (double d = 1.0; d < 500.0; d += 3.0) {
    const double p = los_probability(d);
    EXPECT_LE(p, prev + 1e-15);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
}

TEST(LosProbability, EmpiricalFrequency) {
  ChannelModelConfig cfg;
  ShadowField none;
  const int n = 20000;
  int los = 0;
  for (int i = 0; i < n; ++i) los += sample_realization({0, 0, 0}, {60, 0, 0}, none, derive_seed({7, std::uint64_t(i)}), cfg).los;
  const double p = los_probability(60.0);
  EXPECT_NEAR(static_cast<double>(los) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(Fading, ExponentialPower) {
  auto cfg = ChannelModelConfig::deterministic();
  cfg.los_mode = LosMode::always_nlos;
  cfg.nlos_fading = true;
  ShadowField none;
  const int n = 40000;
  double mean_power = 0.0;
  int deep = 0;
  for (int i = 0; i < n; ++i) {
    const auto r = sample_realization({0, 0, 0}, {20, 0, 0}, none, derive_seed({3, std::uint64_t(i)}), cfg);
    mean_power += std::pow(10.0, -r.fading_db / 10.0);
    deep += r.fading_db > 10.0;
  }
  EXPECT_NEAR(mean_power / n, 1.0, 0.03);
  const double p = 1.0 - std::exp(-0.1);
  EXPECT_NEAR(static_cast<double>(deep) / n, p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(ShadowField, UnitVarianceAndExponentialCorrelation) {
  const double dc = 10.0;
  const int seeds = 10000;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dir(0.0, 2.0 * std::numbers::pi);
  for (double lag : {0.05, 0.1, 0.5, 1.0, 2.0}) {
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int s = 0; s < seeds; ++s) {
      const ShadowField f(dc, derive_seed({static_cast<std::uint64_t>(lag * 100), std::uint64_t(s)}));
      const double t = dir(rng);
      const Vec3 p{3.0, -2.0, 0.0};
      const Vec3 q = p + Vec3{std::cos(t), std::sin(t), 0.0} * (lag * dc);
      const double a = f.value(p), b = f.value(q);
      sa += a;
      sb += b;
      saa += a * a;
      sbb += b * b;
      sab += a * b;
    }
    const double n = seeds;
    const double cov = sab / n - (sa / n) * (sb / n);
    const double rho = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
    EXPECT_NEAR(rho, std::exp(-lag), 0.05) << "lag " << lag;
    EXPECT_NEAR(saa / n, 1.0, 0.05);
    EXPECT_NEAR(sa / n, 0.0, 0.05);
  }
}

TEST(ShadowField, LogNormalSigma) {
  ChannelModelConfig cfg;
  cfg.los_mode = LosMode::always_los;
  const int n = 8000;
  double s = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const auto f = make_shadow_field(cfg, derive_seed({1, std::uint64_t(i)}));
    const auto r = sample_realization({0, 0, 0}, {15, 4, 0}, f, 1, cfg);
    s += r.shadowing_db;
    ss += r.shadowing_db * r.shadowing_db;
  }
  EXPECT_NEAR(std::sqrt(ss / n - (s / n) * (s / n)), 4.0, 0.2);
  EXPECT_THROW(ShadowField(0.0, 1), Error);
}

TEST(Realization, DeterministicPerSeed) {
  ChannelModelConfig cfg;
  const auto f = make_shadow_field(cfg, 5);
  const auto a = sample_realization({0, 0, 0}, {40, 3, 0}, f, 99, cfg);
  const auto b = sample_realization({0, 0, 0}, {40, 3, 0}, make_shadow_field(cfg, 5), 99, cfg);
  EXPECT_EQ(a, b);
  EXPECT_NE(derive_seed({1, 2}), derive_seed({2, 1}));
  EXPECT_EQ(derive_seed({1, 2, 3}), derive_seed({1, 2, 3}));
}

TEST(LinkBudget, NoiseReferenceAndSnr) {
  const auto per_hz = LinkBudgetConfig::with_noise(Dbm{30}, -99.0, NoiseReference::per_hz, 1e9);
  EXPECT_NEAR(per_hz.noise_floor.value, -9.0, 1e-9);
  const auto integrated = LinkBudgetConfig::with_noise(Dbm{30}, -80.0, NoiseReference::integrated, 1e9);
  EXPECT_DOUBLE_EQ(integrated.noise_floor.value, -80.0);
  ChannelRealization r{100.0, 2.0, 1.0, false};
  EXPECT_NEAR(snr(integrated, Decibel{20}, Decibel{3}, r).value, 30 + 20 + 3 - 103 + 80, 1e-12);
  EXPECT_THROW(LinkBudgetConfig::with_noise(Dbm{30}, -99.0, NoiseReference::per_hz, 0.0), Error);
}

TEST(ChannelConfig, Validation) {
  ChannelModelConfig c;
  EXPECT_NO_THROW(c.validate());
  c.sigma_los_db = -1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.correlation_distance_m = 0;
  EXPECT_THROW(c.validate(), Error);
}
