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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmkey/sls.hpp"

using namespace mmkey;

namespace {

ChannelEnvironment det_env() {
  ChannelEnvironment env;
  env.model = ChannelModelConfig::deterministic();
  env.budget = LinkBudgetConfig::with_noise(Dbm{30}, -99.0, NoiseReference::per_hz, 1e9);
  return env;
}

const WiretapCode kCode = code_from_rates(27.5e6, 25e6, 1e9);

// Independent SNR for a deterministic LOS link beyond one metre.
double oracle_snr(const SectorCodebook& cb, std::size_t s, const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double az = std::atan2(d.y, d.x) * 180.0 / std::numbers::pi;
  const double r = d.norm();
  const double fspl = 20.0 * std::log10(4.0 * std::numbers::pi * r * 73e9 / 299792458.0);
  return 30.0 + cb.gain(s, az, 0.0).value - fspl + 9.0;
}

}  // namespace

TEST(Sweep, BeaconsAndFeedback) {
  const BaseStation bs{0, {0, 0, 0}, SectorCodebook{}};
  const MobileNode mobile{direction(40.0, 0.0) * 2.0, QuasiOmni{}, 3};
  const Eavesdropper eve{{-3.0, 4.0, 0.0}, QuasiOmni{}};
  const auto out = run_transmit_sls(bs, mobile, eve, det_env(), kCode, 17);
  ASSERT_EQ(out.beacons.size(), 36u);
  for (std::size_t i = 0; i < 36; ++i) {
    EXPECT_EQ(out.beacons[i].sector_id, i);
    EXPECT_EQ(out.beacons[i].array_id, i / 12);
    EXPECT_EQ(out.beacons[i].secret_payload.size(), 1000u);
    EXPECT_NEAR(out.mobile_snr[i].value, oracle_snr(bs.codebook, i, bs.position, mobile.position), 1e-9);
    EXPECT_NEAR(out.eve_snr[i].value, oracle_snr(bs.codebook, i, bs.position, eve.position), 1e-9);
    EXPECT_EQ(out.intercepted_frames.count(i) > 0, out.eve_snr[i].value > kCode.th2.value);
  }
  EXPECT_EQ(out.best_tx_sector, 4u);
  EXPECT_EQ(out.responder_feedback.best_sector_id, 4u);
  EXPECT_EQ(out.responder_feedback_count, 3u);
  for (std::size_t s : out.decoded_secret_frames) EXPECT_GE(out.mobile_snr[s], kCode.th1);
  EXPECT_TRUE(out.decoded_secret_frames.count(4));

  const auto tj = transcript_json(out);
  EXPECT_EQ(tj["events"].size(), 38u);
  EXPECT_EQ(tj["events"][0]["event"], "beacon");
  EXPECT_EQ(tj["events"][37]["event"], "initiator_feedback");
}

TEST(Sweep, WorstCaseDecodesOnlyBestSector) {
  const BaseStation bs{0, {0, 0, 0}, SectorCodebook{}};
  const MobileNode mobile{direction(133.0, 0.0) * 2.0, QuasiOmni{}, 1};
  SweepOptions opt;
  opt.one_frame_per_station = true;
  const auto out = run_transmit_sls(bs, mobile, Eavesdropper{{9, 9, 0}, {}}, det_env(), kCode, 1, opt);
  EXPECT_EQ(out.decoded_secret_frames, (std::set<std::size_t>{13}));
}

TEST(Sweep, OrderDoesNotChangePayloadsOrOutcome) {
  const BaseStation bs{2, {1, 1, 0}, SectorCodebook{}};
  const MobileNode mobile{{3, 2, 0}, QuasiOmni{}, 1};
  const Eavesdropper eve{{-2, 5, 0}, QuasiOmni{}};
  ChannelEnvironment env;
  env.budget = det_env().budget;
  SweepOptions rev;
  rev.order.resize(36);
  std::iota(rev.order.rbegin(), rev.order.rend(), std::size_t{0});
  const auto a = run_transmit_sls(bs, mobile, eve, env, kCode, 99);
  const auto b = run_transmit_sls(bs, mobile, eve, env, kCode, 99, rev);
  EXPECT_EQ(b.beacons.front().sector_id, 35u);
  for (const auto& x : a.beacons) {
    const auto it = std::find_if(b.beacons.begin(), b.beacons.end(), [&](const auto& y) { return y.sector_id == x.sector_id; });
    ASSERT_NE(it, b.beacons.end());
    EXPECT_EQ(it->secret_payload, x.secret_payload);
  }
  EXPECT_EQ(a.decoded_secret_frames, b.decoded_secret_frames);
  EXPECT_EQ(a.intercepted_frames, b.intercepted_frames);
  EXPECT_EQ(a.mobile_link, b.mobile_link);

  SweepOptions bad;
  bad.order = {0, 1, 1};
  EXPECT_THROW(run_transmit_sls(bs, mobile, eve, env, kCode, 99, bad), Error);
  bad.order.assign(36, 0);
  EXPECT_THROW(run_transmit_sls(bs, mobile, eve, env, kCode, 99, bad), Error);
}

TEST(Sweep, DeterministicPerSeed) {
  const BaseStation bs{0, {0, 0, 0}, SectorCodebook{}};
  const MobileNode mobile{{20, 5, 0}, QuasiOmni{}, 1};
  const Eavesdropper eve{{10, -6, 0}, QuasiOmni{}};
  ChannelEnvironment env;
  const auto a = run_transmit_sls(bs, mobile, eve, env, kCode, 5);
  const auto b = run_transmit_sls(bs, mobile, eve, env, kCode, 5);
  EXPECT_EQ(transcript_json(a).dump(), transcript_json(b).dump());
  EXPECT_EQ(a.beacons[7].secret_payload, b.beacons[7].secret_payload);
}

TEST(Sweep, ArgmaxTiesGoLow) {
  EXPECT_EQ(argmax_lowest({Decibel{1}, Decibel{3}, Decibel{3}}), 1u);
  EXPECT_THROW(argmax_lowest({}), Error);
}

TEST(MultiSweep, PacketsAndLog) {
  std::vector<BaseStation> st;
  for (std::size_t i = 0; i < 3; ++i) st.push_back({i, direction(120.0 * i, 0.0) * 2.0, SectorCodebook{}});
  const MobileNode mobile{{0, 0, 0}, QuasiOmni{}, 1};
  const Eavesdropper eve{{0.5, 6, 0}, QuasiOmni{}};
  SweepOptions opt;
  opt.one_frame_per_station = true;
  const auto out = multi_station_sweep(st, mobile, eve, det_env(), kCode, 3, opt);
  EXPECT_EQ(out.log.n_sent, 108u);
  EXPECT_EQ(out.packets.size(), 108u);
  EXPECT_EQ(out.log.bob_received.size(), 3u);
  for (std::size_t id : out.log.bob_received) {
    const auto [station, sector] = out.frames[id];
    EXPECT_EQ(sector, out.per_station[station].best_tx_sector);
    EXPECT_EQ(out.packets[id].payload, out.per_station[station].beacons[sector].secret_payload);
  }
  EXPECT_THROW(multi_station_sweep({}, mobile, eve, det_env(), kCode, 3, opt), Error);
}
