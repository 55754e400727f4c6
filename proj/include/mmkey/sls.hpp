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
#include <cstdint>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mmkey/antenna.hpp"
#include "mmkey/channel.hpp"
#include "mmkey/error.hpp"
#include "mmkey/rfmath.hpp"
#include "mmkey/secrecy.hpp"

namespace mmkey {

struct BaseStation {
  std::size_t id = 0;
  Vec3 position;
  SectorCodebook codebook;
};

struct MobileNode {
  Vec3 position;
  QuasiOmni antenna;
  std::size_t sectors = 1;  // feedback transmissions in step 2
};

struct Eavesdropper {
  Vec3 position;
  QuasiOmni antenna;
};

struct ChannelEnvironment {
  ChannelModelConfig model;
  LinkBudgetConfig budget;
};

struct SweepOptions {
  /// Worst case of the beam-sweep experiments: the mobile is assumed to
  /// decode exactly one frame per station, the one of its best sector.
  bool one_frame_per_station = false;
  std::size_t secret_bits = 1000;
  double tx_rate_bps = 27.5e6;
  /// Beacon transmission order; empty means sector 0, 1, ...
  std::vector<std::size_t> order;

  bool operator==(const SweepOptions&) const = default;
};

struct BeaconFrame {
  std::size_t array_id = 0;
  std::size_t sector_id = 0;
  BitString secret_payload;
  double tx_rate_bps = 27.5e6;
};

struct FeedbackFrame {
  Decibel best_snr;
  std::size_t best_sector_id = 0;
};

struct SweepOutcome {
  std::size_t station_id = 0;
  std::vector<BeaconFrame> beacons;  // in transmission order
  std::vector<Decibel> mobile_snr;   // indexed by sector
  std::vector<Decibel> eve_snr;      // indexed by sector
  FeedbackFrame responder_feedback;  // mobile -> station, step 2
  std::size_t responder_feedback_count = 0;
  FeedbackFrame initiator_feedback;  // station -> mobile, step 3
  std::size_t best_tx_sector = 0;
  std::size_t best_rx_sector = 0;
  std::set<std::size_t> decoded_secret_frames;  // sector ids
  std::set<std::size_t> intercepted_frames;     // sector ids, among all beacons
  ChannelRealization mobile_link;
  ChannelRealization eve_link;
};

namespace seeds {
inline constexpr std::uint64_t field = 0x5AD0;
inline constexpr std::uint64_t mobile = 0x30B1;
inline constexpr std::uint64_t eve = 0xE7E;
inline constexpr std::uint64_t payload = 0xB175;

inline std::uint64_t field_seed(std::uint64_t trial, std::size_t station) { return derive_seed({trial, station, field}); }
inline std::uint64_t mobile_seed(std::uint64_t trial, std::size_t station) { return derive_seed({trial, station, mobile}); }
inline std::uint64_t eve_seed(std::uint64_t trial, std::size_t station, std::uint64_t stream) {
  return derive_seed({trial, station, eve, stream});
}
inline std::uint64_t payload_seed(std::uint64_t trial, std::size_t station) { return derive_seed({trial, station, payload}); }
}  // namespace seeds

/// Per-sector transmit gains of a station toward a point.
inline std::vector<Decibel> sector_gains_toward(const BaseStation& bs, const Vec3& p) {
  const Vec3 d = p - bs.position;
  const double az = azimuth_deg(d), el = elevation_deg(d);
  std::vector<Decibel> g(bs.codebook.size());
  for (std::size_t s = 0; s < g.size(); ++s) g[s] = bs.codebook.gain(s, az, el);
  return g;
}

/// Index of the maximum; ties go to the lowest index.
inline std::size_t argmax_lowest(const std::vector<Decibel>& v) {
  require(!v.empty(), ErrorCategory::invalid_argument, "argmax of an empty table");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

/// Station-side state of one sweep that does not depend on the eavesdropper.
struct StationTrial {
  ShadowField field;
  ChannelRealization mobile_link;
  std::vector<Decibel> mobile_snr;
  std::size_t best_sector = 0;
  std::set<std::size_t> decoded;
};

inline StationTrial prepare_station_trial(const BaseStation& bs, const MobileNode& mobile, const ChannelEnvironment& env,
                                          const WiretapCode& code, std::uint64_t trial_seed, const SweepOptions& opt) {
  StationTrial st;
  st.field = make_shadow_field(env.model, seeds::field_seed(trial_seed, bs.id));
  st.mobile_link = sample_realization(bs.position, mobile.position, st.field, seeds::mobile_seed(trial_seed, bs.id), env.model);
  const auto gains = sector_gains_toward(bs, mobile.position);
  st.mobile_snr.resize(gains.size());
  for (std::size_t s = 0; s < gains.size(); ++s) st.mobile_snr[s] = snr(env.budget, gains[s], mobile.antenna.gain(), st.mobile_link);
  st.best_sector = argmax_lowest(st.mobile_snr);
  if (opt.one_frame_per_station) {
    st.decoded.insert(st.best_sector);
  } else {
    for (std::size_t s = 0; s < st.mobile_snr.size(); ++s)
      if (code.decodes(st.mobile_snr[s])) st.decoded.insert(s);
  }
  return st;
}

inline ChannelRealization eve_realization(const BaseStation& bs, const StationTrial& st, const Vec3& eve_pos,
                                          const ChannelEnvironment& env, std::uint64_t trial_seed, std::uint64_t eve_stream) {
  return sample_realization(bs.position, eve_pos, st.field, seeds::eve_seed(trial_seed, bs.id, eve_stream), env.model);
}

/// Transmit sector-level sweep of one station toward one mobile, with an
/// eavesdropper probe recording every beacon it overhears.
inline SweepOutcome run_transmit_sls(const BaseStation& bs, const MobileNode& mobile, const Eavesdropper& eve,
                                     const ChannelEnvironment& env, const WiretapCode& code, std::uint64_t seed,
                                     const SweepOptions& opt = {}, std::uint64_t eve_stream = 0) {
  code.validate();
  env.budget.validate();
  const std::size_t n = bs.codebook.size();
  require(n >= 1, ErrorCategory::invalid_argument, "codebook is empty");

  std::vector<std::size_t> order(opt.order);
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    require(sorted.size() == n && std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end() && sorted.back() == n - 1,
            ErrorCategory::invalid_argument, "beacon order must be a permutation of the sectors");
  }

  const StationTrial st = prepare_station_trial(bs, mobile, env, code, seed, opt);
  SweepOutcome out;
  out.station_id = bs.id;
  out.mobile_link = st.mobile_link;
  out.mobile_snr = st.mobile_snr;
  out.eve_link = eve_realization(bs, st, eve.position, env, seed, eve_stream);
  const auto eve_gains = sector_gains_toward(bs, eve.position);

  // Step 1: one beacon per sector. Payloads are drawn by sector id so they
  // do not depend on the transmission order.
  std::mt19937_64 payload_rng(seeds::payload_seed(seed, bs.id));
  std::vector<BitString> payloads;
  payloads.reserve(n);
  for (std::size_t s = 0; s < n; ++s) payloads.push_back(BitString::random(opt.secret_bits, payload_rng));

  out.eve_snr.assign(n, Decibel{});
  for (std::size_t s : order) {
    out.beacons.push_back({bs.codebook.array_of(s), s, payloads[s], opt.tx_rate_bps});
    out.eve_snr[s] = snr(env.budget, eve_gains[s], eve.antenna.gain(), out.eve_link);
    if (!code.erased(out.eve_snr[s])) out.intercepted_frames.insert(s);
  }
  out.decoded_secret_frames = st.decoded;

  // Step 2: the mobile reports its best observed beacon from each of its sectors.
  out.best_tx_sector = st.best_sector;
  out.responder_feedback = {st.mobile_snr[st.best_sector], st.best_sector};
  out.responder_feedback_count = mobile.sectors;

  // Step 3: the station answers on the chosen sector with the mobile's best
  // sector as seen through its quasi-omni reception (reciprocal channel).
  const Decibel uplink = snr(env.budget, mobile.antenna.gain(), QuasiOmni{}.gain(), st.mobile_link);
  out.best_rx_sector = 0;
  out.initiator_feedback = {uplink, out.best_rx_sector};
  // Step 4 is the mobile adopting best_rx_sector; nothing further to record.
  return out;
}

struct MultiSweepOutcome {
  std::vector<SweepOutcome> per_station;
  /// One logical packet per beacon; index = station position * sectors + sector.
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  std::vector<RandomPacket> packets;
  ReceptionLog log;
};

/// Independent sweeps of several stations; the decoded beacons become the
/// random packets of the key agreement.
inline MultiSweepOutcome multi_station_sweep(const std::vector<BaseStation>& stations, const MobileNode& mobile,
                                             const Eavesdropper& eve, const ChannelEnvironment& env, const WiretapCode& code,
                                             std::uint64_t seed, const SweepOptions& opt = {}, std::uint64_t eve_stream = 0) {
  require(!stations.empty(), ErrorCategory::invalid_argument, "need at least one base station");
  MultiSweepOutcome out;
  for (const auto& bs : stations) {
    auto sweep = run_transmit_sls(bs, mobile, eve, env, code, seed, opt, eve_stream);
    std::vector<const BeaconFrame*> by_sector(bs.codebook.size());
    for (const auto& b : sweep.beacons) by_sector[b.sector_id] = &b;
    for (std::size_t s = 0; s < bs.codebook.size(); ++s) {
      const std::size_t id = out.frames.size();
      out.frames.emplace_back(bs.id, s);
      out.packets.push_back({id, by_sector[s]->secret_payload});
      if (sweep.decoded_secret_frames.count(s)) out.log.bob_received.insert(id);
      if (sweep.intercepted_frames.count(s)) out.log.eve_received.insert(id);
    }
    out.per_station.push_back(std::move(sweep));
  }
  out.log.n_sent = out.frames.size();
  return out;
}

/// JSON event log of one sweep.
inline nlohmann::ordered_json transcript_json(const SweepOutcome& o) {
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  std::size_t frame = 0;
  for (const auto& b : o.beacons) {
    events.push_back({{"event", "beacon"},
                      {"frame", frame++},
                      {"array", b.array_id},
                      {"sector", b.sector_id},
                      {"snr_mobile_db", o.mobile_snr[b.sector_id].value},
                      {"snr_eve_db", o.eve_snr[b.sector_id].value},
                      {"mobile_decoded", o.decoded_secret_frames.count(b.sector_id) > 0},
                      {"eve_intercepted", o.intercepted_frames.count(b.sector_id) > 0}});
  }
  events.push_back({{"event", "responder_feedback"},
                    {"transmissions", o.responder_feedback_count},
                    {"best_snr_db", o.responder_feedback.best_snr.value},
                    {"best_sector", o.responder_feedback.best_sector_id}});
  events.push_back({{"event", "initiator_feedback"},
                    {"sector", o.best_tx_sector},
                    {"best_snr_db", o.initiator_feedback.best_snr.value},
                    {"best_sector", o.initiator_feedback.best_sector_id}});
  return nlohmann::ordered_json{{"station", o.station_id}, {"events", std::move(events)}};
}

}  // namespace mmkey
