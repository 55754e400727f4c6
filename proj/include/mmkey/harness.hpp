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
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mmkey/config.hpp"
#include "mmkey/error.hpp"
#include "mmkey/platoon.hpp"
#include "mmkey/secrecy.hpp"
#include "mmkey/sls.hpp"
#include "mmkey/spatial.hpp"

namespace mmkey {

using ojson = nlohmann::ordered_json;

struct RunReport {
  ScenarioKind kind = ScenarioKind::rate_calc;
  std::uint64_t seed = 0;
  ojson config;
  ojson results = ojson::object();
  std::optional<EnsbMap> map;
  std::vector<std::pair<std::string, RegionResult>> regions;
  int region_dims = 2;
  std::vector<std::pair<std::string, std::string>> extra_files;  // file name, contents

  ojson to_json() const {
    return ojson{{"schema_version", kSchemaVersion},
                 {"kind", to_string(kind)},
                 {"seed", seed},
                 {"config", config},
                 {"results", results}};
  }
};

/// Diffie-Hellman key rate of a device doing one exchange per cycles_per_op.
inline double dh_rate(double cycles_per_op, double clock_hz, double bits_per_key) {
  require(cycles_per_op > 0.0 && clock_hz > 0.0 && bits_per_key > 0.0, ErrorCategory::invalid_argument,
          "dh_rate arguments must be positive");
  return clock_hz / cycles_per_op * bits_per_key;
}

struct OtpBudget {
  double demand_bytes = 0.0;
  double budget_bytes = 0.0;
  double stated_budget_bytes = 0.0;
  bool fits() const { return demand_bytes <= budget_bytes; }
};

/// Pad material needed until the next key session against the key
/// material one session produces.
inline OtpBudget otp_budget(const OtpSpec& s, double key_rate_bps) {
  require(s.packet_interval_s > 0.0 && s.rekey_period_s > 0.0 && s.key_window_s > 0.0 && s.packet_bytes >= 0.0,
          ErrorCategory::invalid_argument, "OTP parameters must be positive");
  OtpBudget b;
  b.demand_bytes = s.rekey_period_s / s.packet_interval_s * s.packet_bytes;
  b.budget_bytes = s.key_window_s * key_rate_bps / 8.0;
  b.stated_budget_bytes = s.stated_budget_bytes;
  return b;
}

inline ojson rates_json(const WiretapCode& code) {
  const auto r = secure_rate(code);
  return ojson{{"th1_db", code.th1.value},
               {"th2_db", code.th2.value},
               {"bandwidth_hz", code.bandwidth_hz},
               {"decoding_rate_bps", r.decoding_rate_bps},
               {"secrecy_overhead_bps", r.secrecy_overhead_bps},
               {"r_max_bps", r.r_max_bps},
               {"secret_fraction", r.secret_fraction()}};
}

inline ojson point_json(const Vec3& p) { return ojson::array({p.x, p.y, p.z}); }

inline ojson grid_json(const GridSpec& g) {
  ojson j = cfgjson::to_json(g);
  j["nx"] = g.nx();
  j["ny"] = g.ny();
  if (g.dims == 3) j["nz"] = g.nz();
  j["cells"] = g.count();
  return j;
}

/// Stations on a circle of radius d around `center` at the given azimuths.
inline std::vector<Vec3> stations_on_circle(const Vec3& center, double d, const std::vector<double>& az_deg) {
  std::vector<Vec3> out;
  for (double a : az_deg) out.push_back(center + direction(a, 0.0) * d);
  return out;
}

inline std::vector<double> equiangular(std::size_t n) {
  std::vector<double> az(n);
  for (std::size_t i = 0; i < n; ++i) az[i] = 360.0 * static_cast<double>(i) / static_cast<double>(n);
  return az;
}

inline BeamSweepScenario beam_sweep_scenario(const ScenarioConfig& c, const std::vector<Vec3>& stations, const Vec3& mobile) {
  BeamSweepScenario s;
  const SectorCodebook cb(c.codebook, c.array.geometry, c.array.element, c.array.af_floor_db);
  for (std::size_t i = 0; i < stations.size(); ++i) s.stations.push_back({i, stations[i], cb});
  s.mobile = MobileNode{mobile, QuasiOmni{c.receivers.mobile_gain_dbi}, c.receivers.mobile_sectors};
  s.eve_antenna = QuasiOmni{c.receivers.eve_gain_dbi};
  s.env = ChannelEnvironment{c.channel, c.link.budget()};
  s.code = c.resolved_code();
  s.options = c.sweep;
  return s;
}

inline GridSpec shifted(GridSpec g, const Vec3& by) {
  g.min = g.min + by;
  g.max = g.max + by;
  return g;
}

inline ojson map_summary(const EnsbMap& m, const RegionResult& ia) {
  double lo = m.ensb_max, sum = 0.0;
  for (double v : m.values) {
    lo = std::min(lo, v);
    sum += v;
  }
  return ojson{{"ensb_max_bits", m.ensb_max},
               {"ensb_min_bits", m.values.empty() ? 0.0 : lo},
               {"ensb_mean_bits", m.values.empty() ? 0.0 : sum / static_cast<double>(m.values.size())},
               {"trials", m.trials},
               {"insecure_area_m2", ia.measure},
               {"insecure_cells", ia.cells.size()}};
}

inline RunReport base_report(const ScenarioConfig& c) {
  validate(c);
  RunReport r;
  r.kind = c.kind;
  r.seed = c.seed;
  r.config = config_to_json(c);
  r.results["rates"] = rates_json(c.resolved_code());
  return r;
}

inline ojson stations_json(const std::vector<Vec3>& st) {
  ojson a = ojson::array();
  for (const auto& p : st) a.push_back(point_json(p));
  return a;
}

/// Combined map of all stations plus the single-station maps.
inline void add_sweep_maps(RunReport& r, const ScenarioConfig& c, const std::vector<Vec3>& stations, const Vec3& mobile,
                           bool per_station, unsigned threads) {
  const auto sc = beam_sweep_scenario(c, stations, mobile);
  auto map = ensb_map(sc, c.grid, c.trials, c.seed, threads);
  auto ia = insecure_area(map);
  r.results["stations"] = stations_json(stations);
  r.results["mobile"] = point_json(mobile);
  r.results["grid"] = grid_json(c.grid);
  r.results["ensb"] = map_summary(map, ia);
  if (per_station) {
    ojson per = ojson::array();
    bool subset = true;
    for (std::size_t i = 0; i < stations.size(); ++i) {
      const auto single = beam_sweep_scenario(c, {stations[i]}, mobile);
      const auto ia_i = insecure_area(ensb_map(single, c.grid, c.trials, c.seed, threads));
      subset = subset && std::includes(ia_i.cells.begin(), ia_i.cells.end(), ia.cells.begin(), ia.cells.end());
      per.push_back({{"station", i}, {"insecure_area_m2", ia_i.measure}, {"insecure_cells", ia_i.cells.size()}});
      r.regions.emplace_back("station_" + std::to_string(i), ia_i);
    }
    r.results["single_station"] = std::move(per);
    r.results["combined_within_each_single"] = subset;
  }
  r.regions.insert(r.regions.begin(), {"combined", std::move(ia)});
  r.map = std::move(map);
}

inline RunReport run_exp1(const ScenarioConfig& c, unsigned threads = 0) {
  require(c.kind == ScenarioKind::exp1, ErrorCategory::config, "run_exp1 needs an exp1 config");
  RunReport r = base_report(c);
  const Vec3 mobile{};
  const auto stations = stations_on_circle(mobile, c.exp1.d_m, {0.0, c.exp1.theta_deg});
  r.results["d_m"] = c.exp1.d_m;
  r.results["theta_deg"] = c.exp1.theta_deg;
  add_sweep_maps(r, c, stations, mobile, true, threads);
  return r;
}

inline RunReport run_exp2(const ScenarioConfig& c, unsigned threads = 0) {
  require(c.kind == ScenarioKind::exp2, ErrorCategory::config, "run_exp2 needs an exp2 config");
  RunReport r = base_report(c);
  const Vec3 mobile{};
  const auto stations = stations_on_circle(mobile, c.exp2.d_m, equiangular(c.exp2.n));
  r.results["d_m"] = c.exp2.d_m;
  r.results["n"] = c.exp2.n;
  add_sweep_maps(r, c, stations, mobile, false, threads);
  return r;
}

inline bool inside_triangle(const Point2& p, const std::array<Point2, 3>& t, double tol = 1e-9) {
  auto cross = [](const Point2& a, const Point2& b, const Point2& q) {
    return (b[0] - a[0]) * (q[1] - a[1]) - (b[1] - a[1]) * (q[0] - a[0]);
  };
  const double d1 = cross(t[0], t[1], p), d2 = cross(t[1], t[2], p), d3 = cross(t[2], t[0], p);
  const bool neg = d1 < -tol || d2 < -tol || d3 < -tol;
  const bool pos = d1 > tol || d2 > tol || d3 > tol;
  return !(neg && pos);
}

/// Cell centres of a square lattice with the given spacing that fall
/// strictly inside the triangle.
inline std::vector<Point2> triangle_lattice(const std::array<Point2, 3>& t, double spacing) {
  require(spacing > 0.0, ErrorCategory::invalid_argument, "lattice spacing must be positive");
  double x0 = t[0][0], x1 = x0, y0 = t[0][1], y1 = y0;
  for (const auto& p : t) {
    x0 = std::min(x0, p[0]);
    x1 = std::max(x1, p[0]);
    y0 = std::min(y0, p[1]);
    y1 = std::max(y1, p[1]);
  }
  std::vector<Point2> out;
  const auto i0 = static_cast<long>(std::floor(x0 / spacing)), i1 = static_cast<long>(std::ceil(x1 / spacing));
  const auto j0 = static_cast<long>(std::floor(y0 / spacing)), j1 = static_cast<long>(std::ceil(y1 / spacing));
  for (long j = j0; j <= j1; ++j)
    for (long i = i0; i <= i1; ++i) {
      const Point2 p{(static_cast<double>(i) + 0.5) * spacing, (static_cast<double>(j) + 0.5) * spacing};
      if (inside_triangle(p, t, -1e-9)) out.push_back(p);
    }
  return out;
}

inline RunReport run_exp3(const ScenarioConfig& c, unsigned threads = 0) {
  require(c.kind == ScenarioKind::exp3, ErrorCategory::config, "run_exp3 needs an exp3 config");
  RunReport r = base_report(c);
  std::vector<Vec3> stations;
  for (const auto& s : c.exp3.stations) stations.push_back({s[0], s[1], 0.0});

  std::vector<Point2> positions = c.exp3.mobile_positions;
  if (positions.empty()) positions = triangle_lattice(c.exp3.triangle, c.exp3.mobile_spacing_m);
  require(!positions.empty(), ErrorCategory::geometry, "no mobile positions inside the triangle");
  for (const auto& p : positions)
    require(inside_triangle(p, c.exp3.triangle), ErrorCategory::geometry,
            "mobile position (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ") lies outside the triangle");

  ojson per = ojson::array();
  std::vector<double> ia(positions.size());
  std::size_t best = 0;
  std::ostringstream csv;
  csv.precision(12);
  csv << "x,y,insecure_area_m2\n";
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const Vec3 mobile{positions[k][0], positions[k][1], 0.0};
    const auto sc = beam_sweep_scenario(c, stations, mobile);
    auto map = ensb_map(sc, shifted(c.grid, mobile), c.trials, c.seed, threads);
    auto region = insecure_area(map);
    ia[k] = region.measure;
    per.push_back({{"mobile", point_json(mobile)}, {"insecure_area_m2", region.measure}});
    csv << mobile.x << ',' << mobile.y << ',' << region.measure << '\n';
    if (ia[k] > ia[best]) best = k;
    r.regions.emplace_back("position_" + std::to_string(k), std::move(region));
    if (k == 0 || k == best) r.map = std::move(map);
  }

  // Positions mirrored about y = x: equal insecure areas when the deployment
  // and codebook share that symmetry.
  ojson pairs = ojson::array();
  double max_diff = 0.0;
  for (std::size_t a = 0; a < positions.size(); ++a)
    for (std::size_t b = a + 1; b < positions.size(); ++b) {
      if (std::abs(positions[a][0] - positions[b][1]) > 1e-9 || std::abs(positions[a][1] - positions[b][0]) > 1e-9) continue;
      const double diff = std::abs(ia[a] - ia[b]);
      max_diff = std::max(max_diff, diff);
      pairs.push_back({{"a", a}, {"b", b}, {"insecure_area_a_m2", ia[a]}, {"insecure_area_b_m2", ia[b]}, {"abs_diff_m2", diff}});
    }

  r.results["stations"] = stations_json(stations);
  r.results["grid_relative_to_mobile"] = grid_json(c.grid);
  r.results["positions"] = std::move(per);
  r.results["max_insecure_area_m2"] = ia[best];
  r.results["max_at"] = point_json({positions[best][0], positions[best][1], 0.0});
  r.results["map_position"] = best;
  r.results["mirror_pairs"] = std::move(pairs);
  r.results["mirror_max_abs_diff_m2"] = max_diff;
  r.extra_files.emplace_back("ia_positions.csv", csv.str());
  return r;
}

/// Table rows comparing a Diffie-Hellman exchange with erasure-based keys.
inline ojson comparison_table(double dh_bps, double key_bps) {
  auto rate = [](double bps) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    if (bps >= 1e6) s << bps / 1e6 << " Mbps";
    else s << bps / 1e3 << " kbps";
    return s.str();
  };
  auto row = [](std::string name, std::string dh, std::string erasure) {
    return ojson{{"row", std::move(name)}, {"dh_2048", std::move(dh)}, {"erasure_based", std::move(erasure)}};
  };
  return ojson::array({row("Critical resource", "Computation power", "Bandwidth"),
                       row("Secret Key Rate (realistic setup)", rate(dh_bps), rate(key_bps)),
                       row("Complexity of encryption technique", "Moderate (AES)", "Simple (OTP)"),
                       row("Quantum-Vulnerable", "Yes", "No (Info. theoretically secure)"),
                       row("Adversary with high network presence", "Resilient", "Weak")});
}

inline ojson dh_json(const DhSpec& d) {
  const double bps = dh_rate(d.cycles_per_op, d.clock_hz, d.bits_per_key);
  const double kbps = bps / 1e3;
  const double unit = std::pow(10.0, std::floor(std::log10(kbps)));
  return ojson{{"cycles_per_op", d.cycles_per_op},
               {"clock_hz", d.clock_hz},
               {"bits_per_key", d.bits_per_key},
               {"rate_bps", bps},
               {"rate_kbps_one_digit", std::round(kbps / unit) * unit}};
}

inline std::vector<PlatoonLink> platoon_links(const ScenarioConfig& c) {
  std::vector<PlatoonLink> links;
  for (const auto& spec : c.platoon.links)
    links.push_back(make_platoon_link(c.platoon.geometry, spec, c.array.geometry, c.array.element, c.link.budget(),
                                      c.platoon.trace, QuasiOmni{c.platoon.rx_gain_dbi}));
  return links;
}

inline RunReport run_platoon(const ScenarioConfig& c, unsigned threads = 0) {
  require(c.kind == ScenarioKind::platoon, ErrorCategory::config, "run_platoon needs a platoon config");
  RunReport r = base_report(c);
  r.region_dims = 3;
  const auto code = c.resolved_code();
  const auto rates = secure_rate(code);
  const auto links = platoon_links(c);

  ojson per = ojson::array();
  std::optional<RegionResult> common;
  bool all_decode = true;
  for (const auto& link : links) {
    auto vol = insecure_volume(link, code.th2, c.platoon.box, threads);
    const Decibel snr = link.legitimate_snr();
    all_decode = all_decode && code.decodes(snr);
    per.push_back({{"name", link.name},
                   {"tx", point_json(link.tx)},
                   {"rx", point_json(link.rx)},
                   {"raw_snr_db", link.raw_snr_db(link.rx)},
                   {"calibration_db", link.calibration_db},
                   {"snr_db", snr.value},
                   {"decodes", code.decodes(snr)},
                   {"r_max_bps", code.decodes(snr) ? rates.r_max_bps : 0.0},
                   {"insecure_volume_m3", vol.measure},
                   {"insecure_cells", vol.cells.size()}});
    common = common ? region_intersection(*common, vol) : vol;
    r.regions.emplace_back(link.name, std::move(vol));
  }
  r.regions.emplace_back("intersection", *common);

  // A single-antenna eavesdropper outside the common region misses every
  // packet of at least one link, so each link keeps its full secure rate.
  const double key_rate = all_decode && common->cells.empty() ? rates.r_max_bps : 0.0;
  const auto otp = otp_budget(c.platoon.otp, key_rate);
  const double dh = dh_rate(c.dh.cycles_per_op, c.dh.clock_hz, c.dh.bits_per_key);

  r.results["box"] = grid_json(c.platoon.box);
  r.results["links"] = std::move(per);
  r.results["intersection_volume_m3"] = common->measure;
  r.results["intersection_cells"] = common->cells.size();
  r.results["key_rate_bps"] = key_rate;
  r.results["otp"] = ojson{{"demand_bytes", otp.demand_bytes},
                           {"budget_bytes", otp.budget_bytes},
                           {"stated_budget_bytes", otp.stated_budget_bytes},
                           {"demand_fits_budget", otp.fits()}};
  r.results["dh"] = dh_json(c.dh);
  r.results["comparison_table"] = comparison_table(dh, key_rate);
  r.results["notes"] = ojson::array({"key rates exclude the overhead of the feedback packets"});
  return r;
}

inline RunReport run_rate_calc(const ScenarioConfig& c) {
  require(c.kind == ScenarioKind::rate_calc, ErrorCategory::config, "run_rate_calc needs a rate-calc config");
  RunReport r = base_report(c);
  const auto code = c.resolved_code();
  const auto rates = secure_rate(code);
  r.results["solved"] = ojson{{"th1_db", solve_th1(rates.decoding_rate_bps, code.bandwidth_hz).value},
                              {"th2_db", solve_th2(rates.r_max_bps, code.th1, code.bandwidth_hz).value}};
  r.results["ensb_max_bits"] = ensb_max(code, c.sweep.secret_bits);
  r.results["secret_bits"] = c.sweep.secret_bits;
  r.results["dh"] = dh_json(c.dh);
  return r;
}

/// One sweep of every station followed by key extraction, with a full
/// transcript of what the mobile and the eavesdropper received.
inline RunReport run_sweep_demo(const ScenarioConfig& c, unsigned threads = 0) {
  require(c.kind == ScenarioKind::sweep_demo, ErrorCategory::config, "run_sweep_demo needs a sweep-demo config");
  (void)threads;
  RunReport r = base_report(c);
  const Vec3 mobile{};
  const auto stations = stations_on_circle(mobile, c.sweep_demo.d_m, equiangular(c.sweep_demo.n));
  const auto sc = beam_sweep_scenario(c, stations, mobile);
  const Eavesdropper eve{{c.sweep_demo.eve[0], c.sweep_demo.eve[1], 0.0}, sc.eve_antenna};
  const std::uint64_t trial_seed = derive_seed({c.seed, 0});
  const auto out = multi_station_sweep(sc.stations, sc.mobile, eve, sc.env, sc.code, trial_seed, sc.options);

  ojson transcripts = ojson::array();
  for (const auto& s : out.per_station) transcripts.push_back(transcript_json(s));
  auto ids = [&](const std::set<std::size_t>& s) {
    ojson a = ojson::array();
    for (std::size_t i : s) a.push_back({{"packet", i}, {"station", out.frames[i].first}, {"sector", out.frames[i].second}});
    return a;
  };
  r.results["stations"] = stations_json(stations);
  r.results["eve"] = point_json(eve.position);
  r.results["transcripts"] = std::move(transcripts);
  r.results["bob_received"] = ids(out.log.bob_received);
  r.results["eve_received"] = ids(out.log.eve_received);
  r.results["eve_holds_all_bob_packets"] = !out.log.bob_received.empty() && out.log.broken();

  ojson key = ojson::object();
  try {
    const EveBound bound = c.sweep_demo.eve_bound < 0 ? worst_case_bound(out.log)
                                                     : EveBound{static_cast<std::size_t>(c.sweep_demo.eve_bound)};
    std::vector<RandomPacket> bob_held;
    for (std::size_t id : out.log.bob_received) bob_held.push_back(out.packets[id]);
    const auto alice = extract_key<GF256>(out.log, out.packets, bound);
    const auto bob = extract_key<GF256>(out.log, bob_held, bound);
    ojson packets = ojson::array();
    for (const auto& k : alice.key_packets) packets.push_back(k.hex());
    key = ojson{{"eve_bound", bound.max_intercepted},
                {"bits", alice.bits()},
                {"alice_bob_agree", alice == bob},
                {"key_packets_hex", std::move(packets)}};
  } catch (const NoKeyError& e) {
    key = ojson{{"no_key", e.what()}};
  }
  r.results["key"] = std::move(key);
  const auto cell = ensb_at(eve.position, sc, c.trials, c.seed);
  r.results["ensb_at_eve"] = ojson{{"ensb_bits", cell.ensb_bits},
                                   {"ensb_max_bits", ensb_max(sc)},
                                   {"key_probability", cell.key_probability},
                                   {"break_probability", cell.break_probability},
                                   {"trials", c.trials}};
  return r;
}

inline RunReport run_scenario(const ScenarioConfig& c, unsigned threads = 0) {
  switch (c.kind) {
    case ScenarioKind::rate_calc: return run_rate_calc(c);
    case ScenarioKind::exp1: return run_exp1(c, threads);
    case ScenarioKind::exp2: return run_exp2(c, threads);
    case ScenarioKind::exp3: return run_exp3(c, threads);
    case ScenarioKind::platoon: return run_platoon(c, threads);
    case ScenarioKind::sweep_demo: return run_sweep_demo(c, threads);
  }
  fail(ErrorCategory::config, "unknown scenario kind");
}

}  // namespace mmkey
