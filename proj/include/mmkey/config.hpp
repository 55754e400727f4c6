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

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mmkey/antenna.hpp"
#include "mmkey/channel.hpp"
#include "mmkey/error.hpp"
#include "mmkey/platoon.hpp"
#include "mmkey/raytrace.hpp"
#include "mmkey/rfmath.hpp"
#include "mmkey/sls.hpp"
#include "mmkey/spatial.hpp"

namespace mmkey {

inline constexpr int kSchemaVersion = 1;

enum class ScenarioKind { rate_calc, exp1, exp2, exp3, platoon, sweep_demo };

inline std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::rate_calc: return "rate-calc";
    case ScenarioKind::exp1: return "exp1";
    case ScenarioKind::exp2: return "exp2";
    case ScenarioKind::exp3: return "exp3";
    case ScenarioKind::platoon: return "platoon";
    case ScenarioKind::sweep_demo: return "sweep-demo";
  }
  return "?";
}

inline ScenarioKind parse_kind(std::string_view s) {
  for (auto k : {ScenarioKind::rate_calc, ScenarioKind::exp1, ScenarioKind::exp2, ScenarioKind::exp3, ScenarioKind::platoon,
                 ScenarioKind::sweep_demo})
    if (to_string(k) == s) return k;
  fail(ErrorCategory::config, "unknown scenario kind '" + std::string(s) + "'");
}

/// A wiretap code given either by its thresholds or by the two rate targets.
struct CodeSpec {
  bool from_rates = true;
  double decoding_rate_bps = 27.5e6;
  double r_max_bps = 25e6;
  double th1_db = 0.0;
  double th2_db = 0.0;

  WiretapCode resolve(double bandwidth_hz) const {
    if (from_rates) return code_from_rates(decoding_rate_bps, r_max_bps, bandwidth_hz);
    WiretapCode c{Decibel{th1_db}, Decibel{th2_db}, bandwidth_hz};
    c.validate();
    return c;
  }

  bool operator==(const CodeSpec&) const = default;
};

struct LinkSpec {
  double tx_power_dbm = 30.0;
  double noise_dbm = -99.0;
  NoiseReference noise_reference = NoiseReference::per_hz;
  double bandwidth_hz = 1e9;

  LinkBudgetConfig budget() const {
    return LinkBudgetConfig::with_noise(Dbm{tx_power_dbm}, noise_dbm, noise_reference, bandwidth_hz);
  }

  bool operator==(const LinkSpec&) const = default;
};

struct ArraySpec {
  ArrayGeometry geometry;
  ElementPattern element;
  double af_floor_db = kArrayFactorFloorDb;

  bool operator==(const ArraySpec&) const = default;
};

struct ReceiverSpec {
  double mobile_gain_dbi = 0.0;
  double eve_gain_dbi = 0.0;
  std::size_t mobile_sectors = 1;

  bool operator==(const ReceiverSpec&) const = default;
};

struct Exp1Spec {
  double d_m = 2.0;
  double theta_deg = 90.0;
  bool operator==(const Exp1Spec&) const = default;
};

struct Exp2Spec {
  double d_m = 2.0;
  std::size_t n = 4;
  bool operator==(const Exp2Spec&) const = default;
};

using Point2 = std::array<double, 2>;

/// Fixed deployment with the mobile moved over a triangle of it. The grid
/// of the scenario is taken relative to each mobile position.
struct Exp3Spec {
  std::vector<Point2> stations;
  std::array<Point2, 3> triangle{};
  std::vector<Point2> mobile_positions;  // empty: lattice with mobile_spacing_m
  double mobile_spacing_m = 2.0;

  bool operator==(const Exp3Spec&) const = default;
};

struct OtpSpec {
  double packet_interval_s = 0.1;
  double packet_bytes = 60.0;
  double rekey_period_s = 300.0;
  double key_window_s = 0.1;
  double stated_budget_bytes = 200e3;  // reference budget reported next to the computed one

  bool operator==(const OtpSpec&) const = default;
};

struct PlatoonSpec {
  PlatoonGeometry geometry;
  std::vector<PlatoonLinkSpec> links;
  TraceConfig trace;
  double rx_gain_dbi = 0.0;
  GridSpec box;
  OtpSpec otp;

  bool operator==(const PlatoonSpec&) const = default;
};

struct DhSpec {
  double cycles_per_op = 1.38e6;
  double clock_hz = 240e6;
  double bits_per_key = 112;

  bool operator==(const DhSpec&) const = default;
};

struct SweepDemoSpec {
  double d_m = 2.0;
  std::size_t n = 2;
  Point2 eve{6.0, 6.0};
  long eve_bound = -1;  // -1: worst case (Eve missed exactly one frame)

  bool operator==(const SweepDemoSpec&) const = default;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  ScenarioKind kind = ScenarioKind::rate_calc;
  std::uint64_t seed = 1;
  std::size_t trials = 200;
  CodeSpec code;
  LinkSpec link;
  DhSpec dh;
  ArraySpec array;
  CodebookConfig codebook;
  ChannelModelConfig channel;
  ReceiverSpec receivers;
  SweepOptions sweep;
  GridSpec grid;
  Exp1Spec exp1;
  Exp2Spec exp2;
  Exp3Spec exp3;
  PlatoonSpec platoon;
  SweepDemoSpec sweep_demo;

  bool operator==(const ScenarioConfig&) const = default;

  bool is_beam_sweep() const {
    return kind == ScenarioKind::exp1 || kind == ScenarioKind::exp2 || kind == ScenarioKind::exp3 ||
           kind == ScenarioKind::sweep_demo;
  }

  WiretapCode resolved_code() const { return code.resolve(link.bandwidth_hz); }
};

inline PlatoonSpec default_platoon() {
  PlatoonSpec p;
  p.links = {
      {"link-1", 0, Mount{0.5, -0.7, 0.3}, Mount{0.5, -0.7, 3.0}, 50.0},
      {"link-2", 0, Mount{1.0, 0.7, 0.3}, Mount{1.0, 0.7, 3.0}, 49.0},
  };
  const auto& g = p.geometry;
  p.box = GridSpec::box({g.rear_x(g.cars - 1) - 2.0, -4.0, 0.0}, {g.front_x(0) + 2.0, 4.0, 4.0}, 0.25);
  return p;
}

inline ScenarioConfig default_config(ScenarioKind kind) {
  ScenarioConfig c;
  c.kind = kind;
  c.sweep.one_frame_per_station = true;
  c.grid = GridSpec::rect(-10.0, 10.0, -10.0, 10.0, 0.4);
  switch (kind) {
    case ScenarioKind::rate_calc:
    case ScenarioKind::exp1:
    case ScenarioKind::exp2:
    case ScenarioKind::sweep_demo:
      break;
    case ScenarioKind::exp3: {
      c.trials = 100;
      // Array blocks start at sector 35 so the codebook is mirror-symmetric
      // about the line y = x, as is this deployment.
      c.codebook.array_first_sector = 35;
      const double side = 10.0;
      const Point2 a{0.0, 0.0};
      const Point2 b{side * std::cos(deg2rad(15.0)), side * std::sin(deg2rad(15.0))};
      const Point2 d{b[1], b[0]};
      c.exp3.stations = {a, b, d};
      c.exp3.triangle = {a, b, d};
      c.exp3.mobile_spacing_m = 2.0;
      c.grid = GridSpec::rect(-6.0, 6.0, -6.0, 6.0, 0.4);
      break;
    }
    case ScenarioKind::platoon:
      c.code = CodeSpec{false, 0.0, 0.0, 48.0, 47.5};
      c.link = LinkSpec{30.0, -80.0, NoiseReference::integrated, 1e9};
      c.array.geometry = ArrayGeometry{8, 8, 0.5, 70e9};
      c.platoon = default_platoon();
      break;
  }
  return c;
}

// ---------------------------------------------------------------- JSON I/O

namespace cfgjson {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

/// Reads members of one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j.is_object(), ErrorCategory::config, path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCategory::config, path_ + "." + key + ": " + e.what());
    }
  }

  const json& child(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string path(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(ErrorCategory::config, path_ + ": unknown field '" + k + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Vec3 point(const json& j, const std::string& path) {
  require(j.is_array() && (j.size() == 2 || j.size() == 3), ErrorCategory::config, path + ": expected [x, y] or [x, y, z]");
  Vec3 p{j[0].get<double>(), j[1].get<double>(), 0.0};
  if (j.size() == 3) p.z = j[2].get<double>();
  return p;
}

inline ojson to_json(const GridSpec& g) {
  ojson j{{"x_min", g.min.x}, {"x_max", g.max.x}, {"y_min", g.min.y}, {"y_max", g.max.y}};
  if (g.dims == 3) {
    j["z_min"] = g.min.z;
    j["z_max"] = g.max.z;
  }
  j["resolution"] = g.resolution;
  j["dims"] = g.dims;
  j["max_cells"] = g.max_cells;
  return j;
}

inline GridSpec grid_from(const json& j, const std::string& path, GridSpec g) {
  Reader r(j, path);
  r.get("x_min", g.min.x);
  r.get("x_max", g.max.x);
  r.get("y_min", g.min.y);
  r.get("y_max", g.max.y);
  r.get("z_min", g.min.z);
  r.get("z_max", g.max.z);
  r.get("resolution", g.resolution);
  r.get("dims", g.dims);
  r.get("max_cells", g.max_cells);
  r.finish();
  return g;
}

inline ojson to_json(const CodeSpec& c) {
  if (c.from_rates) return ojson{{"decoding_rate_bps", c.decoding_rate_bps}, {"r_max_bps", c.r_max_bps}};
  return ojson{{"th1_db", c.th1_db}, {"th2_db", c.th2_db}};
}

inline CodeSpec code_from(const json& j, const std::string& path) {
  Reader r(j, path);
  CodeSpec c;
  const bool rates = r.has("decoding_rate_bps") || r.has("r_max_bps");
  const bool thresholds = r.has("th1_db") || r.has("th2_db");
  require(rates != thresholds, ErrorCategory::config,
          path + ": give either {decoding_rate_bps, r_max_bps} or {th1_db, th2_db}");
  c.from_rates = rates;
  // Inactive fields are zeroed so equal codes compare equal.
  if (rates) {
    require(r.has("decoding_rate_bps") && r.has("r_max_bps"), ErrorCategory::config, path + ": both rates are required");
    r.get("decoding_rate_bps", c.decoding_rate_bps);
    r.get("r_max_bps", c.r_max_bps);
  } else {
    require(r.has("th1_db") && r.has("th2_db"), ErrorCategory::config, path + ": both thresholds are required");
    c.decoding_rate_bps = 0.0;
    c.r_max_bps = 0.0;
    r.get("th1_db", c.th1_db);
    r.get("th2_db", c.th2_db);
  }
  r.finish();
  return c;
}

inline std::string_view to_string(NoiseReference n) { return n == NoiseReference::per_hz ? "per_hz" : "integrated"; }
inline std::string_view to_string(LosMode m) {
  return m == LosMode::stochastic ? "stochastic" : m == LosMode::always_los ? "always_los" : "always_nlos";
}

inline ojson to_json(const LinkSpec& l) {
  return ojson{{"tx_power_dbm", l.tx_power_dbm},
               {"noise_dbm", l.noise_dbm},
               {"noise_reference", to_string(l.noise_reference)},
               {"bandwidth_hz", l.bandwidth_hz}};
}

inline LinkSpec link_from(const json& j, const std::string& path, LinkSpec l) {
  Reader r(j, path);
  r.get("tx_power_dbm", l.tx_power_dbm);
  r.get("noise_dbm", l.noise_dbm);
  std::string ref(to_string(l.noise_reference));
  r.get("noise_reference", ref);
  require(ref == "per_hz" || ref == "integrated", ErrorCategory::config, path + ".noise_reference: per_hz or integrated");
  l.noise_reference = ref == "per_hz" ? NoiseReference::per_hz : NoiseReference::integrated;
  r.get("bandwidth_hz", l.bandwidth_hz);
  r.finish();
  return l;
}

inline ojson to_json(const ArraySpec& a) {
  return ojson{{"rows", a.geometry.rows},
               {"cols", a.geometry.cols},
               {"spacing_wavelengths", a.geometry.element_spacing},
               {"carrier_hz", a.geometry.carrier_hz},
               {"af_floor_db", a.af_floor_db},
               {"element",
                {{"peak_gain_dbi", a.element.peak_gain_dbi},
                 {"h_beamwidth_deg", a.element.h_beamwidth_deg},
                 {"v_beamwidth_deg", a.element.v_beamwidth_deg},
                 {"front_to_back_db", a.element.front_to_back_db},
                 {"vertical_sidelobe_db", a.element.vertical_sidelobe_db}}}};
}

inline ArraySpec array_from(const json& j, const std::string& path, ArraySpec a) {
  Reader r(j, path);
  r.get("rows", a.geometry.rows);
  r.get("cols", a.geometry.cols);
  r.get("spacing_wavelengths", a.geometry.element_spacing);
  r.get("carrier_hz", a.geometry.carrier_hz);
  r.get("af_floor_db", a.af_floor_db);
  if (r.has("element")) {
    Reader e(r.child("element"), r.path("element"));
    e.get("peak_gain_dbi", a.element.peak_gain_dbi);
    e.get("h_beamwidth_deg", a.element.h_beamwidth_deg);
    e.get("v_beamwidth_deg", a.element.v_beamwidth_deg);
    e.get("front_to_back_db", a.element.front_to_back_db);
    e.get("vertical_sidelobe_db", a.element.vertical_sidelobe_db);
    e.finish();
  }
  r.finish();
  return a;
}

inline ojson to_json(const CodebookConfig& c) {
  return ojson{{"sectors", c.sectors},
               {"first_center_deg", c.first_center_deg},
               {"separation_deg", c.separation_deg},
               {"arrays", c.arrays},
               {"array_first_sector", c.array_first_sector},
               {"steer_el_deg", c.steer_el_deg}};
}

inline CodebookConfig codebook_from(const json& j, const std::string& path, CodebookConfig c) {
  Reader r(j, path);
  r.get("sectors", c.sectors);
  r.get("first_center_deg", c.first_center_deg);
  r.get("separation_deg", c.separation_deg);
  r.get("arrays", c.arrays);
  r.get("array_first_sector", c.array_first_sector);
  r.get("steer_el_deg", c.steer_el_deg);
  r.finish();
  return c;
}

inline ojson to_json(const ChannelModelConfig& c) {
  return ojson{{"carrier_hz", c.carrier_hz},
               {"ple_los", c.ple_los},
               {"ple_nlos", c.ple_nlos},
               {"sigma_los_db", c.sigma_los_db},
               {"sigma_nlos_db", c.sigma_nlos_db},
               {"correlation_distance_m", c.correlation_distance_m},
               {"los_d1_m", c.los_d1_m},
               {"los_d2_m", c.los_d2_m},
               {"los_mode", to_string(c.los_mode)},
               {"shadowing", c.shadowing},
               {"nlos_fading", c.nlos_fading},
               {"shadow_components", c.shadow_components}};
}

inline ChannelModelConfig channel_from(const json& j, const std::string& path, ChannelModelConfig c) {
  Reader r(j, path);
  r.get("carrier_hz", c.carrier_hz);
  r.get("ple_los", c.ple_los);
  r.get("ple_nlos", c.ple_nlos);
  r.get("sigma_los_db", c.sigma_los_db);
  r.get("sigma_nlos_db", c.sigma_nlos_db);
  r.get("correlation_distance_m", c.correlation_distance_m);
  r.get("los_d1_m", c.los_d1_m);
  r.get("los_d2_m", c.los_d2_m);
  std::string mode(to_string(c.los_mode));
  r.get("los_mode", mode);
  if (mode == "stochastic") c.los_mode = LosMode::stochastic;
  else if (mode == "always_los") c.los_mode = LosMode::always_los;
  else if (mode == "always_nlos") c.los_mode = LosMode::always_nlos;
  else fail(ErrorCategory::config, path + ".los_mode: stochastic, always_los or always_nlos");
  r.get("shadowing", c.shadowing);
  r.get("nlos_fading", c.nlos_fading);
  r.get("shadow_components", c.shadow_components);
  r.finish();
  return c;
}

inline ojson to_json(const Mount& m) {
  return ojson{{"height_above_roof_m", m.height_above_roof}, {"lateral_m", m.lateral_m}, {"from_rear_m", m.from_rear_m}};
}

inline Mount mount_from(const json& j, const std::string& path, Mount m) {
  Reader r(j, path);
  r.get("height_above_roof_m", m.height_above_roof);
  r.get("lateral_m", m.lateral_m);
  r.get("from_rear_m", m.from_rear_m);
  r.finish();
  return m;
}

inline ojson to_json(const PlatoonSpec& p) {
  const auto& g = p.geometry;
  ojson links = ojson::array();
  for (const auto& l : p.links)
    links.push_back({{"name", l.name},
                     {"car", l.car},
                     {"tx_mount", to_json(l.tx_mount)},
                     {"rx_mount", to_json(l.rx_mount)},
                     {"target_snr_db", l.target_snr_db}});
  return ojson{{"cars", g.cars},
               {"gap_m", g.gap_m},
               {"car",
                {{"length_m", g.car.length},
                 {"width_m", g.car.width},
                 {"roof_height_m", g.car.roof_height},
                 {"hood_height_m", g.car.hood_height},
                 {"hood_length_m", g.car.hood_length}}},
               {"reflectors", {{"roof", g.reflect_roof}, {"hood", g.reflect_hood}, {"back", g.reflect_back}}},
               {"trace",
                {{"reflection_loss_db", p.trace.reflection_loss_db},
                 {"reflection_phase_deg", p.trace.reflection_phase_deg},
                 {"max_order", p.trace.max_order}}},
               {"rx_gain_dbi", p.rx_gain_dbi},
               {"links", std::move(links)},
               {"box", to_json(p.box)},
               {"otp",
                {{"packet_interval_s", p.otp.packet_interval_s},
                 {"packet_bytes", p.otp.packet_bytes},
                 {"rekey_period_s", p.otp.rekey_period_s},
                 {"key_window_s", p.otp.key_window_s},
                 {"stated_budget_bytes", p.otp.stated_budget_bytes}}}};
}

inline PlatoonSpec platoon_from(const json& j, const std::string& path, PlatoonSpec p) {
  Reader r(j, path);
  auto& g = p.geometry;
  r.get("cars", g.cars);
  r.get("gap_m", g.gap_m);
  if (r.has("car")) {
    Reader c(r.child("car"), r.path("car"));
    c.get("length_m", g.car.length);
    c.get("width_m", g.car.width);
    c.get("roof_height_m", g.car.roof_height);
    c.get("hood_height_m", g.car.hood_height);
    c.get("hood_length_m", g.car.hood_length);
    c.finish();
  }
  if (r.has("reflectors")) {
    Reader c(r.child("reflectors"), r.path("reflectors"));
    c.get("roof", g.reflect_roof);
    c.get("hood", g.reflect_hood);
    c.get("back", g.reflect_back);
    c.finish();
  }
  if (r.has("trace")) {
    Reader c(r.child("trace"), r.path("trace"));
    c.get("reflection_loss_db", p.trace.reflection_loss_db);
    c.get("reflection_phase_deg", p.trace.reflection_phase_deg);
    c.get("max_order", p.trace.max_order);
    c.finish();
  }
  r.get("rx_gain_dbi", p.rx_gain_dbi);
  if (r.has("links")) {
    const auto& arr = r.child("links");
    require(arr.is_array(), ErrorCategory::config, r.path("links") + ": expected an array");
    p.links.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string lp = r.path("links") + "[" + std::to_string(i) + "]";
      Reader c(arr[i], lp);
      PlatoonLinkSpec l;
      c.get("name", l.name);
      c.get("car", l.car);
      if (c.has("tx_mount")) l.tx_mount = mount_from(c.child("tx_mount"), lp + ".tx_mount", l.tx_mount);
      if (c.has("rx_mount")) l.rx_mount = mount_from(c.child("rx_mount"), lp + ".rx_mount", l.rx_mount);
      c.get("target_snr_db", l.target_snr_db);
      c.finish();
      p.links.push_back(std::move(l));
    }
  }
  if (r.has("box")) p.box = grid_from(r.child("box"), r.path("box"), p.box);
  if (r.has("otp")) {
    Reader c(r.child("otp"), r.path("otp"));
    c.get("packet_interval_s", p.otp.packet_interval_s);
    c.get("packet_bytes", p.otp.packet_bytes);
    c.get("rekey_period_s", p.otp.rekey_period_s);
    c.get("key_window_s", p.otp.key_window_s);
    c.get("stated_budget_bytes", p.otp.stated_budget_bytes);
    c.finish();
  }
  r.finish();
  return p;
}

inline ojson points_json(const std::vector<Point2>& pts) {
  ojson a = ojson::array();
  for (const auto& p : pts) a.push_back({p[0], p[1]});
  return a;
}

inline std::vector<Point2> points_from(const json& j, const std::string& path) {
  require(j.is_array(), ErrorCategory::config, path + ": expected an array of points");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vec3 p = point(j[i], path + "[" + std::to_string(i) + "]");
    out.push_back({p.x, p.y});
  }
  return out;
}

}  // namespace cfgjson

/// Full config as JSON. Only the blocks the scenario kind reads are emitted.
inline nlohmann::ordered_json config_to_json(const ScenarioConfig& c) {
  using namespace cfgjson;
  ojson j{{"schema_version", c.schema_version}, {"kind", to_string(c.kind)}, {"seed", c.seed}, {"trials", c.trials}};
  j["code"] = to_json(c.code);
  j["link"] = to_json(c.link);
  j["dh"] = ojson{{"cycles_per_op", c.dh.cycles_per_op}, {"clock_hz", c.dh.clock_hz}, {"bits_per_key", c.dh.bits_per_key}};
  if (c.kind == ScenarioKind::rate_calc) j["sweep"] = ojson{{"secret_bits", c.sweep.secret_bits}};
  if (c.is_beam_sweep() || c.kind == ScenarioKind::platoon) j["array"] = to_json(c.array);
  if (c.is_beam_sweep()) {
    j["codebook"] = to_json(c.codebook);
    j["channel"] = to_json(c.channel);
    j["receivers"] = ojson{{"mobile_gain_dbi", c.receivers.mobile_gain_dbi},
                           {"eve_gain_dbi", c.receivers.eve_gain_dbi},
                           {"mobile_sectors", c.receivers.mobile_sectors}};
    j["sweep"] = ojson{{"one_frame_per_station", c.sweep.one_frame_per_station},
                       {"secret_bits", c.sweep.secret_bits},
                       {"tx_rate_bps", c.sweep.tx_rate_bps}};
    j["grid"] = to_json(c.grid);
  }
  switch (c.kind) {
    case ScenarioKind::exp1: j["exp1"] = ojson{{"d_m", c.exp1.d_m}, {"theta_deg", c.exp1.theta_deg}}; break;
    case ScenarioKind::exp2: j["exp2"] = ojson{{"d_m", c.exp2.d_m}, {"n", c.exp2.n}}; break;
    case ScenarioKind::exp3:
      j["exp3"] = ojson{{"stations", points_json(c.exp3.stations)},
                        {"triangle", points_json({c.exp3.triangle.begin(), c.exp3.triangle.end()})},
                        {"mobile_positions", points_json(c.exp3.mobile_positions)},
                        {"mobile_spacing_m", c.exp3.mobile_spacing_m}};
      break;
    case ScenarioKind::platoon: j["platoon"] = to_json(c.platoon); break;
    case ScenarioKind::sweep_demo:
      j["sweep_demo"] = ojson{{"d_m", c.sweep_demo.d_m},
                              {"n", c.sweep_demo.n},
                              {"eve", {c.sweep_demo.eve[0], c.sweep_demo.eve[1]}},
                              {"eve_bound", c.sweep_demo.eve_bound}};
      break;
    case ScenarioKind::rate_calc: break;
  }
  return j;
}

inline void validate(const ScenarioConfig& c) {
  auto check = [](bool ok, const std::string& what) { require(ok, ErrorCategory::config, what); };
  check(c.schema_version == kSchemaVersion, "unsupported schema_version " + std::to_string(c.schema_version));
  check(c.trials >= 1, "trials must be >= 1");
  try {
    c.link.budget().validate();
    const auto code = c.resolved_code();
    (void)code;
    if (c.is_beam_sweep() || c.kind == ScenarioKind::platoon) c.array.geometry.validate();
    if (c.is_beam_sweep()) {
      c.codebook.validate();
      c.channel.validate();
      c.grid.validate();
      check(c.grid.dims == 2, "grid must be 2-D for beam-sweep scenarios");
      check(c.sweep.secret_bits >= 1, "secret_bits must be >= 1");
    }
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::config) throw;
    fail(ErrorCategory::config, e.what());
  }
  switch (c.kind) {
    case ScenarioKind::exp1:
      check(c.exp1.d_m > 0.0, "exp1.d_m must be > 0");
      check(c.exp1.theta_deg > 0.0 && c.exp1.theta_deg < 360.0, "exp1.theta_deg must lie in (0, 360)");
      break;
    case ScenarioKind::exp2:
      check(c.exp2.d_m > 0.0, "exp2.d_m must be > 0");
      check(c.exp2.n >= 1, "exp2.n must be >= 1");
      break;
    case ScenarioKind::exp3:
      check(!c.exp3.stations.empty(), "exp3.stations must not be empty");
      check(c.exp3.mobile_spacing_m > 0.0, "exp3.mobile_spacing_m must be > 0");
      break;
    case ScenarioKind::platoon:
      try {
        c.platoon.geometry.validate();
        c.platoon.box.validate();
      } catch (const Error& e) {
        fail(ErrorCategory::config, e.what());
      }
      check(c.platoon.box.dims == 3, "platoon.box must be 3-D");
      check(!c.platoon.links.empty(), "platoon needs at least one link");
      break;
    case ScenarioKind::sweep_demo:
      check(c.sweep_demo.d_m > 0.0 && c.sweep_demo.n >= 1, "sweep_demo needs d_m > 0 and n >= 1");
      break;
    case ScenarioKind::rate_calc: break;
  }
  check(c.dh.cycles_per_op > 0 && c.dh.clock_hz > 0 && c.dh.bits_per_key > 0, "dh parameters must be positive");
}

/// Parses and validates a config. Missing fields take the kind's defaults;
/// unknown fields and blocks the kind does not use are errors.
inline ScenarioConfig config_from_json(const nlohmann::json& j) {
  using namespace cfgjson;
  Reader r(j, "config");
  require(r.has("kind"), ErrorCategory::config, "config.kind is required");
  std::string kind_name;
  r.get("kind", kind_name);
  ScenarioConfig c = default_config(parse_kind(kind_name));
  r.get("schema_version", c.schema_version);
  require(c.schema_version == kSchemaVersion, ErrorCategory::config,
          "unsupported schema_version " + std::to_string(c.schema_version));
  r.get("seed", c.seed);
  r.get("trials", c.trials);
  if (r.has("code")) c.code = code_from(r.child("code"), "config.code");
  if (r.has("link")) c.link = link_from(r.child("link"), "config.link", c.link);
  if (r.has("dh")) {
    Reader d(r.child("dh"), "config.dh");
    d.get("cycles_per_op", c.dh.cycles_per_op);
    d.get("clock_hz", c.dh.clock_hz);
    d.get("bits_per_key", c.dh.bits_per_key);
    d.finish();
  }
  const bool sweep_kind = c.is_beam_sweep();
  auto only_for = [&](const char* key, bool allowed) {
    require(!r.has(key) || allowed, ErrorCategory::config,
            std::string("config.") + key + " is not used by kind '" + kind_name + "'");
  };
  only_for("array", sweep_kind || c.kind == ScenarioKind::platoon);
  only_for("codebook", sweep_kind);
  only_for("channel", sweep_kind);
  only_for("receivers", sweep_kind);
  only_for("grid", sweep_kind);
  only_for("sweep", sweep_kind || c.kind == ScenarioKind::rate_calc);
  only_for("exp1", c.kind == ScenarioKind::exp1);
  only_for("exp2", c.kind == ScenarioKind::exp2);
  only_for("exp3", c.kind == ScenarioKind::exp3);
  only_for("platoon", c.kind == ScenarioKind::platoon);
  only_for("sweep_demo", c.kind == ScenarioKind::sweep_demo);

  if (r.has("array")) c.array = array_from(r.child("array"), "config.array", c.array);
  if (r.has("codebook")) c.codebook = codebook_from(r.child("codebook"), "config.codebook", c.codebook);
  if (r.has("channel")) c.channel = channel_from(r.child("channel"), "config.channel", c.channel);
  if (r.has("receivers")) {
    Reader x(r.child("receivers"), "config.receivers");
    x.get("mobile_gain_dbi", c.receivers.mobile_gain_dbi);
    x.get("eve_gain_dbi", c.receivers.eve_gain_dbi);
    x.get("mobile_sectors", c.receivers.mobile_sectors);
    x.finish();
  }
  if (r.has("sweep")) {
    Reader x(r.child("sweep"), "config.sweep");
    if (sweep_kind) {
      x.get("one_frame_per_station", c.sweep.one_frame_per_station);
      x.get("tx_rate_bps", c.sweep.tx_rate_bps);
    }
    x.get("secret_bits", c.sweep.secret_bits);
    x.finish();
  }
  if (r.has("grid")) c.grid = grid_from(r.child("grid"), "config.grid", c.grid);
  if (r.has("exp1")) {
    Reader x(r.child("exp1"), "config.exp1");
    x.get("d_m", c.exp1.d_m);
    x.get("theta_deg", c.exp1.theta_deg);
    x.finish();
  }
  if (r.has("exp2")) {
    Reader x(r.child("exp2"), "config.exp2");
    x.get("d_m", c.exp2.d_m);
    x.get("n", c.exp2.n);
    x.finish();
  }
  if (r.has("exp3")) {
    Reader x(r.child("exp3"), "config.exp3");
    if (x.has("stations")) c.exp3.stations = points_from(x.child("stations"), "config.exp3.stations");
    if (x.has("triangle")) {
      const auto t = points_from(x.child("triangle"), "config.exp3.triangle");
      require(t.size() == 3, ErrorCategory::config, "config.exp3.triangle needs exactly 3 points");
      std::copy(t.begin(), t.end(), c.exp3.triangle.begin());
    }
    if (x.has("mobile_positions"))
      c.exp3.mobile_positions = points_from(x.child("mobile_positions"), "config.exp3.mobile_positions");
    x.get("mobile_spacing_m", c.exp3.mobile_spacing_m);
    x.finish();
  }
  if (r.has("platoon")) c.platoon = platoon_from(r.child("platoon"), "config.platoon", c.platoon);
  if (r.has("sweep_demo")) {
    Reader x(r.child("sweep_demo"), "config.sweep_demo");
    x.get("d_m", c.sweep_demo.d_m);
    x.get("n", c.sweep_demo.n);
    if (x.has("eve")) {
      const Vec3 p = point(x.child("eve"), "config.sweep_demo.eve");
      c.sweep_demo.eve = {p.x, p.y};
    }
    x.get("eve_bound", c.sweep_demo.eve_bound);
    x.finish();
  }
  r.finish();
  validate(c);
  return c;
}

inline ScenarioConfig parse_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCategory::config, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace mmkey
