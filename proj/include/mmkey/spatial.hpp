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
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "mmkey/error.hpp"
#include "mmkey/parallel.hpp"
#include "mmkey/platoon.hpp"
#include "mmkey/rfmath.hpp"
#include "mmkey/sls.hpp"

namespace mmkey {

/// Regular grid of cells over a rectangle (dims = 2, z ignored) or a box.
struct GridSpec {
  Vec3 min;
  Vec3 max;
  double resolution = 0.1;
  int dims = 2;
  std::size_t max_cells = 4'000'000;

  static GridSpec rect(double x0, double x1, double y0, double y1, double res) { return {{x0, y0, 0}, {x1, y1, 0}, res, 2}; }
  static GridSpec box(const Vec3& lo, const Vec3& hi, double res) { return {lo, hi, res, 3}; }

  static std::size_t cells_along(double lo, double hi, double res) {
    const double n = (hi - lo) / res;
    const auto r = static_cast<std::size_t>(std::llround(n));
    require(r >= 1 && std::abs(n - static_cast<double>(r)) < 1e-6 * std::max(1.0, n), ErrorCategory::invalid_argument,
            "grid extent must be a positive multiple of the resolution");
    return r;
  }

  void validate() const {
    require(dims == 2 || dims == 3, ErrorCategory::invalid_argument, "grid must be 2-D or 3-D");
    require(resolution > 0.0, ErrorCategory::invalid_argument, "grid resolution must be positive");
    const std::size_t n = count();
    require(n <= max_cells, ErrorCategory::budget_exceeded,
            "grid has " + std::to_string(n) + " cells, budget is " + std::to_string(max_cells));
  }

  std::size_t nx() const { return cells_along(min.x, max.x, resolution); }
  std::size_t ny() const { return cells_along(min.y, max.y, resolution); }
  std::size_t nz() const { return dims == 3 ? cells_along(min.z, max.z, resolution) : 1; }
  std::size_t count() const { return nx() * ny() * nz(); }

  double cell_measure() const { return std::pow(resolution, dims); }

  Vec3 center(std::size_t index) const {
    const std::size_t x = nx(), y = ny();
    const std::size_t i = index % x, j = (index / x) % y, k = index / (x * y);
    Vec3 c{min.x + (static_cast<double>(i) + 0.5) * resolution, min.y + (static_cast<double>(j) + 0.5) * resolution, 0.0};
    c.z = dims == 3 ? min.z + (static_cast<double>(k) + 0.5) * resolution : min.z;
    return c;
  }

  bool operator==(const GridSpec&) const = default;
};

struct EnsbMap {
  GridSpec grid;
  std::vector<double> values;  // bits per cell
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double ensb_max = 0.0;
};

struct RegionResult {
  GridSpec grid;
  std::vector<std::size_t> cells;  // sorted cell indices
  double measure = 0.0;            // m^2 or m^3
};

/// One beam-sweep deployment: stations sweeping toward one mobile while an
/// eavesdropper listens from a probe position.
struct BeamSweepScenario {
  std::vector<BaseStation> stations;
  MobileNode mobile;
  QuasiOmni eve_antenna;
  ChannelEnvironment env;
  WiretapCode code;
  SweepOptions options;
};

/// Largest ENSB: the share of a frame's secret bits that is secure.
inline double ensb_max(const WiretapCode& code, std::size_t payload_bits) {
  return static_cast<double>(payload_bits) * secure_rate(code).secret_fraction();
}

inline double ensb_max(const BeamSweepScenario& s) { return ensb_max(s.code, s.options.secret_bits); }

struct EnsbCell {
  double ensb_bits = 0.0;
  double key_probability = 0.0;    // some decoded frame is erased at Eve
  double break_probability = 0.0;  // Eve holds every decoded frame
};

/// Monte-Carlo ENSB evaluator. The eavesdropper-independent part of every
/// trial (shadow fields, mobile links, decoded frames) is computed once.
class EnsbEvaluator {
 public:
  EnsbEvaluator(const BeamSweepScenario& scenario, std::size_t trials, std::uint64_t seed)
      : scenario_(scenario), trials_(trials), seed_(seed) {
    require(trials >= 1, ErrorCategory::invalid_argument, "ENSB needs at least one trial");
    require(!scenario.stations.empty(), ErrorCategory::invalid_argument, "scenario has no base stations");
    scenario.code.validate();
    scenario.env.model.validate();
    scenario.env.budget.validate();
    ensb_max_ = mmkey::ensb_max(scenario);
    const std::size_t ns = scenario.stations.size();
    trial_seeds_.resize(trials);
    states_.resize(trials);
    union_.assign(ns, {});
    for (std::size_t t = 0; t < trials; ++t) {
      trial_seeds_[t] = derive_seed({seed, t});
      states_[t].reserve(ns);
      for (std::size_t s = 0; s < ns; ++s) {
        states_[t].push_back(prepare_station_trial(scenario.stations[s], scenario.mobile, scenario.env, scenario.code,
                                                   trial_seeds_[t], scenario.options));
        union_[s].insert(states_[t][s].decoded.begin(), states_[t][s].decoded.end());
      }
    }
  }

  double ensb_max() const { return ensb_max_; }
  std::size_t trials() const { return trials_; }

  EnsbCell evaluate(const Vec3& eve_pos, std::uint64_t eve_stream) const {
    const std::size_t ns = scenario_.stations.size();
    // Transmit gains toward Eve for every sector the mobile ever decodes.
    std::vector<std::vector<double>> gain(ns);
    std::vector<bool> colocated(ns, false);
    for (std::size_t s = 0; s < ns; ++s) {
      const auto& bs = scenario_.stations[s];
      const Vec3 d = eve_pos - bs.position;
      colocated[s] = d.norm() < 1e-9;
      gain[s].assign(bs.codebook.size(), 0.0);
      if (colocated[s]) continue;
      const double az = azimuth_deg(d), el = elevation_deg(d);
      for (std::size_t sector : union_[s]) gain[s][sector] = bs.codebook.gain(sector, az, el).value;
    }
    const Decibel eve_rx = scenario_.eve_antenna.gain();
    std::size_t key_trials = 0, break_trials = 0;
    for (std::size_t t = 0; t < trials_; ++t) {
      bool any_decoded = false, erased = false;
      for (std::size_t s = 0; s < ns && !erased; ++s) {
        const auto& st = states_[t][s];
        if (st.decoded.empty()) continue;
        any_decoded = true;
        if (colocated[s]) continue;  // at the transmitter Eve hears every frame
        const auto real = eve_realization(scenario_.stations[s], st, eve_pos, scenario_.env, trial_seeds_[t], eve_stream);
        for (std::size_t sector : st.decoded) {
          if (scenario_.code.erased(snr(scenario_.env.budget, Decibel{gain[s][sector]}, eve_rx, real))) {
            erased = true;
            break;
          }
        }
      }
      if (erased) ++key_trials;
      else if (any_decoded) ++break_trials;
    }
    EnsbCell c;
    c.key_probability = static_cast<double>(key_trials) / static_cast<double>(trials_);
    c.break_probability = static_cast<double>(break_trials) / static_cast<double>(trials_);
    c.ensb_bits = ensb_max_ * c.key_probability;
    return c;
  }

 private:
  const BeamSweepScenario& scenario_;
  std::size_t trials_;
  std::uint64_t seed_;
  double ensb_max_ = 0.0;
  std::vector<std::uint64_t> trial_seeds_;
  std::vector<std::vector<StationTrial>> states_;
  std::vector<std::set<std::size_t>> union_;
};

/// ENSB at one eavesdropper position: the secure share of a frame times the
/// probability that at least one frame the mobile decodes is erased at Eve.
inline EnsbCell ensb_at(const Vec3& eve_pos, const BeamSweepScenario& scenario, std::size_t trials, std::uint64_t seed,
                        std::uint64_t eve_stream = 0) {
  return EnsbEvaluator(scenario, trials, seed).evaluate(eve_pos, eve_stream);
}

/// ENSB at every cell centre. Cell i uses eavesdropper stream i, so the map
/// is the same for any thread count.
inline EnsbMap ensb_map(const BeamSweepScenario& scenario, const GridSpec& grid, std::size_t trials, std::uint64_t seed,
                        unsigned threads = 0) {
  grid.validate();
  EnsbEvaluator eval(scenario, trials, seed);
  EnsbMap map;
  map.grid = grid;
  map.trials = trials;
  map.seed = seed;
  map.ensb_max = eval.ensb_max();
  map.values.assign(grid.count(), 0.0);
  parallel_for(
      map.values.size(), [&](std::size_t i) { map.values[i] = eval.evaluate(grid.center(i), i).ensb_bits; }, threads);
  return map;
}

inline RegionResult make_region(const GridSpec& grid, std::vector<std::size_t> cells) {
  RegionResult r;
  r.grid = grid;
  std::sort(cells.begin(), cells.end());
  r.cells = std::move(cells);
  r.measure = static_cast<double>(r.cells.size()) * grid.cell_measure();
  return r;
}

/// Cells where Eve breaks the key with positive estimated probability,
/// i.e. ENSB below its maximum by more than half a Monte-Carlo step.
inline RegionResult insecure_area(const EnsbMap& map) {
  require(map.values.size() == map.grid.count(), ErrorCategory::invalid_argument, "ENSB map is incomplete");
  const double eps = map.trials > 0 ? map.ensb_max / static_cast<double>(map.trials) : 0.0;
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < map.values.size(); ++i)
    if (map.values[i] < map.ensb_max - 0.5 * eps) cells.push_back(i);
  return make_region(map.grid, std::move(cells));
}

/// Cells outside the car bodies where the link's SNR exceeds th2.
inline RegionResult insecure_volume(const PlatoonLink& link, Decibel th2, const GridSpec& box, unsigned threads = 0) {
  box.validate();
  std::vector<char> flag(box.count(), 0);
  parallel_for(
      flag.size(),
      [&](std::size_t i) {
        const Vec3 p = box.center(i);
        if (link.geometry.inside_body(p) || distance(p, link.tx) < 1e-9) return;
        flag[i] = link.snr_at(p) > th2 ? 1 : 0;
      },
      threads);
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < flag.size(); ++i)
    if (flag[i]) cells.push_back(i);
  return make_region(box, std::move(cells));
}

inline RegionResult region_intersection(const RegionResult& a, const RegionResult& b) {
  require(a.grid == b.grid, ErrorCategory::invalid_argument, "regions are defined on different grids");
  std::vector<std::size_t> cells;
  std::set_intersection(a.cells.begin(), a.cells.end(), b.cells.begin(), b.cells.end(), std::back_inserter(cells));
  return make_region(a.grid, std::move(cells));
}

namespace detail {
inline void write_point(std::ostringstream& out, const GridSpec& g, const Vec3& c) {
  out << c.x << ',' << c.y;
  if (g.dims == 3) out << ',' << c.z;
}
}  // namespace detail

/// x,y[,z],ensb_bits per cell in index order.
inline std::string ensb_map_csv(const EnsbMap& map) {
  std::ostringstream out;
  out.precision(12);
  out << (map.grid.dims == 3 ? "x,y,z,ensb_bits\n" : "x,y,ensb_bits\n");
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    detail::write_point(out, map.grid, map.grid.center(i));
    out << ',' << map.values[i] << '\n';
  }
  return out.str();
}

/// One line per cell of each named region: region,cell,x,y[,z].
inline std::string region_cells_csv(const std::vector<std::pair<std::string, const RegionResult*>>& regions, int dims = 2) {
  std::ostringstream out;
  out.precision(12);
  out << (dims == 3 ? "region,cell,x,y,z\n" : "region,cell,x,y\n");
  for (const auto& [name, r] : regions) {
    for (std::size_t c : r->cells) {
      out << name << ',' << c << ',';
      detail::write_point(out, r->grid, r->grid.center(c));
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace mmkey
