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

#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "mmkey/error.hpp"
#include "mmkey/harness.hpp"

namespace mmkey {

/// Writes to a sibling temporary file and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) fail(ErrorCategory::io, path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCategory::io, tmp.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) fail(ErrorCategory::io, tmp.string() + ": write failed");
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCategory::io, path.string() + ": rename failed");
  }
}

inline std::string report_text(const RunReport& r) { return r.to_json().dump(2) + "\n"; }

inline std::string map_text(const RunReport& r) {
  if (r.map) return ensb_map_csv(*r.map);
  return "x,y,ensb_bits\n";
}

inline std::string regions_text(const RunReport& r) {
  std::vector<std::pair<std::string, const RegionResult*>> refs;
  for (const auto& [name, region] : r.regions) refs.emplace_back(name, &region);
  return region_cells_csv(refs, r.region_dims);
}

/// report.json, ensb_map.csv, region_cells.csv and any extra files in dir.
inline std::vector<std::filesystem::path> emit_report(const RunReport& r, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    write_atomic(dir / name, text);
    written.push_back(dir / name);
  };
  put("report.json", report_text(r));
  put("ensb_map.csv", map_text(r));
  put("region_cells.csv", regions_text(r));
  for (const auto& [name, text] : r.extra_files) put(name, text);
  return written;
}

}  // namespace mmkey
