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

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mmkey/mmkey.hpp"

namespace {

int exit_code(mmkey::ErrorCategory c) {
  using mmkey::ErrorCategory;
  switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::invalid_argument: return 3;
    case ErrorCategory::geometry: return 4;
    case ErrorCategory::budget_exceeded: return 5;
    case ErrorCategory::no_key: return 6;
    case ErrorCategory::io: return 7;
  }
  return 1;
}

void print_error(std::string_view category, const std::string& message) {
  std::cerr << nlohmann::json{{"error", category}, {"message", message}}.dump() << '\n';
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out;
  unsigned threads = 0;
  bool dump_config = false;
};

mmkey::ScenarioConfig load(mmkey::ScenarioKind kind, const Options& o) {
  using namespace mmkey;
  ScenarioConfig c = default_config(kind);
  if (!o.config.empty()) {
    std::ifstream in(o.config, std::ios::binary);
    if (!in) fail(ErrorCategory::io, o.config + ": cannot open");
    std::ostringstream text;
    text << in.rdbuf();
    c = parse_config(text.str());
    require(c.kind == kind, ErrorCategory::config,
            o.config + ": kind '" + std::string(to_string(c.kind)) + "' does not match subcommand '" +
                std::string(to_string(kind)) + "'");
  }
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  validate(c);
  return c;
}

int run(mmkey::ScenarioKind kind, const Options& o) {
  using namespace mmkey;
  const ScenarioConfig c = load(kind, o);
  if (o.dump_config) {
    std::cout << config_to_json(c).dump(2) << '\n';
    return 0;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const RunReport r = run_scenario(c, o.threads);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::string dir = o.out.empty() ? "out/" + std::string(to_string(kind)) : o.out;
  const auto files = emit_report(r, dir);
  std::cout << "kind " << to_string(kind) << "  seed " << c.seed << "  wall " << secs << " s\n";
  for (const auto& f : files) std::cout << "  wrote " << f.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  using mmkey::ScenarioKind;
  CLI::App app{"mmWave beam-sweep key agreement simulator"};
  app.require_subcommand(1);
  Options opt;
  ScenarioKind chosen = ScenarioKind::rate_calc;

  for (auto kind : {ScenarioKind::rate_calc, ScenarioKind::exp1, ScenarioKind::exp2, ScenarioKind::exp3,
                    ScenarioKind::platoon, ScenarioKind::sweep_demo}) {
    auto* sub = app.add_subcommand(std::string(mmkey::to_string(kind)));
    sub->add_option("-c,--config", opt.config, "scenario JSON; built-in defaults when omitted");
    sub->add_option("-s,--seed", opt.seed, "override the config seed");
    sub->add_option("-t,--trials", opt.trials, "override the Monte-Carlo trial count")->check(CLI::PositiveNumber);
    sub->add_option("-o,--out", opt.out, "output directory (default out/<kind>)");
    sub->add_option("-j,--threads", opt.threads, "worker threads, 0 = hardware concurrency");
    sub->add_flag("--dump-config", opt.dump_config, "print the resolved config and exit");
    sub->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("invalid_argument", e.what());
    return exit_code(mmkey::ErrorCategory::invalid_argument);
  }

  try {
    return run(chosen, opt);
  } catch (const mmkey::Error& e) {
    print_error(mmkey::to_string(e.category()), e.what());
    return exit_code(e.category());
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
}
