// Copyright 2026 The feblockade Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "feblockade/errors.hpp"
#include "feblockade/presets.hpp"
#include "feblockade/runner.hpp"

namespace {

using nlohmann::json;

struct Args {
  std::string config;
  std::string preset;
  std::string out;
  int workers = 0;
  std::optional<double> dw_pm, kappa, gamma, de_over_e, margin;
};

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("config", a.config, "scenario config (JSON)");
  sub->add_option("--preset", a.preset, "built-in scenario name");
  sub->add_option("--out", a.out, "output directory");
  sub->add_option("--workers", a.workers, "worker threads")->check(CLI::PositiveNumber);
}

json load(const Args& a) {
  if (!a.config.empty() && !a.preset.empty()) throw feb::ConfigError("--preset", "give a config file or a preset, not both");
  if (!a.preset.empty()) return feb::preset(a.preset);
  if (a.config.empty()) throw feb::ConfigError("config", "no config file or --preset given");
  std::ifstream in(a.config, std::ios::binary);
  if (!in) throw feb::ConfigError("config", "cannot open " + a.config);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw feb::ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
}

bool kind_allowed(const std::string& cmd, const std::string& kind) {
  if (cmd == "run") return true;
  if (cmd == "sweep") return kind.rfind("sweep_", 0) == 0 || kind == "fidelity_map";
  if (cmd == "gates") return kind == "gates";
  return kind == "feasibility";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free-electron polariton blockade simulator"};
  app.require_subcommand(1);
  Args a;
  CLI::App* run = app.add_subcommand("run", "run any scenario");
  CLI::App* sweep = app.add_subcommand("sweep", "run a sweep or fidelity map");
  CLI::App* gates = app.add_subcommand("gates", "verify the gate identity suite");
  CLI::App* check = app.add_subcommand("check", "evaluate the feasibility inequalities");
  for (auto* s : {run, sweep, gates, check}) add_common(s, a);
  check->add_option("--dw-pm", a.dw_pm, "phase-matching bandwidth / omega");
  check->add_option("--kappa", a.kappa, "nonlinearity / omega");
  check->add_option("--gamma", a.gamma, "loss rate / omega");
  check->add_option("--de-over-e", a.de_over_e, "relative electron energy spread");
  check->add_option("--margin", a.margin, "required margin factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : feb::kExitConfig;
  }

  std::string cmd;
  for (auto* s : {run, sweep, gates, check}) {
    if (s->parsed()) cmd = s->get_name();
  }

  try {
    json j;
    if (cmd == "gates" && a.config.empty() && a.preset.empty()) {
      j = {{"schema", feb::kSchema}, {"scenario", "gates"}};
    } else if (cmd == "check" && a.config.empty() && a.preset.empty()) {
      j = {{"schema", feb::kSchema}, {"scenario", "feasibility"}};
    } else {
      j = load(a);
    }
    if (cmd == "check") {
      if (a.kappa) j["model"]["kappa"] = *a.kappa;
      if (a.gamma) j["loss"]["gamma"] = *a.gamma;
      if (a.dw_pm) j["feasibility"]["dw_pm"] = *a.dw_pm;
      if (a.de_over_e) j["feasibility"]["de_over_e"] = *a.de_over_e;
      if (a.margin) j["feasibility"]["margin"] = *a.margin;
    }
    const std::string kind = j.contains("scenario") && j["scenario"].is_string() ? j["scenario"].get<std::string>() : "";
    if (!kind_allowed(cmd, kind)) {
      throw feb::ConfigError("scenario", "'" + kind + "' cannot be run by the " + cmd + " subcommand");
    }
    feb::RunOptions opts;
    if (!a.out.empty()) opts.out = a.out;
    if (a.workers > 0) opts.workers = a.workers;
    return feb::run_json(j, opts, std::cerr);
  } catch (const feb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return feb::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return feb::kExitNumerical;
  }
}
