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

/**
 * @file
 * Scenario execution and artifact emission.
 */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "feblockade/scenario.hpp"

namespace feb {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitVerification = 4 };

inline constexpr const char* kWorkersEnv = "FEBLOCK_WORKERS";

struct RunOptions {
  std::optional<std::filesystem::path> out;  ///< overrides the config's output
  std::optional<int> workers;                ///< overrides env and config
};

/// Command-line value, else FEBLOCK_WORKERS, else the config value.
/// Throws ConfigError for a malformed environment value.
int resolve_workers(std::optional<int> cli, int config);

/// Evaluates points on `workers` threads; results come back in input order.
std::vector<PointResult> evaluate_points(const std::vector<PointSpec>& points, int workers);

/// The points of a sweep or map scenario, in output order.
std::vector<PointSpec> scenario_points(const ScenarioConfig& cfg);

/// Text of gates_report.txt.
std::string format_gates_report(const GateSuiteResult& suite, const std::optional<NoisyGateReport>& noisy,
                                const LadderConfig& ladder);

/// Runs a validated scenario, writing artifacts into the output directory.
/// Returns an ExitCode; progress and failures go to `log`.
int run_scenario(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log);

/// Parses `config` and runs it; config errors become kExitConfig.
int run_json(const nlohmann::json& config, const RunOptions& opts, std::ostream& log);
int run_file(const std::filesystem::path& path, const RunOptions& opts, std::ostream& log);

}  // namespace feb
