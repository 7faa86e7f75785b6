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

#include "feblockade/presets.hpp"

#include <cmath>
#include <numbers>

#include "feblockade/errors.hpp"
#include "feblockade/scenario.hpp"

namespace feb {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

json base(const std::string& scenario, const std::string& model, double kappa) {
  return {{"schema", kSchema},
          {"scenario", scenario},
          {"model", {{"type", model}, {"kappa", kappa}, {"n_cut", "auto"}}},
          {"loss", {{"gamma", 1e-5}}}};
}

json electron(double g_q, const std::string& phase_match, int D = 65) {
  return {{"D", D}, {"energy_kev", 200.0}, {"g_q", g_q}, {"phase_match", phase_match}, {"omega_t", 472.43}};
}

json gq_grid() { return {{"start", 0.0}, {"stop", kPi}, {"count", 65}}; }

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig3ab", "fig3cd", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a", "fig5b", "fig5c"};
}

json preset(const std::string& name) {
  if (name == "fig3ab") {
    json j = base("sweep_kappa", "kerr", 0.02);
    j["electron"] = electron(kPi / 2, "1");
    j["target_level"] = "1";
    j["sweep"] = {{"start", 0.0}, {"stop", 0.02}, {"count", 9}};
    j["output"] = "out/fig3ab";
    return j;
  }
  if (name == "fig3cd") {
    json j = base("sweep_velocity", "jc", 0.02);
    j["electron"] = {{"D", 45}, {"energy_kev", 200.0}, {"g_q", kPi / std::sqrt(2.0)}, {"omega_t", 472.43}};
    j["sweep"] = {{"start", 0.97}, {"stop", 1.03}, {"count", 13}};
    j["output"] = "out/fig3cd";
    return j;
  }
  if (name == "fig4a") {
    json j = base("sweep_gq", "kerr", 0.02);
    j["electron"] = electron(kPi / 2, "1");
    j["target_level"] = "1";
    j["sweep"] = gq_grid();
    j["output"] = "out/fig4a";
    return j;
  }
  if (name == "fig4b") {
    json j = base("sweep_gq", "kerr", 0.02);
    j["electron"] = electron(kPi / 2, "2");
    j["initial_level"] = "1";
    j["target_level"] = "2";
    j["sweep"] = gq_grid();
    j["output"] = "out/fig4b";
    return j;
  }
  if (name == "fig4c" || name == "fig4d") {
    const std::string level = name == "fig4c" ? "1+" : "1-";
    json j = base("sweep_gq", "jc", 0.02);
    j["electron"] = electron(kPi / std::sqrt(2.0), level);
    j["target_level"] = level;
    j["sweep"] = gq_grid();
    j["output"] = "out/" + name;
    return j;
  }
  if (name == "fig5a") {
    json j = base("fidelity_map", "jc", 0.02);
    j["electron"] = electron(kPi / std::sqrt(2.0), "1-");
    j["map"] = {{"kappa", {0.005, 0.01, 0.02}}, {"gamma", {1e-5, 1e-4, 1e-3}}};
    j["output"] = "out/fig5a";
    return j;
  }
  if (name == "fig5b") {
    json j = base("fidelity_map", "kerr", 0.02);
    j["electron"] = electron(kPi / 2, "1");
    j["map"] = {{"kappa", {0.005, 0.01, 0.02}}, {"gamma", {1e-5, 1e-4, 1e-3}}};
    j["output"] = "out/fig5b";
    return j;
  }
  if (name == "fig5c") {
    json j = base("fidelity_map", "kerr", 0.02);
    j["electron"] = electron(kPi / 2, "1");
    j["map"] = {{"kappa", {0.02}},
                {"gamma", {1e-6, 1e-5, 1e-4, 1e-3}},
                {"variants",
                 {{{"name", "kerr"}},
                  {{"name", "jc"},
                   {"model", {{"type", "jc"}}},
                   {"electron", {{"g_q", kPi / std::sqrt(2.0)}, {"phase_match", "1-"}}}}}}};
    j["output"] = "out/fig5c";
    return j;
  }
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

}  // namespace feb
