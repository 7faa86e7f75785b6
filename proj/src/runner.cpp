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

#include "feblockade/runner.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "feblockade/csv.hpp"
#include "feblockade/errors.hpp"

namespace feb {

using nlohmann::json;

int resolve_workers(std::optional<int> cli, int config) {
  if (cli) {
    if (*cli < 1) throw ConfigError("--workers", "must be >= 1");
    return *cli;
  }
  if (const char* env = std::getenv(kWorkersEnv); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) throw ConfigError(kWorkersEnv, "expected a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1, config);
}

std::vector<PointResult> evaluate_points(const std::vector<PointSpec>& points, int workers) {
  std::vector<PointResult> results(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = run_point(points[i]);
      } catch (const std::exception& e) {
        results[i] = PointResult{};
        results[i].error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return results;
}

std::vector<PointSpec> scenario_points(const ScenarioConfig& cfg) {
  std::vector<PointSpec> out;
  const PointSpec base = base_point(cfg);
  switch (cfg.kind) {
    case ScenarioKind::Evolve: out.push_back(base); break;
    case ScenarioKind::SweepKappa:
      for (double v : cfg.values) {
        PointSpec p = base;
        p.model.kappa = v;
        out.push_back(p);
      }
      break;
    case ScenarioKind::SweepVelocity:
      for (double v : cfg.values) {
        PointSpec p = base;
        p.electron.tuning = TuningMode::VelocityRatio;
        p.electron.velocity_ratio = v;
        out.push_back(p);
      }
      break;
    case ScenarioKind::SweepGq:
      for (double v : cfg.values) {
        PointSpec p = base;
        p.electron.g_q = v;
        out.push_back(p);
      }
      break;
    case ScenarioKind::FidelityMap:
      for (double k : cfg.map_kappas) {
        for (double g : cfg.map_gammas) {
          PointSpec p = base;
          p.model.kappa = k;
          p.gamma = g;
          out.push_back(p);
        }
      }
      break;
    default: break;
  }
  return out;
}

namespace {

std::string axis_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::SweepKappa: return "kappa_ratio";
    case ScenarioKind::SweepVelocity: return "velocity_ratio";
    case ScenarioKind::SweepGq: return "g_q";
    default: return "value";
  }
}

std::vector<std::string> report_levels(CavityKind kind) {
  if (kind == CavityKind::JC) return {"0*", "1+", "1-", "2+", "2-"};
  return {"0", "1", "2", "3"};
}

std::string distribution_csv(const Distribution& d, const std::string& header) {
  std::ostringstream os;
  write_distribution_csv(os, d, header);
  return os.str();
}

std::string eels_energy_csv(const Distribution& eels, const ElectronSpec& e) {
  const double photon_ev = 1239.8419843320026 / *e.wavelength_nm;
  std::ostringstream os;
  csv::write_row(os, {"energy_ev", "probability"});
  for (std::size_t i = 0; i < eels.size(); ++i) {
    const double k = std::stod(eels.labels()[i]);
    csv::write_row(os, {csv::format(e.energy_kev * 1000.0 + k * photon_ev), csv::format(eels.probabilities()[i])});
  }
  return os.str();
}

void write_point_files(const std::filesystem::path& dir, const PointResult& r, const ScenarioConfig& cfg,
                       const PointSpec& p) {
  if (!r.eels || !r.stats) return;
  std::filesystem::create_directories(dir);
  csv::write_file(dir / "eels.csv", distribution_csv(*r.eels, "sideband"));
  csv::write_file(dir / "stats.csv", distribution_csv(*r.stats, "level"));
  if (cfg.eels_energy) csv::write_file(dir / "eels_energy.csv", eels_energy_csv(*r.eels, p.electron));
}

json point_json(const PointResult& r) {
  json j;
  j["converged"] = r.converged;
  if (!r.error.empty()) j["error"] = r.error;
  j["n_cut"] = r.n_cut;
  j["delta"] = r.delta;
  j["omega_t"] = r.T;
  j["steps"] = r.diagnostics.steps;
  j["trace_drift"] = r.diagnostics.trace_drift;
  j["min_eigenvalue"] = r.diagnostics.min_eigenvalue;
  j["cutoff_population"] = r.diagnostics.cutoff_population;
  j["wrap_population"] = r.diagnostics.wrap_population;
  j["halving_change"] = r.halving_change;
  if (r.fidelity) j["fidelity"] = *r.fidelity;
  return j;
}

std::string num_or_nan(const std::optional<double>& v) { return v ? csv::format(*v) : "nan"; }

std::string sweep_csv(const ScenarioConfig& cfg, const std::vector<PointResult>& results) {
  std::ostringstream os;
  const bool with_fid = base_point(cfg).target_level.has_value();
  const auto levels = report_levels(cfg.model.kind);
  std::vector<std::string> header = {"index", axis_name(cfg.kind), "delta", "omega_t", "n_cut", "steps", "converged"};
  if (with_fid) header.push_back("fidelity");
  for (const auto& l : levels) header.push_back("p_" + l);
  for (const char* h : {"p_rest", "trace_drift", "min_eigenvalue", "cutoff_population", "halving_change"}) header.push_back(h);
  csv::write_row(os, header);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::vector<std::string> row = {std::to_string(i), csv::format(cfg.values[i]), csv::format(r.delta), csv::format(r.T),
                                    std::to_string(r.n_cut), std::to_string(r.diagnostics.steps), r.converged ? "1" : "0"};
    if (with_fid) row.push_back(num_or_nan(r.fidelity));
    double listed = 0.0;
    for (const auto& l : levels) {
      if (!r.stats) {
        row.push_back("nan");
        continue;
      }
      double p = 0.0;
      for (std::size_t k = 0; k < r.stats->size(); ++k) {
        if (r.stats->labels()[k] == l) p = r.stats->probabilities()[k];
      }
      listed += p;
      row.push_back(csv::format(p));
    }
    row.push_back(r.stats ? csv::format(std::max(0.0, 1.0 - listed)) : "nan");
    if (r.stats) {
      row.push_back(csv::format(r.diagnostics.trace_drift));
      row.push_back(csv::format(r.diagnostics.min_eigenvalue));
      row.push_back(csv::format(r.diagnostics.cutoff_population));
      row.push_back(csv::format(r.halving_change));
    } else {
      for (int k = 0; k < 4; ++k) row.push_back("nan");
    }
    csv::write_row(os, row);
  }
  return os.str();
}

std::string map_csv(const ScenarioConfig& cfg, const std::vector<PointResult>& results) {
  std::ostringstream os;
  csv::write_row(os, {"kappa_ratio", "gamma_ratio", "fidelity", "converged"});
  std::size_t i = 0;
  for (double k : cfg.map_kappas) {
    for (double g : cfg.map_gammas) {
      const auto& r = results[i++];
      csv::write_row(os, {csv::format(k), csv::format(g), num_or_nan(r.fidelity), r.converged ? "1" : "0"});
    }
  }
  return os.str();
}

std::string pad(std::size_t i) {
  std::ostringstream os;
  os << std::setw(4) << std::setfill('0') << i;
  return os.str();
}

void write_json(const std::filesystem::path& path, const json& j) { csv::write_file(path, j.dump(2) + "\n"); }

int run_points_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out, int workers, std::ostream& log,
                        json& summary) {
  const auto points = scenario_points(cfg);
  log << to_string(cfg.kind) << ": " << points.size() << " point(s) on " << workers << " worker(s)\n";
  const auto results = evaluate_points(points, workers);

  std::size_t ok = 0;
  json pts = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].converged) ++ok;
    if (!results[i].error.empty()) log << "point " << i << ": " << results[i].error << "\n";
    pts.push_back(point_json(results[i]));
  }
  summary["points"] = pts;
  summary["converged_points"] = ok;

  if (cfg.kind == ScenarioKind::Evolve) {
    const auto& r = results.front();
    if (r.eels) {
      csv::write_file(out / "eels.csv", distribution_csv(*r.eels, "sideband"));
      csv::write_file(out / "stats.csv", distribution_csv(*r.stats, "level"));
      if (cfg.eels_energy) csv::write_file(out / "eels_energy.csv", eels_energy_csv(*r.eels, points.front().electron));
    }
    return r.converged ? kExitOk : kExitNumerical;
  }
  if (cfg.kind == ScenarioKind::FidelityMap) {
    csv::write_file(out / "fidelity_map.csv", map_csv(cfg, results));
  } else {
    csv::write_file(out / "sweep.csv", sweep_csv(cfg, results));
    for (std::size_t i = 0; i < results.size(); ++i) write_point_files(out / "points" / pad(i), results[i], cfg, points[i]);
  }
  return ok == 0 ? kExitNumerical : kExitOk;
}

/// Map variants run as independent maps sharing the grid.
int run_variants(const ScenarioConfig& cfg, const json& raw, const std::filesystem::path& out, int workers,
                 std::ostream& log, json& summary) {
  int worst = kExitOk;
  bool any = false;
  for (const auto& v : cfg.variants) {
    json merged = raw;
    merged["map"].erase("variants");
    merged.merge_patch(v.patch);
    ScenarioConfig vc;
    try {
      vc = parse_config(merged);
    } catch (const ConfigError& e) {
      throw ConfigError("map.variants." + v.name + "." + e.field(), e.what());
    }
    log << "variant " << v.name << "\n";
    const auto results = evaluate_points(scenario_points(vc), workers);
    csv::write_file(out / ("fidelity_map_" + v.name + ".csv"), map_csv(vc, results));
    json pts = json::array();
    bool ok = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
      ok = ok || results[i].converged;
      if (!results[i].error.empty()) log << v.name << " point " << i << ": " << results[i].error << "\n";
      pts.push_back(point_json(results[i]));
    }
    summary["variants"][v.name] = pts;
    any = any || ok;
    if (!ok) worst = kExitNumerical;
  }
  return any ? kExitOk : worst;
}

}  // namespace

std::string format_gates_report(const GateSuiteResult& suite, const std::optional<NoisyGateReport>& noisy,
                                const LadderConfig& ladder) {
  std::ostringstream os;
  os << "gate identity report\n";
  os << "ladder D=" << ladder.D << " l0=" << ladder.l0 << "\n";
  for (const auto& c : suite.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << csv::format(c.value) << " tol=" << csv::format(c.tolerance);
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << "\n";
  }
  const auto& cz = suite.cz;
  const auto& cal = cz.calibration;
  os << "cz calibration first_pass_phase=" << csv::format(cal.cpe.first)
     << " second_pass_phase_far=" << csv::format(cal.cpe.second_far)
     << " second_pass_phase_near=" << csv::format(cal.cpe.second_near)
     << " spectrometer=" << (cal.cpe.lower_to_far ? "lower_to_far" : "lower_to_near")
     << " near_path_phase=" << csv::format(cal.eta) << " settings_tried=" << cz.settings_tried << "\n";
  os << "cz global_phase=" << csv::format(cz.phase) << " deviation=" << csv::format(cz.deviation)
     << " ancilla_fidelity=" << csv::format(cz.ancilla_fidelity) << " ancilla_entropy=" << csv::format(cz.ancilla_entropy)
     << " random_inputs=" << cz.random_inputs << "\n";
  os << "cz induced unitary (rows |00>,|01>,|10>,|11>):\n";
  for (Eigen::Index r = 0; r < 4; ++r) {
    os << " ";
    for (Eigen::Index c = 0; c < 4; ++c) {
      const cplx z = cz.composed.matrix()(r, c);
      os << " " << csv::format(z.real()) << (z.imag() < 0 ? "-" : "+") << csv::format(std::abs(z.imag())) << "i";
    }
    os << "\n";
  }
  if (noisy) {
    os << "noisy cep_rz fidelities:";
    for (double f : noisy->fidelities) os << " " << csv::format(f);
    os << " mean=" << csv::format(noisy->mean_fidelity) << " min=" << csv::format(noisy->min_fidelity) << "\n";
  }
  os << "RESULT " << (suite.pass() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

namespace {

int run_scenario_impl(const ScenarioConfig& cfg, const json* raw, const RunOptions& opts, std::ostream& log) {
  const int workers = resolve_workers(opts.workers, cfg.workers);
  const std::filesystem::path out = opts.out ? *opts.out : std::filesystem::path(cfg.output);
  std::filesystem::create_directories(out);
  write_json(out / "effective_config.json", to_json(cfg));

  json summary;
  summary["scenario"] = to_string(cfg.kind);
  int code = kExitOk;
  switch (cfg.kind) {
    case ScenarioKind::Gates: {
      GateSuiteOptions go;
      go.ladder = LadderConfig{cfg.gates.D, cfg.gates.D / 2, 1.0};
      go.cz.random_inputs = cfg.gates.random_inputs;
      go.cz.seed = cfg.gates.seed;
      go.cz.tolerance = cfg.gates.tolerance;
      go.cz.corrupt_phase = cfg.gates.corrupt_phase;
      const GateSuiteResult suite = verify_gate_identities(go);
      std::optional<NoisyGateReport> noisy;
      if (cfg.gates.noisy) {
        const PointSpec p = base_point(cfg);
        const SystemConfig sys = point_system(p, p.model.n_cut > 0 ? p.model.n_cut : kAutoCutoffs[0]);
        const auto basis = polariton_eigenbasis(sys.model);
        const std::string upper = p.electron.tuning == TuningMode::PhaseMatch ? p.electron.phase_match
                                                                              : basis.levels[1].label;
        try {
          noisy = noisy_cep_rz(std::numbers::pi / 2, sys, p.integrator.base, p.initial_level, upper);
        } catch (const NumericalError& e) {
          log << "noisy cep_rz: " << e.what() << "\n";
          code = kExitNumerical;
        }
      }
      csv::write_file(out / "gates_report.txt", format_gates_report(suite, noisy, go.ladder));
      json checks = json::array();
      for (const auto& c : suite.checks) {
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}});
        if (!c.pass) log << "gate identity failed: " << c.name << " (" << csv::format(c.value) << ")\n";
      }
      summary["checks"] = checks;
      summary["pass"] = suite.pass();
      if (!suite.pass()) code = kExitVerification;
      break;
    }
    case ScenarioKind::Feasibility: {
      const PointSpec p = base_point(cfg);
      const SystemConfig sys = point_system(p, p.model.n_cut > 0 ? p.model.n_cut : kAutoCutoffs[0]);
      const double dw = cfg.feasibility.dw_pm ? *cfg.feasibility.dw_pm : 1.0 / sys.T;
      const auto rep = feasibility_check(dw, cfg.model.kappa, cfg.gamma, cfg.feasibility.de_over_e, cfg.feasibility.margin);
      std::ostringstream os;
      os << "feasibility report (margin " << csv::format(rep.margin) << ")\n";
      os << (rep.loss_ok ? "PASS" : "FAIL") << " loss gamma=" << csv::format(rep.gamma)
         << " < dw_pm/margin=" << csv::format(rep.dw_pm / rep.margin) << "\n";
      os << (rep.energy_spread_ok ? "PASS" : "FAIL") << " energy_spread de_over_e=" << csv::format(rep.de_over_e)
         << " < dw_pm/margin=" << csv::format(rep.dw_pm / rep.margin) << "\n";
      os << (rep.nonlinearity_ok ? "PASS" : "FAIL") << " nonlinearity dw_pm=" << csv::format(rep.dw_pm)
         << " < kappa/margin=" << csv::format(rep.kappa / rep.margin) << "\n";
      os << "RESULT " << (rep.pass() ? "PASS" : "FAIL") << "\n";
      csv::write_file(out / "feasibility_report.txt", os.str());
      summary["pass"] = rep.pass();
      summary["loss_ok"] = rep.loss_ok;
      summary["energy_spread_ok"] = rep.energy_spread_ok;
      summary["nonlinearity_ok"] = rep.nonlinearity_ok;
      if (!rep.pass()) code = kExitVerification;
      break;
    }
    case ScenarioKind::FidelityMap:
      if (!cfg.variants.empty()) {
        const json base = raw ? *raw : to_json(cfg);
        code = run_variants(cfg, base, out, workers, log, summary);
        break;
      }
      [[fallthrough]];
    default: code = run_points_scenario(cfg, out, workers, log, summary);
  }
  summary["exit_code"] = code;
  write_json(out / "summary.json", summary);
  return code;
}

}  // namespace

int run_scenario(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log) {
  try {
    return run_scenario_impl(cfg, nullptr, opts, log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int run_json(const json& config, const RunOptions& opts, std::ostream& log) {
  try {
    const ScenarioConfig cfg = parse_config(config);
    return run_scenario_impl(cfg, &config, opts, log);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}

int run_file(const std::filesystem::path& path, const RunOptions& opts, std::ostream& log) {
  json j;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      log << "config error: <file>: cannot open " << path.string() << "\n";
      return kExitConfig;
    }
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      log << "config error: <file>: invalid JSON: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  return run_json(j, opts, log);
}

}  // namespace feb
