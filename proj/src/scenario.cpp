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

#include "feblockade/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "feblockade/csv.hpp"
#include "feblockade/errors.hpp"

namespace feb {

using nlohmann::json;

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Evolve: return "evolve";
    case ScenarioKind::SweepKappa: return "sweep_kappa";
    case ScenarioKind::SweepVelocity: return "sweep_velocity";
    case ScenarioKind::SweepGq: return "sweep_gq";
    case ScenarioKind::FidelityMap: return "fidelity_map";
    case ScenarioKind::Gates: return "gates";
    case ScenarioKind::Feasibility: return "feasibility";
  }
  return "?";
}

namespace {

/// Strict reader over one JSON object: every key must be consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field(key), "must be finite");
    return x;
  }

  double nonnegative(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (x < 0.0) throw ConfigError(field(key), "must be nonnegative");
    return x;
  }

  double positive(const std::string& key, double fallback) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(field(key), "must be positive");
    return x;
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) throw ConfigError(field(key), "expected finite numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

ScenarioKind parse_kind(const std::string& s) {
  for (auto k : {ScenarioKind::Evolve, ScenarioKind::SweepKappa, ScenarioKind::SweepVelocity, ScenarioKind::SweepGq,
                 ScenarioKind::FidelityMap, ScenarioKind::Gates, ScenarioKind::Feasibility}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("scenario", "unknown scenario '" + s + "'");
}

bool is_sweep(ScenarioKind k) {
  return k == ScenarioKind::SweepKappa || k == ScenarioKind::SweepVelocity || k == ScenarioKind::SweepGq;
}

void parse_model(Reader& top, ScenarioConfig& cfg) {
  if (!top.has("model")) return;
  Reader r(top.raw("model"), "model");
  const std::string type = r.string("type", "kerr");
  if (type == "kerr") {
    cfg.model.kind = CavityKind::Kerr;
  } else if (type == "jc") {
    cfg.model.kind = CavityKind::JC;
  } else {
    throw ConfigError("model.type", "expected 'kerr' or 'jc'");
  }
  cfg.model.kappa = r.nonnegative("kappa", cfg.model.kappa);
  if (r.has("n_cut")) {
    const json& v = r.raw("n_cut");
    if (v.is_string() && v.get<std::string>() == "auto") {
      cfg.model.n_cut = 0;
    } else if (v.is_number_integer()) {
      cfg.model.n_cut = v.get<int>();
      if (cfg.model.n_cut < 2) throw ConfigError("model.n_cut", "photon cutoff must be >= 2");
    } else {
      throw ConfigError("model.n_cut", "expected an integer or \"auto\"");
    }
  }
  r.finish();
}

void parse_electron(Reader& top, ScenarioConfig& cfg) {
  ElectronSpec& e = cfg.electron;
  if (cfg.model.kind == CavityKind::JC) e.phase_match = "1+";
  if (!top.has("electron")) return;
  Reader r(top.raw("electron"), "electron");
  e.D = r.integer("D", e.D);
  if (e.D < 3) throw ConfigError("electron.D", "ladder dimension must be >= 3");
  e.l0 = r.integer("l0", e.l0);
  if (e.l0 != -1 && (e.l0 < 0 || e.l0 >= e.D)) throw ConfigError("electron.l0", "must lie in [0, D)");
  e.energy_kev = r.nonnegative("energy_kev", e.energy_kev);
  e.g_q = r.nonnegative("g_q", e.g_q);
  e.g_q_phase = r.number("g_q_phase", e.g_q_phase);

  int modes = 0;
  if (r.has("phase_match")) {
    e.tuning = TuningMode::PhaseMatch;
    e.phase_match = r.string("phase_match", e.phase_match);
    ++modes;
  }
  if (r.has("velocity_ratio")) {
    e.tuning = TuningMode::VelocityRatio;
    e.velocity_ratio = r.positive("velocity_ratio", 1.0);
    ++modes;
  }
  if (r.has("delta")) {
    e.tuning = TuningMode::Delta;
    e.delta = r.number("delta", 0.0);
    ++modes;
  }
  if (modes > 1) throw ConfigError("electron", "give only one of phase_match, velocity_ratio, delta");

  const bool has_t = r.has("omega_t");
  const bool has_l = r.has("length_um");
  const bool has_w = r.has("wavelength_nm");
  if (has_t) e.omega_t = r.positive("omega_t", e.omega_t);
  if (has_l) e.length_um = r.positive("length_um", 1.0);
  if (has_w) e.wavelength_nm = r.positive("wavelength_nm", 1.0);
  if (has_t && has_l) throw ConfigError("electron.omega_t", "give either omega_t or length_um, not both");
  if (has_l != has_w && !has_t) throw ConfigError("electron.length_um", "length_um needs wavelength_nm");
  r.finish();
}

void parse_integrator(Reader& top, ScenarioConfig& cfg) {
  if (!top.has("integrator")) return;
  Reader r(top.raw("integrator"), "integrator");
  auto& b = cfg.integrator.base;
  b.steps = r.integer("steps", b.steps);
  b.step_factor = r.positive("step_factor", b.step_factor);
  b.min_steps = r.integer("min_steps", b.min_steps);
  b.trace_drift_bound = r.positive("trace_drift_bound", b.trace_drift_bound);
  b.cutoff_bound = r.positive("cutoff_bound", b.cutoff_bound);
  b.wrap_bound = r.positive("wrap_bound", b.wrap_bound);
  cfg.integrator.step_halving = r.boolean("step_halving", cfg.integrator.step_halving);
  cfg.integrator.halving_tol = r.positive("halving_tol", cfg.integrator.halving_tol);
  r.finish();
  if (b.min_steps < 100) throw ConfigError("integrator.min_steps", "must be >= 100");
  if (b.steps < 0 || (b.steps > 0 && b.steps < b.min_steps)) {
    throw ConfigError("integrator.steps", "fixed step count must be >= min_steps (or 0 for automatic)");
  }
}

std::vector<double> parse_grid(Reader& top, const std::string& key) {
  if (!top.has(key)) throw ConfigError(key, "required for this scenario");
  Reader r(top.raw(key), key);
  std::vector<double> values;
  if (r.has("values")) {
    values = r.numbers("values");
    if (r.has("start") || r.has("stop") || r.has("count")) throw ConfigError(key, "give values or start/stop/count");
  } else {
    const double start = r.number("start", 0.0);
    const double stop = r.number("stop", 0.0);
    const int count = r.integer("count", 0);
    if (count < 1) throw ConfigError(key + ".count", "grid must be nonempty");
    for (int i = 0; i < count; ++i) values.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  }
  r.finish();
  if (values.empty()) throw ConfigError(key + ".values", "grid must be nonempty");
  return values;
}

void parse_map(Reader& top, ScenarioConfig& cfg) {
  if (!top.has("map")) throw ConfigError("map", "required for fidelity_map");
  Reader r(top.raw("map"), "map");
  if (!r.has("kappa")) throw ConfigError("map.kappa", "required");
  if (!r.has("gamma")) throw ConfigError("map.gamma", "required");
  cfg.map_kappas = r.numbers("kappa");
  cfg.map_gammas = r.numbers("gamma");
  if (cfg.map_kappas.empty()) throw ConfigError("map.kappa", "grid must be nonempty");
  if (cfg.map_gammas.empty()) throw ConfigError("map.gamma", "grid must be nonempty");
  for (double k : cfg.map_kappas) {
    if (k < 0) throw ConfigError("map.kappa", "must be nonnegative");
  }
  for (double g : cfg.map_gammas) {
    if (g < 0) throw ConfigError("map.gamma", "must be nonnegative");
  }
  if (r.has("variants")) {
    const json& v = r.raw("variants");
    if (!v.is_array() || v.empty()) throw ConfigError("map.variants", "expected a nonempty array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string where = "map.variants[" + std::to_string(i) + "]";
      if (!v[i].is_object() || !v[i].contains("name") || !v[i]["name"].is_string()) {
        throw ConfigError(where + ".name", "each variant needs a name");
      }
      MapVariant mv{v[i]["name"].get<std::string>(), v[i]};
      mv.patch.erase("name");
      for (auto it = mv.patch.begin(); it != mv.patch.end(); ++it) {
        static const std::set<std::string> allowed = {"model", "electron", "loss", "initial_level", "target_level"};
        if (!allowed.count(it.key())) throw ConfigError(where + "." + it.key(), "not allowed in a variant");
      }
      if (mv.name.empty() || mv.name.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789_-") != std::string::npos) {
        throw ConfigError(where + ".name", "use lowercase letters, digits, '_' or '-'");
      }
      if (!names.insert(mv.name).second) throw ConfigError(where + ".name", "duplicate variant name");
      cfg.variants.push_back(std::move(mv));
    }
  }
  r.finish();
}

void parse_gates(Reader& top, ScenarioConfig& cfg) {
  if (!top.has("gates")) return;
  Reader r(top.raw("gates"), "gates");
  auto& g = cfg.gates;
  g.D = r.integer("D", g.D);
  if (g.D < 4 || g.D % 4 != 0) throw ConfigError("gates.D", "must be a positive multiple of 4");
  g.random_inputs = r.integer("random_inputs", g.random_inputs);
  if (g.random_inputs < 0) throw ConfigError("gates.random_inputs", "must be nonnegative");
  const int seed = r.integer("seed", static_cast<int>(g.seed));
  if (seed < 0) throw ConfigError("gates.seed", "must be nonnegative");
  g.seed = static_cast<unsigned>(seed);
  g.tolerance = r.positive("tolerance", g.tolerance);
  g.corrupt_phase = r.number("corrupt_phase", g.corrupt_phase);
  g.noisy = r.boolean("noisy", g.noisy);
  r.finish();
}

void parse_feasibility(Reader& top, ScenarioConfig& cfg) {
  if (!top.has("feasibility")) return;
  Reader r(top.raw("feasibility"), "feasibility");
  if (r.has("dw_pm")) cfg.feasibility.dw_pm = r.positive("dw_pm", 1.0);
  cfg.feasibility.de_over_e = r.nonnegative("de_over_e", cfg.feasibility.de_over_e);
  cfg.feasibility.margin = r.number("margin", cfg.feasibility.margin);
  if (cfg.feasibility.margin < 1.0) throw ConfigError("feasibility.margin", "must be >= 1");
  r.finish();
}

json electron_json(const ElectronSpec& e) {
  json j;
  j["D"] = e.D;
  j["l0"] = e.l0;
  j["energy_kev"] = e.energy_kev;
  j["g_q"] = e.g_q;
  j["g_q_phase"] = e.g_q_phase;
  switch (e.tuning) {
    case TuningMode::PhaseMatch: j["phase_match"] = e.phase_match; break;
    case TuningMode::VelocityRatio: j["velocity_ratio"] = e.velocity_ratio; break;
    case TuningMode::Delta: j["delta"] = e.delta; break;
  }
  if (e.length_um) {
    j["length_um"] = *e.length_um;
    j["wavelength_nm"] = *e.wavelength_nm;
  } else {
    j["omega_t"] = e.omega_t;
    if (e.wavelength_nm) j["wavelength_nm"] = *e.wavelength_nm;
  }
  return j;
}

std::string ground_label(CavityKind kind) { return kind == CavityKind::JC ? "0*" : "0"; }

}  // namespace

ScenarioConfig parse_config(const json& j) {
  Reader top(j, "");
  if (!top.has("schema")) throw ConfigError("schema", "missing; expected \"" + std::string(kSchema) + "\"");
  if (top.string("schema", "") != kSchema) throw ConfigError("schema", "unsupported; expected \"" + std::string(kSchema) + "\"");
  if (!top.has("scenario")) throw ConfigError("scenario", "missing");
  ScenarioConfig cfg;
  cfg.kind = parse_kind(top.string("scenario", ""));
  parse_model(top, cfg);
  parse_electron(top, cfg);
  if (top.has("loss")) {
    Reader r(top.raw("loss"), "loss");
    cfg.gamma = r.nonnegative("gamma", cfg.gamma);
    r.finish();
  }
  cfg.initial_level = top.string("initial_level", ground_label(cfg.model.kind));
  if (top.has("target_level")) cfg.target_level = top.string("target_level", "");
  parse_integrator(top, cfg);
  if (is_sweep(cfg.kind)) {
    cfg.values = parse_grid(top, "sweep");
  } else if (top.has("sweep")) {
    throw ConfigError("sweep", "only valid for sweep scenarios");
  }
  if (cfg.kind == ScenarioKind::FidelityMap) {
    parse_map(top, cfg);
  } else if (top.has("map")) {
    throw ConfigError("map", "only valid for fidelity_map");
  }
  parse_gates(top, cfg);
  parse_feasibility(top, cfg);
  if (top.has("report")) {
    Reader r(top.raw("report"), "report");
    cfg.eels_energy = r.boolean("eels_energy", cfg.eels_energy);
    r.finish();
    if (cfg.eels_energy && !cfg.electron.wavelength_nm) {
      throw ConfigError("report.eels_energy", "needs electron.wavelength_nm for the photon energy");
    }
  }
  cfg.workers = top.integer("workers", cfg.workers);
  if (cfg.workers < 1) throw ConfigError("workers", "must be >= 1");
  cfg.output = top.string("output", cfg.output);
  top.finish();

  // Physical validation of every point the scenario will evaluate.
  if (cfg.kind == ScenarioKind::Gates || cfg.kind == ScenarioKind::Feasibility) {
    if (cfg.kind == ScenarioKind::Gates && cfg.gates.noisy) validate_point(base_point(cfg), "");
    return cfg;
  }
  PointSpec p = base_point(cfg);
  if (cfg.kind == ScenarioKind::FidelityMap && !p.target_level && p.electron.tuning != TuningMode::PhaseMatch) {
    throw ConfigError("target_level", "fidelity_map needs a target level or phase_match");
  }
  switch (cfg.kind) {
    case ScenarioKind::SweepKappa:
      for (double v : cfg.values) {
        if (v < 0) throw ConfigError("sweep.values", "kappa must be nonnegative");
        p.model.kappa = v;
        validate_point(p, "sweep.values");
      }
      break;
    case ScenarioKind::SweepVelocity:
      for (double v : cfg.values) {
        if (!(v > 0)) throw ConfigError("sweep.values", "velocity ratio must be positive");
        p.electron.tuning = TuningMode::VelocityRatio;
        p.electron.velocity_ratio = v;
        validate_point(p, "sweep.values");
      }
      break;
    case ScenarioKind::SweepGq:
      for (double v : cfg.values) {
        if (v < 0) throw ConfigError("sweep.values", "g_q must be nonnegative");
      }
      validate_point(p, "");
      break;
    default:
      validate_point(p, "");
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema"] = kSchema;
  j["scenario"] = to_string(cfg.kind);
  j["model"] = {{"type", to_string(cfg.model.kind)}, {"kappa", cfg.model.kappa}};
  if (cfg.model.n_cut > 0) {
    j["model"]["n_cut"] = cfg.model.n_cut;
  } else {
    j["model"]["n_cut"] = "auto";
  }
  j["electron"] = electron_json(cfg.electron);
  j["loss"] = {{"gamma", cfg.gamma}};
  j["initial_level"] = cfg.initial_level;
  if (cfg.target_level) j["target_level"] = *cfg.target_level;
  const auto& b = cfg.integrator.base;
  j["integrator"] = {{"steps", b.steps},
                     {"step_factor", b.step_factor},
                     {"min_steps", b.min_steps},
                     {"trace_drift_bound", b.trace_drift_bound},
                     {"cutoff_bound", b.cutoff_bound},
                     {"wrap_bound", b.wrap_bound},
                     {"step_halving", cfg.integrator.step_halving},
                     {"halving_tol", cfg.integrator.halving_tol}};
  if (is_sweep(cfg.kind)) j["sweep"] = {{"values", cfg.values}};
  if (cfg.kind == ScenarioKind::FidelityMap) {
    j["map"] = {{"kappa", cfg.map_kappas}, {"gamma", cfg.map_gammas}};
    if (!cfg.variants.empty()) {
      json vs = json::array();
      for (const auto& v : cfg.variants) {
        json o = v.patch;
        o["name"] = v.name;
        vs.push_back(o);
      }
      j["map"]["variants"] = vs;
    }
  }
  j["gates"] = {{"D", cfg.gates.D},
                {"random_inputs", cfg.gates.random_inputs},
                {"seed", cfg.gates.seed},
                {"tolerance", cfg.gates.tolerance},
                {"corrupt_phase", cfg.gates.corrupt_phase},
                {"noisy", cfg.gates.noisy}};
  j["feasibility"] = {{"de_over_e", cfg.feasibility.de_over_e}, {"margin", cfg.feasibility.margin}};
  if (cfg.feasibility.dw_pm) j["feasibility"]["dw_pm"] = *cfg.feasibility.dw_pm;
  j["report"] = {{"eels_energy", cfg.eels_energy}};
  j["workers"] = cfg.workers;
  j["output"] = cfg.output;
  return j;
}

PointSpec base_point(const ScenarioConfig& cfg) {
  PointSpec p;
  p.model = cfg.model;
  p.electron = cfg.electron;
  p.gamma = cfg.gamma;
  p.initial_level = cfg.initial_level;
  p.target_level = cfg.target_level;
  if (!p.target_level && cfg.kind == ScenarioKind::FidelityMap && p.electron.tuning == TuningMode::PhaseMatch) {
    p.target_level = p.electron.phase_match;
  }
  p.integrator = cfg.integrator;
  return p;
}

double base_omega_t(const ElectronSpec& e) {
  if (e.length_um) return 2.0 * std::numbers::pi * (*e.length_um * 1000.0) / *e.wavelength_nm;
  return e.omega_t;
}

std::pair<double, double> tuning(const ElectronSpec& e, const CavityModel& model) {
  const double t0 = base_omega_t(e);
  switch (e.tuning) {
    case TuningMode::PhaseMatch: {
      const double r = transition_frequency(model, e.phase_match);
      return {r - 1.0, t0 / r};
    }
    case TuningMode::VelocityRatio: return {e.velocity_ratio - 1.0, t0 / e.velocity_ratio};
    case TuningMode::Delta: return {e.delta, t0};
  }
  return {0.0, t0};
}

SystemConfig point_system(const PointSpec& p, int n_cut) {
  SystemConfig sys;
  sys.model = build_model(p.model.kind, p.model.kappa, n_cut);
  const auto [delta, T] = tuning(p.electron, sys.model);
  sys.ladder = LadderConfig{p.electron.D, p.electron.l0 < 0 ? p.electron.D / 2 : p.electron.l0, 1.0 + delta};
  sys.g_q = std::polar(p.electron.g_q, p.electron.g_q_phase);
  sys.T = T;
  sys.delta = delta;
  sys.gamma = p.gamma;
  return sys;
}

void validate_point(const PointSpec& p, const std::string& where) {
  const auto at = [&](const std::string& field) { return where.empty() ? field : where; };
  const int n = p.model.n_cut > 0 ? p.model.n_cut : kAutoCutoffs[0];
  SystemConfig sys;
  try {
    sys = point_system(p, n);
  } catch (const SpaceError& e) {
    throw ConfigError(at(p.electron.tuning == TuningMode::PhaseMatch ? "electron.phase_match" : "electron"), e.what());
  }
  try {
    sys.validate();
  } catch (const SpaceError& e) {
    throw ConfigError(at("electron"), e.what());
  }
  const auto basis = polariton_eigenbasis(sys.model);
  try {
    basis.level(p.initial_level);
  } catch (const SpaceError& e) {
    throw ConfigError(at("initial_level"), e.what());
  }
  if (p.target_level) {
    try {
      basis.level(*p.target_level);
      const auto& a = basis.level(p.initial_level);
      const auto& b = basis.level(*p.target_level);
      const bool up = b.excitation > a.excitation;
      if (!is_consecutive_pair(basis, up ? a.label : b.label, up ? b.label : a.label)) {
        throw SpaceError("(" + a.label + ", " + b.label + ") is not a consecutive same-branch pair");
      }
    } catch (const SpaceError& e) {
      throw ConfigError(at("target_level"), e.what());
    }
  }
}

StateVector blockade_target(const SystemConfig& sys, const std::string& from, const std::string& to) {
  const auto basis = polariton_eigenbasis(sys.model);
  const bool up = basis.level(to).excitation > basis.level(from).excitation;
  const std::string lower = up ? from : to, upper = up ? to : from;
  const cplx omega = rabi_angle(sys.model, basis, lower, upper, sys.g_q);
  // The propagated pass with angle W = g_Q <lower|a|upper> realizes the
  // closed form at -i conj(W).
  const cplx angle = cplx(0.0, -1.0) * std::conj(omega);
  const Operator s = scattering_blockade(angle, basis, lower, upper, sys.ladder);
  const StateVector in = kron(rung_state(sys.ladder.l0, sys.ladder), StateVector(basis.unitary.space(), basis.state(from)));
  return StateVector::normalized(in.space(), s.matrix() * in.amplitudes());
}

namespace {

struct Sample {
  Distribution eels, stats;
  std::optional<double> fidelity;
  EvolutionDiagnostics diagnostics;
};

Sample sample(const SystemConfig& sys, const PointSpec& p, const IntegratorConfig& icfg) {
  const auto basis = polariton_eigenbasis(sys.model);
  const SectorDensity rho0 = SectorDensity::product(sys, basis.state(p.initial_level));
  const Evolution ev = evolve_lindblad(rho0, sys, icfg);
  Sample s{eels_spectrum(ev.state, sys.ladder.l0), polariton_statistics(ev.state, basis), std::nullopt, ev.diagnostics};
  if (p.target_level) {
    s.fidelity = state_fidelity(frame_align(ev.state, sys), blockade_target(sys, p.initial_level, *p.target_level));
  }
  return s;
}

double max_change(const Distribution& a, const Distribution& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.probabilities()[i] - b.probabilities()[i]));
  return worst;
}

}  // namespace

PointResult run_point(const PointSpec& p) {
  PointResult res;
  std::vector<int> cutoffs;
  if (p.model.n_cut > 0) {
    cutoffs.push_back(p.model.n_cut);
  } else {
    cutoffs.assign(std::begin(kAutoCutoffs), std::end(kAutoCutoffs));
  }
  for (std::size_t ci = 0; ci < cutoffs.size(); ++ci) {
    const int n = cutoffs[ci];
    const SystemConfig sys = point_system(p, n);
    res.n_cut = n;
    res.delta = sys.delta;
    res.T = sys.T;
    try {
      Sample coarse = sample(sys, p, p.integrator.base);
      if (p.integrator.step_halving) {
        IntegratorConfig fine = p.integrator.base;
        fine.steps = 2 * coarse.diagnostics.steps;
        Sample refined = sample(sys, p, fine);
        res.halving_change = std::max(max_change(coarse.eels, refined.eels), max_change(coarse.stats, refined.stats));
        if (coarse.fidelity) res.halving_change = std::max(res.halving_change, std::abs(*coarse.fidelity - *refined.fidelity));
        coarse = std::move(refined);
      }
      res.eels = std::move(coarse.eels);
      res.stats = std::move(coarse.stats);
      res.fidelity = coarse.fidelity;
      res.diagnostics = coarse.diagnostics;
      if (res.halving_change > p.integrator.halving_tol) {
        res.error = "step halving changed a reported probability by " + csv::format(res.halving_change);
        return res;
      }
      res.converged = true;
      return res;
    } catch (const NumericalError& e) {
      if (e.kind() == NumericalError::Kind::Cutoff && ci + 1 < cutoffs.size()) continue;
      res.error = e.what();
      return res;
    }
  }
  return res;
}

}  // namespace feb
