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

#include "feblockade/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "feblockade/errors.hpp"
#include "feblockade/observables.hpp"

namespace feb {

namespace {

constexpr double kPi = std::numbers::pi;

Vector qubit_basis(int k) {
  Vector v = Vector::Zero(2);
  v(k) = 1.0;
  return v;
}

TensorSpace qubit_space(int qubit) { return TensorSpace::single(polariton_label(qubit), 2); }

void check_qubit(int qubit, const GateContext& ctx) {
  if (qubit < 1 || qubit > ctx.qubits) {
    throw SpaceError("qubit " + std::to_string(qubit) + " is not in a register of " + std::to_string(ctx.qubits));
  }
}

/// Blockade pass on el (x) pol<q>.
Operator branch_pass(cplx omega, int qubit, const LadderConfig& ladder) {
  return scattering_blockade(omega, qubit_basis(0), qubit_basis(1), qubit_space(qubit), ladder);
}

Operator lift(const Operator& local, const std::vector<std::string>& labels, const GateContext& ctx) {
  return embed(local, labels, ctx.space());
}

}  // namespace

Operator PathRegister::projector(int m) const {
  if (m != 0 && m != 1) throw SpaceError("path index must be 0 or 1");
  Matrix p = Matrix::Zero(2, 2);
  p(m, m) = 1.0;
  return Operator(space, std::move(p));
}

std::string polariton_label(int qubit) { return "pol" + std::to_string(qubit); }

void GateContext::validate() const {
  ladder.validate();
  if (qubits != 1 && qubits != 2) throw SpaceError("gate register holds 1 or 2 polariton qubits");
}

TensorSpace GateContext::space() const {
  validate();
  TensorSpace s = PathRegister{}.space.concat(ladder.factor());
  for (int q = 1; q <= qubits; ++q) s = s.concat(qubit_space(q));
  return s;
}

TensorSpace GateContext::branch_space(int qubit) const {
  check_qubit(qubit, *this);
  return ladder.factor().concat(qubit_space(qubit));
}

StateVector GateContext::product_state(int path, const std::vector<Vector>& polaritons) const {
  validate();
  if (static_cast<int>(polaritons.size()) != qubits) throw SpaceError("one polariton state per qubit is required");
  StateVector psi = kron(StateVector::basis(PathRegister{}.space, static_cast<std::size_t>(path)),
                         rung_state(ladder.l0, ladder));
  for (int q = 1; q <= qubits; ++q) {
    psi = kron(psi, StateVector::normalized(qubit_space(q), polaritons[static_cast<std::size_t>(q - 1)]));
  }
  return psi;
}

Operator gate_pass(cplx omega, int qubit, bool conditioned_on_path, const GateContext& ctx) {
  check_qubit(qubit, ctx);
  if (!std::isfinite(omega.real()) || !std::isfinite(omega.imag())) throw SpaceError("pass angle must be finite");
  const Operator s = branch_pass(omega, qubit, ctx.ladder);
  const std::string el(labels::kLadder), pol = polariton_label(qubit);
  if (!conditioned_on_path) return lift(s, {el, pol}, ctx);
  const PathRegister path;
  return lift(path.projector(0), {PathRegister::kLabel}, ctx) +
         lift(kron(path.projector(1), s), {PathRegister::kLabel, el, pol}, ctx);
}

Operator cep_rz_branch(double phi, const LadderConfig& ladder) {
  return branch_pass(std::polar(kPi / 2, phi), 1, ladder) * branch_pass(kPi / 2, 1, ladder);
}

Operator cep_rz(double phi, int qubit, const GateContext& ctx) {
  return gate_pass(std::polar(kPi / 2, phi), qubit, true, ctx) * gate_pass(kPi / 2, qubit, true, ctx);
}

TransverseResult r_transverse(double omega_mag, double phi, const LadderConfig& ladder) {
  const double turns = ladder.D * phi / (2 * kPi);
  if (std::abs(turns - std::round(turns)) > 1e-9) {
    throw SpaceError("comb phase must be a multiple of 2 pi / D for an exact ladder eigenstate");
  }
  const Operator s = branch_pass(omega_mag, 1, ladder);
  const StateVector comb = comb_state(phi, ladder);
  const TensorSpace qs = qubit_space(1);
  TransverseResult out;
  Matrix u(2, 2);
  const std::vector<Vector> inputs = {qubit_basis(0), qubit_basis(1), (qubit_basis(0) + qubit_basis(1)) / std::sqrt(2.0),
                                      (qubit_basis(0) + cplx(0, 1) * qubit_basis(1)) / std::sqrt(2.0)};
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const StateVector in = kron(comb, StateVector(qs, inputs[k]));
    const StateVector res(s.space(), s.matrix() * in.amplitudes());
    out.residual_entropy = std::max(out.residual_entropy, entanglement_entropy(res, {std::string(labels::kLadder)}));
    // Component along comb (x) pol.
    const Eigen::Map<const Matrix> grid(res.amplitudes().data(), 2, ladder.D);
    const Vector pol = grid * comb.amplitudes().conjugate();
    out.leakage = std::max(out.leakage, 1.0 - pol.squaredNorm());
    if (k < 2) u.col(static_cast<Eigen::Index>(k)) = pol;
  }
  out.polariton = Operator(qs, std::move(u));
  return out;
}

Operator spectrometer(bool lower_to_far, const GateContext& ctx) {
  const TensorSpace local = PathRegister{}.space.concat(ctx.ladder.factor());
  const int D = ctx.ladder.D;
  Matrix p = Matrix::Zero(2 * D, 2 * D);
  for (int m = 0; m < 2; ++m) {
    for (int l = 0; l < D; ++l) {
      const bool swap = lower_to_far ? l < ctx.ladder.l0 : l > ctx.ladder.l0;
      const int mp = swap ? 1 - m : m;
      p(mp * D + l, m * D + l) = 1.0;
    }
  }
  return lift(Operator(local, std::move(p)), {PathRegister::kLabel, std::string(labels::kLadder)}, ctx);
}

Operator cpe_path(int qubit, const GateContext& ctx, const PathPhases& phases) {
  check_qubit(qubit, ctx);
  const Operator first = gate_pass(std::polar(kPi / 2, phases.first), qubit, true, ctx);
  const PathRegister path;
  const std::vector<std::string> labels = {PathRegister::kLabel, std::string(labels::kLadder), polariton_label(qubit)};
  const Operator second =
      lift(kron(path.projector(0), branch_pass(std::polar(kPi / 2, phases.second_far), qubit, ctx.ladder)), labels, ctx) +
      lift(kron(path.projector(1), branch_pass(std::polar(kPi / 2, phases.second_near), qubit, ctx.ladder)), labels, ctx);
  return second * spectrometer(phases.lower_to_far, ctx) * first;
}

void require_near_path_input(const StateVector& psi, const GateContext& ctx) {
  const TensorSpace space = ctx.space();
  if (!(psi.space() == space)) throw SpaceError("state is not on the gate register");
  double weight = 0.0;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto d = space.digits(i);
    if (d[0] == 1 && static_cast<int>(d[1]) == ctx.ladder.l0) weight += std::norm(psi.amplitudes()(static_cast<Eigen::Index>(i)));
  }
  if (weight < 1.0 - 1e-12) throw SpaceError("electron must enter in the near path at rung l0");
}

Operator electron_hadamard(const GateContext& ctx) {
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  return lift(Operator(PathRegister{}.space, h / std::sqrt(2.0)), {PathRegister::kLabel}, ctx);
}

Operator path_phase(double eta, const GateContext& ctx) {
  Matrix p = Matrix::Identity(2, 2);
  p(1, 1) = std::polar(1.0, eta);
  return lift(Operator(PathRegister{}.space, std::move(p)), {PathRegister::kLabel}, ctx);
}

EquivalenceResult equivalence_up_to_phase(const Operator& u, const Operator& v, double tol) {
  if (!(u.space() == v.space())) throw SpaceError("equivalence check: space mismatch");
  EquivalenceResult r;
  const cplx overlap = (v.matrix().adjoint() * u.matrix()).trace();
  if (std::abs(overlap) < 1e-300) {
    r.deviation = std::max(u.matrix().cwiseAbs().maxCoeff(), v.matrix().cwiseAbs().maxCoeff());
    return r;
  }
  r.phase = std::arg(overlap);
  r.deviation = (u.matrix() - std::polar(1.0, r.phase) * v.matrix()).cwiseAbs().maxCoeff();
  r.equivalent = r.deviation <= tol;
  return r;
}

// ---------------------------------------------------------------------------
// Two-polariton controlled-Z

bool CircuitReport::pass() const {
  return deviation <= tolerance && ancilla_entropy <= 1e-10 && ancilla_fidelity >= 1.0 - 1e-10 &&
         unitarity_error <= 1e-10;
}

namespace {

Operator cz_target() {
  const TensorSpace s = qubit_space(1).concat(qubit_space(2));
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return Operator(s, std::move(m));
}

/// Circuit pieces that do not depend on the calibration.
struct CzFixed {
  Operator after_cpe;  ///< C_epZ(1) H_e C_epZ(2)
  Operator hadamard;
};

CzFixed cz_fixed(const GateContext& ctx, double corrupt_phase) {
  const Operator h = electron_hadamard(ctx);
  return {cep_rz(kPi / 2, 1, ctx) * h * cep_rz(kPi / 2 + corrupt_phase, 2, ctx), h};
}

Operator assemble(const CzFixed& fixed, const CzCalibration& cal, const GateContext& ctx) {
  return fixed.hadamard * path_phase(cal.eta, ctx) * fixed.after_cpe * cpe_path(1, ctx, cal.cpe);
}

/// Amplitudes of the ancilla reference |E>_0 |l0> block of `out`.
Vector ancilla_block(const Vector& out, const GateContext& ctx) {
  // Register order path, el, pol1, pol2: the block is contiguous.
  const Eigen::Index start = static_cast<Eigen::Index>(ctx.ladder.l0) * 4;
  return out.segment(start, 4);
}

struct QuickScore {
  double deviation = 0.0;
  double fidelity = 0.0;
};

QuickScore quick_score(const Operator& circuit, const GateContext& ctx, const Operator& target) {
  Matrix w(4, 4);
  double fid = 1.0;
  for (int k = 0; k < 4; ++k) {
    const StateVector in = ctx.product_state(1, {qubit_basis(k >> 1), qubit_basis(k & 1)});
    const Vector blk = ancilla_block(circuit.matrix() * in.amplitudes(), ctx);
    fid = std::min(fid, blk.squaredNorm());
    w.col(k) = blk;
  }
  const auto eq = equivalence_up_to_phase(Operator(target.space(), w), target);
  return {eq.deviation, fid};
}

}  // namespace

Operator cz_circuit(const CzCalibration& cal, const GateContext& ctx, double corrupt_phase) {
  if (ctx.qubits != 2) throw SpaceError("the controlled-Z circuit needs two polariton qubits");
  return assemble(cz_fixed(ctx, corrupt_phase), cal, ctx);
}

CircuitReport evaluate_cz(const CzCalibration& cal, const GateContext& ctx, const CzOptions& opts) {
  if (ctx.qubits != 2) throw SpaceError("the controlled-Z circuit needs two polariton qubits");
  CircuitReport rep;
  rep.name = "two_polariton_cz";
  rep.calibration = cal;
  rep.tolerance = opts.tolerance;
  rep.circuit = cz_circuit(cal, ctx, opts.corrupt_phase);
  rep.target = cz_target();

  Matrix w(4, 4);
  rep.ancilla_fidelity = 1.0;
  for (int k = 0; k < 4; ++k) {
    const StateVector in = ctx.product_state(1, {qubit_basis(k >> 1), qubit_basis(k & 1)});
    const Vector out = rep.circuit.matrix() * in.amplitudes();
    const Vector blk = ancilla_block(out, ctx);
    w.col(k) = blk;
    rep.ancilla_fidelity = std::min(rep.ancilla_fidelity, blk.squaredNorm());
    rep.ancilla_entropy = std::max(rep.ancilla_entropy,
                                   entanglement_entropy(StateVector(rep.circuit.space(), out),
                                                        {PathRegister::kLabel, std::string(labels::kLadder)}));
  }
  rep.composed = Operator(rep.target.space(), w);
  rep.unitarity_error = (w.adjoint() * w - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff();
  const auto eq = equivalence_up_to_phase(rep.composed, rep.target, opts.tolerance);
  rep.phase = eq.phase;
  rep.deviation = eq.deviation;

  // Random two-qubit inputs, entangled ones included.
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  const cplx ref_phase = std::polar(1.0, rep.phase);
  for (int r = 0; r < opts.random_inputs; ++r) {
    Vector amp(4);
    for (Eigen::Index i = 0; i < 4; ++i) amp(i) = cplx(normal(rng), normal(rng));
    amp.normalize();
    Vector full = Vector::Zero(static_cast<Eigen::Index>(rep.circuit.dim()));
    // |E>_1 |l0> (x) amp
    full.segment((static_cast<Eigen::Index>(ctx.ladder.D) + ctx.ladder.l0) * 4, 4) = amp;
    const Vector out = rep.circuit.matrix() * full;
    const Vector blk = ancilla_block(out, ctx);
    rep.ancilla_fidelity = std::min(rep.ancilla_fidelity, blk.squaredNorm());
    rep.ancilla_entropy = std::max(rep.ancilla_entropy,
                                   entanglement_entropy(StateVector(rep.circuit.space(), out.normalized()),
                                                        {PathRegister::kLabel, std::string(labels::kLadder)}));
    rep.deviation = std::max(rep.deviation, (blk - ref_phase * (rep.target.matrix() * amp)).cwiseAbs().maxCoeff());
    ++rep.random_inputs;
  }
  return rep;
}

CircuitReport two_polariton_cz(const GateContext& ctx, const CzOptions& opts) {
  if (ctx.qubits != 2) throw SpaceError("the controlled-Z circuit needs two polariton qubits");
  const CzFixed fixed = cz_fixed(ctx, opts.corrupt_phase);
  const Operator target = cz_target();
  const double grid[] = {0.0, kPi / 2, kPi, 3 * kPi / 2};

  CzCalibration best;
  double best_score = std::numeric_limits<double>::infinity();
  int tried = 0;
  bool found = false;
  for (bool lower_to_far : {true, false}) {
    for (double a : grid) {
      for (double b : grid) {
        for (double c : grid) {
          for (double eta : grid) {
            const CzCalibration cal{{a, b, c, lower_to_far}, eta};
            ++tried;
            const auto sc = quick_score(assemble(fixed, cal, ctx), ctx, target);
            const double score = sc.deviation + (1.0 - sc.fidelity);
            if (score < best_score) {
              best_score = score;
              best = cal;
            }
            if (sc.deviation <= opts.tolerance && sc.fidelity >= 1.0 - 1e-10) {
              found = true;
              break;
            }
          }
          if (found) break;
        }
        if (found) break;
      }
      if (found) break;
    }
    if (found) break;
  }
  CircuitReport rep = evaluate_cz(best, ctx, opts);
  rep.settings_tried = tried;
  return rep;
}

// ---------------------------------------------------------------------------
// Lindblad passes

cplx pass_coupling(cplx omega, const CavityModel& model, const std::string& lower, const std::string& upper) {
  const auto basis = polariton_eigenbasis(model);
  const cplx m = rabi_angle(model, basis, lower, upper, 1.0);
  if (std::abs(m) < 1e-14) throw SpaceError("pair (" + lower + ", " + upper + ") has no dipole matrix element");
  // The propagated pass equals the closed form at angle -i conj(g_Q m).
  return cplx(0.0, -1.0) * std::conj(omega) / m;
}

NoisyGateReport noisy_cep_rz(double phi, const SystemConfig& cfg, const IntegratorConfig& icfg,
                             const std::string& lower, const std::string& upper) {
  const auto basis = polariton_eigenbasis(cfg.model);
  const Vector lo = basis.state(lower), up = basis.state(upper);
  const cplx omega1 = kPi / 2, omega2 = std::polar(kPi / 2, phi);
  const Operator ideal = scattering_blockade(omega2, lo, up, cfg.model.space(), cfg.ladder) *
                         scattering_blockade(omega1, lo, up, cfg.model.space(), cfg.ladder);
  SystemConfig pass1 = cfg, pass2 = cfg;
  pass1.g_q = pass_coupling(omega1, cfg.model, lower, upper);
  pass2.g_q = pass_coupling(omega2, cfg.model, lower, upper);

  const std::vector<Vector> inputs = {lo, up, (lo + up) / std::sqrt(2.0), (lo + cplx(0, 1) * up) / std::sqrt(2.0)};
  NoisyGateReport rep;
  const StateVector rung = rung_state(cfg.ladder.l0, cfg.ladder);
  for (const auto& v : inputs) {
    const StateVector in = kron(rung, StateVector(cfg.model.space(), v));
    const SectorDensity rho0 = SectorDensity::from_dense(DensityMatrix::pure(in), cfg);
    const SectorDensity mid = frame_align(evolve_lindblad(rho0, pass1, icfg).state, pass1);
    const SectorDensity out = frame_align(evolve_lindblad(mid, pass2, icfg).state, pass2);
    const StateVector target(in.space(), ideal.matrix() * in.amplitudes());
    rep.fidelities.push_back(state_fidelity(out, target));
  }
  rep.min_fidelity = *std::min_element(rep.fidelities.begin(), rep.fidelities.end());
  rep.mean_fidelity = 0.0;
  for (double f : rep.fidelities) rep.mean_fidelity += f / static_cast<double>(rep.fidelities.size());
  return rep;
}

}  // namespace feb

namespace feb {

bool GateSuiteResult::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

namespace {

IdentityCheck check_le(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value <= tol, value, tol, std::move(detail)};
}

double unitarity_error(const Operator& u) {
  return (u.matrix() * u.matrix().adjoint() - Matrix::Identity(u.matrix().rows(), u.matrix().cols())).cwiseAbs().maxCoeff();
}

Operator qubit_op(std::initializer_list<cplx> entries) {
  Matrix m(2, 2);
  auto it = entries.begin();
  m << it[0], it[1], it[2], it[3];
  return Operator(TensorSpace::single(polariton_label(1), 2), std::move(m));
}

/// Restriction of an operator on el (x) pol to the rung-l0 block, assuming
/// it maps that block to itself.
Operator rung_block(const Operator& op, const LadderConfig& ladder) {
  const Eigen::Index start = static_cast<Eigen::Index>(ladder.l0) * 2;
  return Operator(TensorSpace::single(polariton_label(1), 2), op.matrix().block(start, start, 2, 2));
}

double max_rung_population(const Vector& v, const TensorSpace& space, std::size_t ladder_pos, const std::vector<int>& rungs) {
  double worst = 0.0;
  std::vector<double> pop(static_cast<std::size_t>(space.factors()[ladder_pos].dim), 0.0);
  for (std::size_t i = 0; i < space.dim(); ++i) pop[space.digits(i)[ladder_pos]] += std::norm(v(static_cast<Eigen::Index>(i)));
  for (int r : rungs) worst = std::max(worst, pop[static_cast<std::size_t>(r)]);
  return worst;
}

}  // namespace

GateSuiteResult verify_gate_identities(const GateSuiteOptions& opts) {
  const LadderConfig& ladder = opts.ladder;
  ladder.validate();
  if (ladder.D % 4 != 0) throw SpaceError("the gate suite needs D divisible by 4 for exact pi/2 combs");
  const double tol = opts.tolerance;
  GateSuiteResult res;
  auto& out = res.checks;

  // Scattering matrices.
  {
    const auto joint = ladder.factor().concat(TensorSpace::single(std::string(labels::kCavity), 8));
    out.push_back(check_le("s_lin_unitary", unitarity_error(scattering_linear(kPi / 2, joint)), 1e-12));
    const auto kerr = build_kerr(0.02, 4);
    const auto s_nl = scattering_blockade(kPi / 2, polariton_eigenbasis(kerr), "0", "1", ladder);
    out.push_back(check_le("s_nl_unitary", unitarity_error(s_nl), 1e-12));
  }

  // R_z family on el (x) pol.
  {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    double worst = 0.0;
    for (int k = 0; k < opts.random_pairs; ++k) {
      const double a = angle(rng), b = angle(rng);
      const auto eq = equivalence_up_to_phase(cep_rz_branch(a, ladder) * cep_rz_branch(b, ladder), cep_rz_branch(a + b, ladder));
      worst = std::max(worst, eq.deviation);
    }
    out.push_back(check_le("rz_group_law", worst, tol, std::to_string(opts.random_pairs) + " random pairs"));

    const Operator s = cep_rz_branch(kPi / 4, ladder);
    out.push_back(check_le("rz_s_squared_is_z", equivalence_up_to_phase(s * s, cep_rz_branch(kPi / 2, ladder)).deviation, tol));

    const Operator z_full = kron(Operator::identity(ladder.factor()), qubit_op({1.0, 0.0, 0.0, -1.0}));
    out.push_back(check_le("rz_half_pi_is_z", equivalence_up_to_phase(cep_rz_branch(kPi / 2, ladder), z_full).deviation, tol));
    out.push_back(check_le("rz_zero_is_identity",
                           equivalence_up_to_phase(cep_rz_branch(0.0, ladder), Operator::identity(z_full.space())).deviation,
                           tol));

    // Energy marginal restored and seam rungs untouched.
    const GateContext ctx{ladder, 1};
    const Operator rz = cep_rz(0.7, 1, ctx);
    double marginal = 0.0, seam = 0.0;
    for (int k = 0; k < 2; ++k) {
      const StateVector in = ctx.product_state(1, {qubit_basis(k)});
      const Vector o = rz.matrix() * in.amplitudes();
      const auto before = eels_spectrum(DensityMatrix::pure(in), ladder.l0);
      const auto after = eels_spectrum(DensityMatrix::pure(StateVector(in.space(), o)), ladder.l0);
      for (std::size_t i = 0; i < before.size(); ++i) {
        marginal = std::max(marginal, std::abs(before.probabilities()[i] - after.probabilities()[i]));
      }
      seam = std::max(seam, max_rung_population(o, in.space(), 1, {0, 1, ladder.D - 2, ladder.D - 1}));
    }
    out.push_back(check_le("rz_energy_restored", marginal, 1e-12));
    out.push_back(check_le("rz_seam_unpopulated", seam, 1e-12));
  }

  // Transverse family with comb electrons.
  {
    const cplx i(0.0, 1.0);
    const auto x = r_transverse(kPi / 2, 0.0, ladder);
    const Operator minus_i_x = qubit_op({0.0, -i, -i, 0.0});
    out.push_back(check_le("transverse_minus_i_x", equivalence_up_to_phase(x.polariton, minus_i_x).deviation, tol));
    const auto y = r_transverse(kPi / 4, kPi / 2, ladder);
    const double r = 1.0 / std::sqrt(2.0);
    const Operator minus_i_h = qubit_op({-i * r, -i * r, -i * r, i * r});
    const Operator h = x.polariton * y.polariton;
    out.push_back(check_le("transverse_minus_i_h", max_abs_diff(h, minus_i_h), tol, "exact, no phase freedom"));
    double inv = 0.0, ent = std::max(x.residual_entropy, y.residual_entropy);
    for (double phi : {0.0, kPi / 2, kPi, 3 * kPi / 2}) {
      const auto f = r_transverse(0.9, phi, ladder);
      const auto b = r_transverse(0.9, phi + kPi, ladder);
      inv = std::max(inv, max_abs_diff(f.polariton * b.polariton, Operator::identity(f.polariton.space())));
      ent = std::max(ent, std::max(f.residual_entropy, b.residual_entropy));
    }
    out.push_back(check_le("transverse_inverse", inv, tol, "R(W, phi) R(W, phi + pi) = I"));
    out.push_back(check_le("transverse_comb_entanglement", ent, tol));

    // H T H S from the primitives against the direct 2x2 product.
    const Operator t_gate = rung_block(cep_rz_branch(kPi / 8, ladder), ladder);
    const Operator s_gate = rung_block(cep_rz_branch(kPi / 4, ladder), ladder);
    const Operator composite = h * t_gate * h * s_gate;
    const Operator had = qubit_op({r, r, r, -r});
    const Operator t_ref = qubit_op({1.0, 0.0, 0.0, std::polar(1.0, kPi / 4)});
    const Operator s_ref = qubit_op({1.0, 0.0, 0.0, i});
    out.push_back(check_le("universal_htsh", equivalence_up_to_phase(composite, had * t_ref * had * s_ref).deviation, 1e-9));
  }

  // Controlled path on one qubit.
  {
    const GateContext ctx{ladder, 1};
    const Operator cpe = cpe_path(1, ctx);
    double dev = 0.0, seam = 0.0;
    const std::vector<std::pair<cplx, cplx>> inputs = {{1.0, 0.0}, {0.0, 1.0}, {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}};
    cplx ref = 0.0;
    for (const auto& [a, b] : inputs) {
      Vector pol(2);
      pol << a, b;
      const StateVector in = ctx.product_state(1, {pol});
      const Vector o = cpe.matrix() * in.amplitudes();
      // a|0>|E>_0 + b|1>|E>_1 at rung l0
      const Vector expect = a * ctx.product_state(0, {qubit_basis(0)}).amplitudes() +
                            b * ctx.product_state(1, {qubit_basis(1)}).amplitudes();
      const cplx ov = expect.dot(o);
      if (ref == cplx(0.0)) ref = ov / std::abs(ov);
      dev = std::max(dev, (o - ref * expect).cwiseAbs().maxCoeff());
      seam = std::max(seam, max_rung_population(o, in.space(), 1, {0, 1, ladder.D - 2, ladder.D - 1}));
    }
    out.push_back(check_le("cpe_path_correlation", dev, tol, "one global phase for all inputs"));
    out.push_back(check_le("cpe_path_seam_unpopulated", seam, 1e-12));
    const Operator h = electron_hadamard(ctx);
    out.push_back(check_le("electron_hadamard_involution", max_abs_diff(h * h, Operator::identity(h.space())), 1e-14));
  }

  res.cz = two_polariton_cz(GateContext{ladder, 2}, opts.cz);
  out.push_back(check_le("cz_equivalence", res.cz.deviation, opts.cz.tolerance));
  out.push_back(check_le("cz_ancilla_entropy", res.cz.ancilla_entropy, 1e-10));
  out.push_back(check_le("cz_ancilla_fidelity_defect", 1.0 - res.cz.ancilla_fidelity, 1e-10));
  out.push_back(check_le("cz_induced_unitarity", res.cz.unitarity_error, 1e-10));
  return res;
}

}  // namespace feb
