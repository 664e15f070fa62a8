// Copyright 2026 The hhlsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hhlsim/hhl.hpp"

#include <cmath>

#include "hhlsim/qsim.hpp"

namespace hhlsim {

LinearSystemInstance LinearSystemInstance::defaults() {
  LinearSystemInstance inst;
  inst.a << 1.5, 0.5, 0.5, 1.5;
  inst.b << 1.0, 0.0;
  inst.c = 1.0;
  return inst;
}

void LinearSystemInstance::validate() const {
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("instance: matrix must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix2> es(a);
  if (es.eigenvalues()[0] <= 0)
    throw ConfigError("instance: eigenvalues must be strictly positive");
  if (std::abs(b.norm() - 1.0) > 1e-12)
    throw ConfigError("instance: b must be a unit vector");
  if (c <= 0 || c > es.eigenvalues()[0] + 1e-12)
    throw ConfigError("instance: C must lie in (0, smallest eigenvalue]");
}

Vector2 bloch_state(double theta, double phi) {
  Vector2 v;
  v << std::cos(theta / 2), std::exp(Complex(0, phi)) * std::sin(theta / 2);
  return v;
}

namespace {

Vector2 fix_phase(Vector2 v) {
  for (int i = 0; i < 2; ++i) {
    if (std::abs(v[i]) > 1e-12) {
      v *= std::exp(Complex(0, -std::arg(v[i])));
      break;
    }
  }
  return v;
}

}  // namespace

Eigendecomposition eigendecompose(const LinearSystemInstance& inst) {
  inst.validate();
  Eigen::SelfAdjointEigenSolver<Matrix2> es(inst.a);
  Eigendecomposition e;
  e.lambda1 = es.eigenvalues()[0];
  e.lambda2 = es.eigenvalues()[1];
  e.u1 = fix_phase(es.eigenvectors().col(0));
  e.u2 = fix_phase(es.eigenvectors().col(1));
  e.beta1 = e.u1.dot(inst.b);
  e.beta2 = e.u2.dot(inst.b);
  return e;
}

std::pair<Vector2, double> classical_solve(const Matrix2& a, const Vector2& b) {
  const Complex det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (std::abs(det) < 1e-14) throw ConfigError("classical_solve: singular matrix");
  Matrix2 inv;
  inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  Vector2 x = (inv / det) * b;
  const double norm = x.norm();
  return {x / norm, norm};
}

double rotation_angle(double lambda, double c) {
  if (c > lambda) throw ConfigError("rotation_angle: C > lambda is unphysical");
  return 2.0 * std::asin(c / lambda);
}

namespace {

// Emits u (up to global phase) as H if it matches, else as RZ-RY-RZ.
void emit_single_qubit(const Matrix2& u, const std::string& target, Circuit* out) {
  const Matrix2 h = hadamard_matrix();
  Complex overlap = (h.adjoint() * u).trace() / 2.0;
  if ((u - overlap / std::abs(overlap) * h).cwiseAbs().maxCoeff() < 1e-10 &&
      std::abs(std::abs(overlap) - 1.0) < 1e-10) {
    out->gates.emplace_back(GateKind::H, std::vector<std::string>{target});
    return;
  }
  Matrix2 su = u / std::sqrt(u.determinant());
  const double beta = 2.0 * std::atan2(std::abs(su(1, 0)), std::abs(su(0, 0)));
  double sum = 0, diff = 0;  // alpha+gamma, alpha-gamma
  if (std::abs(su(0, 0)) > 1e-12) sum = -2.0 * std::arg(su(0, 0));
  if (std::abs(su(1, 0)) > 1e-12) diff = 2.0 * std::arg(su(1, 0));
  const double alpha = (sum + diff) / 2, gamma = (sum - diff) / 2;
  std::vector<std::string> t{target};
  if (std::abs(gamma) > 1e-12) out->gates.emplace_back(GateKind::RZ, t, gamma);
  if (std::abs(beta) > 1e-12) out->gates.emplace_back(GateKind::RY, t, beta);
  if (std::abs(alpha) > 1e-12) out->gates.emplace_back(GateKind::RZ, t, alpha);
}

Circuit subroutine1(const LinearSystemInstance& inst, const Eigendecomposition& eig) {
  // Memory goes to the eigen-index basis (u2 -> |0>, u1 -> |1>), the register
  // is raised to |01>, and the combo converts the memory index into the
  // register tag: |0>_m |01>_r -> -i |0>_m |10>_r, |1>_m |01>_r unchanged.
  Matrix2 v;
  v.col(0) = eig.u1;
  v.col(1) = eig.u2;
  Matrix2 x = pauli_matrix(Pauli::X);
  Circuit sub;
  emit_single_qubit(x * v.adjoint(), "Q1", &sub);
  sub.gates.emplace_back(GateKind::RY, std::vector<std::string>{"Q3"}, M_PI);
  sub.append(controlled_iswap_combo("Q1", "Q2", "Q3", SubsystemLayout::qubits(4)));
  return sub;
}

Circuit subroutine2(const LinearSystemInstance& inst, const Eigendecomposition& eig) {
  const double theta1 = rotation_angle(eig.lambda1, inst.c);
  const double theta2 = rotation_angle(eig.lambda2, inst.c);
  // Every branch gets theta2 unconditionally; the lambda1 branch (register
  // |01>, i.e. Q3 = 1) gets the controlled remainder on top.
  Circuit sub = controlled_ry_decomposition(theta1 - theta2, "Q3", "Q4",
                                            SubsystemLayout::qubits(4));
  sub.gates.emplace_back(GateKind::RY, std::vector<std::string>{"Q4"}, theta2);
  return sub;
}

}  // namespace

Circuit compile(const LinearSystemInstance& inst) {
  Eigendecomposition eig = eigendecompose(inst);
  if (eig.lambda2 - eig.lambda1 <= 1e-9 * std::abs(eig.lambda2))
    throw ConfigError("compile: degenerate spectrum, register encoding inapplicable");
  Circuit sub1 = subroutine1(inst, eig);
  Circuit circuit = sub1;
  circuit.append(subroutine2(inst, eig));
  circuit.append(inverse_circuit(sub1));
  circuit.postselection = {{"Q4", 1}};
  circuit.roles = {{"memory", "Q1"}, {"register", "Q2,Q3"}, {"ancilla", "Q4"}};
  return circuit;
}

Backend backend_from_name(const std::string& name) {
  if (name == "ideal") return Backend::kIdealMatrix;
  if (name == "device") return Backend::kDeviceNoiseless;
  if (name == "device-noisy") return Backend::kDeviceNoisy;
  throw ConfigError("unknown backend: " + name);
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kIdealMatrix: return "ideal";
    case Backend::kDeviceNoiseless: return "device";
    case Backend::kDeviceNoisy: return "device-noisy";
  }
  return "?";
}

namespace {

Matrix2 preparation_unitary(const Vector2& b) {
  Matrix2 p;
  p.col(0) = b;
  p.col(1) << -std::conj(b[1]), std::conj(b[0]);
  return p;
}

// Memory amplitudes on the (register=|00>, ancilla=|1>) slice plus the
// total weight elsewhere in the postselected branch.
struct PostselectedReadout {
  Matrix2 memory_rho_raw = Matrix2::Zero();  // unnormalized
  double success = 0;
  double register_residual = 0;
};

void accumulate_readout(const PureState& state, PostselectedReadout* acc) {
  const auto& lay = state.layout;
  const int q4 = 3;
  PureState proj = project(state, q4, 1);
  const double p = proj.norm2();
  acc->success += p;
  DensityOperator mem = reduced_density(proj, 0);
  acc->memory_rho_raw += mem.matrix.block(0, 0, 2, 2);
  // weight with the register away from |00> (or any leaked level)
  double cleared = 0;
  for (int i = 0; i < proj.amplitudes.size(); ++i) {
    int rem = i;
    std::vector<int> lv(lay.sites());
    for (int k = lay.sites() - 1; k >= 0; --k) {
      lv[k] = rem % lay.dims[k];
      rem /= lay.dims[k];
    }
    if (lv[1] == 0 && lv[2] == 0 && lv[0] <= 1) cleared += std::norm(proj.amplitudes[i]);
  }
  acc->register_residual += p - cleared;
}

HHLOutcome finalize(const PostselectedReadout& acc, const LinearSystemInstance& inst,
                    double ideal_threshold) {
  if (acc.success < tol::kImpossibleOutcome)
    throw SimulationError("run: postselection outcome has no weight");
  HHLOutcome out;
  out.success_probability = acc.success;
  out.memory_rho = acc.memory_rho_raw / acc.memory_rho_raw.trace();
  out.register_cleared = acc.register_residual / acc.success <= ideal_threshold;
  Eigen::SelfAdjointEigenSolver<Matrix2> es(out.memory_rho);
  out.memory = fix_phase(es.eigenvectors().col(1));
  auto [x, norm] = classical_solve(inst.a, inst.b);
  out.solution_fidelity = (x.adjoint() * out.memory_rho * x)(0, 0).real();
  return out;
}

}  // namespace

HHLOutcome run(const LinearSystemInstance& inst, Backend backend, const RunOptions& opts) {
  Circuit circuit = compile(inst);
  Circuit gates_only = circuit;
  gates_only.postselection.reset();

  if (backend == Backend::kIdealMatrix) {
    SubsystemLayout lay = SubsystemLayout::qubits(4);
    PureState state = PureState::basis(lay, {0, 0, 0, 0});
    state = apply_unitary(state, preparation_unitary(inst.b), {0});
    Matrix u = circuit_unitary(gates_only, lay);
    state = PureState((u * state.amplitudes).eval(), lay);
    PostselectedReadout acc;
    accumulate_readout(state, &acc);
    return finalize(acc, inst, 1e-18);
  }

  std::optional<DeviceExecutor> local;
  const DeviceExecutor* exec = opts.executor;
  if (!exec) {
    local.emplace(DeviceParams::defaults());
    exec = &*local;
  }
  const auto& lay = exec->layout();
  Matrix prep = lift_gate(preparation_unitary(inst.b), {lay.dims[0]});

  if (backend == Backend::kDeviceNoiseless) {
    PureState state = PureState::basis(lay, {0, 0, 0, 0});
    state = apply_unitary(state, prep, {0});
    state = exec->run(gates_only, std::move(state));
    PostselectedReadout acc;
    accumulate_readout(state, &acc);
    return finalize(acc, inst, 1e-18);
  }

  NoiseModel noise;
  std::mt19937_64 rng(opts.seed);
  PostselectedReadout acc;
  const double prep_ns = exec->params().single_qubit_duration_ns(0, M_PI);
  for (int t = 0; t < opts.trajectories; ++t) {
    auto det = sample_detunings(exec->params(), noise, rng);
    PureState state = PureState::basis(lay, {0, 0, 0, 0});
    state = apply_unitary(state, prep, {0});
    state = apply_noise(state, prep_ns, exec->params(), noise, det, rng);
    state = exec->run(gates_only, std::move(state), &noise, &det, &rng);
    accumulate_readout(state, &acc);
  }
  acc.success /= opts.trajectories;
  acc.register_residual /= opts.trajectories;
  acc.memory_rho_raw /= opts.trajectories;
  return finalize(acc, inst, 1e-18);
}

double success_probability(const LinearSystemInstance& inst) {
  inst.validate();
  auto [x, norm] = classical_solve(inst.a, inst.b);
  return inst.c * inst.c * norm * norm;
}

}  // namespace hhlsim
