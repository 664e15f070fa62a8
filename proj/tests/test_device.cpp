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

#include <cmath>
#include <random>

#include "doctest.h"
#include "hhlsim/device.hpp"
#include "hhlsim/qsim.hpp"

using namespace hhlsim;

namespace {
const double kPi = 3.14159265358979323846;

int total_excitation(int index, const std::vector<int>& dims) {
  int n = 0;
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    n += index % dims[s];
    index /= dims[s];
  }
  return n;
}
}  // namespace

TEST_CASE("device defaults validate") {
  DeviceParams p = DeviceParams::defaults();
  CHECK_NOTHROW(p.validate());
  CHECK(p.qubits() == 4);
  CHECK(p.omega_idle(0) == doctest::Approx(kTwoPi * 5.073));
  CHECK(p.eta() == doctest::Approx(kTwoPi * 0.25));
  CHECK(p.g(2) == doctest::Approx(kTwoPi * 0.0141));
  DeviceParams bad = p;
  bad.t1_us[1] = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("single qubit durations by drive line") {
  DeviceParams p = DeviceParams::defaults();
  CHECK(p.single_qubit_duration_ns(0, kPi) == doctest::Approx(30.0));
  CHECK(p.single_qubit_duration_ns(3, 0.2) == doctest::Approx(30.0));
  CHECK(p.single_qubit_duration_ns(2, kPi) == doctest::Approx(300.0));
  CHECK(p.single_qubit_duration_ns(1, kPi / 3) == doctest::Approx(100.0));
}

TEST_CASE("single qutrit hamiltonian spectrum") {
  DeviceParams p = DeviceParams::defaults();
  SubsystemLayout lay({3}, {"Q1"});
  Matrix h = hamiltonian(p, {5.073}, lay, 0);
  double w = kTwoPi * 5.073;
  CHECK(std::abs(h(0, 0)) < 1e-12);
  CHECK(h(1, 1).real() == doctest::Approx(w));
  CHECK(h(2, 2).real() == doctest::Approx(2 * w - p.eta()));
  CHECK(h.cwiseAbs().sum() == doctest::Approx(std::abs(h(1, 1)) + std::abs(h(2, 2))));
}

TEST_CASE("pair hamiltonian carries the exchange coupling") {
  DeviceParams p = DeviceParams::defaults();
  SubsystemLayout lay = SubsystemLayout::qubits(2);
  Matrix h = hamiltonian(p, {4.948, 4.547}, lay, 2);
  // |01> <-> |10> element is g of the Q3-Q4 link
  CHECK(h(1, 2).real() == doctest::Approx(p.g(2)));
  CHECK(h(2, 1).real() == doctest::Approx(p.g(2)));
  CHECK(is_hermitian(h));
}

TEST_CASE("qutrit pair hamiltonian has the sqrt(2)-enhanced element") {
  DeviceParams p = DeviceParams::defaults();
  SubsystemLayout lay({3, 2}, {"C", "T"});
  Matrix h = hamiltonian(p, {4.948, 4.547}, lay, 2);
  // |11> (index 3) <-> |20> (index 4)
  CHECK(h(3, 4).real() == doctest::Approx(std::sqrt(2.0) * p.g(2)));
  // and |01> (1) <-> |10> (2) stays at g
  CHECK(h(1, 2).real() == doctest::Approx(p.g(2)));
}

TEST_CASE("evolve is unitary and conserves total excitation") {
  DeviceParams p = DeviceParams::defaults();
  SubsystemLayout lay({3, 2}, {"C", "T"});
  FrequencySchedule sched = FrequencySchedule::constant(p, 40.0, 2, 2);
  Matrix u = evolve(sched, p, lay, 0, 2);
  CHECK(is_unitary(u));
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < u.cols(); ++j)
      if (total_excitation(i, lay.dims) != total_excitation(j, lay.dims))
        CHECK(std::abs(u(i, j)) < 1e-10);
}

TEST_CASE("evolve does not depend on the subdivision step") {
  DeviceParams p = DeviceParams::defaults();
  SubsystemLayout lay = SubsystemLayout::qubits(2);
  FrequencySchedule sched = FrequencySchedule::constant(p, 30.0, 2, 2);
  sched.per_qubit[0][0].freq_ghz = 4.6;  // detuned control segment
  Matrix coarse = evolve(sched, p, lay, 10.0, 2);
  Matrix fine = evolve(sched, p, lay, 0.5, 2);
  CHECK((coarse - fine).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("resonant parking for pi/(2g) produces a full exchange") {
  DeviceParams p = DeviceParams::defaults();
  SubsystemLayout lay = SubsystemLayout::qubits(2);
  double g = p.g(2);
  double t = kPi / (2 * g);
  FrequencySchedule sched = FrequencySchedule::constant(p, t, 2, 2);
  double f = std::min(p.idle_freq_ghz[2], p.idle_freq_ghz[3]);
  sched.per_qubit[0][0].freq_ghz = f;
  sched.per_qubit[1][0].freq_ghz = f;
  Matrix u = evolve(sched, p, lay, 0, 2);
  CHECK(std::abs(u(2, 1)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(u(1, 1)) < 1e-9);
}

TEST_CASE("frequency schedule validation") {
  DeviceParams p = DeviceParams::defaults();
  FrequencySchedule s = FrequencySchedule::constant(p, 10.0);
  CHECK_NOTHROW(s.validate());
  CHECK(s.frequency_ghz(1, 5.0) == doctest::Approx(4.074));
  s.per_qubit[0][0].t1_ns = 5.0;  // no longer covers the full window
  CHECK_THROWS_AS(s.validate(), SimulationError);
}

TEST_CASE("phase compensation recovers injected virtual-Z phases") {
  std::vector<int> dims{2, 2};
  Matrix ideal = two_qubit_matrix(GateKind::SQRT_ISWAP);
  PhaseCompensation inject;
  inject.global = 0.37;
  inject.vz_angles = {0.21, -0.65};
  Matrix raw = apply_compensation(ideal, inject, dims);
  PhaseCompensation found = phase_compensation(raw, ideal, dims);
  CHECK(found.residual < 1e-9);
  Matrix fixed = apply_compensation(raw, found, dims);
  CHECK((fixed - ideal).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("phase compensation flags genuinely different operators") {
  std::vector<int> dims{2, 2};
  Matrix ideal = two_qubit_matrix(GateKind::SQRT_ISWAP);
  Matrix other = two_qubit_matrix(GateKind::ISWAP);
  PhaseCompensation comp = phase_compensation(other, ideal, dims);
  CHECK(comp.residual > 0.05);
}

TEST_CASE("native gate durations follow the coupling strengths") {
  DeviceParams p = DeviceParams::defaults();
  for (int fq = 0; fq < 3; ++fq) {
    double g = p.g(fq);
    CHECK(native_gate_duration_ns(GateKind::SQRT_ISWAP, fq, p) == doctest::Approx(kPi / (4 * g)));
    CHECK(native_gate_duration_ns(GateKind::ISWAP, fq, p) == doctest::Approx(kPi / (2 * g)));
    CHECK(native_gate_duration_ns(GateKind::CZ, fq, p) ==
          doctest::Approx(kPi / (std::sqrt(2.0) * g)));
  }
}

TEST_CASE("native sqrt(iSWAP) on the register link is close to ideal") {
  DeviceParams p = DeviceParams::defaults();
  NativeGate g = native_gate(GateKind::SQRT_ISWAP, 1, p);
  CHECK(is_unitary(g.unitary));
  CHECK(g.compensation.residual < 1e-9);
  CHECK(g.leakage <= 1e-8);
  Matrix ideal = lift_gate(two_qubit_matrix(GateKind::SQRT_ISWAP), g.dims);
  // the compensated gate agrees with the ideal on the computational block to
  // within the reported residual
  std::vector<int> comp_idx;
  int d1 = g.dims[1];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) comp_idx.push_back(i * d1 + j);
  double worst = 0;
  for (int i : comp_idx)
    for (int j : comp_idx)
      worst = std::max(worst, std::abs(g.unitary(i, j) - ideal(i, j)));
  CHECK(worst < 2 * g.compensation.residual + 1e-12);
}

TEST_CASE("native CZ: exact entangling phase, tiny leakage, residual exchange error") {
  DeviceParams p = DeviceParams::defaults();
  NativeGate g = native_gate(GateKind::CZ, 2, p);
  REQUIRE(g.dims == std::vector<int>{3, 2});
  CHECK(g.leakage <= 1e-4);
  // entangling phase invariant arg(u00 u11 / (u01 u10)) = pi; the invariant
  // magnitude dips below one because the off-resonant exchange drains the
  // |01> and |10> diagonal entries (second order in the exchange error)
  Complex inv = g.unitary(0, 0) * g.unitary(3, 3) / (g.unitary(1, 1) * g.unitary(2, 2));
  CHECK(std::abs(std::arg(inv)) == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(std::abs(std::abs(inv) - 1.0) < 0.02);
  // the off-resonant {01,10} exchange error matches the two-level Rabi formula
  double det = p.eta();
  double gg = p.g(2);
  double omega = std::sqrt(det * det + 4 * gg * gg);
  double t = g.duration_ns;
  double expect = (2 * gg / omega) * std::abs(std::sin(omega * t / 2));
  // diagonal phase compensation leaves entry magnitudes unchanged
  CHECK(std::abs(std::abs(g.unitary(1, 2)) - expect) < 1e-9);
  // that exchange error is the dominant (and essentially only) residual
  CHECK(g.compensation.residual == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("sampled detunings have the quasi-static spread") {
  DeviceParams p = DeviceParams::defaults();
  NoiseModel noise;
  std::mt19937_64 rng(3);
  int n = 20000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    auto d = sample_detunings(p, noise, rng);
    REQUIRE(d.size() == 4);
    sum += d[1];
    sum2 += d[1] * d[1];
  }
  double mean = sum / n;
  double sigma = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::abs(mean) < 3 * sigma / std::sqrt(double(n)) + 1e-6);
  CHECK(sigma == doctest::Approx(std::sqrt(2.0) / p.t2_star_ns(1)).epsilon(0.03));
}

TEST_CASE("dephasing gives the Gaussian Ramsey envelope") {
  DeviceParams p = DeviceParams::defaults();
  SubsystemLayout lay = SubsystemLayout::qubits(1);
  Vector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  NoiseModel noise;
  noise.amplitude_damping = false;
  std::mt19937_64 rng(9);
  double t = p.t2_star_ns(0);
  int n = 6000;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    auto det = sample_detunings(p, noise, rng);
    PureState s(plus, lay);
    s = apply_noise(s, t, p, noise, det, rng, 0);
    acc += expectation(s, Observable(Pauli::X), 0);
  }
  CHECK(acc / n == doctest::Approx(std::exp(-1.0)).epsilon(0.1));
}

TEST_CASE("amplitude damping gives the exponential T1 law") {
  DeviceParams p = DeviceParams::defaults();
  SubsystemLayout lay = SubsystemLayout::qubits(1);
  NoiseModel noise;
  noise.dephasing = false;
  std::mt19937_64 rng(11);
  double t = p.t1_ns(0);
  int n = 6000;
  double acc = 0;
  for (int i = 0; i < n; ++i) {
    auto det = sample_detunings(p, noise, rng);
    PureState s = PureState::basis(lay, {1});
    s = apply_noise(s, t, p, noise, det, rng, 0);
    acc += s.population(0, 1);
  }
  CHECK(acc / n == doctest::Approx(std::exp(-1.0)).epsilon(0.05));
}

TEST_CASE("noise is deterministic for a fixed seed") {
  DeviceParams p = DeviceParams::defaults();
  SubsystemLayout lay = SubsystemLayout::qubits(2);
  NoiseModel noise;
  auto run_once = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto det = sample_detunings(p, noise, rng);
    Vector v(4);
    v << 0.5, 0.5, 0.5, 0.5;
    PureState s(v, lay);
    s = apply_noise(s, 500.0, p, noise, det, rng, 0);
    return s.amplitudes;
  };
  CHECK((run_once(42) - run_once(42)).norm() == 0.0);
  CHECK((run_once(42) - run_once(43)).norm() > 0.0);
}

TEST_CASE("cosine fit recovers phase, visibility and offset") {
  std::vector<double> thetas, values;
  double phase = 0.83, vis = 0.62, offset = 0.48;
  for (int k = 0; k < 17; ++k) {
    double th = kTwoPi * k / 17;
    thetas.push_back(th);
    values.push_back(offset + 0.5 * vis * std::cos(th + phase));
  }
  CosineFit fit = fit_cosine(thetas, values);
  CHECK(fit.phase == doctest::Approx(phase).epsilon(1e-9));
  CHECK(fit.visibility == doctest::Approx(vis).epsilon(1e-9));
  CHECK(fit.offset == doctest::Approx(offset).epsilon(1e-9));
}

TEST_CASE("cosine fit rejects degenerate data") {
  CHECK_THROWS_AS(fit_cosine({0.0, 1.0}, {0.5, 0.5}), FitError);
  CHECK_THROWS_AS(fit_cosine({0.0, 1.0, 2.0, 3.0}, {0.5, 0.5, 0.5, 0.5}), FitError);
}

TEST_CASE("ramsey scan flips phase by pi with the entangling gate in place") {
  DeviceParams p = DeviceParams::defaults();
  std::vector<double> thetas;
  for (int k = 0; k < 13; ++k) thetas.push_back(kTwoPi * k / 13);
  RamseyOptions opts;
  std::vector<double> p0 = ramsey_cz_calibration(p, 0, thetas, opts);
  std::vector<double> p1 = ramsey_cz_calibration(p, 1, thetas, opts);
  CosineFit f0 = fit_cosine(thetas, p0);
  CosineFit f1 = fit_cosine(thetas, p1);
  double delta = std::abs(std::remainder(f1.phase - f0.phase, kTwoPi));
  CHECK(delta == doctest::Approx(kPi).epsilon(1e-9));
  CHECK(f0.visibility > 0.9);
  CHECK(f1.visibility > 0.9);
}

TEST_CASE("ramsey scan shows no phase shift without the entangling gate") {
  DeviceParams p = DeviceParams::defaults();
  std::vector<double> thetas;
  for (int k = 0; k < 13; ++k) thetas.push_back(kTwoPi * k / 13);
  RamseyOptions opts;
  opts.use_cz = false;
  std::vector<double> p0 = ramsey_cz_calibration(p, 0, thetas, opts);
  std::vector<double> p1 = ramsey_cz_calibration(p, 1, thetas, opts);
  CosineFit f0 = fit_cosine(thetas, p0);
  CosineFit f1 = fit_cosine(thetas, p1);
  CHECK(std::abs(std::remainder(f1.phase - f0.phase, kTwoPi)) < 1e-9);
}

TEST_CASE("pi gate fidelity is one without noise and high for the fast line") {
  DeviceParams p = DeviceParams::defaults();
  NoiseModel off;
  off.amplitude_damping = false;
  off.dephasing = false;
  CHECK(pi_gate_fidelity(0, 30.0, p, off, 20, 5) == doctest::Approx(1.0).epsilon(1e-12));
  NoiseModel on;
  CHECK(pi_gate_fidelity(0, 30.0, p, on, 800, 5) > 0.99);
}

TEST_CASE("executor layout and gate durations") {
  DeviceExecutor ex(DeviceParams::defaults());
  CHECK(ex.layout().dims == std::vector<int>{3, 2, 3, 2});
  CHECK(ex.gate_duration_ns(GateSpec(GateKind::RY, {"Q1"}, kPi)) == doctest::Approx(30.0));
  CHECK(ex.gate_duration_ns(GateSpec(GateKind::RY, {"Q3"}, kPi)) == doctest::Approx(300.0));
  CHECK(ex.gate_duration_ns(GateSpec(GateKind::VIRTUAL_Z, {"Q2"}, 0.4)) == 0.0);
  double g = DeviceParams::defaults().g(1);
  CHECK(ex.gate_duration_ns(GateSpec(GateKind::SQRT_ISWAP, {"Q2", "Q3"})) ==
        doctest::Approx(kPi / (4 * g)));
}

TEST_CASE("executor runs ideal single-qubit gates") {
  DeviceExecutor ex(DeviceParams::defaults());
  PureState s = PureState::basis(ex.layout(), {0, 0, 0, 0});
  Circuit c;
  c.gates = {GateSpec(GateKind::RY, {"Q4"}, kPi)};
  PureState out = ex.run(c, s);
  CHECK(out.population(3, 1) == doctest::Approx(1.0));
}

TEST_CASE("executor chain gates are unitary with bounded residuals") {
  DeviceExecutor ex(DeviceParams::defaults());
  for (GateKind k : {GateKind::SQRT_ISWAP, GateKind::ISWAP}) {
    Matrix u = ex.two_qubit_chain_unitary(k, 1);
    CHECK(is_unitary(u));
    CHECK(ex.gate_residual(k, 1) < 0.15);
  }
  Matrix cz = ex.two_qubit_chain_unitary(GateKind::CZ, 2);
  CHECK(is_unitary(cz));
}

TEST_CASE("executor trajectories are reproducible per seed") {
  DeviceParams p = DeviceParams::defaults();
  DeviceExecutor ex(p);
  NoiseModel noise;
  Circuit c;
  c.gates = {GateSpec(GateKind::RY, {"Q1"}, kPi / 2),
             GateSpec(GateKind::SQRT_ISWAP, {"Q2", "Q3"}),
             GateSpec(GateKind::RY, {"Q3"}, kPi / 3)};
  auto run_once = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto det = sample_detunings(p, noise, rng);
    PureState s = PureState::basis(ex.layout(), {0, 0, 0, 0});
    return ex.run(c, s, &noise, &det, &rng).amplitudes;
  };
  CHECK((run_once(7) - run_once(7)).norm() == 0.0);
}
