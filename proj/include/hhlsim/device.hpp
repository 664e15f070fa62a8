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

#ifndef HHLSIM_DEVICE_HPP
#define HHLSIM_DEVICE_HPP

#include <array>
#include <map>
#include <random>

#include "hhlsim/gates.hpp"
#include "hhlsim/types.hpp"

namespace hhlsim {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Transmon chain parameters. Frequencies in GHz, couplings and the
/// anharmonicity in MHz, lifetimes in microseconds, durations in ns.
struct DeviceParams {
  std::vector<double> idle_freq_ghz{5.073, 4.074, 4.948, 4.547};
  std::vector<double> coupling_mhz{13.0, 9.8, 14.1};
  std::vector<double> t1_us{15.9, 7.4, 7.8, 14.1};
  std::vector<double> t2_star_us{8.7, 2.3, 5.2, 3.4};
  double anharmonicity_mhz = 250.0;
  // XY-line drive crosstalk factors, stored but unused by the default model.
  std::vector<double> xy_crosstalk{11.7, 6.7};
  // Single-qubit drive model: ideal rotations with a declared length.
  double fast_pulse_ns = 30.0;   // qubits sharing the strong drive (Q1, Q4)
  double slow_pi_pulse_ns = 300.0;  // pi pulse on Q2/Q3, scaled with angle

  static DeviceParams defaults() { return DeviceParams{}; }
  void validate() const;

  int qubits() const { return static_cast<int>(idle_freq_ghz.size()); }
  double omega_idle(int j) const { return kTwoPi * idle_freq_ghz[j]; }     // rad/ns
  double eta() const { return kTwoPi * anharmonicity_mhz * 1e-3; }        // rad/ns
  double g(int j) const { return kTwoPi * coupling_mhz[j] * 1e-3; }       // rad/ns
  double t1_ns(int j) const { return t1_us[j] * 1e3; }
  double t2_star_ns(int j) const { return t2_star_us[j] * 1e3; }
  double single_qubit_duration_ns(int qubit, double angle) const;
};

/// Piecewise-constant per-qubit frequency control.
struct FrequencySchedule {
  struct Segment {
    double t0_ns, t1_ns, freq_ghz;
  };
  std::vector<std::vector<Segment>> per_qubit;
  double duration_ns = 0;

  /// Everything parked at idle.
  static FrequencySchedule constant(const DeviceParams& params, double duration_ns,
                                    int first_qubit = 0, int qubit_count = -1);
  void validate() const;
  double frequency_ghz(int qubit, double t_ns) const;
  std::string to_csv() const;
};

struct NoiseModel {
  bool amplitude_damping = true;
  bool dephasing = true;
  std::uint64_t seed = 0;
};

/// Chain Hamiltonian in rad/ns for the window of qubits starting at
/// `first_qubit`, at the given (absolute) frequencies. 3-level sites place
/// |2> at 2*omega - eta and scale coupling elements by sqrt(2).
Matrix hamiltonian(const DeviceParams& params, const std::vector<double>& freq_ghz,
                   const SubsystemLayout& layout, int first_qubit = 0);

double default_dt_ns(const DeviceParams& params);

/// Time-ordered propagator of the schedule, expressed in the frame rotating
/// at each site's idle transition energies. Segments are propagated exactly;
/// `dt_ns` only subdivides them (convergence checks).
Matrix evolve(const FrequencySchedule& schedule, const DeviceParams& params,
              const SubsystemLayout& layout, double dt_ns = 0, int first_qubit = 0);

struct PhaseCompensation {
  double global = 0;
  std::vector<double> vz_angles;  // one per site, applied as e^{i angle * n}
  double residual = 0;            // operator distance on the computational block
};

/// Finds virtual-Z angles (plus a global phase) minimizing the operator
/// distance between diag-phased `raw` and `ideal` on the computational
/// subspace. Residual above 0.05 signals miscalibration.
PhaseCompensation phase_compensation(const Matrix& raw, const Matrix& ideal,
                                     const std::vector<int>& dims);

/// Applies compensation phases (e^{i angle_j * n_j} per site plus global).
Matrix apply_compensation(const Matrix& raw, const PhaseCompensation& comp,
                          const std::vector<int>& dims);

struct NativeGate {
  Matrix unitary;          // compensated, on the pair model dims
  std::vector<int> dims;   // pair model dims (3-level CZ control)
  double duration_ns = 0;
  PhaseCompensation compensation;
  double leakage = 0;      // worst-case population outside the computational block
};

/// Synthesizes CZ / SQRT_ISWAP / ISWAP on the nearest-neighbor pair
/// (first_qubit, first_qubit+1) by Hamiltonian evolution. Durations are
/// pi/(4g), pi/(2g) and pi/(sqrt(2) g).
NativeGate native_gate(GateKind kind, int first_qubit, const DeviceParams& params);

double native_gate_duration_ns(GateKind kind, int first_qubit, const DeviceParams& params);

/// Quasi-static dephasing detunings (rad/ns), one per qubit, drawn once per
/// trajectory from Normal(0, sqrt(2)/T2*).
std::vector<double> sample_detunings(const DeviceParams& params, const NoiseModel& noise,
                                     std::mt19937_64& rng);

/// One trajectory noise step over `elapsed_ns`: per-qubit amplitude-damping
/// jump/no-jump with gamma = 1 - exp(-t/T1) and the quasi-static detuning
/// phase. State stays normalized.
PureState apply_noise(const PureState& state, double elapsed_ns, const DeviceParams& params,
                      const NoiseModel& noise, const std::vector<double>& detunings,
                      std::mt19937_64& rng, int first_qubit = 0);

/// Cosine fit P(theta) ~ offset + 0.5 * visibility * cos(theta + phase).
struct CosineFit {
  double phase = 0;
  double visibility = 0;
  double offset = 0;
};
CosineFit fit_cosine(const std::vector<double>& thetas, const std::vector<double>& values);

struct RamseyOptions {
  bool use_cz = true;        // false substitutes identity for the CZ
  bool compensated = true;   // false leaves the raw dynamical phase in
  const NoiseModel* noise = nullptr;
  int trajectories = 2000;
  std::uint64_t seed = 1;
};

/// P(|1> of Q4) after pi/2 -- CZ -- pi/2(theta axis) with Q3 prepared in
/// `control_state`, for each theta. Simulated on the Q3/Q4 pair window,
/// where the compensated entangling phase is gauge invariant.
std::vector<double> ramsey_cz_calibration(const DeviceParams& params, int control_state,
                                          const std::vector<double>& thetas,
                                          const RamseyOptions& opts = {});

/// Trajectory-averaged state fidelity of the noisy R_Y(pi) channel against
/// the ideal flip, over the six cardinal input states.
double pi_gate_fidelity(int qubit, double duration_ns, const DeviceParams& params,
                        const NoiseModel& noise, int trajectories = 10000,
                        std::uint64_t seed = 1);

/// Executes circuits on the simulated chain: qutrit CZ controls (Q1, Q3),
/// synthesized two-qubit gates, ideal timed single-qubit rotations.
class DeviceExecutor {
 public:
  explicit DeviceExecutor(DeviceParams params);

  const SubsystemLayout& layout() const { return layout_; }
  const DeviceParams& params() const { return params_; }

  /// Chain-level unitary of one gate (cached for two-qubit gates).
  const Matrix& gate_unitary(const GateSpec& gate) const;
  double gate_duration_ns(const GateSpec& gate) const;
  /// Residual of the chain-level compensation for a two-qubit gate.
  double gate_residual(GateKind kind, int first_qubit) const;
  /// Chain-level two-qubit propagator, with or without virtual-Z phases.
  Matrix two_qubit_chain_unitary(GateKind kind, int first_qubit, bool compensated = true) const;

  /// Runs the gate list (ignoring the postselection marker). When `noise` is
  /// given this is one trajectory: per-gate noise with the supplied
  /// detunings and rng.
  PureState run(const Circuit& circuit, PureState state, const NoiseModel* noise = nullptr,
                const std::vector<double>* detunings = nullptr,
                std::mt19937_64* rng = nullptr) const;

 private:
  struct SynthGate {
    Matrix unitary;
    double residual;
    Matrix raw;
  };
  const SynthGate& synthesized(GateKind kind, int first_qubit) const;

  DeviceParams params_;
  SubsystemLayout layout_;
  mutable std::map<std::pair<int, int>, SynthGate> cache_;
  mutable std::map<std::string, Matrix> single_cache_;
};

}  // namespace hhlsim

#endif  // HHLSIM_DEVICE_HPP
