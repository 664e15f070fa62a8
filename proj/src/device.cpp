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

#include "hhlsim/device.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hhlsim/qsim.hpp"

namespace hhlsim {

void DeviceParams::validate() const {
  const size_t n = idle_freq_ghz.size();
  if (n < 2) throw ConfigError("device: need at least two qubits");
  if (coupling_mhz.size() != n - 1) throw ConfigError("device: coupling count must be n-1");
  if (t1_us.size() != n || t2_star_us.size() != n)
    throw ConfigError("device: T1/T2* count must match qubit count");
  for (double f : idle_freq_ghz)
    if (f <= 0) throw ConfigError("device: frequencies must be positive");
  for (double t : t1_us)
    if (t <= 0) throw ConfigError("device: T1 must be positive");
  for (double t : t2_star_us)
    if (t <= 0) throw ConfigError("device: T2* must be positive");
  if (anharmonicity_mhz <= 0) throw ConfigError("device: anharmonicity must be positive");
}

double DeviceParams::single_qubit_duration_ns(int qubit, double angle) const {
  const bool strong_drive = (qubit == 0 || qubit == qubits() - 1);
  if (strong_drive) return fast_pulse_ns;
  return slow_pi_pulse_ns * std::abs(angle) / M_PI;
}

FrequencySchedule FrequencySchedule::constant(const DeviceParams& params, double duration_ns,
                                              int first_qubit, int qubit_count) {
  if (qubit_count < 0) qubit_count = params.qubits() - first_qubit;
  FrequencySchedule s;
  s.duration_ns = duration_ns;
  for (int k = 0; k < qubit_count; ++k)
    s.per_qubit.push_back({{0, duration_ns, params.idle_freq_ghz[first_qubit + k]}});
  return s;
}

void FrequencySchedule::validate() const {
  for (const auto& segs : per_qubit) {
    if (segs.empty()) throw SimulationError("schedule: empty qubit track");
    if (std::abs(segs.front().t0_ns) > 1e-12 ||
        std::abs(segs.back().t1_ns - duration_ns) > 1e-12)
      throw SimulationError("schedule: track does not cover [0, duration]");
    for (size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].t1_ns <= segs[i].t0_ns) throw SimulationError("schedule: empty segment");
      if (i > 0 && std::abs(segs[i].t0_ns - segs[i - 1].t1_ns) > 1e-12)
        throw SimulationError("schedule: gap or overlap between segments");
    }
  }
}

double FrequencySchedule::frequency_ghz(int qubit, double t_ns) const {
  for (const auto& seg : per_qubit[qubit])
    if (t_ns >= seg.t0_ns - 1e-12 && t_ns < seg.t1_ns) return seg.freq_ghz;
  return per_qubit[qubit].back().freq_ghz;
}

std::string FrequencySchedule::to_csv() const {
  std::ostringstream os;
  os << "qubit,t0_ns,t1_ns,freq_ghz\n";
  for (size_t q = 0; q < per_qubit.size(); ++q)
    for (const auto& seg : per_qubit[q])
      os << q << ',' << seg.t0_ns << ',' << seg.t1_ns << ',' << seg.freq_ghz << '\n';
  return os.str();
}

Matrix hamiltonian(const DeviceParams& params, const std::vector<double>& freq_ghz,
                   const SubsystemLayout& layout, int first_qubit) {
  const int n = layout.sites();
  if (static_cast<int>(freq_ghz.size()) != n)
    throw std::invalid_argument("hamiltonian: frequency count does not match layout");
  if (first_qubit + n > params.qubits())
    throw std::invalid_argument("hamiltonian: window exceeds device size");
  const int dim = layout.dim();
  const double eta = params.eta();
  Matrix h = Matrix::Zero(dim, dim);
  std::vector<int> levels(n);
  for (int i = 0; i < dim; ++i) {
    int rem = i;
    for (int k = n - 1; k >= 0; --k) {
      levels[k] = rem % layout.dims[k];
      rem /= layout.dims[k];
    }
    double e = 0;
    for (int k = 0; k < n; ++k) {
      const double w = kTwoPi * freq_ghz[k];
      e += (levels[k] == 2) ? (2 * w - eta) : levels[k] * w;
    }
    h(i, i) = e;
    // exchange coupling g (a_k^dag a_{k+1} + h.c.), bosonic matrix elements
    for (int k = 0; k + 1 < n; ++k) {
      if (levels[k] > 0 && levels[k + 1] + 1 < layout.dims[k + 1]) {
        const int j = i - layout.stride(k) + layout.stride(k + 1);
        const double el = params.g(first_qubit + k) * std::sqrt(double(levels[k])) *
                          std::sqrt(double(levels[k + 1] + 1));
        h(j, i) += el;
        h(i, j) += el;
      }
    }
  }
  return h;
}

double default_dt_ns(const DeviceParams& params) {
  double fmax = 0;
  for (double f : params.idle_freq_ghz) fmax = std::max(fmax, f);
  return 1.0 / (50.0 * fmax);
}

Matrix evolve(const FrequencySchedule& schedule, const DeviceParams& params,
              const SubsystemLayout& layout, double dt_ns, int first_qubit) {
  schedule.validate();
  const int n = layout.sites();
  if (static_cast<int>(schedule.per_qubit.size()) != n)
    throw SimulationError("evolve: schedule tracks do not match layout");
  if (dt_ns <= 0) dt_ns = default_dt_ns(params);

  // Global breakpoints across all tracks; the Hamiltonian is constant in
  // between and each interval is propagated exactly via eigendecomposition.
  std::set<double> cuts{0.0, schedule.duration_ns};
  for (const auto& segs : schedule.per_qubit)
    for (const auto& seg : segs) {
      cuts.insert(seg.t0_ns);
      cuts.insert(seg.t1_ns);
    }
  const int dim = layout.dim();
  Matrix u = Matrix::Identity(dim, dim);
  double prev = 0;
  for (double t : cuts) {
    if (t <= prev + 1e-12) { prev = std::max(prev, t); continue; }
    const double mid = 0.5 * (prev + t);
    std::vector<double> freqs(n);
    for (int k = 0; k < n; ++k) freqs[k] = schedule.frequency_ghz(k, mid);
    Matrix h = hamiltonian(params, freqs, layout, first_qubit);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const double span = t - prev;
    const int steps = std::max(1, static_cast<int>(std::ceil(span / dt_ns)));
    const double step = span / steps;  // exact for constant H at any step size
    Vector phases(dim);
    for (int i = 0; i < dim; ++i)
      phases[i] = std::exp(Complex(0, -es.eigenvalues()[i] * step * steps));
    u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint() * u;
    prev = t;
  }
  // Transfer into the frame rotating at the idle transition energies.
  const double eta = params.eta();
  Vector frame(dim);
  std::vector<int> levels(n);
  for (int i = 0; i < dim; ++i) {
    int rem = i;
    for (int k = n - 1; k >= 0; --k) {
      levels[k] = rem % layout.dims[k];
      rem /= layout.dims[k];
    }
    double e = 0;
    for (int k = 0; k < n; ++k) {
      const double w = params.omega_idle(first_qubit + k);
      e += (levels[k] == 2) ? (2 * w - eta) : levels[k] * w;
    }
    frame[i] = std::exp(Complex(0, e * schedule.duration_ns));
  }
  return frame.asDiagonal() * u;
}

namespace {

std::vector<int> decode_levels(int idx, const std::vector<int>& dims) {
  std::vector<int> lv(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    lv[k] = idx % dims[k];
    idx /= dims[k];
  }
  return lv;
}

// Indices of the all-qubit (levels <= 1) subspace together with occupations.
void computational_subspace(const std::vector<int>& dims, std::vector<int>* indices,
                            std::vector<std::vector<int>>* occupations) {
  int dfull = 1;
  for (int d : dims) dfull *= d;
  for (int i = 0; i < dfull; ++i) {
    auto lv = decode_levels(i, dims);
    if (std::all_of(lv.begin(), lv.end(), [](int l) { return l <= 1; })) {
      indices->push_back(i);
      occupations->push_back(lv);
    }
  }
}

double spectral_norm(const Matrix& m) {
  return m.jacobiSvd().singularValues()[0];
}

}  // namespace

PhaseCompensation phase_compensation(const Matrix& raw, const Matrix& ideal,
                                     const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> comp;
  std::vector<std::vector<int>> occ;
  computational_subspace(dims, &comp, &occ);
  const int m = static_cast<int>(comp.size());

  // Overlap diagonal; we align the phases of e^{i phi_k} m_k where
  // phi_k = global + sum_j angle_j * n_jk.
  Matrix prod = raw * ideal.adjoint();
  std::vector<Complex> diag(m);
  for (int k = 0; k < m; ++k) diag[k] = prod(comp[k], comp[k]);

  PhaseCompensation c;
  c.vz_angles.assign(n, 0.0);
  auto phase_of = [&](int k) {
    double p = c.global;
    for (int j = 0; j < n; ++j) p += c.vz_angles[j] * occ[k][j];
    return p;
  };
  // Alternating maximization of Re sum_k e^{i phi_k} m_k. Each coordinate
  // appears linearly (occupations are 0/1 on the subspace), so every update
  // is a closed-form phase alignment; sweep until the angles stop moving.
  for (int sweep = 0; sweep < 10000; ++sweep) {
    double moved = 0;
    Complex s = 0;
    for (int k = 0; k < m; ++k) s += std::exp(Complex(0, phase_of(k) - c.global)) * diag[k];
    if (std::abs(s) > 0) {
      double next = -std::arg(s);
      moved = std::max(moved, std::abs(std::remainder(next - c.global, kTwoPi)));
      c.global = next;
    }
    for (int j = 0; j < n; ++j) {
      Complex s1 = 0;
      for (int k = 0; k < m; ++k) {
        if (occ[k][j] != 1) continue;
        s1 += std::exp(Complex(0, phase_of(k) - c.vz_angles[j])) * diag[k];
      }
      if (std::abs(s1) > 0) {
        double next = -std::arg(s1);
        moved = std::max(moved, std::abs(std::remainder(next - c.vz_angles[j], kTwoPi)));
        c.vz_angles[j] = next;
      }
    }
    if (moved < 1e-13) break;
  }
  // Residual on the computational block.
  Matrix block(m, m);
  for (int r = 0; r < m; ++r)
    for (int cc = 0; cc < m; ++cc)
      block(r, cc) = std::exp(Complex(0, phase_of(r))) * raw(comp[r], comp[cc]) -
                     ideal(comp[r], comp[cc]);
  c.residual = spectral_norm(block);
  return c;
}

Matrix apply_compensation(const Matrix& raw, const PhaseCompensation& comp,
                          const std::vector<int>& dims) {
  const int dim = static_cast<int>(raw.rows());
  Vector d(dim);
  for (int i = 0; i < dim; ++i) {
    auto lv = decode_levels(i, dims);
    double p = comp.global;
    for (size_t j = 0; j < lv.size(); ++j) p += comp.vz_angles[j] * lv[j];
    d[i] = std::exp(Complex(0, p));
  }
  return d.asDiagonal() * raw;
}

double native_gate_duration_ns(GateKind kind, int first_qubit, const DeviceParams& params) {
  const double g_ghz = params.coupling_mhz[first_qubit] * 1e-3;
  switch (kind) {
    case GateKind::SQRT_ISWAP: return 1.0 / (8.0 * g_ghz);          // pi/(4g)
    case GateKind::ISWAP: return 1.0 / (4.0 * g_ghz);               // pi/(2g)
    case GateKind::CZ: return 1.0 / (2.0 * std::sqrt(2.0) * g_ghz);  // pi/(sqrt(2) g)
    default: throw std::invalid_argument("native_gate: unsupported kind");
  }
}

namespace {

// Gate-point frequencies for a two-qubit native gate on (f, f+1). Exchange
// gates meet at the lower idle frequency; the CZ parks the target at idle
// and raises the control so its 1<->2 transition is resonant with the
// target's 0<->1.
std::vector<double> gate_point_freqs(GateKind kind, int first_qubit,
                                     const DeviceParams& params) {
  const double fa = params.idle_freq_ghz[first_qubit];
  const double fb = params.idle_freq_ghz[first_qubit + 1];
  if (kind == GateKind::CZ) return {fb + params.anharmonicity_mhz * 1e-3, fb};
  const double meet = std::min(fa, fb);
  return {meet, meet};
}

}  // namespace

NativeGate native_gate(GateKind kind, int first_qubit, const DeviceParams& params) {
  if (first_qubit < 0 || first_qubit + 1 >= params.qubits())
    throw std::invalid_argument("native_gate: pair out of range");
  const double duration = native_gate_duration_ns(kind, first_qubit, params);
  // Pair model: 3-level control for the CZ, 2-level otherwise.
  std::vector<int> dims = (kind == GateKind::CZ) ? std::vector<int>{3, 2}
                                                 : std::vector<int>{2, 2};
  SubsystemLayout lay(dims, {"A", "B"});
  auto freqs = gate_point_freqs(kind, first_qubit, params);
  FrequencySchedule sched;
  sched.duration_ns = duration;
  sched.per_qubit = {{{0, duration, freqs[0]}}, {{0, duration, freqs[1]}}};
  Matrix raw = evolve(sched, params, lay, 0, first_qubit);
  Matrix ideal = lift_gate(two_qubit_matrix(kind), dims);

  NativeGate out;
  out.dims = dims;
  out.duration_ns = duration;
  out.compensation = phase_compensation(raw, ideal, dims);
  out.unitary = apply_compensation(raw, out.compensation, dims);
  // Worst-case population leaving the computational block.
  std::vector<int> comp;
  std::vector<std::vector<int>> occ;
  computational_subspace(dims, &comp, &occ);
  double leak = 0;
  for (int j : comp) {
    double inblock = 0;
    for (int i : comp) inblock += std::norm(raw(i, j));
    leak = std::max(leak, 1.0 - inblock);
  }
  out.leakage = leak;
  return out;
}

std::vector<double> sample_detunings(const DeviceParams& params, const NoiseModel& noise,
                                     std::mt19937_64& rng) {
  std::vector<double> d(params.qubits(), 0.0);
  if (!noise.dephasing) return d;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < params.qubits(); ++j)
    d[j] = normal(rng) * std::sqrt(2.0) / params.t2_star_ns(j);
  return d;
}

PureState apply_noise(const PureState& state, double elapsed_ns, const DeviceParams& params,
                      const NoiseModel& noise, const std::vector<double>& detunings,
                      std::mt19937_64& rng, int first_qubit) {
  if (elapsed_ns < 0) throw std::invalid_argument("apply_noise: negative elapsed time");
  if (elapsed_ns == 0) return state;
  PureState s = state;
  const auto& lay = s.layout;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int site = 0; site < lay.sites(); ++site) {
    const int qubit = first_qubit + site;
    const int stride = lay.stride(site);
    const int d = lay.dims[site];
    if (noise.dephasing && detunings[qubit] != 0) {
      for (int i = 0; i < s.amplitudes.size(); ++i) {
        const int lv = (i / stride) % d;
        if (lv > 0)
          s.amplitudes[i] *= std::exp(Complex(0, -detunings[qubit] * lv * elapsed_ns));
      }
    }
    if (noise.amplitude_damping) {
      const double gamma = 1.0 - std::exp(-elapsed_ns / params.t1_ns(qubit));
      double p_exc = 0;
      for (int lv = 1; lv < d; ++lv) p_exc += s.population(site, lv);
      const double p_jump = gamma * p_exc;
      if (uni(rng) < p_jump) {
        // quantum jump: lowering operator, then renormalize
        Vector v = Vector::Zero(s.amplitudes.size());
        for (int i = 0; i < s.amplitudes.size(); ++i) {
          const int lv = (i / stride) % d;
          if (lv > 0) v[i - stride] += std::sqrt(double(lv)) * s.amplitudes[i];
        }
        s.amplitudes = v / v.norm();
      } else {
        // no-jump evolution
        for (int i = 0; i < s.amplitudes.size(); ++i) {
          const int lv = (i / stride) % d;
          if (lv > 0) s.amplitudes[i] *= std::pow(std::sqrt(1.0 - gamma), lv);
        }
        s.amplitudes /= s.amplitudes.norm();
      }
    }
  }
  return s;
}

CosineFit fit_cosine(const std::vector<double>& thetas, const std::vector<double>& values) {
  if (thetas.size() != values.size() || thetas.size() < 3)
    throw FitError("fit_cosine: need at least three samples");
  // Linear least squares on P = a + b cos(theta) + c sin(theta).
  Eigen::MatrixXd m(thetas.size(), 3);
  Eigen::VectorXd y(values.size());
  for (size_t i = 0; i < thetas.size(); ++i) {
    m(i, 0) = 1;
    m(i, 1) = std::cos(thetas[i]);
    m(i, 2) = std::sin(thetas[i]);
    y[i] = values[i];
  }
  Eigen::VectorXd sol = m.colPivHouseholderQr().solve(y);
  CosineFit f;
  f.offset = sol[0];
  f.visibility = 2.0 * std::hypot(sol[1], sol[2]);
  if (f.visibility < 1e-9) throw FitError("fit_cosine: no contrast");
  f.phase = std::atan2(-sol[2], sol[1]);
  return f;
}

std::vector<double> ramsey_cz_calibration(const DeviceParams& params, int control_state,
                                          const std::vector<double>& thetas,
                                          const RamseyOptions& opts) {
  if (thetas.empty()) throw std::invalid_argument("ramsey: thetas must be non-empty");
  if (control_state != 0 && control_state != 1)
    throw std::invalid_argument("ramsey: control state must be 0 or 1");
  // Pair window (Q3, Q4): CZ-control qutrit plus the measured ancilla.
  const int q3 = params.qubits() - 2, q4 = params.qubits() - 1;
  SubsystemLayout lay({3, 2}, {"C", "T"});

  Matrix cz = Matrix::Identity(lay.dim(), lay.dim());
  if (opts.use_cz) {
    NativeGate gate = native_gate(GateKind::CZ, q3, params);
    cz = opts.compensated ? gate.unitary
                          : apply_compensation(gate.unitary,
                                               PhaseCompensation{-gate.compensation.global,
                                                                 {-gate.compensation.vz_angles[0],
                                                                  -gate.compensation.vz_angles[1]},
                                                                 0},
                                               lay.dims);
  }
  Matrix prep = lift_gate(rotation_matrix('Y', M_PI), {3});
  Matrix half = lift_gate(rotation_matrix('X', M_PI / 2), {2});
  const double cz_dur = native_gate_duration_ns(GateKind::CZ, q3, params);
  const double pulse_dur = params.single_qubit_duration_ns(q4, M_PI / 2);
  const double prep_dur = params.single_qubit_duration_ns(q3, M_PI);

  auto second_pulse = [](double theta) {
    // pi/2 rotation about the axis at angle theta from X in the XY plane
    Matrix u(2, 2);
    const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
    const Complex i(0, 1);
    u << c, -i * s * std::exp(-i * theta), -i * s * std::exp(i * theta), c;
    return u;
  };

  std::vector<double> curve(thetas.size(), 0.0);
  if (!opts.noise) {
    PureState s = PureState::basis(lay, {0, 0});
    if (control_state == 1) s = apply_unitary(s, prep, {0});
    s = apply_unitary(s, half, {1});
    s = PureState((cz * s.amplitudes).eval(), lay);
    for (size_t i = 0; i < thetas.size(); ++i) {
      PureState f = apply_unitary(s, second_pulse(thetas[i]), {1});
      curve[i] = f.population(1, 1);
    }
    return curve;
  }

  std::mt19937_64 rng(opts.seed);
  for (int t = 0; t < opts.trajectories; ++t) {
    auto det = sample_detunings(params, *opts.noise, rng);
    PureState s = PureState::basis(lay, {0, 0});
    // both control states see the same preparation window
    if (control_state == 1) s = apply_unitary(s, prep, {0});
    s = apply_noise(s, prep_dur, params, *opts.noise, det, rng, q3);
    s = apply_unitary(s, half, {1});
    s = apply_noise(s, pulse_dur, params, *opts.noise, det, rng, q3);
    s = PureState((cz * s.amplitudes).eval(), lay);
    s = apply_noise(s, cz_dur, params, *opts.noise, det, rng, q3);
    for (size_t i = 0; i < thetas.size(); ++i) {
      PureState f = apply_unitary(s, second_pulse(thetas[i]), {1});
      f = apply_noise(f, pulse_dur, params, *opts.noise, det, rng, q3);
      curve[i] += f.population(1, 1);
    }
  }
  for (auto& v : curve) v /= opts.trajectories;
  return curve;
}

double pi_gate_fidelity(int qubit, double duration_ns, const DeviceParams& params,
                        const NoiseModel& noise, int trajectories, std::uint64_t seed) {
  if (duration_ns <= 0) throw std::invalid_argument("pi_gate_fidelity: duration must be > 0");
  SubsystemLayout lay({2}, {"Q"});
  const Matrix flip = rotation_matrix('Y', M_PI);
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i01(0, 1);
  std::vector<Vector> inputs;
  for (auto [a, b] : std::vector<std::pair<Complex, Complex>>{
           {1, 0}, {0, 1}, {r, r}, {r, -r}, {r, r * i01}, {r, -r * i01}}) {
    Vector v(2);
    v << a, b;
    inputs.push_back(v);
  }
  std::mt19937_64 rng(seed);
  double total = 0;
  for (const auto& in : inputs) {
    Vector ideal = flip * in;
    Matrix rho = Matrix::Zero(2, 2);
    for (int t = 0; t < trajectories; ++t) {
      auto det = sample_detunings(params, noise, rng);
      PureState s(in, lay);
      s = apply_unitary(s, flip, {0});
      s = apply_noise(s, duration_ns, params, noise, det, rng, qubit);
      rho.noalias() += s.amplitudes * s.amplitudes.adjoint();
    }
    rho /= trajectories;
    total += (ideal.adjoint() * rho * ideal)(0, 0).real();
  }
  return total / inputs.size();
}

DeviceExecutor::DeviceExecutor(DeviceParams params) : params_(std::move(params)) {
  params_.validate();
  // Qutrit levels live on the CZ-control sites (even chain positions).
  std::vector<int> dims(params_.qubits());
  std::vector<std::string> labels(params_.qubits());
  for (int j = 0; j < params_.qubits(); ++j) {
    dims[j] = (j % 2 == 0) ? 3 : 2;
    labels[j] = "Q" + std::to_string(j + 1);
  }
  layout_ = SubsystemLayout(dims, labels);
}

const DeviceExecutor::SynthGate& DeviceExecutor::synthesized(GateKind kind,
                                                             int first_qubit) const {
  auto key = std::make_pair(static_cast<int>(kind), first_qubit);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  const double duration = native_gate_duration_ns(kind, first_qubit, params_);
  auto pair_freqs = gate_point_freqs(kind, first_qubit, params_);
  FrequencySchedule sched = FrequencySchedule::constant(params_, duration);
  sched.per_qubit[first_qubit] = {{0, duration, pair_freqs[0]}};
  sched.per_qubit[first_qubit + 1] = {{0, duration, pair_freqs[1]}};
  Matrix raw = evolve(sched, params_, layout_, 0, 0);

  GateSpec spec(kind, {layout_.labels[first_qubit], layout_.labels[first_qubit + 1]});
  Matrix gm = lift_gate(gate_matrix(spec),
                        {layout_.dims[first_qubit], layout_.dims[first_qubit + 1]});
  Circuit single;
  single.gates.push_back(spec);
  Matrix ideal = circuit_unitary(single, layout_);

  PhaseCompensation comp = phase_compensation(raw, ideal, layout_.dims);
  SynthGate sg{apply_compensation(raw, comp, layout_.dims), comp.residual};
  sg.raw = raw;
  auto [pos, ok] = cache_.emplace(key, std::move(sg));
  return pos->second;
}

const Matrix& DeviceExecutor::gate_unitary(const GateSpec& gate) const {
  const int site0 = layout_.site_index(gate.targets[0]);
  if (gate_arity(gate.kind) == 2) return synthesized(gate.kind, site0).unitary;
  std::ostringstream key;
  key << gate_kind_name(gate.kind) << ':' << site0 << ':' << gate.angle;
  auto it = single_cache_.find(key.str());
  if (it == single_cache_.end()) {
    Matrix u = (gate.kind == GateKind::VIRTUAL_Z && layout_.dims[site0] == 3)
                   ? Vector{{1.0, std::exp(Complex(0, gate.angle)),
                             std::exp(Complex(0, 2 * gate.angle))}}
                         .asDiagonal()
                         .toDenseMatrix()
                   : lift_gate(gate_matrix(gate), {layout_.dims[site0]});
    it = single_cache_.emplace(key.str(), std::move(u)).first;
  }
  return it->second;
}

Matrix DeviceExecutor::two_qubit_chain_unitary(GateKind kind, int first_qubit,
                                               bool compensated) const {
  const SynthGate& sg = synthesized(kind, first_qubit);
  return compensated ? sg.unitary : sg.raw;
}

double DeviceExecutor::gate_residual(GateKind kind, int first_qubit) const {
  return synthesized(kind, first_qubit).residual;
}

double DeviceExecutor::gate_duration_ns(const GateSpec& gate) const {
  if (gate.kind == GateKind::VIRTUAL_Z) return 0;
  if (gate_arity(gate.kind) == 2)
    return native_gate_duration_ns(gate.kind, layout_.site_index(gate.targets[0]), params_);
  const int q = layout_.site_index(gate.targets[0]);
  const double angle = (gate.kind == GateKind::H) ? M_PI / 2 : gate.angle;
  return params_.single_qubit_duration_ns(q, angle);
}

PureState DeviceExecutor::run(const Circuit& circuit, PureState state,
                              const NoiseModel* noise, const std::vector<double>* detunings,
                              std::mt19937_64* rng) const {
  for (const auto& g : circuit.gates) {
    const int site0 = layout_.site_index(g.targets[0]);
    if (g.kind == GateKind::VIRTUAL_Z) {
      // frame rotation: e^{i angle * n} on the site
      const int stride = state.layout.stride(site0);
      const int d = state.layout.dims[site0];
      for (int i = 0; i < state.amplitudes.size(); ++i) {
        const int lv = (i / stride) % d;
        if (lv > 0) state.amplitudes[i] *= std::exp(Complex(0, g.angle * lv));
      }
      continue;
    }
    if (gate_arity(g.kind) == 2) {
      const Matrix& u = synthesized(g.kind, site0).unitary;
      state = PureState((u * state.amplitudes).eval(), layout_);
    } else {
      Matrix u = lift_gate(gate_matrix(g), {layout_.dims[site0]});
      state = apply_unitary(state, u, {site0});
    }
    if (noise) {
      double dur = g.duration_ns > 0 ? g.duration_ns : gate_duration_ns(g);
      state = apply_noise(state, dur, params_, *noise, *detunings, *rng);
    }
  }
  return state;
}

}  // namespace hhlsim
