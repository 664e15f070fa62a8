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

#include "hhlsim/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hhlsim/qsim.hpp"
#include "nlohmann/json.hpp"

namespace hhlsim {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return mix64(base ^ mix64(a ^ mix64(b)));
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.device = DeviceParams::defaults();
  cfg.a << 1.5, 0.5, 0.5, 1.5;
  return cfg;
}

namespace {

using nlohmann::json;

json matrix2_to_json(const Matrix2& m) {
  json re = json::array(), im = json::array();
  for (int r = 0; r < 2; ++r) {
    json rr = json::array(), ri = json::array();
    for (int c = 0; c < 2; ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return json{{"real", re}, {"imag", im}};
}

Matrix2 matrix2_from_json(const json& j) {
  Matrix2 m = Matrix2::Zero();
  const auto& re = j.at("real");
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) m(r, c) = Complex(re.at(r).at(c).get<double>(), 0);
  if (j.contains("imag")) {
    const auto& im = j.at("imag");
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        m(r, c) += Complex(0, im.at(r).at(c).get<double>());
  }
  return m;
}

json device_to_json_obj(const DeviceParams& p) {
  return json{{"idle_freq_ghz", p.idle_freq_ghz},
              {"coupling_mhz", p.coupling_mhz},
              {"t1_us", p.t1_us},
              {"t2_star_us", p.t2_star_us},
              {"anharmonicity_mhz", p.anharmonicity_mhz},
              {"xy_crosstalk", p.xy_crosstalk},
              {"fast_pulse_ns", p.fast_pulse_ns},
              {"slow_pi_pulse_ns", p.slow_pi_pulse_ns}};
}

DeviceParams device_from_json_obj(const json& j) {
  DeviceParams p = DeviceParams::defaults();
  if (j.contains("idle_freq_ghz")) p.idle_freq_ghz = j.at("idle_freq_ghz").get<std::vector<double>>();
  if (j.contains("coupling_mhz")) p.coupling_mhz = j.at("coupling_mhz").get<std::vector<double>>();
  if (j.contains("t1_us")) p.t1_us = j.at("t1_us").get<std::vector<double>>();
  if (j.contains("t2_star_us")) p.t2_star_us = j.at("t2_star_us").get<std::vector<double>>();
  if (j.contains("anharmonicity_mhz")) p.anharmonicity_mhz = j.at("anharmonicity_mhz").get<double>();
  if (j.contains("xy_crosstalk")) p.xy_crosstalk = j.at("xy_crosstalk").get<std::vector<double>>();
  if (j.contains("fast_pulse_ns")) p.fast_pulse_ns = j.at("fast_pulse_ns").get<double>();
  if (j.contains("slow_pi_pulse_ns")) p.slow_pi_pulse_ns = j.at("slow_pi_pulse_ns").get<double>();
  p.validate();
  return p;
}

}  // namespace

std::string device_params_to_json(const DeviceParams& params) {
  return device_to_json_obj(params).dump(2);
}

DeviceParams device_params_from_json(const std::string& text) {
  try {
    return device_from_json_obj(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("device json: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config json: ") + e.what());
  }
  try {
    ExperimentConfig cfg = defaults();
    if (j.contains("device")) {
      if (j.at("device").is_string()) {
        std::ifstream in(j.at("device").get<std::string>());
        if (!in) throw ConfigError("config: device file not found");
        std::stringstream ss;
        ss << in.rdbuf();
        cfg.device = device_params_from_json(ss.str());
      } else {
        cfg.device = device_from_json_obj(j.at("device"));
      }
    }
    if (j.contains("instance")) {
      const auto& inst = j.at("instance");
      if (inst.contains("a")) cfg.a = matrix2_from_json(inst.at("a"));
      if (inst.contains("c")) cfg.c = inst.at("c").get<double>();
    }
    if (j.contains("backend")) cfg.backend = backend_from_name(j.at("backend").get<std::string>());
    if (j.contains("shots")) cfg.shots = j.at("shots").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
    if (j.contains("bootstrap_resamples"))
      cfg.bootstrap_resamples = j.at("bootstrap_resamples").get<int>();
    if (j.contains("ramsey_points")) cfg.ramsey_points = j.at("ramsey_points").get<int>();
    if (j.contains("inputs")) {
      cfg.inputs.clear();
      for (const auto& pair : j.at("inputs"))
        cfg.inputs.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config json: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["device"] = device_to_json_obj(device);
  j["instance"] = {{"a", matrix2_to_json(a)}, {"c", c}};
  j["backend"] = backend_name(backend);
  j["shots"] = shots;
  j["seed"] = seed;
  j["out"] = out_dir;
  j["bootstrap_resamples"] = bootstrap_resamples;
  j["ramsey_points"] = ramsey_points;
  if (!inputs.empty()) {
    json arr = json::array();
    for (const auto& [t, p] : inputs) arr.push_back({t, p});
    j["inputs"] = arr;
  }
  return j.dump(2);
}

void ExperimentConfig::validate() const {
  device.validate();
  LinearSystemInstance inst{a, Vector2(1.0, 0.0), c};
  inst.validate();
  if (shots < 0) throw ConfigError("config: shots must be non-negative");
  if (backend == Backend::kDeviceNoisy && shots == 0)
    throw ConfigError("config: sampling backend requires shots > 0");
  if (bootstrap_resamples < 100)
    throw ConfigError("config: bootstrap_resamples must be at least 100");
  if (ramsey_points < 5) throw ConfigError("config: ramsey_points must be at least 5");
}

namespace {

// Joint readout distribution over (Q1, Q4); any leaked |2> reads as |1>.
std::array<double, 4> joint_probs(const PureState& state) {
  const auto& lay = state.layout;
  const int q1 = 0, q4 = lay.sites() - 1;
  std::array<double, 4> p{0, 0, 0, 0};
  for (int i = 0; i < state.amplitudes.size(); ++i) {
    const int l1 = std::min(1, (i / lay.stride(q1)) % lay.dims[q1]);
    const int l4 = std::min(1, (i / lay.stride(q4)) % lay.dims[q4]);
    p[l1 * 2 + l4] += std::norm(state.amplitudes[i]);
  }
  return p;
}

std::array<double, 4> sample_counts(const std::array<double, 4>& probs, int shots,
                                    std::mt19937_64& rng) {
  std::array<double, 4> counts{0, 0, 0, 0};
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int s = 0; s < shots; ++s) {
    double u = uni(rng), cum = 0;
    int pick = 3;
    for (int k = 0; k < 4; ++k) {
      cum += probs[k];
      if (u < cum) { pick = k; break; }
    }
    counts[pick] += 1;
  }
  return counts;
}

Matrix2 prep_unitary(const Vector2& b) {
  Matrix2 p;
  p.col(0) = b;
  p.col(1) << -std::conj(b[1]), std::conj(b[0]);
  return p;
}

DatasetEntry simulate_entry(const ExperimentConfig& config, const DeviceExecutor* exec,
                            int index, const Vector2& b) {
  LinearSystemInstance inst{config.a, b, config.c};
  Circuit circuit = compile(inst);
  circuit.postselection.reset();
  DatasetEntry entry;
  entry.input_index = index;
  const char keys[3] = {'X', 'Y', 'Z'};

  if (config.backend != Backend::kDeviceNoisy) {
    PureState final = [&] {
      if (config.backend == Backend::kIdealMatrix) {
        SubsystemLayout lay = SubsystemLayout::qubits(4);
        PureState s = PureState::basis(lay, {0, 0, 0, 0});
        s = apply_unitary(s, prep_unitary(b), {0});
        Matrix u = circuit_unitary(circuit, lay);
        return PureState((u * s.amplitudes).eval(), lay);
      }
      const auto& lay = exec->layout();
      PureState s = PureState::basis(lay, {0, 0, 0, 0});
      s = apply_unitary(s, lift_gate(prep_unitary(b), {lay.dims[0]}), {0});
      return exec->run(circuit, std::move(s));
    }();
    for (int k = 0; k < 3; ++k) {
      Matrix2 rot = MeasurementSetting{keys[k] == 'X' ? Pauli::X
                                       : keys[k] == 'Y' ? Pauli::Y
                                                        : Pauli::Z}
                        .pre_rotation();
      Matrix lifted = lift_gate(rot, {final.layout.dims[0]});
      PureState rotated = apply_unitary(final, lifted, {0});
      auto probs = joint_probs(rotated);
      if (config.shots == 0) {
        entry.exact = true;
        entry.settings[keys[k]] = probs;
      } else {
        std::mt19937_64 rng(derive_seed(config.seed, 100 + index, k));
        entry.settings[keys[k]] = sample_counts(probs, config.shots, rng);
      }
    }
    return entry;
  }

  // Noisy backend: one sampled shot per trajectory and setting.
  const auto& lay = exec->layout();
  NoiseModel noise;
  std::mt19937_64 rng(derive_seed(config.seed, 100 + index, 99));
  Matrix prep = lift_gate(prep_unitary(b), {lay.dims[0]});
  const double prep_ns = exec->params().single_qubit_duration_ns(0, M_PI);
  std::array<Matrix, 3> rots;
  for (int k = 0; k < 3; ++k)
    rots[k] = lift_gate(MeasurementSetting{static_cast<Pauli>(k + 1)}.pre_rotation(),
                        {lay.dims[0]});
  const double rot_ns = exec->params().single_qubit_duration_ns(0, M_PI / 2);
  for (char k : keys) entry.settings[k] = {0, 0, 0, 0};
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int t = 0; t < config.shots; ++t) {
    auto det = sample_detunings(exec->params(), noise, rng);
    PureState s = PureState::basis(lay, {0, 0, 0, 0});
    s = apply_unitary(s, prep, {0});
    s = apply_noise(s, prep_ns, exec->params(), noise, det, rng);
    s = exec->run(circuit, std::move(s), &noise, &det, &rng);
    for (int k = 0; k < 3; ++k) {
      PureState rotated = apply_unitary(s, rots[k], {0});
      if (k != 2) rotated = apply_noise(rotated, rot_ns, exec->params(), noise, det, rng);
      auto probs = joint_probs(rotated);
      double u = uni(rng), cum = 0;
      int pick = 3;
      for (int o = 0; o < 4; ++o) {
        cum += probs[o];
        if (u < cum) { pick = o; break; }
      }
      entry.settings[keys[k]][pick] += 1;
    }
  }
  return entry;
}

double wrap_angle(double a) { return std::atan2(std::sin(a), std::cos(a)); }

}  // namespace

RamseyData ramsey_report(const ExperimentConfig& config, bool use_cz) {
  config.validate();
  RamseyData data;
  for (int k = 0; k < config.ramsey_points; ++k)
    data.thetas.push_back(k * 2 * M_PI / config.ramsey_points);
  RamseyOptions opts;
  opts.use_cz = use_cz;
  NoiseModel noise;
  if (config.backend == Backend::kDeviceNoisy) {
    opts.noise = &noise;
    opts.trajectories = std::min(config.shots, 2000);
  }
  opts.seed = derive_seed(config.seed, 4000);
  data.p_control0 = ramsey_cz_calibration(config.device, 0, data.thetas, opts);
  opts.seed = derive_seed(config.seed, 4001);
  data.p_control1 = ramsey_cz_calibration(config.device, 1, data.thetas, opts);
  CosineFit f0 = fit_cosine(data.thetas, data.p_control0);
  CosineFit f1 = fit_cosine(data.thetas, data.p_control1);
  data.phase0 = f0.phase;
  data.phase1 = f1.phase;
  data.visibility0 = f0.visibility;
  data.visibility1 = f1.visibility;
  data.delta_phi = std::abs(wrap_angle(f1.phase - f0.phase));
  return data;
}

ReportBundle run_pipeline(const ExperimentConfig& config) {
  config.validate();
  ReportBundle bundle;
  bundle.backend = backend_name(config.backend);
  bundle.shots = config.shots;
  bundle.seed = config.seed;

  auto angles = config.inputs.empty() ? default_input_angles() : config.inputs;
  std::optional<DeviceExecutor> exec;
  if (config.backend != Backend::kIdealMatrix) exec.emplace(config.device);

  std::vector<Matrix2> in_rhos, out_rhos;
  for (size_t j = 0; j < angles.size(); ++j) {
    const auto& [theta, phi] = angles[j];
    Vector2 b = bloch_state(theta, phi);
    DatasetEntry entry =
        simulate_entry(config, exec ? &*exec : nullptr, static_cast<int>(j + 1), b);
    bundle.dataset.entries.push_back(entry);

    auto [rho, success] = qst_single(entry);
    LinearSystemInstance inst{config.a, b, config.c};
    Vector2 x = classical_solve(inst.a, inst.b).first;

    InputRecord rec;
    rec.index = static_cast<int>(j + 1);
    rec.theta = theta;
    rec.phi = phi;
    for (int i = 0; i < 3; ++i)
      rec.bloch[i] =
          (pauli_matrix(static_cast<Pauli>(i + 1)) * rho.matrix).trace().real();
    rec.fidelity = state_fidelity(rho, x);
    rec.fidelity_std = bundle.dataset.entries.back().exact
                           ? 0.0
                           : bootstrap_state_fidelity_std(
                                 entry, x, config.bootstrap_resamples,
                                 derive_seed(config.seed, 2000 + j));
    rec.success = success;
    bundle.records.push_back(rec);

    in_rhos.push_back((b * b.adjoint()).eval());
    out_rhos.push_back((success * rho.matrix.block(0, 0, 2, 2)).eval());
  }

  LinearSystemInstance inst{config.a, Vector2(1.0, 0.0), config.c};
  bundle.chi_id = ideal_chi(inst);
  bundle.chi_exp = qpt_fit(in_rhos, out_rhos);
  bundle.process_fid = process_fidelity(bundle.chi_id, bundle.chi_exp);
  bundle.process_fid_std =
      (config.shots == 0 && config.backend != Backend::kDeviceNoisy)
          ? 0.0
          : bootstrap_process_fidelity_std(bundle.dataset, in_rhos, bundle.chi_id,
                                           config.bootstrap_resamples,
                                           derive_seed(config.seed, 3000));
  bundle.ramsey = ramsey_report(config);
  return bundle;
}

std::string bundle_to_json(const ReportBundle& bundle) {
  json j;
  j["version"] = kVersion;
  j["backend"] = bundle.backend;
  j["shots"] = bundle.shots;
  j["seed"] = bundle.seed;
  json recs = json::array();
  for (const auto& r : bundle.records)
    recs.push_back({{"index", r.index},
                    {"theta", r.theta},
                    {"phi", r.phi},
                    {"bloch", {r.bloch[0], r.bloch[1], r.bloch[2]}},
                    {"fidelity", r.fidelity},
                    {"fidelity_std", r.fidelity_std},
                    {"success_probability", r.success}});
  j["records"] = recs;
  j["chi_id"] = json::parse(chi_to_json(bundle.chi_id));
  j["chi_exp"] = json::parse(chi_to_json(bundle.chi_exp));
  j["process_fidelity"] = bundle.process_fid;
  j["process_fidelity_std"] = bundle.process_fid_std;
  j["ramsey"] = {{"thetas", bundle.ramsey.thetas},
                 {"p_control0", bundle.ramsey.p_control0},
                 {"p_control1", bundle.ramsey.p_control1},
                 {"phase0", bundle.ramsey.phase0},
                 {"phase1", bundle.ramsey.phase1},
                 {"delta_phi", bundle.ramsey.delta_phi}};
  return j.dump(2);
}

void emit_figures_data(const ReportBundle& bundle, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    if (!out) throw SimulationError("emit: cannot write " + name);
    out << content;
  };

  std::ostringstream f3b;
  f3b.precision(17);
  f3b << "j,operator,value\n";
  for (const auto& r : bundle.records) {
    f3b << r.index << ",X," << r.bloch[0] << '\n';
    f3b << r.index << ",Y," << r.bloch[1] << '\n';
    f3b << r.index << ",Z," << r.bloch[2] << '\n';
  }
  write("fig3b.csv", f3b.str());

  std::ostringstream f3c;
  f3c.precision(17);
  f3c << "j,fidelity,std\n";
  for (const auto& r : bundle.records)
    f3c << r.index << ',' << r.fidelity << ',' << r.fidelity_std << '\n';
  write("fig3c.csv", f3c.str());

  json f4;
  f4["chi_id"] = json::parse(chi_to_json(bundle.chi_id));
  f4["chi_exp"] = json::parse(chi_to_json(bundle.chi_exp));
  f4["process_fidelity"] = bundle.process_fid;
  f4["process_fidelity_std"] = bundle.process_fid_std;
  write("fig4.json", f4.dump(2) + "\n");

  std::ostringstream rc;
  rc.precision(17);
  rc << "theta,p1_control0,p1_control1\n";
  for (size_t i = 0; i < bundle.ramsey.thetas.size(); ++i)
    rc << bundle.ramsey.thetas[i] << ',' << bundle.ramsey.p_control0[i] << ','
       << bundle.ramsey.p_control1[i] << '\n';
  rc << "# phase0=" << bundle.ramsey.phase0 << ",phase1=" << bundle.ramsey.phase1
     << ",delta_phi=" << bundle.ramsey.delta_phi << '\n';
  write("ramsey.csv", rc.str());

  write("dataset.csv", bundle.dataset.to_csv());
  write("bundle.json", bundle_to_json(bundle) + "\n");

  const auto now = std::chrono::system_clock::now();
  json meta;
  meta["version"] = kVersion;
  meta["seed"] = bundle.seed;
  meta["backend"] = bundle.backend;
  meta["timestamp_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count();
  write("run_meta.json", meta.dump(2) + "\n");
}

}  // namespace hhlsim
