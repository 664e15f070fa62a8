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

#ifndef HHLSIM_PIPELINE_HPP
#define HHLSIM_PIPELINE_HPP

#include "hhlsim/tomography.hpp"

namespace hhlsim {

inline constexpr const char* kVersion = "1.0.0";

/// Stable stream splitting for the single top-level seed: every consumer
/// derives its own generator from (base, stream ids).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

struct ExperimentConfig {
  DeviceParams device;
  Matrix2 a;          // system matrix; b comes from the input set
  double c = 1.0;
  Backend backend = Backend::kIdealMatrix;
  int shots = 10000;  // 0 = exact probabilities (not allowed when sampling)
  std::uint64_t seed = 1;
  std::vector<std::pair<double, double>> inputs;  // (theta, phi); default 18
  std::string out_dir = "out";
  int bootstrap_resamples = 300;
  int ramsey_points = 25;

  static ExperimentConfig defaults();
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);
  std::string to_json() const;
  void validate() const;
};

std::string device_params_to_json(const DeviceParams& params);
DeviceParams device_params_from_json(const std::string& text);

struct InputRecord {
  int index = 0;
  double theta = 0, phi = 0;
  double bloch[3] = {0, 0, 0};
  double fidelity = 0, fidelity_std = 0;
  double success = 0;
};

struct RamseyData {
  std::vector<double> thetas;
  std::vector<double> p_control0, p_control1;
  double phase0 = 0, phase1 = 0, delta_phi = 0;
  double visibility0 = 0, visibility1 = 0;
};

struct ReportBundle {
  std::vector<InputRecord> records;
  ChiMatrix chi_id, chi_exp;
  double process_fid = 0, process_fid_std = 0;
  TomographyDataset dataset;
  RamseyData ramsey;
  std::string backend;
  int shots = 0;
  std::uint64_t seed = 0;
};

/// Ramsey scan of the ancilla across both control states; use_cz = false
/// replaces the entangling gate with the identity.
RamseyData ramsey_report(const ExperimentConfig& config, bool use_cz = true);

/// The 18-input sweep on the configured backend: tomography dataset, QST
/// per input, QPT, fidelities with bootstrap error bars, Ramsey curves.
ReportBundle run_pipeline(const ExperimentConfig& config);

/// Writes fig3b.csv, fig3c.csv, fig4.json, ramsey.csv, dataset.csv,
/// bundle.json (all deterministic) and run_meta.json (timestamped).
void emit_figures_data(const ReportBundle& bundle, const std::string& out_dir);

std::string bundle_to_json(const ReportBundle& bundle);

}  // namespace hhlsim

#endif  // HHLSIM_PIPELINE_HPP
