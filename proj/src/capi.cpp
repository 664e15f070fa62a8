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

#include "hhlsim.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hhlsim/pipeline.hpp"

struct hhlsim_config {
  hhlsim::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HHLSIM_OK;
  } catch (const hhlsim::ConfigError& e) {
    g_last_error = e.what();
    return HHLSIM_ERR_CONFIG;
  } catch (const hhlsim::FitError& e) {
    g_last_error = e.what();
    return HHLSIM_ERR_FIT;
  } catch (const hhlsim::SimulationError& e) {
    g_last_error = e.what();
    return HHLSIM_ERR_SIMULATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HHLSIM_ERR_SIMULATION;
  }
}

void ensure_parent_dir(const char* path) {
  std::error_code ec;
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* hhlsim_version(void) { return hhlsim::kVersion; }

const char* hhlsim_last_error(void) { return g_last_error.c_str(); }

void hhlsim_string_free(char* s) { std::free(s); }

int hhlsim_config_create(hhlsim_config** out) {
  return guarded([&] {
    if (!out) throw hhlsim::ConfigError("config_create: null output pointer");
    *out = new hhlsim_config{hhlsim::ExperimentConfig::defaults()};
  });
}

int hhlsim_config_load(const char* path, hhlsim_config** out) {
  return guarded([&] {
    if (!path || !out) throw hhlsim::ConfigError("config_load: null argument");
    *out = new hhlsim_config{hhlsim::ExperimentConfig::load(path)};
  });
}

int hhlsim_config_parse(const char* json_text, hhlsim_config** out) {
  return guarded([&] {
    if (!json_text || !out) throw hhlsim::ConfigError("config_parse: null argument");
    *out = new hhlsim_config{hhlsim::ExperimentConfig::from_json(json_text)};
  });
}

void hhlsim_config_free(hhlsim_config* cfg) { delete cfg; }

int hhlsim_config_set(hhlsim_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    if (!cfg || !key || !value) throw hhlsim::ConfigError("config_set: null argument");
    const std::string k = key, v = value;
    auto& c = cfg->cfg;
    auto parse = [&](auto&& convert) {
      try {
        return convert(v);
      } catch (const std::exception&) {
        throw hhlsim::ConfigError("config_set: bad numeric value for " + k + ": " + v);
      }
    };
    auto to_int = [&] { return parse([](const std::string& s) { return std::stoi(s); }); };
    if (k == "backend") {
      c.backend = hhlsim::backend_from_name(v);
    } else if (k == "shots") {
      c.shots = to_int();
    } else if (k == "seed") {
      c.seed = parse([](const std::string& s) { return std::stoull(s); });
    } else if (k == "out") {
      c.out_dir = v;
    } else if (k == "c") {
      c.c = parse([](const std::string& s) { return std::stod(s); });
    } else if (k == "bootstrap_resamples") {
      c.bootstrap_resamples = to_int();
    } else if (k == "ramsey_points") {
      c.ramsey_points = to_int();
    } else if (k == "device") {
      std::ifstream in(v);
      if (!in) throw hhlsim::ConfigError("config_set: device file not found: " + v);
      std::stringstream ss;
      ss << in.rdbuf();
      c.device = hhlsim::device_params_from_json(ss.str());
    } else {
      throw hhlsim::ConfigError("config_set: unknown key " + k);
    }
    // Staged setters may pass through invalid intermediate combinations;
    // entry points re-validate before running.
  });
}

int hhlsim_config_to_json(const hhlsim_config* cfg, char** out_json) {
  return guarded([&] {
    if (!cfg || !out_json) throw hhlsim::ConfigError("config_to_json: null argument");
    *out_json = dup_string(cfg->cfg.to_json());
  });
}

int hhlsim_run_pipeline(const hhlsim_config* cfg, const char* out_dir) {
  return guarded([&] {
    if (!cfg) throw hhlsim::ConfigError("run_pipeline: null config");
    hhlsim::ExperimentConfig c = cfg->cfg;
    if (out_dir) c.out_dir = out_dir;
    hhlsim::ReportBundle bundle = hhlsim::run_pipeline(c);
    hhlsim::emit_figures_data(bundle, c.out_dir);
  });
}

int hhlsim_ramsey(const hhlsim_config* cfg, int use_cz, const char* out_csv,
                  double* delta_phi) {
  return guarded([&] {
    if (!cfg) throw hhlsim::ConfigError("ramsey: null config");
    hhlsim::RamseyData data = hhlsim::ramsey_report(cfg->cfg, use_cz != 0);
    if (delta_phi) *delta_phi = data.delta_phi;
    if (out_csv) {
      std::ostringstream os;
      os.precision(17);
      os << "theta,p1_control0,p1_control1\n";
      for (size_t i = 0; i < data.thetas.size(); ++i)
        os << data.thetas[i] << ',' << data.p_control0[i] << ',' << data.p_control1[i]
           << '\n';
      os << "# phase0=" << data.phase0 << ",phase1=" << data.phase1
         << ",delta_phi=" << data.delta_phi << '\n';
      ensure_parent_dir(out_csv);
      std::ofstream out(out_csv, std::ios::binary);
      if (!out) throw hhlsim::SimulationError("ramsey: cannot write output file");
      out << os.str();
    }
  });
}

int hhlsim_qpt_fit_csv(const hhlsim_config* cfg, const char* dataset_csv_path,
                       const char* out_json, double* process_fidelity) {
  return guarded([&] {
    if (!cfg || !dataset_csv_path) throw hhlsim::ConfigError("qpt: null argument");
    std::ifstream in(dataset_csv_path);
    if (!in) throw hhlsim::ConfigError(std::string("qpt: cannot open ") + dataset_csv_path);
    std::stringstream ss;
    ss << in.rdbuf();
    hhlsim::TomographyDataset ds = hhlsim::TomographyDataset::from_csv(ss.str());

    auto angles = cfg->cfg.inputs.empty() ? hhlsim::default_input_angles()
                                          : cfg->cfg.inputs;
    if (ds.entries.size() != angles.size())
      throw hhlsim::FitError("qpt: dataset entry count does not match the input set");
    std::vector<hhlsim::Matrix2> in_rhos, out_rhos;
    for (size_t j = 0; j < ds.entries.size(); ++j) {
      hhlsim::Vector2 b = hhlsim::bloch_state(angles[j].first, angles[j].second);
      in_rhos.push_back((b * b.adjoint()).eval());
      auto [rho, success] = hhlsim::qst_single(ds.entries[j]);
      out_rhos.push_back((success * rho.matrix.block(0, 0, 2, 2)).eval());
    }
    hhlsim::ChiMatrix chi = hhlsim::qpt_fit(in_rhos, out_rhos);
    hhlsim::LinearSystemInstance inst{cfg->cfg.a, hhlsim::Vector2(1.0, 0.0), cfg->cfg.c};
    if (process_fidelity)
      *process_fidelity = hhlsim::process_fidelity(hhlsim::ideal_chi(inst), chi);
    if (out_json) {
      ensure_parent_dir(out_json);
      std::ofstream out(out_json, std::ios::binary);
      if (!out) throw hhlsim::SimulationError("qpt: cannot write output file");
      out << hhlsim::chi_to_json(chi) << '\n';
    }
  });
}

int hhlsim_report(const hhlsim_config* cfg, char** out_json) {
  return guarded([&] {
    if (!cfg || !out_json) throw hhlsim::ConfigError("report: null argument");
    hhlsim::ReportBundle bundle = hhlsim::run_pipeline(cfg->cfg);
    *out_json = dup_string(hhlsim::bundle_to_json(bundle));
  });
}

}  // extern "C"
