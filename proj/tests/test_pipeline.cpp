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

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "hhlsim/pipeline.hpp"

using namespace hhlsim;
namespace fs = std::filesystem;

namespace {
const double kPi = 3.14159265358979323846;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}
}  // namespace

TEST_CASE("seed derivation is a stable splitter") {
  CHECK(derive_seed(42, 1, 2) == derive_seed(42, 1, 2));
  CHECK(derive_seed(42, 1, 2) != derive_seed(42, 1, 3));
  CHECK(derive_seed(42, 1, 2) != derive_seed(42, 2, 2));
  CHECK(derive_seed(42, 1, 2) != derive_seed(43, 1, 2));
  CHECK(derive_seed(0, 0, 0) != 0);
}

TEST_CASE("config defaults validate and round trip through json") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  CHECK_NOTHROW(cfg.validate());
  cfg.backend = Backend::kDeviceNoisy;
  cfg.shots = 777;
  cfg.seed = 99;
  cfg.c = 0.8;
  cfg.bootstrap_resamples = 120;
  cfg.inputs = default_input_angles();  // empty means "use the default set"
  ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.backend == cfg.backend);
  CHECK(back.shots == 777);
  CHECK(back.seed == 99);
  CHECK(back.c == doctest::Approx(0.8));
  CHECK(back.bootstrap_resamples == 120);
  CHECK((back.a - cfg.a).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(back.inputs.size() == cfg.inputs.size());
  CHECK(back.inputs[3].first == doctest::Approx(cfg.inputs[3].first));
}

TEST_CASE("config validation rejects contradictory settings") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.backend = Backend::kDeviceNoisy;
  cfg.shots = 0;  // exact statistics cannot be sampled from trajectories
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig::defaults();
  cfg.bootstrap_resamples = 10;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ExperimentConfig::defaults();
  cfg.ramsey_points = 3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{not json"), ConfigError);
}

TEST_CASE("device params json round trip") {
  DeviceParams p = DeviceParams::defaults();
  p.t1_us[2] = 9.9;
  p.anharmonicity_mhz = 260;
  DeviceParams back = device_params_from_json(device_params_to_json(p));
  CHECK(back.t1_us[2] == doctest::Approx(9.9));
  CHECK(back.anharmonicity_mhz == doctest::Approx(260));
  CHECK(back.idle_freq_ghz == p.idle_freq_ghz);
  CHECK(back.coupling_mhz == p.coupling_mhz);
}

TEST_CASE("exact ideal pipeline reproduces the closed-form results") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.backend = Backend::kIdealMatrix;
  cfg.shots = 0;
  ReportBundle bundle = run_pipeline(cfg);
  REQUIRE(bundle.records.size() == 18);
  const InputRecord& first = bundle.records[0];
  CHECK(first.bloch[0] == doctest::Approx(-0.6).epsilon(1e-9));
  CHECK(first.bloch[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(first.bloch[2] == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(first.success == doctest::Approx(0.625).epsilon(1e-9));
  double mean_success = 0;
  for (const auto& rec : bundle.records) {
    CHECK(rec.fidelity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rec.fidelity_std <= 1e-9);
    mean_success += rec.success;
  }
  CHECK(bundle.chi_exp.trace() == doctest::Approx(0.625).epsilon(1e-9));
  CHECK(bundle.chi_exp.trace() ==
        doctest::Approx(mean_success / bundle.records.size()).epsilon(1e-9));
  CHECK(bundle.process_fid == doctest::Approx(1.0).epsilon(1e-9));
  for (const auto& entry : bundle.dataset.entries) CHECK(entry.exact);
}

TEST_CASE("sampled ideal pipeline is deterministic in the seed") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.backend = Backend::kIdealMatrix;
  cfg.shots = 400;
  cfg.seed = 7;
  cfg.bootstrap_resamples = 100;
  std::string a = bundle_to_json(run_pipeline(cfg));
  std::string b = bundle_to_json(run_pipeline(cfg));
  CHECK(a == b);
  cfg.seed = 8;
  CHECK(bundle_to_json(run_pipeline(cfg)) != a);
}

TEST_CASE("figure data files are written and stable") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.backend = Backend::kIdealMatrix;
  cfg.shots = 0;
  ReportBundle bundle = run_pipeline(cfg);
  fs::path dir1 = fs::temp_directory_path() / "hhlsim_test_out1";
  fs::path dir2 = fs::temp_directory_path() / "hhlsim_test_out2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  emit_figures_data(bundle, dir1.string());
  emit_figures_data(bundle, dir2.string());
  for (const char* name :
       {"fig3b.csv", "fig3c.csv", "fig4.json", "ramsey.csv", "dataset.csv", "bundle.json"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir1 / name));
    CHECK(slurp(dir1 / name) == slurp(dir2 / name));
  }
  CHECK(fs::exists(dir1 / "run_meta.json"));
  std::string bundle_json = slurp(dir1 / "bundle.json");
  CHECK(bundle_json.find("\"process_fidelity\"") != std::string::npos);
  CHECK(bundle_json.find("\"records\"") != std::string::npos);
  CHECK(bundle_json.find("\"chi_exp\"") != std::string::npos);
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST_CASE("ramsey report separates the two control branches by pi") {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  cfg.backend = Backend::kDeviceNoiseless;
  cfg.shots = 0;
  cfg.ramsey_points = 15;
  RamseyData with_cz = ramsey_report(cfg, true);
  CHECK(with_cz.delta_phi == doctest::Approx(kPi).epsilon(1e-6));
  CHECK(with_cz.thetas.size() == 15);
  CHECK(with_cz.visibility0 > 0.9);
  RamseyData without = ramsey_report(cfg, false);
  CHECK(std::abs(without.delta_phi) < 1e-6);
}
