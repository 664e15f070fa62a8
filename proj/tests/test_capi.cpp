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
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "hhlsim.h"

namespace fs = std::filesystem;

namespace {
const double kPi = 3.14159265358979323846;

struct ConfigHandle {
  hhlsim_config* cfg = nullptr;
  ConfigHandle() { REQUIRE(hhlsim_config_create(&cfg) == HHLSIM_OK); }
  ~ConfigHandle() { hhlsim_config_free(cfg); }
};
}  // namespace

TEST_CASE("version string") {
  const char* v = hhlsim_version();
  REQUIRE(v != nullptr);
  CHECK(std::string(v) == "1.0.0");
}

TEST_CASE("config create, set and serialize") {
  ConfigHandle h;
  CHECK(hhlsim_config_set(h.cfg, "backend", "ideal") == HHLSIM_OK);
  CHECK(hhlsim_config_set(h.cfg, "shots", "0") == HHLSIM_OK);
  CHECK(hhlsim_config_set(h.cfg, "seed", "11") == HHLSIM_OK);
  char* json = nullptr;
  REQUIRE(hhlsim_config_to_json(h.cfg, &json) == HHLSIM_OK);
  std::string text(json);
  hhlsim_string_free(json);
  CHECK(text.find("\"backend\"") != std::string::npos);
  CHECK(text.find("ideal") != std::string::npos);
  // round trip through parse
  hhlsim_config* back = nullptr;
  REQUIRE(hhlsim_config_parse(text.c_str(), &back) == HHLSIM_OK);
  hhlsim_config_free(back);
}

TEST_CASE("config errors set the thread-local message") {
  ConfigHandle h;
  CHECK(hhlsim_config_set(h.cfg, "no_such_key", "1") == HHLSIM_ERR_CONFIG);
  const char* err = hhlsim_last_error();
  REQUIRE(err != nullptr);
  CHECK(std::strlen(err) > 0);
  CHECK(hhlsim_config_set(h.cfg, "shots", "not_a_number") == HHLSIM_ERR_CONFIG);
  hhlsim_config* out = nullptr;
  CHECK(hhlsim_config_parse("{broken", &out) == HHLSIM_ERR_CONFIG);
  CHECK(out == nullptr);
  CHECK(hhlsim_config_load("/nonexistent/path.json", &out) == HHLSIM_ERR_CONFIG);
}

TEST_CASE("contradictory settings are rejected at run time") {
  ConfigHandle h;
  CHECK(hhlsim_config_set(h.cfg, "backend", "device-noisy") == HHLSIM_OK);
  CHECK(hhlsim_config_set(h.cfg, "shots", "0") == HHLSIM_OK);
  char* json = nullptr;
  CHECK(hhlsim_report(h.cfg, &json) == HHLSIM_ERR_CONFIG);
  CHECK(json == nullptr);
}

TEST_CASE("report returns the full bundle as json") {
  ConfigHandle h;
  REQUIRE(hhlsim_config_set(h.cfg, "backend", "ideal") == HHLSIM_OK);
  REQUIRE(hhlsim_config_set(h.cfg, "shots", "0") == HHLSIM_OK);
  char* json = nullptr;
  REQUIRE(hhlsim_report(h.cfg, &json) == HHLSIM_OK);
  std::string text(json);
  hhlsim_string_free(json);
  CHECK(text.find("\"records\"") != std::string::npos);
  CHECK(text.find("\"process_fidelity\"") != std::string::npos);
  CHECK(text.find("\"chi_exp\"") != std::string::npos);
}

TEST_CASE("pipeline writes report files and qpt refits the dataset") {
  fs::path dir = fs::temp_directory_path() / "hhlsim_capi_out";
  fs::remove_all(dir);
  ConfigHandle h;
  REQUIRE(hhlsim_config_set(h.cfg, "backend", "ideal") == HHLSIM_OK);
  REQUIRE(hhlsim_config_set(h.cfg, "shots", "0") == HHLSIM_OK);
  REQUIRE(hhlsim_run_pipeline(h.cfg, dir.string().c_str()) == HHLSIM_OK);
  for (const char* name : {"bundle.json", "dataset.csv", "fig4.json", "ramsey.csv"})
    CHECK(fs::exists(dir / name));

  double fid = 0;
  fs::path chi_path = dir / "chi_refit.json";
  REQUIRE(hhlsim_qpt_fit_csv(h.cfg, (dir / "dataset.csv").string().c_str(),
                             chi_path.string().c_str(), &fid) == HHLSIM_OK);
  CHECK(fid == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fs::exists(chi_path));
  fs::remove_all(dir);
}

TEST_CASE("qpt fit reports missing dataset files") {
  ConfigHandle h;
  double fid = 0;
  CHECK(hhlsim_qpt_fit_csv(h.cfg, "/nonexistent/data.csv", nullptr, &fid) ==
        HHLSIM_ERR_CONFIG);
}

TEST_CASE("ramsey scan through the C interface") {
  fs::path csv = fs::temp_directory_path() / "hhlsim_capi_ramsey.csv";
  fs::remove(csv);
  ConfigHandle h;
  double delta = 0;
  REQUIRE(hhlsim_ramsey(h.cfg, 1, csv.string().c_str(), &delta) == HHLSIM_OK);
  CHECK(std::abs(delta - kPi) < 1e-6);
  CHECK(fs::exists(csv));
  double delta_off = 1;
  REQUIRE(hhlsim_ramsey(h.cfg, 0, nullptr, &delta_off) == HHLSIM_OK);
  CHECK(std::abs(delta_off) < 1e-6);
  fs::remove(csv);
}
