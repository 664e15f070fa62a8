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

// Command-line front end; talks to the library exclusively through the
// C interface in hhlsim.h.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "hhlsim.h"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string backend;
  int shots = -1;
  long long seed = -1;
  std::string out;
};

void add_common(CLI::App* app, CommonOpts* opts) {
  app->add_option("--config", opts->config_path, "Experiment config JSON file");
  app->add_option("--backend", opts->backend, "ideal, device or device-noisy")
      ->check(CLI::IsMember({"ideal", "device", "device-noisy"}));
  app->add_option("--shots", opts->shots, "Shots per tomography setting (0 = exact)");
  app->add_option("--seed", opts->seed, "Top-level random seed");
  app->add_option("--out", opts->out, "Output directory");
}

int fail(int code) {
  std::fprintf(stderr, "error: %s\n", hhlsim_last_error());
  return code;
}

// Builds the config handle from the file (if any) plus flag overrides.
int make_config(const CommonOpts& opts, hhlsim_config** out) {
  int rc = opts.config_path.empty() ? hhlsim_config_create(out)
                                    : hhlsim_config_load(opts.config_path.c_str(), out);
  if (rc != HHLSIM_OK) return rc;
  auto set = [&](const char* key, const std::string& value) {
    return hhlsim_config_set(*out, key, value.c_str());
  };
  if (!opts.backend.empty() && (rc = set("backend", opts.backend)) != HHLSIM_OK) return rc;
  if (opts.shots >= 0 && (rc = set("shots", std::to_string(opts.shots))) != HHLSIM_OK)
    return rc;
  if (opts.seed >= 0 && (rc = set("seed", std::to_string(opts.seed))) != HHLSIM_OK)
    return rc;
  if (!opts.out.empty() && (rc = set("out", opts.out)) != HHLSIM_OK) return rc;
  return HHLSIM_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Four-qubit linear-solver simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts, ramsey_opts, qpt_opts, report_opts;
  bool no_cz = false;
  std::string dataset_path;

  CLI::App* run = app.add_subcommand("run", "Run the 18-input sweep and write reports");
  add_common(run, &run_opts);

  CLI::App* ramsey = app.add_subcommand("ramsey", "Ancilla Ramsey scan with/without CZ");
  add_common(ramsey, &ramsey_opts);
  ramsey->add_flag("--no-cz", no_cz, "Replace the entangling gate with the identity");

  CLI::App* qpt = app.add_subcommand("qpt", "Fit a chi matrix from a dataset CSV");
  add_common(qpt, &qpt_opts);
  qpt->add_option("--data", dataset_path, "Dataset CSV path")->required();

  CLI::App* report = app.add_subcommand("report", "Run the sweep and print bundle JSON");
  add_common(report, &report_opts);

  CLI11_PARSE(app, argc, argv);

  hhlsim_config* cfg = nullptr;
  int rc = HHLSIM_OK;

  if (run->parsed()) {
    if ((rc = make_config(run_opts, &cfg)) != HHLSIM_OK) return fail(rc);
    rc = hhlsim_run_pipeline(cfg, nullptr);
    if (rc != HHLSIM_OK) rc = fail(rc);
  } else if (ramsey->parsed()) {
    if ((rc = make_config(ramsey_opts, &cfg)) != HHLSIM_OK) return fail(rc);
    std::string out_csv =
        (ramsey_opts.out.empty() ? std::string("ramsey.csv")
                                 : ramsey_opts.out + "/ramsey.csv");
    double delta_phi = 0;
    rc = hhlsim_ramsey(cfg, no_cz ? 0 : 1, out_csv.c_str(), &delta_phi);
    if (rc == HHLSIM_OK)
      std::printf("delta_phi_rad %.6f\n", delta_phi);
    else
      rc = fail(rc);
  } else if (qpt->parsed()) {
    if ((rc = make_config(qpt_opts, &cfg)) != HHLSIM_OK) return fail(rc);
    std::string out_json =
        (qpt_opts.out.empty() ? std::string("chi.json") : qpt_opts.out + "/chi.json");
    double fidelity = 0;
    rc = hhlsim_qpt_fit_csv(cfg, dataset_path.c_str(), out_json.c_str(), &fidelity);
    if (rc == HHLSIM_OK)
      std::printf("process_fidelity %.6f\n", fidelity);
    else
      rc = fail(rc);
  } else if (report->parsed()) {
    if ((rc = make_config(report_opts, &cfg)) != HHLSIM_OK) return fail(rc);
    char* json = nullptr;
    rc = hhlsim_report(cfg, &json);
    if (rc == HHLSIM_OK) {
      std::printf("%s\n", json);
      hhlsim_string_free(json);
    } else {
      rc = fail(rc);
    }
  }

  hhlsim_config_free(cfg);
  return rc;
}
