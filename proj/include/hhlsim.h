/* Copyright 2026 The hhlsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the hhlsim shared library. All functions return one of the
 * HHLSIM_* status codes; on failure hhlsim_last_error() describes the cause
 * (thread-local). Strings returned through char** are heap-allocated and
 * must be released with hhlsim_string_free().
 */

#ifndef HHLSIM_H
#define HHLSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define HHLSIM_OK 0
#define HHLSIM_ERR_CONFIG 1
#define HHLSIM_ERR_SIMULATION 2
#define HHLSIM_ERR_FIT 3

typedef struct hhlsim_config hhlsim_config;

const char* hhlsim_version(void);
const char* hhlsim_last_error(void);
void hhlsim_string_free(char* s);

/* Configuration handles. */
int hhlsim_config_create(hhlsim_config** out);
int hhlsim_config_load(const char* path, hhlsim_config** out);
int hhlsim_config_parse(const char* json_text, hhlsim_config** out);
void hhlsim_config_free(hhlsim_config* cfg);

/* Scalar overrides; keys: backend, shots, seed, out, c, device,
 * bootstrap_resamples, ramsey_points. Values are parsed from text. */
int hhlsim_config_set(hhlsim_config* cfg, const char* key, const char* value);
int hhlsim_config_to_json(const hhlsim_config* cfg, char** out_json);

/* Runs the 18-input sweep and writes all report files to the configured
 * (or overriding, if non-NULL) output directory. */
int hhlsim_run_pipeline(const hhlsim_config* cfg, const char* out_dir);

/* Ramsey scan of the ancilla; writes the curve CSV when out_csv is
 * non-NULL and stores the fitted phase difference (radians). use_cz = 0
 * replaces the entangling gate with the identity. */
int hhlsim_ramsey(const hhlsim_config* cfg, int use_cz, const char* out_csv,
                  double* delta_phi);

/* Process tomography from an existing dataset CSV. Writes the fitted chi
 * matrix JSON when out_json is non-NULL and stores the process fidelity
 * against the configured instance. */
int hhlsim_qpt_fit_csv(const hhlsim_config* cfg, const char* dataset_csv_path,
                       const char* out_json, double* process_fidelity);

/* Runs the pipeline without touching the filesystem and returns the full
 * report bundle as JSON. */
int hhlsim_report(const hhlsim_config* cfg, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* HHLSIM_H */
