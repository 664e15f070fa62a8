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

#ifndef HHLSIM_TOMOGRAPHY_HPP
#define HHLSIM_TOMOGRAPHY_HPP

#include <array>
#include <map>
#include <random>

#include "hhlsim/hhl.hpp"
#include "hhlsim/types.hpp"

namespace hhlsim {

/// Measured Pauli with its pre-rotation: the qubit is rotated around Y for
/// X polarization and around X for Y polarization, mapping the basis to Z.
struct MeasurementSetting {
  Pauli basis = Pauli::Z;

  Matrix2 pre_rotation() const;
  static MeasurementSetting from_name(const std::string& name);
  const char* name() const { return pauli_name(basis); }
};

inline const std::array<Pauli, 3> kSettings{Pauli::X, Pauli::Y, Pauli::Z};

/// Joint (Q1 outcome, Q4 outcome) statistics of one input state; counts are
/// indexed q1 * 2 + q4. Exact entries hold probabilities instead of counts.
struct DatasetEntry {
  int input_index = 0;
  bool exact = false;
  std::map<char, std::array<double, 4>> settings;  // key: 'X', 'Y', 'Z'

  double shots(char setting) const;
  void validate() const;
};

struct TomographyDataset {
  std::vector<DatasetEntry> entries;

  std::string to_csv() const;
  static TomographyDataset from_csv(const std::string& text);
};

/// The default 18 input states: |0>, two rings of eight at polar angles
/// pi/3 and 2pi/3 with azimuths k*pi/4, and |1>.
std::vector<std::pair<double, double>> default_input_angles();

/// Projection onto {PSD, trace = target}: eigenvalue projection onto the
/// scaled simplex, the Frobenius-nearest point of that set.
Matrix project_psd(const Matrix& m, double trace);

/// Bloch-vector state reconstruction from the Q4=|1> postselected counts;
/// returns the projected density matrix and the pooled success fraction.
std::pair<DensityOperator, double> qst_single(const DatasetEntry& entry);

/// F = <psi| rho |psi>.
double state_fidelity(const DensityOperator& rho, const Vector2& psi, bool strict = false);

struct ChiMatrix {
  Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();  // basis {I, X, Y, Z}
  bool projected = false;
  double condition = 0;  // singular-value ratio of the fit design matrix

  double trace() const { return matrix.trace().real(); }
  void validate() const;
};

/// Least-squares chi of rho_out = sum_mn chi_mn E_m rho_in E_n^dag over the
/// given inputs; outputs are unnormalized (scaled by success probability).
/// Hermitian by construction; raw (unprojected) unless projected afterwards.
ChiMatrix qpt_fit(const std::vector<Matrix2>& inputs, const std::vector<Matrix2>& outputs);

/// Projects chi onto PSD with unchanged trace.
ChiMatrix project_chi(const ChiMatrix& chi);

/// Rank-1 chi from the Pauli coefficients of C * A^{-1}.
ChiMatrix ideal_chi(const LinearSystemInstance& inst);

/// Tr(chi_id chi_exp) / (Tr(chi_id) Tr(chi_exp)).
double process_fidelity(const ChiMatrix& chi_id, const ChiMatrix& chi_exp);

/// Std of the state fidelity vs `target` under Gaussian perturbation of the
/// measured expectation values at their standard errors.
double bootstrap_state_fidelity_std(const DatasetEntry& entry, const Vector2& target,
                                    int n_resamples, std::uint64_t seed);

/// Std of the process fidelity vs `chi_id` under the same perturbation
/// applied to every input's data.
double bootstrap_process_fidelity_std(const TomographyDataset& dataset,
                                      const std::vector<Matrix2>& inputs,
                                      const ChiMatrix& chi_id, int n_resamples,
                                      std::uint64_t seed);

/// Row-major real/imag arrays.
std::string chi_to_json(const ChiMatrix& chi);

}  // namespace hhlsim

#endif  // HHLSIM_TOMOGRAPHY_HPP
