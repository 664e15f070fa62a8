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

#include "hhlsim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hhlsim/gates.hpp"
#include "nlohmann/json.hpp"

namespace hhlsim {

Matrix2 MeasurementSetting::pre_rotation() const {
  switch (basis) {
    case Pauli::X: return rotation_matrix('Y', -M_PI / 2);
    case Pauli::Y: return rotation_matrix('X', M_PI / 2);
    case Pauli::Z: return Matrix2::Identity();
    default: throw std::invalid_argument("setting: identity is not measurable");
  }
}

MeasurementSetting MeasurementSetting::from_name(const std::string& name) {
  if (name == "X") return {Pauli::X};
  if (name == "Y") return {Pauli::Y};
  if (name == "Z") return {Pauli::Z};
  throw ConfigError("setting: unknown basis " + name);
}

double DatasetEntry::shots(char setting) const {
  auto it = settings.find(setting);
  if (it == settings.end()) throw FitError("dataset: missing setting");
  double s = 0;
  for (double c : it->second) s += c;
  return s;
}

void DatasetEntry::validate() const {
  for (char s : {'X', 'Y', 'Z'})
    if (!settings.count(s)) throw FitError("dataset: missing setting");
  for (const auto& [s, counts] : settings)
    for (double c : counts)
      if (c < 0) throw FitError("dataset: negative count");
}

std::string TomographyDataset::to_csv() const {
  std::ostringstream os;
  os << "input_index,setting,q1_outcome,q4_outcome,count\n";
  os.precision(17);
  for (const auto& e : entries)
    for (const auto& [s, counts] : e.settings)
      for (int q1 = 0; q1 < 2; ++q1)
        for (int q4 = 0; q4 < 2; ++q4)
          os << e.input_index << ',' << s << ',' << q1 << ',' << q4 << ','
             << counts[q1 * 2 + q4] << '\n';
  return os.str();
}

TomographyDataset TomographyDataset::from_csv(const std::string& text) {
  TomographyDataset ds;
  std::istringstream is(text);
  std::string line;
  std::map<int, DatasetEntry> byindex;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) { header = false; continue; }
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 5) throw ConfigError("dataset csv: expected 5 columns");
    const int idx = std::stoi(fields[0]);
    const char setting = fields[1].at(0);
    const int q1 = std::stoi(fields[2]), q4 = std::stoi(fields[3]);
    const double count = std::stod(fields[4]);
    if (q1 < 0 || q1 > 1 || q4 < 0 || q4 > 1)
      throw ConfigError("dataset csv: outcomes must be 0 or 1");
    auto& entry = byindex[idx];
    entry.input_index = idx;
    entry.settings[setting][q1 * 2 + q4] = count;
    if (std::abs(count - std::round(count)) > 1e-9) entry.exact = true;
  }
  for (auto& [idx, e] : byindex) ds.entries.push_back(std::move(e));
  return ds;
}

std::vector<std::pair<double, double>> default_input_angles() {
  std::vector<std::pair<double, double>> angles;
  angles.emplace_back(0.0, 0.0);
  for (double theta : {M_PI / 3, 2 * M_PI / 3})
    for (int k = 0; k < 8; ++k) angles.emplace_back(theta, k * M_PI / 4);
  angles.emplace_back(M_PI, 0.0);
  return angles;
}

Matrix project_psd(const Matrix& m, double trace) {
  Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  Eigen::VectorXd lam = es.eigenvalues();
  const int n = static_cast<int>(lam.size());
  // Euclidean projection of the spectrum onto {x >= 0, sum x = trace}.
  std::vector<double> sorted(lam.data(), lam.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cum = 0, shift = 0;
  int kept = 0;
  for (int k = 0; k < n; ++k) {
    cum += sorted[k];
    const double cand = (trace - cum) / (k + 1);
    if (sorted[k] + cand > 0) {
      shift = cand;
      kept = k + 1;
    }
  }
  (void)kept;
  Eigen::VectorXd proj(n);
  for (int i = 0; i < n; ++i) proj[i] = std::max(0.0, lam[i] + shift);
  return es.eigenvectors() * proj.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

struct BlochEstimate {
  double r[3] = {0, 0, 0};        // <X>, <Y>, <Z>
  double se[3] = {0, 0, 0};       // standard errors
  double success = 0;             // pooled Q4=|1> fraction
  double success_se = 0;
};

BlochEstimate bloch_estimate(const DatasetEntry& entry) {
  entry.validate();
  BlochEstimate est;
  const char keys[3] = {'X', 'Y', 'Z'};
  double post_total = 0, shots_total = 0;
  for (int i = 0; i < 3; ++i) {
    const auto& c = entry.settings.at(keys[i]);
    const double n0 = c[0 * 2 + 1], n1 = c[1 * 2 + 1];  // Q4 = |1> slices
    if (n0 + n1 <= 0) throw FitError("qst: zero postselected counts in a setting");
    est.r[i] = (n0 - n1) / (n0 + n1);
    if (!entry.exact)
      est.se[i] = std::sqrt(std::max(0.0, 1.0 - est.r[i] * est.r[i]) / (n0 + n1));
    post_total += n0 + n1;
    shots_total += entry.shots(keys[i]);
  }
  est.success = post_total / shots_total;
  if (!entry.exact)
    est.success_se = std::sqrt(est.success * (1 - est.success) / shots_total);
  return est;
}

DensityOperator bloch_density(const double r[3]) {
  Matrix rho = 0.5 * Matrix::Identity(2, 2);
  rho += 0.5 * (r[0] * pauli_matrix(Pauli::X) + r[1] * pauli_matrix(Pauli::Y) +
                r[2] * pauli_matrix(Pauli::Z));
  return DensityOperator(project_psd(rho, 1.0));
}

}  // namespace

std::pair<DensityOperator, double> qst_single(const DatasetEntry& entry) {
  BlochEstimate est = bloch_estimate(entry);
  return {bloch_density(est.r), est.success};
}

double state_fidelity(const DensityOperator& rho, const Vector2& psi, bool strict) {
  if (strict && std::abs(rho.trace() - 1.0) > 1e-6)
    throw FitError("state_fidelity: unnormalized density matrix");
  return (psi.adjoint() * rho.matrix.block(0, 0, 2, 2) * psi)(0, 0).real();
}

void ChiMatrix::validate() const {
  if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw FitError("chi: not Hermitian");
  if (projected) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(matrix);
    if (es.eigenvalues().minCoeff() < -1e-9) throw FitError("chi: projected but not PSD");
    if (trace() > 1 + 1e-9) throw FitError("chi: trace above 1");
  }
}

ChiMatrix qpt_fit(const std::vector<Matrix2>& inputs, const std::vector<Matrix2>& outputs) {
  if (inputs.size() != outputs.size())
    throw FitError("qpt_fit: inputs/outputs size mismatch");
  const int k = static_cast<int>(inputs.size());
  // 16 real parameters: 4 diagonal entries plus (re, im) per upper pair.
  struct Param { int m, n; bool imag; };
  std::vector<Param> params;
  for (int m = 0; m < 4; ++m) params.push_back({m, m, false});
  for (int m = 0; m < 4; ++m)
    for (int n = m + 1; n < 4; ++n) {
      params.push_back({m, n, false});
      params.push_back({m, n, true});
    }
  Eigen::MatrixXd design(4 * k, 16);
  Eigen::VectorXd rhs(4 * k);
  const Complex i01(0, 1);
  std::array<Matrix, 4> e;
  for (int m = 0; m < 4; ++m) e[m] = pauli_matrix(static_cast<Pauli>(m));
  for (int s = 0; s < k; ++s) {
    for (size_t p = 0; p < params.size(); ++p) {
      const auto& pr = params[p];
      Matrix t;
      if (pr.m == pr.n) {
        t = e[pr.m] * inputs[s] * e[pr.m];
      } else if (!pr.imag) {
        t = e[pr.m] * inputs[s] * e[pr.n] + e[pr.n] * inputs[s] * e[pr.m];
      } else {
        t = i01 * (e[pr.m] * inputs[s] * e[pr.n] - e[pr.n] * inputs[s] * e[pr.m]);
      }
      design(4 * s + 0, p) = t(0, 0).real();
      design(4 * s + 1, p) = t(0, 1).real();
      design(4 * s + 2, p) = t(0, 1).imag();
      design(4 * s + 3, p) = t(1, 1).real();
    }
    rhs[4 * s + 0] = outputs[s](0, 0).real();
    rhs[4 * s + 1] = outputs[s](0, 1).real();
    rhs[4 * s + 2] = outputs[s](0, 1).imag();
    rhs[4 * s + 3] = outputs[s](1, 1).real();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (design.rows() < 16 || sv[sv.size() - 1] < 1e-10 * sv[0])
    throw FitError("qpt_fit: rank-deficient input set");
  Eigen::VectorXd sol = svd.solve(rhs);

  ChiMatrix chi;
  chi.condition = sv[0] / sv[sv.size() - 1];
  for (size_t p = 0; p < params.size(); ++p) {
    const auto& pr = params[p];
    if (pr.m == pr.n) {
      chi.matrix(pr.m, pr.m) += sol[p];
    } else if (!pr.imag) {
      chi.matrix(pr.m, pr.n) += sol[p];
      chi.matrix(pr.n, pr.m) += sol[p];
    } else {
      chi.matrix(pr.m, pr.n) += i01 * sol[p];
      chi.matrix(pr.n, pr.m) -= i01 * sol[p];
    }
  }
  chi.validate();
  return chi;
}

ChiMatrix project_chi(const ChiMatrix& chi) {
  ChiMatrix out = chi;
  out.matrix = project_psd(chi.matrix, chi.trace());
  out.projected = true;
  return out;
}

ChiMatrix ideal_chi(const LinearSystemInstance& inst) {
  inst.validate();
  Matrix2 m = inst.c * inst.a.inverse();
  Eigen::Vector4cd v;
  for (int k = 0; k < 4; ++k)
    v[k] = (pauli_matrix(static_cast<Pauli>(k)) * m).trace() / 2.0;
  ChiMatrix chi;
  chi.matrix = v * v.adjoint();
  return chi;
}

double process_fidelity(const ChiMatrix& chi_id, const ChiMatrix& chi_exp) {
  chi_id.validate();
  chi_exp.validate();
  const double t1 = chi_id.trace(), t2 = chi_exp.trace();
  if (t1 <= 0 || t2 <= 0) throw FitError("process_fidelity: non-positive trace");
  return (chi_id.matrix * chi_exp.matrix).trace().real() / (t1 * t2);
}

double bootstrap_state_fidelity_std(const DatasetEntry& entry, const Vector2& target,
                                    int n_resamples, std::uint64_t seed) {
  if (n_resamples < 100) throw FitError("bootstrap: need at least 100 resamples");
  BlochEstimate est = bloch_estimate(entry);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> fids(n_resamples);
  for (int t = 0; t < n_resamples; ++t) {
    double r[3];
    for (int i = 0; i < 3; ++i)
      r[i] = std::clamp(est.r[i] + normal(rng) * est.se[i], -1.0, 1.0);
    fids[t] = state_fidelity(bloch_density(r), target);
  }
  double mean = 0;
  for (double f : fids) mean += f;
  mean /= n_resamples;
  double var = 0;
  for (double f : fids) var += (f - mean) * (f - mean);
  return std::sqrt(var / n_resamples);
}

double bootstrap_process_fidelity_std(const TomographyDataset& dataset,
                                      const std::vector<Matrix2>& inputs,
                                      const ChiMatrix& chi_id, int n_resamples,
                                      std::uint64_t seed) {
  if (n_resamples < 100) throw FitError("bootstrap: need at least 100 resamples");
  std::vector<BlochEstimate> ests;
  for (const auto& e : dataset.entries) ests.push_back(bloch_estimate(e));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> fids(n_resamples);
  for (int t = 0; t < n_resamples; ++t) {
    std::vector<Matrix2> outputs;
    for (const auto& est : ests) {
      double r[3];
      for (int i = 0; i < 3; ++i)
        r[i] = std::clamp(est.r[i] + normal(rng) * est.se[i], -1.0, 1.0);
      const double p =
          std::clamp(est.success + normal(rng) * est.success_se, 0.0, 1.0);
      outputs.push_back(p * bloch_density(r).matrix.block(0, 0, 2, 2));
    }
    fids[t] = process_fidelity(chi_id, qpt_fit(inputs, outputs));
  }
  double mean = 0;
  for (double f : fids) mean += f;
  mean /= n_resamples;
  double var = 0;
  for (double f : fids) var += (f - mean) * (f - mean);
  return std::sqrt(var / n_resamples);
}

std::string chi_to_json(const ChiMatrix& chi) {
  nlohmann::json j;
  std::vector<double> re, im;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      re.push_back(chi.matrix(r, c).real());
      im.push_back(chi.matrix(r, c).imag());
    }
  j["basis"] = {"I", "X", "Y", "Z"};
  j["real"] = re;
  j["imag"] = im;
  j["trace"] = chi.trace();
  j["projected"] = chi.projected;
  j["condition"] = chi.condition;
  return j.dump(2);
}

}  // namespace hhlsim
