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

#include "hhlsim/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace hhlsim {

SubsystemLayout::SubsystemLayout(std::vector<int> d, std::vector<std::string> l)
    : dims(std::move(d)), labels(std::move(l)) {
  if (labels.empty()) {
    for (size_t i = 0; i < dims.size(); ++i) labels.push_back("Q" + std::to_string(i + 1));
  }
  if (dims.size() != labels.size())
    throw std::invalid_argument("layout: dims/labels size mismatch");
  for (int dd : dims)
    if (dd != 2 && dd != 3) throw std::invalid_argument("layout: dims must be 2 or 3");
  std::set<std::string> uniq(labels.begin(), labels.end());
  if (uniq.size() != labels.size())
    throw std::invalid_argument("layout: labels must be unique");
}

SubsystemLayout SubsystemLayout::qubits(int n) {
  return SubsystemLayout(std::vector<int>(n, 2), {});
}

int SubsystemLayout::dim() const {
  int d = 1;
  for (int dd : dims) d *= dd;
  return d;
}

int SubsystemLayout::stride(int site) const {
  int s = 1;
  for (size_t j = site + 1; j < dims.size(); ++j) s *= dims[j];
  return s;
}

int SubsystemLayout::site_index(const std::string& label) const {
  for (size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  throw std::invalid_argument("layout: unknown site label " + label);
}

PureState::PureState(Vector amps, SubsystemLayout lay)
    : amplitudes(std::move(amps)), layout(std::move(lay)) {
  if (amplitudes.size() != layout.dim())
    throw std::invalid_argument("state: amplitude length does not match layout");
}

PureState PureState::basis(const SubsystemLayout& lay, const std::vector<int>& levels) {
  if (static_cast<int>(levels.size()) != lay.sites())
    throw std::invalid_argument("basis: level count does not match layout");
  int idx = 0;
  for (int s = 0; s < lay.sites(); ++s) {
    if (levels[s] < 0 || levels[s] >= lay.dims[s])
      throw std::invalid_argument("basis: level out of range");
    idx += levels[s] * lay.stride(s);
  }
  Vector v = Vector::Zero(lay.dim());
  v[idx] = 1.0;
  return PureState(std::move(v), lay);
}

double PureState::population(int site, int outcome) const {
  const int stride = layout.stride(site);
  const int d = layout.dims[site];
  const int dim = layout.dim();
  double p = 0;
  for (int i = 0; i < dim; ++i)
    if ((i / stride) % d == outcome) p += std::norm(amplitudes[i]);
  return p;
}

void DensityOperator::validate() const {
  if (!is_hermitian(matrix)) throw SimulationError("density operator not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw SimulationError("density operator not positive semidefinite");
  const double tr = trace();
  if (tr <= 0 || tr > 1 + 1e-9) throw SimulationError("density operator trace out of range");
}

Matrix pauli_matrix(Pauli p) {
  Matrix m(2, 2);
  const Complex i(0, 1);
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -i, i, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

const char* pauli_name(Pauli p) {
  switch (p) {
    case Pauli::I: return "I";
    case Pauli::X: return "X";
    case Pauli::Y: return "Y";
    case Pauli::Z: return "Z";
  }
  return "?";
}

bool is_unitary(const Matrix& u, double tolerance) {
  if (u.rows() != u.cols()) return false;
  Matrix d = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff() <= tolerance * std::max<double>(1, u.rows());
}

bool is_hermitian(const Matrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

PureState apply_unitary(const PureState& state, const Matrix& u,
                        const std::vector<int>& targets) {
  const auto& lay = state.layout;
  std::set<int> uniq(targets.begin(), targets.end());
  if (uniq.size() != targets.size())
    throw std::invalid_argument("apply_unitary: duplicate targets");
  int d = 1;
  for (int t : targets) {
    if (t < 0 || t >= lay.sites())
      throw std::invalid_argument("apply_unitary: target out of range");
    d *= lay.dims[t];
  }
  if (u.rows() != d || u.cols() != d)
    throw std::invalid_argument("apply_unitary: matrix dimension mismatch");
  if (!is_unitary(u)) throw std::invalid_argument("apply_unitary: matrix not unitary");

  const int n = static_cast<int>(targets.size());
  std::vector<int> tstride(n), tdim(n);
  for (int k = 0; k < n; ++k) {
    tstride[k] = lay.stride(targets[k]);
    tdim[k] = lay.dims[targets[k]];
  }
  // Offsets of the d basis states of the target group, ordered so that the
  // first listed target is most significant.
  std::vector<int> offsets(d, 0);
  for (int g = 0; g < d; ++g) {
    int rem = g, off = 0;
    for (int k = n - 1; k >= 0; --k) {
      off += (rem % tdim[k]) * tstride[k];
      rem /= tdim[k];
    }
    offsets[g] = off;
  }

  const int dim = lay.dim();
  Vector out = Vector::Zero(dim);
  Vector block(d);
  std::vector<char> visited(dim, 0);
  for (int base = 0; base < dim; ++base) {
    if (visited[base]) continue;
    // Skip indices where any target site is nonzero; `base` enumerates the
    // configurations of the non-target sites.
    bool istarget_zero = true;
    for (int k = 0; k < n; ++k)
      if ((base / tstride[k]) % tdim[k] != 0) { istarget_zero = false; break; }
    if (!istarget_zero) continue;
    for (int g = 0; g < d; ++g) {
      block[g] = state.amplitudes[base + offsets[g]];
      visited[base + offsets[g]] = 1;
    }
    Vector res = u * block;
    for (int g = 0; g < d; ++g) out[base + offsets[g]] = res[g];
  }
  return PureState(std::move(out), lay);
}

PureState project(const PureState& state, int site, int outcome) {
  const auto& lay = state.layout;
  if (site < 0 || site >= lay.sites())
    throw std::invalid_argument("project: site out of range");
  if (outcome < 0 || outcome >= lay.dims[site])
    throw std::invalid_argument("project: outcome out of range for site");
  const int stride = lay.stride(site);
  const int d = lay.dims[site];
  Vector v = state.amplitudes;
  for (int i = 0; i < v.size(); ++i)
    if ((i / stride) % d != outcome) v[i] = 0;
  return PureState(std::move(v), lay);
}

std::pair<PureState, double> postselect(const PureState& state, int site, int outcome) {
  PureState branch = project(state, site, outcome);
  const double p = branch.norm2();
  if (p < tol::kImpossibleOutcome) throw SimulationError("postselect: impossible outcome");
  branch.amplitudes /= std::sqrt(p);
  return {std::move(branch), p};
}

double leakage(const PureState& state, int site) {
  if (state.layout.dims[site] < 3) return 0;
  return state.population(site, 2);
}

DensityOperator reduced_density(const PureState& state, int site) {
  const auto& lay = state.layout;
  const int stride = lay.stride(site);
  const int d = lay.dims[site];
  const int dim = lay.dim();
  Matrix rho = Matrix::Zero(d, d);
  for (int i = 0; i < dim; ++i) {
    const int li = (i / stride) % d;
    const int rest = i - li * stride;
    for (int lj = 0; lj < d; ++lj) {
      const int j = rest + lj * stride;
      rho(li, lj) += state.amplitudes[i] * std::conj(state.amplitudes[j]);
    }
  }
  return DensityOperator(rho);
}

double expectation(const DensityOperator& rho, const Observable& obs) {
  const auto& m = rho.matrix;
  Matrix p = pauli_matrix(obs.op);
  // Qutrit density matrices are evaluated on the 0/1 block.
  return (p * m.block(0, 0, 2, 2)).trace().real();
}

double expectation(const PureState& state, const Observable& obs, int site, bool strict) {
  if (strict && leakage(state, site) > 1e-6)
    throw SimulationError("expectation: qutrit leakage above strict threshold");
  return expectation(reduced_density(state, site), obs);
}

DensityOperator average_trajectories(const std::vector<PureState>& runs,
                                     const std::vector<double>& weights) {
  if (runs.empty()) throw std::invalid_argument("average_trajectories: empty input");
  if (runs.size() != weights.size())
    throw std::invalid_argument("average_trajectories: weights size mismatch");
  double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("average_trajectories: weights must sum to 1");
  const int dim = runs[0].layout.dim();
  Matrix rho = Matrix::Zero(dim, dim);
  for (size_t k = 0; k < runs.size(); ++k) {
    if (runs[k].layout.dim() != dim)
      throw std::invalid_argument("average_trajectories: layout mismatch");
    rho.noalias() += weights[k] * (runs[k].amplitudes * runs[k].amplitudes.adjoint());
  }
  return DensityOperator(rho);
}

}  // namespace hhlsim
