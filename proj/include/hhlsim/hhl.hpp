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

#ifndef HHLSIM_HHL_HPP
#define HHLSIM_HHL_HPP

#include "hhlsim/device.hpp"
#include "hhlsim/gates.hpp"
#include "hhlsim/types.hpp"

namespace hhlsim {

using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;

/// A 2x2 linear system A x = b with the rotation constant C of the
/// ancilla readout. C must not exceed the smallest eigenvalue.
struct LinearSystemInstance {
  Matrix2 a;
  Vector2 b;
  double c = 1.0;

  /// A = [[1.5, 0.5], [0.5, 1.5]], b = |0>, C = 1.
  static LinearSystemInstance defaults();
  void validate() const;
};

/// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
Vector2 bloch_state(double theta, double phi);

struct Eigendecomposition {
  double lambda1 = 0, lambda2 = 0;  // ascending
  Vector2 u1, u2;                   // phase: first nonzero component real positive
  Complex beta1, beta2;             // <u_j|b>
};

Eigendecomposition eigendecompose(const LinearSystemInstance& inst);

/// (A^{-1} b normalized, ||A^{-1} b||).
std::pair<Vector2, double> classical_solve(const Matrix2& a, const Vector2& b);

/// theta = 2 arcsin(C / lambda); R_Y(theta)|0> has |1> amplitude C/lambda.
double rotation_angle(double lambda, double c);

/// Compiled four-qubit circuit: eigenbasis gate on Q1 and register tagging
/// via a sqrt(iSWAP)-CZ-sqrt(iSWAP) combo, ancilla rotations, then the exact
/// reverse. Roles: memory=Q1, register=Q2Q3, ancilla=Q4; postselects Q4=|1>.
Circuit compile(const LinearSystemInstance& inst);

enum class Backend { kIdealMatrix, kDeviceNoiseless, kDeviceNoisy };

Backend backend_from_name(const std::string& name);
const char* backend_name(Backend b);

struct HHLOutcome {
  Vector2 memory;                 // postselected memory state (noisy: top eigenvector)
  Matrix2 memory_rho;             // normalized postselected memory density matrix
  double success_probability = 0;
  bool register_cleared = false;  // register returned to its initial state
  double solution_fidelity = 0;   // <x| rho |x> vs classical_solve
};

struct RunOptions {
  int trajectories = 2000;  // noisy backend only
  std::uint64_t seed = 1;
  const DeviceExecutor* executor = nullptr;  // optional shared executor
};

HHLOutcome run(const LinearSystemInstance& inst, Backend backend,
               const RunOptions& opts = {});

/// C^2 ||A^{-1} b||^2 = sum_j (C beta_j / lambda_j)^2.
double success_probability(const LinearSystemInstance& inst);

}  // namespace hhlsim

#endif  // HHLSIM_HHL_HPP
