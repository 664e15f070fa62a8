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

#ifndef HHLSIM_GATES_HPP
#define HHLSIM_GATES_HPP

#include <map>
#include <optional>
#include <string>

#include "hhlsim/types.hpp"

namespace hhlsim {

enum class GateKind { RX, RY, RZ, H, CZ, SQRT_ISWAP, ISWAP, VIRTUAL_Z };

const char* gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);
bool gate_is_rotation(GateKind k);
int gate_arity(GateKind k);

/// One timed, targeted operation. Durations are filled in by the device
/// model; VIRTUAL_Z is the only zero-duration gate.
struct GateSpec {
  GateKind kind;
  double angle = 0;  // radians, rotations and VIRTUAL_Z only
  std::vector<std::string> targets;
  double duration_ns = 0;

  GateSpec() = default;
  GateSpec(GateKind k, std::vector<std::string> t, double ang = 0, double dur = 0);
  void validate() const;
};

/// Ordered gate list plus the ancilla postselection marker and the
/// ancilla/register/memory role map.
struct Circuit {
  std::vector<GateSpec> gates;
  std::optional<std::pair<std::string, int>> postselection;  // (site label, outcome)
  std::map<std::string, std::string> roles;  // role -> label(s), e.g. "memory" -> "Q1"

  void append(const Circuit& other);
  /// Gate count excluding VIRTUAL_Z.
  int physical_gate_count() const;
};

/// R_axis(theta) = exp(-i theta sigma_axis / 2).
Matrix rotation_matrix(char axis, double angle);
Matrix hadamard_matrix();
/// diag(1, e^{i phi}).
Matrix virtual_z_matrix(double phi);
/// CZ, SQRT_ISWAP or ISWAP as a 4x4 matrix. The -i sign convention follows
/// exp(-i H_c t) of the exchange coupling g(s+s- + s-s+).
Matrix two_qubit_matrix(GateKind kind);
/// Ideal matrix of a gate spec (2x2 or 4x4).
Matrix gate_matrix(const GateSpec& g);

/// sqrt(iSWAP)-CZ-sqrt(iSWAP) combo: swaps a,b (with a -i factor) when the
/// control reads |0> and acts diagonally when it reads |1>. The CZ runs
/// between control and a, which must be nearest neighbors on the chain.
Circuit controlled_iswap_combo(const std::string& control, const std::string& a,
                               const std::string& b, const SubsystemLayout& layout);

/// Controlled-R_Y(theta) via CZ, H and R_Y on nearest neighbors; exact up to
/// global phase.
Circuit controlled_ry_decomposition(double theta, const std::string& control,
                                    const std::string& target,
                                    const SubsystemLayout& layout);

/// Lifts a qubit-level gate matrix to target sites of the given dims,
/// acting as identity on any |2> level.
Matrix lift_gate(const Matrix& u, const std::vector<int>& dims);

/// Product of the embedded ideal gate matrices, in order. Rejects circuits
/// carrying a postselection marker.
Matrix circuit_unitary(const Circuit& circuit, const SubsystemLayout& layout);

/// Circuit with gate order reversed and each gate daggered.
Circuit inverse_circuit(const Circuit& circuit);

// Line-oriented text format: one gate per line,
//   KIND [angle] target [target2] duration
// followed by optional "POSTSELECT label outcome" and "ROLE name labels".
std::string circuit_to_text(const Circuit& circuit);
Circuit circuit_from_text(const std::string& text);

}  // namespace hhlsim

#endif  // HHLSIM_GATES_HPP
