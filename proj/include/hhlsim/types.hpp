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

#ifndef HHLSIM_TYPES_HPP
#define HHLSIM_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hhlsim {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Error categories, mirrored by the C API / CLI exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace tol {
inline constexpr double kUnitarity = 1e-10;
inline constexpr double kHermiticity = 1e-10;
inline constexpr double kNormDrift = 1e-12;
inline constexpr double kImpossibleOutcome = 1e-12;
}  // namespace tol

/// Ordered chain of 2- and 3-level subsystems. Site 0 is the most
/// significant index: |Q1 Q2 Q3 Q4> reads left to right.
struct SubsystemLayout {
  std::vector<int> dims;
  std::vector<std::string> labels;

  SubsystemLayout() = default;
  SubsystemLayout(std::vector<int> d, std::vector<std::string> l);

  /// All-qubit chain Q1..Qn.
  static SubsystemLayout qubits(int n);

  int sites() const { return static_cast<int>(dims.size()); }
  int dim() const;
  /// Stride of a site in the flattened amplitude index.
  int stride(int site) const;
  int site_index(const std::string& label) const;
  bool neighbors(int a, int b) const { return std::abs(a - b) == 1; }
};

/// Complex amplitude vector over a layout. Squared norm may drop below 1
/// after postselection; it then equals the retained branch probability.
struct PureState {
  Vector amplitudes;
  SubsystemLayout layout;

  PureState() = default;
  PureState(Vector amps, SubsystemLayout lay);

  /// Basis state |levels[0], levels[1], ...>.
  static PureState basis(const SubsystemLayout& lay, const std::vector<int>& levels);

  double norm2() const { return amplitudes.squaredNorm(); }
  /// Population of level `outcome` of `site`.
  double population(int site, int outcome) const;
};

/// Possibly subnormalized density matrix (non-trace-preserving outputs).
struct DensityOperator {
  Matrix matrix;

  DensityOperator() = default;
  explicit DensityOperator(Matrix m) : matrix(std::move(m)) {}

  double trace() const { return matrix.trace().real(); }
  /// Hermitian to 1e-10, eigenvalues >= -1e-9, trace in (0, 1+1e-9].
  void validate() const;
};

enum class Pauli { I, X, Y, Z };

Matrix pauli_matrix(Pauli p);
const char* pauli_name(Pauli p);

/// One single-site Pauli per measured site.
struct Observable {
  Pauli op;
  Observable(Pauli p = Pauli::Z) : op(p) {}
};

}  // namespace hhlsim

#endif  // HHLSIM_TYPES_HPP
