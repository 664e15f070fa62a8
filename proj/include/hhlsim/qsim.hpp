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

#ifndef HHLSIM_QSIM_HPP
#define HHLSIM_QSIM_HPP

#include <utility>

#include "hhlsim/types.hpp"

namespace hhlsim {

/// Embeds the unitary `u` on the given target sites. `u` must be unitary to
/// 1e-10 and its dimension must equal the product of the target dims.
PureState apply_unitary(const PureState& state, const Matrix& u,
                        const std::vector<int>& targets);

/// Projects `site` onto `outcome` and renormalizes. Returns the renormalized
/// state and the probability of the retained branch. A branch probability
/// below 1e-12 signals an impossible outcome (SimulationError).
std::pair<PureState, double> postselect(const PureState& state, int site, int outcome);

/// Same projection without renormalizing; the squared norm of the result is
/// the branch probability times the input squared norm.
PureState project(const PureState& state, int site, int outcome);

/// <P> on a 2-level site, or on the 0/1 subspace of a qutrit. With
/// `strict`, qutrit leakage above 1e-6 is an error.
double expectation(const PureState& state, const Observable& obs, int site,
                   bool strict = false);
double expectation(const DensityOperator& rho, const Observable& obs);

/// Leakage population outside the 0/1 subspace of `site`.
double leakage(const PureState& state, int site);

/// Partial trace down to a single site.
DensityOperator reduced_density(const PureState& state, int site);

/// Convex mixture of projectors. Weights must sum to 1 +- 1e-9.
DensityOperator average_trajectories(const std::vector<PureState>& runs,
                                     const std::vector<double>& weights);

/// Kronecker product, site-0-most-significant convention.
Matrix kron(const Matrix& a, const Matrix& b);

bool is_unitary(const Matrix& u, double tolerance = tol::kUnitarity);
bool is_hermitian(const Matrix& m, double tolerance = tol::kHermiticity);

}  // namespace hhlsim

#endif  // HHLSIM_QSIM_HPP
