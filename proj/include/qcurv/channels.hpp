// Copyright 2026 The qcurv Authors
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

#ifndef QCURV_CHANNELS_HPP
#define QCURV_CHANNELS_HPP

#include <optional>
#include <string>
#include <vector>

#include "qcurv/matcore.hpp"

namespace qcurv {

// Validates a density matrix: Hermitian, PSD to -1e-10, unit trace to 1e-10.
void check_state(const CMat& rho, const std::string& what = "state");
bool is_state(const CMat& rho, double tol = 1e-10);

// Quantum channel stored in the Heisenberg picture P(x) = sum_j K_j^dag x K_j
// together with its trace-preserving pre-adjoint.
struct Channel {
  int dim = 0;
  std::vector<CMat> kraus;
  CMat superop;
  CMat adjoint_superop;
  std::optional<CMat> invariant_state;
  std::optional<CMat> fixed_point_projector;

  CMat apply(const CMat& x) const { return apply_superop(superop, x); }
  CMat apply_adjoint(const CMat& rho) const { return apply_superop(adjoint_superop, rho); }
  // Choi matrix of the pre-adjoint, input factor first.
  CMat choi() const { return choi_of_superop(adjoint_superop, dim, dim); }
  double unitality_residual() const;
  double min_choi_eig() const;
  bool is_cptp(double tol = 1e-9) const;
};

Channel identity_channel(int d);
Channel channel_from_kraus(const std::vector<CMat>& kraus, double tol = 1e-9);
// From a Heisenberg-picture superoperator; CP/unitality are checked when asked.
Channel channel_from_superop(const CMat& heisenberg, bool check = true, double tol = 1e-9);
// x -> a(b(x)) in the Heisenberg picture.
Channel compose(const Channel& a, const Channel& b);
Channel mix(double lambda, const Channel& a, const Channel& b);
Channel channel_power(const Channel& ch, int k);

// x -> Tr(x)/d I on the given tensor factor; the identity on the others.
CMat site_trace_superop(const std::vector<int>& dims, int site);
// Embeds an operator acting on `sites` (in the listed order) into the full space.
CMat embed(const CMat& op, const std::vector<int>& sites, const std::vector<int>& dims);

struct ConditionalExpectation {
  Channel map;
  std::string descriptor;  // pauli_commutant | site_replacement | fixed_point | trace
  bool idempotent(double tol = 1e-10) const;
};

// Normalized partial trace at `site`, a conditional expectation onto the complement.
ConditionalExpectation site_replacement(const std::vector<int>& dims, int site);

// Generator of a quantum Markov semigroup (Heisenberg picture).
struct GeneratorSpec {
  int dim = 0;
  CMat superop;
  std::vector<int> site_dims;
  std::vector<CMat> local;  // per-site generators, summing to superop
  std::vector<std::vector<int>> neighborhoods;
  double unit_residual() const;  // ||L(I)||
};

GeneratorSpec generator_from_superop(const CMat& heisenberg);
Channel semigroup_channel(const GeneratorSpec& gen, double t);

enum class FixedPointMode { Generic, Primitive };

// Spectral projector at 1 for channels self-adjoint on L2(omega), GNS or KMS.
ConditionalExpectation fixed_point_expectation(const Channel& ch, const CMat& omega,
                                               FixedPointMode mode = FixedPointMode::Generic);

// omega(x^dag P(y)) = omega(P(x)^dag y) residual over a matrix-unit basis.
double gns_symmetry_residual(const CMat& heisenberg, const CMat& omega);
// omega(x^dag omega^1/2 P(y) omega^1/2) symmetry residual, same normalization.
double kms_symmetry_residual(const CMat& heisenberg, const CMat& omega);

}  // namespace qcurv

#endif  // QCURV_CHANNELS_HPP
