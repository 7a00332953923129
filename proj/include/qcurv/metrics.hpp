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

#ifndef QCURV_METRICS_HPP
#define QCURV_METRICS_HPP

#include <optional>
#include <string>
#include <vector>

#include "qcurv/channels.hpp"
#include "qcurv/optim.hpp"

namespace qcurv {

enum class SemiNormKind { OperatorNorm, CommutatorMax, CommutatorL2, Oscillator, Ornstein, Gamma, Sum };

std::string to_string(SemiNormKind k);

// Lipschitz semi-norm family; its unit ball is the test set of the dual distance.
struct SemiNormSpec {
  SemiNormKind kind = SemiNormKind::OperatorNorm;
  int dim = 0;
  std::vector<CMat> generators;  // CommutatorMax, CommutatorL2
  std::vector<int> site_dims;    // Oscillator, Ornstein
  CMat generator;                // Gamma: Heisenberg superoperator of L
  std::vector<SemiNormSpec> parts;  // Sum

  static SemiNormSpec operator_norm(int d);
  static SemiNormSpec commutator_max(std::vector<CMat> gens);
  static SemiNormSpec commutator_l2(std::vector<CMat> gens);
  static SemiNormSpec oscillator(std::vector<int> dims);
  static SemiNormSpec ornstein(std::vector<int> dims);
  static SemiNormSpec gamma(const CMat& heisenberg_generator);
  static SemiNormSpec sum(std::vector<SemiNormSpec> parts);

  // Orthonormal basis (vectorized, as columns) of {x : L(x) = 0}.
  CMat kernel_basis() const;
};

double seminorm_eval(const SemiNormSpec& spec, const CMat& x, const SdpOptions& opt = {});

// Hermitian Delta with Tr(Delta y) = L(y) and dual norm at most one (a subgradient at y).
CMat seminorm_subgradient(const SemiNormSpec& spec, const CMat& y, const SdpOptions& opt = {});

// Gradient form Gamma(x, x) = (L(x^dag x) - L(x^dag) x - x^dag L(x)) / 2.
CMat gradient_form(const CMat& heisenberg_generator, const CMat& x);

struct TransportResult {
  double value = 0.0;  // lower bound from a feasible point (dual) or primal value (coupling)
  double upper = 0.0;
  double gap = 0.0;
  bool infinite = false;
  SdpStatus status = SdpStatus::Optimal;
  std::optional<CMat> witness;
  int iterations = 0;
};

// sup { Tr(Delta x) : x Hermitian, L(x) <= 1 }. With project_kernel the part of
// Delta that pairs with ker L is dropped instead of reported as infinite.
TransportResult dual_transport(const SemiNormSpec& spec, const CMat& functional, const SdpOptions& opt = {},
                               bool project_kernel = false);

// sup { Tr((rho1 - rho2) x) : x Hermitian, L(x) <= 1 }
TransportResult w1_dual(const SemiNormSpec& spec, const CMat& rho1, const CMat& rho2,
                        const SdpOptions& opt = {});

// inf { Tr(pi C) : pi >= 0, Tr_2 pi = rho1, Tr_1 pi = rho2 }
TransportResult coupling_cost(const CMat& cost, const CMat& rho1, const CMat& rho2,
                              const SdpOptions& opt = {});

CMat singlet_projector();

enum class MeanKind { Arithmetic, Logarithmic, WeightedExponential };

struct DerivationStructure {
  std::vector<CMat> v;          // Lindblad operators, a self-adjoint set
  std::vector<double> omega;    // Bohr frequencies, one per v_j
  MeanKind mean = MeanKind::Logarithmic;
  std::optional<CMat> sigma;    // reference state

  int dim() const { return v.empty() ? 0 : static_cast<int>(v.front().rows()); }
  void validate() const;
  // Superoperator of x -> [v_j, x].
  CMat derivation_superop(size_t j) const;
  // L(x) = sum_j e^{-omega_j} (v_j^dag [x, v_j] + [v_j^dag, x] v_j)
  CMat lindbladian() const;
};

// Operator mean [rho]_{omega_j} as a superoperator (column stacking).
CMat mean_superop(const CMat& rho, const DerivationStructure& ds, size_t j);
// M_rho = sum_j d_j^dag [rho]_j d_j
CMat metric_tensor(const CMat& rho, const DerivationStructure& ds);

struct InfiniteMetricError : std::domain_error {
  using std::domain_error::domain_error;
};

double metric_tensor_norm(const CMat& x, const CMat& rho, const DerivationStructure& ds);

// W(rho, P^dag(rho)) for the chosen semi-norm.
TransportResult jump(const SemiNormSpec& spec, const CMat& rho, const Channel& ch,
                     const SdpOptions& opt = {});

// D(rho || sigma); +infinity when supp(rho) is not inside supp(sigma).
double relative_entropy(const CMat& rho, const CMat& sigma);

}  // namespace qcurv

#endif  // QCURV_METRICS_HPP
