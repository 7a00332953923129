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

#ifndef QCURV_CURVATURE_HPP
#define QCURV_CURVATURE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcurv/channels.hpp"
#include "qcurv/gibbs.hpp"
#include "qcurv/metrics.hpp"
#include "qcurv/pauli.hpp"
#include "qcurv/random.hpp"

namespace qcurv {

// Runs body(i) for i in [0, n); at most QCURV_THREADS workers (default 1).
void parallel_for(int n, const std::function<void(int)>& body);
int worker_count();

// Bounds on the contraction factor sup L(P(x)) / L(x) = 1 - kappa.
struct CurvatureReport {
  double upper_bound_factor = 0.0;
  double lower_bound_factor = 0.0;
  CMat witness;
  std::string method;      // structural | witness_search | kernel_violation
  bool certified = false;  // upper bound is a proven bound, not a search result
  std::map<std::string, double> residuals;
  std::optional<CMat> violating_kernel_element;

  double kappa() const { return 1.0 - upper_bound_factor; }
};

struct LipschitzOptions {
  int restarts = 20;
  int max_steps = 25;
  double step_tol = 1e-9;
  std::uint64_t seed = 0;
  std::optional<double> structural_bound;
  std::vector<CMat> candidates;  // extra starting points
  SdpOptions sdp;
};

double lipschitz_ratio(const Channel& ch, const SemiNormSpec& spec, const CMat& x, const SdpOptions& opt = {});
CurvatureReport lipschitz_factor(const Channel& ch, const SemiNormSpec& spec, const LipschitzOptions& opt = {});

// Semi-norm max_beta ||[sigma_beta, x]|| over the non-identity strings of the channel.
SemiNormSpec pauli_seminorm(const PauliChannelSpec& spec);
// Structural bound 1 - 2 min lambda together with the best Pauli-basis witness.
CurvatureReport pauli_lipschitz_factor(const PauliChannelSpec& spec);

// States used by the gradient-estimate tests: 16 Haar-type full rank,
// 8 floored near-pure, 8 structured (diagonal thermal and product).
std::vector<CMat> ge_sample_states(Rng& rng, int d, int count = 32);

struct GEOptions {
  double bisection_tol = 1e-6;
  double margin_tol = 1e-9;
  std::optional<CMat> observable_subspace;  // orthonormal columns in vec space
};

struct GEReport {
  double kappa_star = 0.0;
  std::vector<double> per_sample_kappa;
  std::vector<double> margins;  // psd margins at kappa_star
  std::vector<CMat> states;
  double max_trace_leak = 0.0;  // |1 - Tr P^dag(rho)|, nonzero only for truncated models
};

GEReport verify_ge(const Channel& ch, const DerivationStructure& ds, const std::vector<CMat>& states,
                   const GEOptions& opt = {});

// Direct evaluation of ||d P(x)||_rho^2 - f^2 ||d x||_{P^dag rho}^2 for a single x.
double ge_quadratic_margin(const Channel& ch, const DerivationStructure& ds, const CMat& rho, const CMat& x,
                           double factor);

struct IntertwiningReport {
  double residual = 0.0;          // max_j ||d_j P(x) - (hat d x)_j|| over the basis
  double constant = 0.0;          // smallest C with hat^dag l(rho) hat <= C l(P^dag rho), over samples
  std::vector<double> per_sample_constant;
};

// hat acts on the stacked space of J copies of vec(M_d).
IntertwiningReport verify_intertwining(const Channel& ch, const DerivationStructure& ds, const CMat& hat,
                                       const std::vector<CMat>& states = {},
                                       const std::optional<CMat>& observable_subspace = std::nullopt);

// 1 - largest singular value of P on the L2(omega)-complement of the fixed algebra.
double spectral_gap(const Channel& ch, const CMat& omega, const ConditionalExpectation& E);

struct PoincareReport {
  double constant = 0.0;  // best value found; a lower bound for the supremum
  bool infinite = false;
  CMat witness;
  int restarts = 0;
};

PoincareReport poincare_2inf_constant(const SemiNormSpec& spec, const CMat& omega, const ConditionalExpectation& E,
                                      int restarts = 8, std::uint64_t seed = 0, const SdpOptions& opt = {});

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool premise_ok = true;
  bool vacuous = false;  // infinite transport value or infinite constant
  std::string note;
  std::map<std::string, double> details;
};

// T(rho, rho o E_N) <= C / (1 - (1 - kappa)^n) sqrt(2 n D(rho || rho o E_N)).
// measured_factor, when given, is the Lipschitz factor of (1/n) sum_i E_i and must not exceed 1 - kappa.
InequalityReport tc_inequality_check(const std::vector<ConditionalExpectation>& Es, const SemiNormSpec& spec,
                                     double kappa, double C, const CMat& rho,
                                     std::optional<double> measured_factor = std::nullopt,
                                     const SdpOptions& opt = {});

// Dirichlet form sum_j ||[v_j, x]||^2_{L2(sigma)} with the KMS inner product.
double dirichlet_form(const DerivationStructure& ds, const CMat& sigma, const CMat& x);
// -<x, L x>_sigma with the KMS inner product.
double generator_energy(const CMat& heisenberg_generator, const CMat& sigma, const CMat& x);

// W1(rho, rho o E_N) for the l2 derivation norm against its Dirichlet-form bound.
InequalityReport ti_inequality_check(const DerivationStructure& ds, const GeneratorSpec& gen, double C,
                                     double kappa, const CMat& rho, const SdpOptions& opt = {});

// Largest observed ratio |||P_t x|||_{d,2} / (e^{-kappa t} |||x|||_{d,2}) on a t grid.
double semigroup_decay_constant(const DerivationStructure& ds, const GeneratorSpec& gen, double kappa,
                                const std::vector<double>& t_grid, Rng& rng, int samples = 10);

// Smallest nonzero eigenvalue of -L on L2(sigma) (GNS-symmetric L).
double generator_gap(const CMat& heisenberg_generator, const CMat& sigma);

// Lindblad operators and Bohr frequencies of E - id for a sigma-covariant channel E.
struct BohrDecomposition {
  std::vector<CMat> v;
  std::vector<double> omega;
  double covariance_residual = 0.0;
};
BohrDecomposition bohr_decomposition(const CMat& heisenberg_channel, const CMat& sigma);

struct LocalTIOptions {
  std::vector<double> t_grid = {0.1, 0.5, 1.0, 2.0};
  int premise_samples = 5;
  std::uint64_t seed = 0;
  SdpOptions sdp;
};

// Local transportation-information inequality for L_V = sum_e L_e (gen.local)
// against the Ornstein semi-norm.
InequalityReport local_ti_check(const GeneratorSpec& gen, const CMat& sigma, double C, double kappa,
                                const CMat& rho, const LocalTIOptions& opt = {});

// T(rho1, rho2) <= (J(rho1) + J(rho2)) / kappa.
InequalityReport jump_diameter_bound(const SemiNormSpec& spec, const Channel& ch, const CMat& rho1,
                                     const CMat& rho2, double kappa, const SdpOptions& opt = {});

struct MixingRow {
  int step = 0;
  double measured = 0.0;
  double bound = 0.0;
};

// ||P_*^k rho - E_I rho||_1 against 2 (1 - 2 min lambda)^k / (2 min lambda) J(rho).
std::vector<MixingRow> pauli_mixing_check(const PauliChannelSpec& spec, const CMat& rho, int max_steps,
                                          const SdpOptions& opt = {});

struct TensorizationReport {
  std::vector<double> factor_kappas;  // complete-Lipschitz kappa_i measured with an ancilla
  double bound = 0.0;                 // 1 - min alpha_i kappa_i
  double measured = 0.0;              // best witness factor of sum alpha_i P_i
  double slack = 0.0;
};

// Commutator-type semi-norms on each factor; the product carries sum_i L_i.
TensorizationReport tensorization_check(const std::vector<SemiNormSpec>& specs, const std::vector<Channel>& chs,
                                        const std::vector<double>& alphas, const LipschitzOptions& opt = {});

struct FiniteGroup {
  std::vector<std::vector<int>> table;  // table[g][h] = index of gh; 0 is the identity
  int order() const { return static_cast<int>(table.size()); }
  void validate() const;
};

struct TransferenceReport {
  double classical_factor_inf = 0.0;  // sup ||K f||_Lip / ||f||_Lip, exact, p = infinity
  double classical_factor_one = 0.0;  // same for p = 1
  double quantum_factor_inf = 0.0;    // witness factor of the transferred channel, p = infinity
  double quantum_factor_one = 0.0;    // p = 1
  double cocycle_residual = 0.0;
};

// P(x) = |G|^{-1} sum_g k(g) u(g) x u(g)^dag with difference operators x -> u(s) x u(s)^dag - x.
std::pair<Channel, TransferenceReport> transfer_finite_group(const FiniteGroup& group, const std::vector<double>& k,
                                                             const std::vector<CMat>& u,
                                                             const std::vector<int>& generators,
                                                             const std::vector<double>& weights,
                                                             const LipschitzOptions& opt = {});

// Z_2^{2n} with the Pauli strings as a projective representation.
FiniteGroup pauli_group_table(int n);
std::vector<CMat> pauli_group_rep(int n);

struct GibbsCertificate {
  double kappa_beta = 0.0;
  bool applicable = false;  // kappa_beta < 1
  std::vector<double> local_diamond;  // ||Psi_w - tau_w||_cb per site
  double worst_ratio = 0.0;  // max over samples of ||e^{tL}x||_L / (e^{-(1-kappa)t} ||x||_L)
  double max_violation = 0.0;  // max of ||e^{tL}x||_L - e^{-(1-kappa)t} ||x||_L
  double empirical_rate = 0.0;  // smallest observed -log(ratio)/t
};

// max_v ||x - tau_v(x)||
double max_site_seminorm(const CMat& x, const std::vector<int>& dims);

GibbsCertificate gibbs_contraction_certificate(const LocalHamiltonian& H, double beta,
                                               const std::vector<double>& t_grid, int samples, Rng& rng,
                                               const SdpOptions& opt = {});

// Margin of C B^+ C^dag <= lambda A^+ on supp(A), given C^dag A C <= lambda B.
double operator_lemma_margin(const CMat& A, const CMat& B, const CMat& C, double lambda);

}  // namespace qcurv

#endif  // QCURV_CURVATURE_HPP
