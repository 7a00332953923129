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

#ifndef QCURV_CVMODELS_HPP
#define QCURV_CVMODELS_HPP

#include <vector>

#include "qcurv/channels.hpp"
#include "qcurv/curvature.hpp"
#include "qcurv/metrics.hpp"

namespace qcurv {

// Single mode truncated at N photons.
struct FockOps {
  CMat a;
  CMat adag;
  CMat number;
};
FockOps fock_ops(int N);

// Rotation angle arccos(sqrt(lambda)) of the two-mode generator a^dag b - b^dag a.
double beam_splitter_angle(double lambda);

// Exact rotation on the total-photon sector n, basis |k, n-k>, k = 0..n.
CMat beam_splitter_sector(double lambda, int n);

// U on (N+1)^2 levels, index i (N+1) + k for |i>_a |k>_b. Sectors of total
// photon number <= N are complete; higher sectors are rotated within what the
// cutoff keeps, so the rotation relations hold exactly only up to N - 1.
CMat beam_splitter_unitary(double lambda, int N);

struct BeamSplitterSpec {
  double lambda = 0.5;
  CMat env;  // state of the second mode on cutoff + 1 levels
  int cutoff = 20;
  void validate() const;
};

// Thermal state e^{-beta a^dag a}/Z on N + 1 levels.
struct ThermalState {
  CMat rho;
  double energy = 0.0;
  double truncation_error = 0.0;  // |energy - 1/(e^beta - 1)|
};
ThermalState thermal_state(double beta, int N);

// x -> Tr_2[(1 (x) sigma) U^dag (x (x) 1) U] with U evaluated exactly on every
// sector the cutoff can reach, then compressed to the first N + 1 levels of
// the system mode. The compression is completely positive and sub-unital.
struct BoseChannel {
  Channel channel;
  BeamSplitterSpec spec;
  CMat unit_defect;  // 1 - P(1) on the truncated space, positive semidefinite
};
BoseChannel bose_channel(const BeamSplitterSpec& spec);

// 1 - Tr P^dag(rho): weight pushed above the cutoff.
double bose_leakage(const BoseChannel& ch, const CMat& rho);

// Basis |m><m'| with m, m' <= sector, as orthonormal columns in vec space.
CMat fock_sector_basis(int N, int sector);
// States supported on the photon numbers 0..sector, padded to N + 1 levels.
CMat embed_fock_state(const CMat& rho, int N);

DerivationStructure bose_derivations(int N, MeanKind mean = MeanKind::Logarithmic);
SemiNormSpec bose_seminorm(int N);

// max over x = |m><m'| in the sector of the sector block of
// [c, P(x)] - sqrt(lambda) P([c, x]), c in {a, a^dag}.
double bose_intertwining_residual(const BoseChannel& ch, int sector);

// U_lambda U_mu against a rotation by the summed angles, on the 1-photon sector.
double bose_angle_addition_residual(double lambda, double mu);

struct EnergyReport {
  double energy_in = 0.0;
  double energy_env = 0.0;
  double energy_out = 0.0;       // Tr(P^dag(rho) a^dag a), truncated
  double energy_bound = 0.0;     // (sqrt(lambda E_rho) + sqrt((1 - lambda) E_sigma))^2
  double slack = 0.0;            // bound - out
  double leakage = 0.0;
  double diameter_bound = 0.0;   // closed form, infimum over the beta grid
  double best_beta = 0.0;
  double jump = 0.0;             // W_L(rho, P^dag rho) from the SDP
};

// inf_beta sqrt(64 coth(beta/2) (beta E - ln(1 - e^{-beta}))) over a log grid.
double energy_diameter_bound(double E, double* best_beta = nullptr);

EnergyReport energy_bound_check(const BoseChannel& ch, const CMat& rho, bool with_jump = true,
                                const SdpOptions& opt = {});

// ||[b, sigma]||_1 on the environment cutoff.
double env_commutator_norm(const CMat& env);

struct RegularityReport {
  double lhs = 0.0;   // ||P^dag(rho1 - rho2)||_1
  double rhs = 0.0;   // sqrt(lambda/(1-lambda)) ||[b, sigma]||_1 W_L(rho1, rho2)
  double slack = 0.0;
  double transport = 0.0;
  double env_norm = 0.0;
  double env_norm_stability = 0.0;  // change of ||[b, sigma]||_1 at cutoff + 5 for thermal env
  std::vector<MixingRow> chain;     // ||(P^dag)^n (rho1 - rho2)||_1 vs lambda^{(n-1)/2} times the constant
};

RegularityReport regularity_check(const BoseChannel& ch, const CMat& rho1, const CMat& rho2, int steps = 6,
                                  const SdpOptions& opt = {});

// ||rho_n - rho_{n+1}||_1 against lambda^{(n-1)/2} sqrt(lambda/(1-lambda)) ||[b,sigma]||_1 J,
// where J is the closed-form energy bound on the jump. Steps n = 1..steps.
struct MixingCorollaryRow {
  int step = 0;
  double measured = 0.0;
  double bound_jump = 0.0;    // with the SDP jump
  double bound_closed = 0.0;  // with the closed-form energy bound
};
std::vector<MixingCorollaryRow> bose_mixing_corollary(const BoseChannel& ch, const CMat& rho, int steps,
                                                      const SdpOptions& opt = {});

// Jordan-Wigner Majorana operators c_1..c_{2n} on 2^n levels.
std::vector<CMat> clifford_generators(int n);
// c_A for an ascending index list (0-based).
CMat clifford_product(const std::vector<CMat>& c, const std::vector<int>& A);
// prod_j (-i c_{2j-1} c_{2j})
CMat clifford_parity(const std::vector<CMat>& c);

struct FermiReport {
  double car_residual = 0.0;
  double relation_residual = 0.0;     // rotation relations on the joint space
  double intertwining_residual = 0.0; // max_j ||[c_j, P(x)] - sqrt(lambda) P([c_j, x])|| over a matrix-unit basis
  double intertwining_residual_even = 0.0;  // same over the even monomials c_A
  double even_residual = 0.0;         // odd part of P(even basis elements)
  double structural_factor = 0.0;     // sqrt(lambda)
  CMat unitary;
};

// U = exp(Q) with Q quadratic in the joint Majoranas, found by least squares.
std::pair<Channel, FermiReport> fermi_beam_splitter(double lambda, int n, const CMat& env);

SemiNormSpec fermi_seminorm(int n);

}  // namespace qcurv

#endif  // QCURV_CVMODELS_HPP
