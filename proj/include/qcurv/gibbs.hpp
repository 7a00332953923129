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

#ifndef QCURV_GIBBS_HPP
#define QCURV_GIBBS_HPP

#include <vector>

#include "qcurv/channels.hpp"

namespace qcurv {

struct LocalTerm {
  std::vector<int> sites;
  CMat h;  // acts on `sites` in the listed order
};

// H = sum_A h_A on n sites of local dimension d.
struct LocalHamiltonian {
  int n = 0;
  int d = 2;
  std::vector<LocalTerm> terms;

  std::vector<int> dims() const { return std::vector<int>(static_cast<size_t>(n), d); }
  CMat dense() const;
  // Union of the supports of the terms containing v (always contains v).
  std::vector<int> neighborhood(int v) const;
  // Sum of the terms containing v.
  CMat terms_at(int v) const;
  // ||[h_A, h_B]|| maximized over pairs.
  double max_commutator() const;
};

// H = coupling * sum_i Z_i Z_{i+1} + field * sum_i Z_i (open chain).
LocalHamiltonian ising_chain(int n, double coupling, double field);

// e^{-beta H}/Tr e^{-beta H}, built in the eigenbasis of H with a spectral shift.
CMat gibbs_state(const CMat& H, double beta);

// Heisenberg-picture Petz heat-bath map Psi_v on the full space.
CMat petz_site_superop(const CMat& omega, const std::vector<int>& dims, int v);
// Pre-adjoint rho -> omega^{1/2}(omega_{v^c}^{-1/2} rho_{v^c} omega_{v^c}^{-1/2} (x) I_v) omega^{1/2}.
CMat petz_site_adjoint_superop(const CMat& omega, const std::vector<int>& dims, int v);

// L_V = sum_v (Psi_v - id).
GeneratorSpec heat_bath_generator(const LocalHamiltonian& H, double beta);

// Choi matrix of rho_{N_w \ w} -> Psi_w^dag - tau_w^dag restricted to the
// neighborhood of w. The input leaves out w since both maps trace it first.
struct LocalPetzDifference {
  CMat choi;
  int d_in = 0;
  int d_out = 0;
  std::vector<int> region;  // sites of N_w, ascending
};
LocalPetzDifference local_petz_difference(const LocalHamiltonian& H, double beta, int w);

}  // namespace qcurv

#endif  // QCURV_GIBBS_HPP
