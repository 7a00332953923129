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

#ifndef QCURV_PAULI_HPP
#define QCURV_PAULI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qcurv/channels.hpp"

namespace qcurv {

// n-qubit Pauli string in symplectic form; bit i of x/z refers to site i,
// and site 0 is the leftmost tensor factor.
struct PauliString {
  int n = 0;
  std::uint32_t x = 0;
  std::uint32_t z = 0;

  static PauliString parse(const std::string& letters);
  static PauliString from_index(int n, std::uint64_t idx);
  std::uint64_t index() const { return static_cast<std::uint64_t>(x) | (static_cast<std::uint64_t>(z) << n); }
  std::string str() const;
  bool is_identity() const { return x == 0 && z == 0; }
  CMat matrix() const;
  // Sign-free product.
  PauliString operator*(const PauliString& o) const { return {n, x ^ o.x, z ^ o.z}; }
  bool operator==(const PauliString& o) const { return n == o.n && x == o.x && z == o.z; }
};

// 0 iff sigma_a and sigma_b commute.
int c_sign(const PauliString& a, const PauliString& b);

struct PauliTerm {
  PauliString string;
  double weight = 0.0;
};

struct PauliChannelSpec {
  int n = 0;
  std::vector<PauliTerm> terms;
  void validate() const;
  double min_weight() const;
};

Channel pauli_channel(const PauliChannelSpec& spec);

// mu_gamma = sum_alpha lambda_alpha (-1)^{c(alpha, gamma)}
double pauli_eigenvalue(const PauliChannelSpec& spec, const PauliString& gamma);
// Indexed by PauliString::index(), all 4^n strings.
std::vector<double> pauli_channel_eigenvalues(const PauliChannelSpec& spec);

// Group generated by the strings of the channel, signs dropped.
std::vector<PauliString> pauli_generated_group(const PauliChannelSpec& spec);
ConditionalExpectation pauli_conditional_expectation(const PauliChannelSpec& spec);
// gamma commutes with every string of the channel.
bool pauli_fixed(const PauliChannelSpec& spec, const PauliString& gamma);

// 1 - 2 min_beta lambda_beta
double pauli_structural_factor(const PauliChannelSpec& spec);

// Generators of the commutator semi-norm max_alpha ||[sigma_alpha, x]||.
std::vector<CMat> pauli_generators(const PauliChannelSpec& spec);

}  // namespace qcurv

#endif  // QCURV_PAULI_HPP
