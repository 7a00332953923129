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

#include "qcurv/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

namespace qcurv {

PauliString PauliString::parse(const std::string& letters) {
  if (letters.empty() || letters.size() > 12) throw PreconditionError("pauli string length must be 1..12");
  PauliString p;
  p.n = static_cast<int>(letters.size());
  for (int i = 0; i < p.n; ++i) {
    switch (letters[static_cast<size_t>(i)]) {
      case 'I': break;
      case 'X': p.x |= 1u << i; break;
      case 'Z': p.z |= 1u << i; break;
      case 'Y': p.x |= 1u << i; p.z |= 1u << i; break;
      default: throw PreconditionError("pauli string: invalid letter '" + std::string(1, letters[static_cast<size_t>(i)]) + "'");
    }
  }
  return p;
}

PauliString PauliString::from_index(int n, std::uint64_t idx) {
  const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
  return {n, static_cast<std::uint32_t>(idx & mask), static_cast<std::uint32_t>((idx >> n) & mask)};
}

std::string PauliString::str() const {
  std::string s(static_cast<size_t>(n), 'I');
  for (int i = 0; i < n; ++i) {
    const bool bx = (x >> i) & 1u, bz = (z >> i) & 1u;
    s[static_cast<size_t>(i)] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }
  return s;
}

CMat PauliString::matrix() const {
  CMat out = CMat::Identity(1, 1);
  for (int i = 0; i < n; ++i) {
    CMat s(2, 2);
    const bool bx = (x >> i) & 1u, bz = (z >> i) & 1u;
    if (bx && bz) s << 0, cplx(0, -1), cplx(0, 1), 0;
    else if (bx) s << 0, 1, 1, 0;
    else if (bz) s << 1, 0, 0, -1;
    else s = CMat::Identity(2, 2);
    out = kron(out, s);
  }
  return out;
}

int c_sign(const PauliString& a, const PauliString& b) {
  if (a.n != b.n) throw DimensionError("c_sign: length mismatch");
  return std::popcount((a.x & b.z) ^ (a.z & b.x)) & 1;
}

void PauliChannelSpec::validate() const {
  if (n < 1 || n > 12) throw PreconditionError("pauli spec: n must be in 1..12");
  if (terms.empty()) throw PreconditionError("pauli spec: no terms");
  double total = 0;
  bool has_identity = false;
  std::set<std::uint64_t> seen;
  for (const auto& t : terms) {
    if (t.string.n != n) throw PreconditionError("pauli spec: string length differs from n");
    if (!(t.weight > 0)) throw PreconditionError("pauli spec: weights must be positive");
    if (!seen.insert(t.string.index()).second) throw PreconditionError("pauli spec: repeated string " + t.string.str());
    has_identity = has_identity || t.string.is_identity();
    total += t.weight;
  }
  if (!has_identity) throw PreconditionError("pauli spec: the all-identity string is required");
  if (std::abs(total - 1.0) > 1e-12) throw PreconditionError("pauli spec: weights must sum to 1");
}

double PauliChannelSpec::min_weight() const {
  double m = 1.0;
  for (const auto& t : terms) m = std::min(m, t.weight);
  return m;
}

Channel pauli_channel(const PauliChannelSpec& spec) {
  spec.validate();
  std::vector<CMat> kraus;
  for (const auto& t : spec.terms) kraus.push_back(std::sqrt(t.weight) * t.string.matrix());
  Channel ch = channel_from_kraus(kraus, 1e-10);
  const int d = ch.dim;
  ch.invariant_state = CMat(CMat::Identity(d, d) / static_cast<double>(d));
  ch.fixed_point_projector = pauli_conditional_expectation(spec).map.superop;
  return ch;
}

double pauli_eigenvalue(const PauliChannelSpec& spec, const PauliString& gamma) {
  double mu = 0;
  for (const auto& t : spec.terms) mu += c_sign(t.string, gamma) ? -t.weight : t.weight;
  return mu;
}

std::vector<double> pauli_channel_eigenvalues(const PauliChannelSpec& spec) {
  spec.validate();
  const std::uint64_t count = std::uint64_t{1} << (2 * spec.n);
  std::vector<double> mu(count);
  for (std::uint64_t k = 0; k < count; ++k)
    mu[k] = pauli_eigenvalue(spec, PauliString::from_index(spec.n, k));
  return mu;
}

std::vector<PauliString> pauli_generated_group(const PauliChannelSpec& spec) {
  std::set<std::uint64_t> group{0};
  for (const auto& t : spec.terms) {
    if (group.count(t.string.index())) continue;
    std::vector<std::uint64_t> add;
    for (std::uint64_t g : group) {
      const PauliString p = PauliString::from_index(spec.n, g) * t.string;
      add.push_back(p.index());
    }
    group.insert(add.begin(), add.end());
  }
  std::vector<PauliString> out;
  for (std::uint64_t g : group) out.push_back(PauliString::from_index(spec.n, g));
  return out;
}

ConditionalExpectation pauli_conditional_expectation(const PauliChannelSpec& spec) {
  const auto group = pauli_generated_group(spec);
  const int d = 1 << spec.n;
  CMat s = CMat::Zero(d * d, d * d);
  for (const auto& g : group) {
    const CMat m = g.matrix();
    s += lr_superop(m, m);
  }
  s /= static_cast<double>(group.size());
  ConditionalExpectation e;
  e.map = channel_from_superop(s, false);
  e.descriptor = "pauli_commutant";
  return e;
}

bool pauli_fixed(const PauliChannelSpec& spec, const PauliString& gamma) {
  for (const auto& t : spec.terms)
    if (c_sign(t.string, gamma)) return false;
  return true;
}

double pauli_structural_factor(const PauliChannelSpec& spec) { return 1.0 - 2.0 * spec.min_weight(); }

std::vector<CMat> pauli_generators(const PauliChannelSpec& spec) {
  std::vector<CMat> out;
  for (const auto& t : spec.terms)
    if (!t.string.is_identity()) out.push_back(t.string.matrix());
  return out;
}

}  // namespace qcurv
