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

#include "qcurv/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qcurv {

CMat LocalHamiltonian::dense() const {
  const auto ds = dims();
  Eigen::Index total = 1;
  for (int x : ds) total *= x;
  CMat h = CMat::Zero(total, total);
  for (const auto& t : terms) h += embed(t.h, t.sites, ds);
  return h;
}

std::vector<int> LocalHamiltonian::neighborhood(int v) const {
  std::set<int> s{v};
  for (const auto& t : terms)
    if (std::find(t.sites.begin(), t.sites.end(), v) != t.sites.end()) s.insert(t.sites.begin(), t.sites.end());
  return {s.begin(), s.end()};
}

CMat LocalHamiltonian::terms_at(int v) const {
  const auto ds = dims();
  Eigen::Index total = 1;
  for (int x : ds) total *= x;
  CMat h = CMat::Zero(total, total);
  for (const auto& t : terms)
    if (std::find(t.sites.begin(), t.sites.end(), v) != t.sites.end()) h += embed(t.h, t.sites, ds);
  return h;
}

double LocalHamiltonian::max_commutator() const {
  const auto ds = dims();
  std::vector<CMat> full;
  for (const auto& t : terms) full.push_back(embed(t.h, t.sites, ds));
  double m = 0;
  for (size_t a = 0; a < full.size(); ++a)
    for (size_t b = a + 1; b < full.size(); ++b) m = std::max(m, op_norm(comm(full[a], full[b])));
  return m;
}

LocalHamiltonian ising_chain(int n, double coupling, double field) {
  if (n < 1) throw PreconditionError("ising_chain: n must be positive");
  LocalHamiltonian h;
  h.n = n;
  h.d = 2;
  CMat z(2, 2);
  z << 1, 0, 0, -1;
  for (int i = 0; i + 1 < n; ++i) h.terms.push_back({{i, i + 1}, coupling * kron(z, z)});
  if (field != 0.0)
    for (int i = 0; i < n; ++i) h.terms.push_back({{i}, field * z});
  return h;
}

CMat gibbs_state(const CMat& H, double beta) {
  HermEig e = herm_eig(H, 1e-10);
  const double shift = e.values.minCoeff();
  RVec w = (-beta * (e.values.array() - shift)).exp().matrix();
  w /= w.sum();
  return e.vectors * w.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

CMat petz_site_adjoint_superop(const CMat& omega, const std::vector<int>& dims, int v) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (i != v) keep.push_back(i);
  const CMat om_half = sqrtm_psd(omega);
  const CMat om_c_mhalf = inv_sqrtm_psd(partial_trace(omega, dims, keep));
  return superop_from_map(omega.rows(), [&](const CMat& rho) {
    const CMat inner = om_c_mhalf * partial_trace(rho, dims, keep) * om_c_mhalf;
    return CMat(om_half * embed(inner, keep, dims) * om_half);
  });
}

CMat petz_site_superop(const CMat& omega, const std::vector<int>& dims, int v) {
  return petz_site_adjoint_superop(omega, dims, v).adjoint();
}

GeneratorSpec heat_bath_generator(const LocalHamiltonian& H, double beta) {
  if (beta < 0) throw PreconditionError("heat_bath_generator: beta must be non-negative");
  for (const auto& t : H.terms)
    if (op_norm(t.h) > 1.0 + 1e-12) throw PreconditionError("heat_bath_generator: local term with norm > 1");
  if (H.max_commutator() > 1e-10)
    throw PreconditionError("heat_bath_generator: Hamiltonian terms do not commute");
  const auto dims = H.dims();
  const CMat omega = gibbs_state(H.dense(), beta);
  GeneratorSpec g;
  g.dim = static_cast<int>(omega.rows());
  g.site_dims = dims;
  const Eigen::Index dd = omega.size();
  g.superop = CMat::Zero(dd, dd);
  for (int v = 0; v < H.n; ++v) {
    CMat lv = petz_site_superop(omega, dims, v) - CMat::Identity(dd, dd);
    g.superop += lv;
    g.local.push_back(std::move(lv));
    g.neighborhoods.push_back(H.neighborhood(v));
  }
  return g;
}

LocalPetzDifference local_petz_difference(const LocalHamiltonian& H, double beta, int w) {
  LocalPetzDifference out;
  out.region = H.neighborhood(w);
  const int r = static_cast<int>(out.region.size());
  const std::vector<int> rdims(static_cast<size_t>(r), H.d);
  const int wpos = static_cast<int>(std::find(out.region.begin(), out.region.end(), w) - out.region.begin());
  std::vector<int> keep;
  for (int i = 0; i < r; ++i)
    if (i != wpos) keep.push_back(i);
  Eigen::Index dr = 1;
  for (int x : rdims) dr *= x;
  CMat hw = CMat::Zero(dr, dr);
  for (const auto& t : H.terms) {
    if (std::find(t.sites.begin(), t.sites.end(), w) == t.sites.end()) continue;
    std::vector<int> pos;
    for (int s : t.sites)
      pos.push_back(static_cast<int>(std::find(out.region.begin(), out.region.end(), s) - out.region.begin()));
    hw += embed(t.h, pos, rdims);
  }
  const CMat e_half = mat_exp(CMat(-beta / 2 * hw));
  const CMat k_mhalf = inv_sqrtm_psd(partial_trace(mat_exp(CMat(-beta * hw)), rdims, keep));
  out.d_in = static_cast<int>(dr / H.d);
  out.d_out = static_cast<int>(dr);
  out.choi = CMat::Zero(static_cast<Eigen::Index>(out.d_in) * out.d_out,
                        static_cast<Eigen::Index>(out.d_in) * out.d_out);
  for (int b = 0; b < out.d_in; ++b)
    for (int a = 0; a < out.d_in; ++a) {
      const CMat e = unit(out.d_in, a, b);
      const CMat petz = e_half * embed(CMat(k_mhalf * e * k_mhalf), keep, rdims) * e_half;
      const CMat tau = embed(e, keep, rdims) / static_cast<double>(H.d);
      out.choi.block(static_cast<Eigen::Index>(a) * out.d_out, static_cast<Eigen::Index>(b) * out.d_out,
                     out.d_out, out.d_out) = petz - tau;
    }
  return out;
}

}  // namespace qcurv
