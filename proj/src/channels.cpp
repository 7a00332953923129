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

#include "qcurv/channels.hpp"

#include <cmath>
#include <numeric>

namespace qcurv {

namespace {

int sqrt_dim(Eigen::Index n) {
  const auto d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
  if (static_cast<Eigen::Index>(d) * d != n) throw DimensionError("superoperator size is not a square");
  return d;
}

}  // namespace

bool is_state(const CMat& rho, double tol) {
  if (rho.rows() != rho.cols() || rho.size() == 0) return false;
  if (!rho.allFinite()) return false;
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho.trace() - 1.0) > tol) return false;
  return min_eig(rho) >= -tol;
}

void check_state(const CMat& rho, const std::string& what) {
  if (!is_state(rho)) throw PreconditionError(what + ": not a density matrix");
}

double Channel::unitality_residual() const {
  const CMat id = CMat::Identity(dim, dim);
  return (apply(id) - id).cwiseAbs().maxCoeff();
}

double Channel::min_choi_eig() const { return min_eig(choi()); }

bool Channel::is_cptp(double tol) const {
  return unitality_residual() <= tol && min_choi_eig() >= -tol;
}

Channel identity_channel(int d) {
  Channel ch;
  ch.dim = d;
  ch.kraus = {CMat::Identity(d, d)};
  ch.superop = CMat::Identity(d * d, d * d);
  ch.adjoint_superop = ch.superop;
  return ch;
}

Channel channel_from_kraus(const std::vector<CMat>& kraus, double tol) {
  if (kraus.empty()) throw PreconditionError("channel_from_kraus: empty Kraus list");
  const Eigen::Index d = kraus.front().rows();
  CMat completeness = CMat::Zero(d, d);
  for (const auto& k : kraus) {
    if (k.rows() != d || k.cols() != d) throw DimensionError("channel_from_kraus: Kraus shape");
    completeness += k.adjoint() * k;
  }
  if ((completeness - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
    throw PreconditionError("channel_from_kraus: sum K^dag K != I");
  Channel ch;
  ch.dim = static_cast<int>(d);
  ch.kraus = kraus;
  ch.superop = CMat::Zero(d * d, d * d);
  for (const auto& k : kraus) ch.superop += lr_superop(k.adjoint(), k);
  ch.adjoint_superop = ch.superop.adjoint();
  return ch;
}

Channel channel_from_superop(const CMat& heisenberg, bool check, double tol) {
  Channel ch;
  ch.dim = sqrt_dim(heisenberg.rows());
  ch.superop = heisenberg;
  ch.adjoint_superop = heisenberg.adjoint();
  if (check && !ch.is_cptp(tol))
    throw PreconditionError("channel_from_superop: map is not unital completely positive");
  return ch;
}

Channel compose(const Channel& a, const Channel& b) {
  if (a.dim != b.dim) throw DimensionError("compose: dimension mismatch");
  return channel_from_superop(a.superop * b.superop, false);
}

Channel mix(double lambda, const Channel& a, const Channel& b) {
  if (a.dim != b.dim) throw DimensionError("mix: dimension mismatch");
  return channel_from_superop(lambda * a.superop + (1 - lambda) * b.superop, false);
}

Channel channel_power(const Channel& ch, int k) {
  CMat s = CMat::Identity(ch.superop.rows(), ch.superop.cols());
  for (int i = 0; i < k; ++i) s = ch.superop * s;
  return channel_from_superop(s, false);
}

CMat embed(const CMat& op, const std::vector<int>& sites, const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size());
  Eigen::Index dsub = 1;
  for (int s : sites) {
    if (s < 0 || s >= n) throw DimensionError("embed: site out of range");
    dsub *= dims[s];
  }
  if (op.rows() != dsub || op.cols() != dsub) throw DimensionError("embed: operator size");
  const Eigen::Index total = std::accumulate(dims.begin(), dims.end(), Eigen::Index{1},
                                             [](Eigen::Index a, int b) { return a * b; });
  std::vector<bool> in(n, false);
  for (int s : sites) in[s] = true;
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (!in[i]) rest.push_back(i);
  std::vector<Eigen::Index> stride(n);
  Eigen::Index st = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = st;
    st *= dims[i];
  }
  auto offsets = [&](const std::vector<int>& f) {
    std::vector<Eigen::Index> off{0};
    for (int i : f) {
      std::vector<Eigen::Index> next;
      for (Eigen::Index o : off)
        for (int a = 0; a < dims[i]; ++a) next.push_back(o + a * stride[i]);
      off.swap(next);
    }
    return off;
  };
  const auto so = offsets(sites);
  const auto ro = offsets(rest);
  CMat out = CMat::Zero(total, total);
  for (Eigen::Index r : ro)
    for (Eigen::Index j = 0; j < dsub; ++j)
      for (Eigen::Index i = 0; i < dsub; ++i)
        if (op(i, j) != cplx(0)) out(so[i] + r, so[j] + r) = op(i, j);
  return out;
}

CMat site_trace_superop(const std::vector<int>& dims, int site) {
  const int n = static_cast<int>(dims.size());
  if (site < 0 || site >= n) throw DimensionError("site_trace_superop: site out of range");
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (i != site) keep.push_back(i);
  Eigen::Index d = 1;
  for (int x : dims) d *= x;
  const int ds = dims[site];
  return superop_from_map(d, [&](const CMat& x) {
    return CMat(embed(partial_trace(x, dims, keep), keep, dims) / static_cast<double>(ds));
  });
}

bool ConditionalExpectation::idempotent(double tol) const {
  return (map.superop * map.superop - map.superop).cwiseAbs().maxCoeff() <= tol;
}

ConditionalExpectation site_replacement(const std::vector<int>& dims, int site) {
  ConditionalExpectation e;
  e.map = channel_from_superop(site_trace_superop(dims, site), false);
  e.descriptor = "site_replacement";
  return e;
}

double GeneratorSpec::unit_residual() const {
  return apply_superop(superop, CMat::Identity(dim, dim)).cwiseAbs().maxCoeff();
}

GeneratorSpec generator_from_superop(const CMat& heisenberg) {
  GeneratorSpec g;
  g.dim = sqrt_dim(heisenberg.rows());
  g.superop = heisenberg;
  g.site_dims = {g.dim};
  return g;
}

Channel semigroup_channel(const GeneratorSpec& gen, double t) {
  if (t < 0) throw PreconditionError("semigroup_channel: t must be non-negative");
  if (t == 0) return identity_channel(gen.dim);
  return channel_from_superop(mat_exp(t * gen.superop), false);
}

double gns_symmetry_residual(const CMat& heisenberg, const CMat& omega) {
  const Eigen::Index d = omega.rows();
  // <x, y>_omega = Tr(omega x^dag y) = vec(x)^dag (omega^T (x) I) vec(y)
  const CMat G = lr_superop(CMat::Identity(d, d), omega);
  return (G * heisenberg - heisenberg.adjoint() * G).cwiseAbs().maxCoeff();
}

double kms_symmetry_residual(const CMat& heisenberg, const CMat& omega) {
  // <x, y>_KMS = Tr(x^dag omega^1/2 y omega^1/2)
  const CMat r = sqrtm_psd(omega);
  const CMat G = lr_superop(r, r);
  return (G * heisenberg - heisenberg.adjoint() * G).cwiseAbs().maxCoeff();
}

ConditionalExpectation fixed_point_expectation(const Channel& ch, const CMat& omega,
                                               FixedPointMode mode) {
  const int d = ch.dim;
  check_state(omega, "fixed_point_expectation: omega");
  ConditionalExpectation e;
  if (mode == FixedPointMode::Primitive) {
    // x -> Tr(omega x) I
    const CVec vi = vec(CMat::Identity(d, d));
    const CVec w = vec(CMat(omega.transpose()));
    e.map = channel_from_superop(vi * w.transpose(), false);
    e.descriptor = "trace";
    return e;
  }
  if (min_eig(omega) <= 1e-12) throw PreconditionError("fixed_point_expectation: omega not faithful");
  const CMat id = CMat::Identity(d, d);
  const CMat om_t = omega.transpose();
  CMat g_half, g_mhalf;
  if (gns_symmetry_residual(ch.superop, omega) <= 1e-8) {
    g_half = kron(sqrtm_psd(om_t), id);
    g_mhalf = kron(inv_sqrtm_psd(om_t), id);
  } else if (kms_symmetry_residual(ch.superop, omega) <= 1e-8) {
    // The limit projection of a KMS-symmetric channel is still an omega-preserving conditional expectation.
    const CMat q = sqrtm_psd(CMat(sqrtm_psd(omega)));
    const CMat qi = inv_sqrtm_psd(CMat(sqrtm_psd(omega)));
    g_half = lr_superop(q, q);
    g_mhalf = lr_superop(qi, qi);
  } else {
    throw PreconditionError("fixed_point_expectation: unsupported structure (channel not GNS- or KMS-symmetric)");
  }
  const CMat T = hermitize(CMat(g_half * ch.superop * g_mhalf));
  Eigen::SelfAdjointEigenSolver<CMat> es(T);
  CMat Q = CMat::Zero(T.rows(), T.cols());
  for (Eigen::Index k = 0; k < T.rows(); ++k)
    if (std::abs(es.eigenvalues()(k) - 1.0) <= 1e-9)
      Q += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  e.map = channel_from_superop(g_mhalf * Q * g_half, false);
  e.descriptor = "fixed_point";
  return e;
}

}  // namespace qcurv
