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

#include "qcurv/cvmodels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qcurv {

namespace {

// Tridiagonal generator a^dag b - b^dag a on the basis |p, n-p>, p in [lo, hi].
CMat sector_generator(int n, int lo, int hi) {
  const int m = hi - lo + 1;
  CMat g = CMat::Zero(m, m);
  for (int p = lo; p <= hi; ++p) {
    const int c = p - lo;
    if (p + 1 <= hi) g(c + 1, c) = std::sqrt(static_cast<double>(p + 1) * (n - p));
    if (p - 1 >= lo) g(c - 1, c) = -std::sqrt(static_cast<double>(p) * (n - p + 1));
  }
  return g;
}

// exp(theta g) for real antisymmetric g via the Hermitian matrix i g.
CMat rotate(const CMat& g, double theta) {
  const HermEig e = herm_eig(hermitize(CMat(cplx(0, 1) * g)), 1e-10);
  CVec ph(e.values.size());
  for (Eigen::Index k = 0; k < ph.size(); ++k) ph(k) = std::exp(cplx(0, -theta * e.values(k)));
  return e.vectors * ph.asDiagonal() * e.vectors.adjoint();
}

CMat fock_commutator_b(const CMat& s) {
  const FockOps f = fock_ops(static_cast<int>(s.rows()) - 1);
  return comm(f.a, s);
}

}  // namespace

FockOps fock_ops(int N) {
  if (N < 1) throw PreconditionError("fock_ops: cutoff must be at least 1");
  FockOps f;
  f.a = CMat::Zero(N + 1, N + 1);
  for (int k = 1; k <= N; ++k) f.a(k - 1, k) = std::sqrt(static_cast<double>(k));
  f.adag = f.a.adjoint();
  f.number = f.adag * f.a;
  return f;
}

double beam_splitter_angle(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw PreconditionError("beam splitter: lambda must lie in [0, 1]");
  return std::acos(std::sqrt(lambda));
}

CMat beam_splitter_sector(double lambda, int n) {
  return rotate(sector_generator(n, 0, n), beam_splitter_angle(lambda));
}

CMat beam_splitter_unitary(double lambda, int N) {
  const double theta = beam_splitter_angle(lambda);
  const Eigen::Index D = static_cast<Eigen::Index>(N + 1) * (N + 1);
  CMat U = CMat::Zero(D, D);
  for (int n = 0; n <= 2 * N; ++n) {
    const int lo = std::max(0, n - N);
    const int hi = std::min(n, N);
    const CMat R = rotate(sector_generator(n, lo, hi), theta);
    for (int p = lo; p <= hi; ++p)
      for (int q = lo; q <= hi; ++q)
        U(static_cast<Eigen::Index>(p) * (N + 1) + (n - p), static_cast<Eigen::Index>(q) * (N + 1) + (n - q)) =
            R(p - lo, q - lo);
  }
  return U;
}

void BeamSplitterSpec::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw PreconditionError("beam splitter: lambda must lie in [0, 1]");
  if (cutoff < 1) throw PreconditionError("beam splitter: cutoff must be at least 1");
  if (env.rows() != cutoff + 1 || env.cols() != cutoff + 1)
    throw DimensionError("beam splitter: environment must live on cutoff + 1 levels");
  check_state(env, "beam splitter environment");
}

ThermalState thermal_state(double beta, int N) {
  if (N < 1) throw PreconditionError("thermal_state: cutoff must be at least 1");
  if (beta <= 0) throw PreconditionError("thermal_state: beta must be positive");
  RVec p(N + 1);
  for (int k = 0; k <= N; ++k) p(k) = std::exp(-beta * k);
  p /= p.sum();
  ThermalState t;
  t.rho = p.cast<cplx>().asDiagonal();
  for (int k = 0; k <= N; ++k) t.energy += k * p(k);
  t.truncation_error = std::abs(t.energy - 1.0 / std::expm1(beta));
  return t;
}

BoseChannel bose_channel(const BeamSplitterSpec& spec) {
  spec.validate();
  const int N = spec.cutoff;
  const Eigen::Index d = N + 1;
  const double theta = beam_splitter_angle(spec.lambda);
  std::vector<CMat> R;
  for (int n = 0; n <= 2 * N; ++n) R.push_back(rotate(sector_generator(n, 0, n), theta));
  const CMat& sig = spec.env;
  // <i|P(|m><m'|)|j> = sum_{k,k'} sigma_{k'k} conj(R_{i+k}(m,i)) R_{j+k'}(m',j), with m + l = i + k, m' + l = j + k'.
  CMat S = CMat::Zero(d * d, d * d);
  for (int i = 0; i <= N; ++i)
    for (int k = 0; k <= N; ++k) {
      const int n1 = i + k;
      for (int m = 0; m <= std::min(N, n1); ++m) {
        const int l = n1 - m;
        const cplx left = std::conj(R[static_cast<size_t>(n1)](m, i));
        if (left == cplx(0)) continue;
        for (int j = 0; j <= N; ++j)
          for (int mp = 0; mp <= N; ++mp) {
            const int kp = mp + l - j;
            if (kp < 0 || kp > N) continue;
            const cplx s = sig(kp, k);
            if (s == cplx(0)) continue;
            const int n2 = j + kp;
            S(i + j * d, m + mp * d) += s * left * R[static_cast<size_t>(n2)](mp, j);
          }
      }
    }
  BoseChannel out;
  out.spec = spec;
  out.channel = channel_from_superop(S, false);
  out.unit_defect = hermitize(CMat(CMat::Identity(d, d) - out.channel.apply(CMat::Identity(d, d))));
  return out;
}

double bose_leakage(const BoseChannel& ch, const CMat& rho) {
  return 1.0 - ch.channel.apply_adjoint(rho).trace().real();
}

CMat fock_sector_basis(int N, int sector) {
  if (sector < 0 || sector > N) throw PreconditionError("fock_sector_basis: sector outside the cutoff");
  const Eigen::Index d = N + 1;
  const Eigen::Index s = sector + 1;
  CMat Q = CMat::Zero(d * d, s * s);
  Eigen::Index c = 0;
  for (Eigen::Index mp = 0; mp < s; ++mp)
    for (Eigen::Index m = 0; m < s; ++m) Q(m + mp * d, c++) = 1.0;
  return Q;
}

CMat embed_fock_state(const CMat& rho, int N) {
  if (rho.rows() > N + 1) throw DimensionError("embed_fock_state: state larger than the cutoff");
  CMat out = CMat::Zero(N + 1, N + 1);
  out.topLeftCorner(rho.rows(), rho.cols()) = rho;
  return out;
}

DerivationStructure bose_derivations(int N, MeanKind mean) {
  const FockOps f = fock_ops(N);
  DerivationStructure ds;
  ds.v = {f.a, f.adag};
  ds.omega = {0.0, 0.0};
  ds.mean = mean;
  return ds;
}

SemiNormSpec bose_seminorm(int N) {
  const FockOps f = fock_ops(N);
  return SemiNormSpec::commutator_max({f.a, f.adag});
}

double bose_intertwining_residual(const BoseChannel& ch, int sector) {
  const int N = ch.spec.cutoff;
  if (sector < 0 || sector >= N) throw PreconditionError("bose_intertwining_residual: sector must be below the cutoff");
  const FockOps f = fock_ops(N);
  const double s = std::sqrt(ch.spec.lambda);
  const Eigen::Index b = sector + 1;
  double worst = 0.0;
  for (const CMat* c : {&f.a, &f.adag})
    for (Eigen::Index m = 0; m < b; ++m)
      for (Eigen::Index mp = 0; mp < b; ++mp) {
        const CMat x = unit(N + 1, m, mp);
        const CMat r = comm(*c, ch.channel.apply(x)) - s * ch.channel.apply(comm(*c, x));
        worst = std::max(worst, op_norm(r.topLeftCorner(b, b)));
      }
  return worst;
}

double bose_angle_addition_residual(double lambda, double mu) {
  const double total = beam_splitter_angle(lambda) + beam_splitter_angle(mu);
  const CMat composed = beam_splitter_sector(lambda, 1) * beam_splitter_sector(mu, 1);
  const CMat direct = rotate(sector_generator(1, 0, 1), total);
  return op_norm(CMat(composed - direct));
}

double energy_diameter_bound(double E, double* best_beta) {
  double best = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (int k = 0; k <= 4000; ++k) {
    const double beta = std::pow(10.0, -4.0 + 6.0 * k / 4000.0);
    const double val = 64.0 / std::tanh(beta / 2) * (beta * E - std::log(-std::expm1(-beta)));
    if (val >= 0 && std::sqrt(val) < best) {
      best = std::sqrt(val);
      arg = beta;
    }
  }
  if (best_beta) *best_beta = arg;
  return best;
}

double env_commutator_norm(const CMat& env) { return trace_norm(fock_commutator_b(env)); }

EnergyReport energy_bound_check(const BoseChannel& ch, const CMat& rho, bool with_jump, const SdpOptions& opt) {
  const int N = ch.spec.cutoff;
  check_state(rho, "energy_bound_check: rho");
  if (rho.rows() != N + 1) throw DimensionError("energy_bound_check: state outside the cutoff");
  const FockOps f = fock_ops(N);
  const double lam = ch.spec.lambda;
  EnergyReport r;
  r.energy_in = (rho * f.number).trace().real();
  r.energy_env = (ch.spec.env * f.number).trace().real();
  r.energy_out = (ch.channel.apply_adjoint(rho) * f.number).trace().real();
  r.energy_bound = std::pow(std::sqrt(lam * r.energy_in) + std::sqrt((1 - lam) * r.energy_env), 2);
  r.slack = r.energy_bound - r.energy_out;
  r.leakage = bose_leakage(ch, rho);
  r.diameter_bound = energy_diameter_bound(std::max(r.energy_in, r.energy_bound), &r.best_beta);
  if (with_jump) {
    // The truncated output loses r.leakage of its trace; the jump is taken to its normalization.
    const CMat out = hermitize(ch.channel.apply_adjoint(rho));
    const TransportResult j = w1_dual(bose_seminorm(N), rho, CMat(out / out.trace().real()), opt);
    r.jump = j.infinite ? std::numeric_limits<double>::infinity() : j.value;
  }
  return r;
}

RegularityReport regularity_check(const BoseChannel& ch, const CMat& rho1, const CMat& rho2, int steps,
                                  const SdpOptions& opt) {
  const double lam = ch.spec.lambda;
  if (lam >= 1.0) throw PreconditionError("regularity_check: lambda must be below one");
  check_state(rho1, "regularity_check: rho1");
  check_state(rho2, "regularity_check: rho2");
  const int N = ch.spec.cutoff;
  RegularityReport r;
  const CMat diff = rho1 - rho2;
  r.lhs = trace_norm(CMat(ch.channel.apply_adjoint(diff)));
  r.env_norm = env_commutator_norm(ch.spec.env);
  r.env_norm_stability = std::abs(env_commutator_norm(embed_fock_state(ch.spec.env, N + 5)) - r.env_norm);
  const TransportResult t = w1_dual(bose_seminorm(N), rho1, rho2, opt);
  r.transport = t.infinite ? std::numeric_limits<double>::infinity() : t.value;
  const double c = std::sqrt(lam / (1 - lam)) * r.env_norm;
  r.rhs = c * r.transport;
  r.slack = r.rhs - r.lhs;
  CMat cur = diff;
  for (int n = 1; n <= steps; ++n) {
    cur = ch.channel.apply_adjoint(cur);
    r.chain.push_back({n, trace_norm(cur), std::pow(lam, (n - 1) / 2.0) * c * r.transport});
  }
  return r;
}

std::vector<MixingCorollaryRow> bose_mixing_corollary(const BoseChannel& ch, const CMat& rho, int steps,
                                                      const SdpOptions& opt) {
  const double lam = ch.spec.lambda;
  if (lam >= 1.0) throw PreconditionError("bose_mixing_corollary: lambda must be below one");
  const EnergyReport e = energy_bound_check(ch, rho, true, opt);
  const double c = std::sqrt(lam / (1 - lam)) * env_commutator_norm(ch.spec.env);
  std::vector<MixingCorollaryRow> rows;
  CMat cur = ch.channel.apply_adjoint(rho);
  for (int n = 1; n <= steps; ++n) {
    const CMat next = ch.channel.apply_adjoint(cur);
    const double f = std::pow(lam, (n - 1) / 2.0) * c;
    rows.push_back({n, trace_norm(CMat(cur - next)), f * e.jump, f * e.diameter_bound});
    cur = next;
  }
  return rows;
}

std::vector<CMat> clifford_generators(int n) {
  if (n < 1 || n > 6) throw PreconditionError("clifford_generators: 1 <= n <= 6");
  CMat X(2, 2), Y(2, 2), Z(2, 2), I = CMat::Identity(2, 2);
  X << 0, 1, 1, 0;
  Y << 0, cplx(0, -1), cplx(0, 1), 0;
  Z << 1, 0, 0, -1;
  std::vector<CMat> out;
  for (int j = 0; j < n; ++j)
    for (const CMat* p : {&X, &Y}) {
      std::vector<CMat> f;
      for (int s = 0; s < n; ++s) f.push_back(s < j ? Z : (s == j ? *p : I));
      out.push_back(kron_all(f));
    }
  return out;
}

CMat clifford_product(const std::vector<CMat>& c, const std::vector<int>& A) {
  if (c.empty()) throw PreconditionError("clifford_product: no generators");
  CMat out = CMat::Identity(c.front().rows(), c.front().cols());
  int prev = -1;
  for (int i : A) {
    if (i <= prev || i >= static_cast<int>(c.size())) throw PreconditionError("clifford_product: indices must ascend");
    out = out * c[static_cast<size_t>(i)];
    prev = i;
  }
  return out;
}

CMat clifford_parity(const std::vector<CMat>& c) {
  CMat g = CMat::Identity(c.front().rows(), c.front().cols());
  for (size_t j = 0; j + 1 < c.size(); j += 2) g = g * (cplx(0, -1) * c[j] * c[j + 1]);
  return g;
}

SemiNormSpec fermi_seminorm(int n) { return SemiNormSpec::commutator_max(clifford_generators(n)); }

std::pair<Channel, FermiReport> fermi_beam_splitter(double lambda, int n, const CMat& env) {
  const double theta = beam_splitter_angle(lambda);
  const std::vector<CMat> c = clifford_generators(n);
  const Eigen::Index d = c.front().rows();
  if (env.rows() != d || env.cols() != d) throw DimensionError("fermi_beam_splitter: environment shape");
  check_state(env, "fermi_beam_splitter: environment");
  const CMat parity = clifford_parity(c);
  if (op_norm(CMat(parity * env * parity - env)) > 1e-10)
    throw PreconditionError("fermi_beam_splitter: environment is not even");

  FermiReport rep;
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) {
      const CMat ac = c[i] * c[j] + c[j] * c[i] - (i == j ? 2.0 : 0.0) * CMat::Identity(d, d);
      rep.car_residual = std::max(rep.car_residual, ac.cwiseAbs().maxCoeff());
    }

  // Joint Majoranas: c_j (x) 1 and the parity-dressed P (x) c_j.
  const int m = 2 * n;
  const CMat id = CMat::Identity(d, d);
  std::vector<CMat> g;
  for (const auto& x : c) g.push_back(kron(x, id));
  for (const auto& x : c) g.push_back(kron(parity, x));
  const auto G = static_cast<Eigen::Index>(g.size());
  const double D = static_cast<double>(d * d);
  auto coeffs = [&](const CMat& x) {
    RVec v(G);
    for (Eigen::Index p = 0; p < G; ++p) v(p) = ((g[static_cast<size_t>(p)] * x).trace() / D).real();
    return v;
  };
  // -ad(g_k g_l) on span{g}, one column per quadratic monomial.
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k < G; ++k)
    for (int l = k + 1; l < G; ++l) pairs.emplace_back(k, l);
  RMat A(G * G, static_cast<Eigen::Index>(pairs.size()));
  for (size_t q = 0; q < pairs.size(); ++q) {
    const CMat mono = g[static_cast<size_t>(pairs[q].first)] * g[static_cast<size_t>(pairs[q].second)];
    RMat M(G, G);
    for (Eigen::Index col = 0; col < G; ++col) M.col(col) = coeffs(CMat(-comm(mono, g[static_cast<size_t>(col)])));
    A.col(static_cast<Eigen::Index>(q)) = Eigen::Map<const RVec>(M.data(), G * G);
  }
  RMat T = RMat::Zero(G, G);
  for (int j = 0; j < m; ++j) {
    T(j + m, j) = 1.0;
    T(j, j + m) = -1.0;
  }
  const RVec h = A.colPivHouseholderQr().solve(Eigen::Map<const RVec>(T.data(), G * G));
  CMat Q = CMat::Zero(d * d, d * d);
  for (size_t q = 0; q < pairs.size(); ++q)
    Q += theta * h(static_cast<Eigen::Index>(q)) * g[static_cast<size_t>(pairs[q].first)] *
         g[static_cast<size_t>(pairs[q].second)];
  rep.unitary = mat_exp(Q);
  const CMat& U = rep.unitary;
  const double cs = std::cos(theta), sn = std::sin(theta);
  for (int j = 0; j < m; ++j) {
    const CMat& a = g[static_cast<size_t>(j)];
    const CMat& b = g[static_cast<size_t>(j + m)];
    rep.relation_residual = std::max(rep.relation_residual, op_norm(CMat(U.adjoint() * a * U - (cs * a + sn * b))));
    rep.relation_residual = std::max(rep.relation_residual, op_norm(CMat(U.adjoint() * b * U - (-sn * a + cs * b))));
  }
  rep.relation_residual =
      std::max(rep.relation_residual, op_norm(CMat(U.adjoint() * U - CMat::Identity(d * d, d * d))));
  if (rep.relation_residual > 1e-6)
    throw NumericalError("fermi_beam_splitter: rotation relations fail, residual " +
                         std::to_string(rep.relation_residual));

  const std::vector<int> dims{static_cast<int>(d), static_cast<int>(d)};
  const CMat env_big = kron(id, env);
  const CMat S = superop_from_map(d, [&](const CMat& x) {
    return CMat(partial_trace(CMat(env_big * U.adjoint() * kron(x, id) * U), dims, {0}));
  });
  Channel ch = channel_from_superop(S, true);

  const double s = std::sqrt(lambda);
  rep.structural_factor = s;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) {
      const CMat x = unit(d, a, b);
      const CMat px = ch.apply(x);
      for (const auto& cj : c)
        rep.intertwining_residual =
            std::max(rep.intertwining_residual, op_norm(CMat(comm(cj, px) - s * ch.apply(comm(cj, x)))));
    }
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> A_;
    for (int i = 0; i < m; ++i)
      if (mask & (1 << i)) A_.push_back(i);
    if (A_.size() % 2) continue;
    const CMat cA = clifford_product(c, A_);
    const CMat y = ch.apply(cA);
    for (const auto& cj : c)
      rep.intertwining_residual_even =
          std::max(rep.intertwining_residual_even, op_norm(CMat(comm(cj, y) - s * ch.apply(comm(cj, cA)))));
    rep.even_residual = std::max(rep.even_residual, op_norm(CMat(y - parity * y * parity)) / 2);
  }
  return {std::move(ch), rep};
}

}  // namespace qcurv
