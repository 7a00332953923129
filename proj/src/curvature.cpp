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

#include "qcurv/curvature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

namespace qcurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CMat site_average(const CMat& x, const std::vector<int>& dims, int site) {
  return apply_superop(site_trace_superop(dims, site), x);
}

// Smallest c with a <= c b; +inf when a has weight outside supp(b).
double relative_max_eig(const CMat& a, const CMat& b, double rel = 1e-10) {
  const HermEig e = herm_eig(hermitize(b), 1e-10);
  const double top = std::max(e.values.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (e.values(k) > rel * top) keep.push_back(k);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (keep.empty()) return max_eig(hermitize(a)) > 1e-9 * scale ? kInf : 0.0;
  CMat w(b.rows(), static_cast<Eigen::Index>(keep.size()));
  CMat ub(b.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    ub.col(static_cast<Eigen::Index>(i)) = e.vectors.col(keep[i]);
    w.col(static_cast<Eigen::Index>(i)) = e.vectors.col(keep[i]) / std::sqrt(e.values(keep[i]));
  }
  const CMat perp = CMat::Identity(b.rows(), b.rows()) - ub * ub.adjoint();
  if (op_norm(CMat(a * perp)) > 1e-8 * scale) return kInf;
  return max_eig(hermitize(CMat(w.adjoint() * a * w)));
}

CMat project_out(const CMat& x, const CMat& K) {
  CMat y = hermitize(x);
  if (K.cols() == 0) return y;
  const Eigen::Index d = x.rows();
  return hermitize(CMat(y - unvec(K * (K.adjoint() * vec(y)), d)));
}

CMat kms_root(const CMat& sigma, double power) {
  return herm_func(sigma, [power](double p) { return p > 1e-300 ? std::pow(p, power) : 0.0; });
}

double kms_norm2(const CMat& y, const CMat& s_half) {
  return (y.adjoint() * s_half * y * s_half).trace().real();
}

// z = sigma^{-1/4} sqrt(rho) sigma^{-1/4}
CMat relative_density_root(const CMat& rho, const CMat& sigma) {
  const CMat q = kms_root(sigma, -0.25);
  return hermitize(CMat(q * sqrtm_psd(rho) * q));
}

InequalityReport finish(double lhs, double rhs) {
  InequalityReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
    r.vacuous = true;
    r.note = "infinite transport value or constant";
  }
  return r;
}

}  // namespace

int worker_count() {
  const char* e = std::getenv("QCURV_THREADS");
  if (e == nullptr) return 1;
  const int n = std::atoi(e);
  return std::clamp(n, 1, 256);
}

void parallel_for(int n, const std::function<void(int)>& body) {
  const int w = std::min(worker_count(), n);
  if (w <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next++;
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(m);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

double lipschitz_ratio(const Channel& ch, const SemiNormSpec& spec, const CMat& x, const SdpOptions& opt) {
  const double lx = seminorm_eval(spec, x, opt);
  if (lx <= 1e-14) return 0.0;
  return seminorm_eval(spec, ch.apply(x), opt) / lx;
}

CurvatureReport lipschitz_factor(const Channel& ch, const SemiNormSpec& spec, const LipschitzOptions& opt) {
  if (ch.dim != spec.dim) throw DimensionError("lipschitz_factor: channel and semi-norm dimensions differ");
  const Eigen::Index d = ch.dim;
  CurvatureReport r;
  const CMat K = spec.kernel_basis();

  // P must map ker L into itself, otherwise the factor is infinite.
  double leak = 0.0;
  for (Eigen::Index j = 0; j < K.cols(); ++j) {
    const CVec pk = ch.superop * K.col(j);
    const double off = (pk - K * (K.adjoint() * pk)).norm();
    if (off > leak) {
      leak = off;
      if (off > 1e-8) r.violating_kernel_element = unvec(K.col(j), d);
    }
  }
  r.residuals["kernel_leak"] = leak;
  if (leak > 1e-8) {
    r.method = "kernel_violation";
    r.upper_bound_factor = r.lower_bound_factor = kInf;
    r.certified = true;
    return r;
  }

  Rng rng(opt.seed);
  std::vector<CMat> starts = opt.candidates;
  for (int i = 0; i < opt.restarts; ++i) starts.push_back(random_hermitian(rng, static_cast<int>(d)));

  std::vector<double> best(starts.size(), -1.0);
  std::vector<CMat> wit(starts.size());
  parallel_for(static_cast<int>(starts.size()), [&](int s) {
    CMat x = project_out(starts[static_cast<size_t>(s)], K);
    const double lx = seminorm_eval(spec, x, opt.sdp);
    if (lx < 1e-12) return;
    x /= lx;
    double ratio = seminorm_eval(spec, ch.apply(x), opt.sdp);
    for (int step = 0; step < opt.max_steps; ++step) {
      const CMat y = ch.apply(x);
      if (seminorm_eval(spec, y, opt.sdp) < 1e-14) break;
      const CMat g = seminorm_subgradient(spec, y, opt.sdp);
      const TransportResult t = dual_transport(spec, hermitize(ch.apply_adjoint(g)), opt.sdp, true);
      if (t.infinite || !t.witness) break;
      CMat xn = project_out(*t.witness, K);
      const double ln = seminorm_eval(spec, xn, opt.sdp);
      if (ln < 1e-12) break;
      xn /= ln;
      const double rn = seminorm_eval(spec, ch.apply(xn), opt.sdp);
      if (rn <= ratio + opt.step_tol) {
        if (rn > ratio) {
          ratio = rn;
          x = xn;
        }
        break;
      }
      ratio = rn;
      x = xn;
    }
    best[static_cast<size_t>(s)] = ratio;
    wit[static_cast<size_t>(s)] = x;
  });

  double lower = 0.0;
  r.witness = CMat::Zero(d, d);
  for (size_t s = 0; s < best.size(); ++s)
    if (best[s] > lower) {
      lower = best[s];
      r.witness = wit[s];
    }
  r.lower_bound_factor = lower;
  if (opt.structural_bound) {
    r.upper_bound_factor = *opt.structural_bound;
    r.certified = true;
    r.method = "structural";
    r.residuals["structural_excess"] = lower - *opt.structural_bound;
  } else {
    r.upper_bound_factor = lower;
    r.method = "witness_search";
  }
  return r;
}

SemiNormSpec pauli_seminorm(const PauliChannelSpec& spec) { return SemiNormSpec::commutator_max(pauli_generators(spec)); }

CurvatureReport pauli_lipschitz_factor(const PauliChannelSpec& spec) {
  spec.validate();
  const int n = spec.n;
  const std::uint64_t total = 1ULL << (2 * n);
  const SemiNormSpec L = pauli_seminorm(spec);
  CurvatureReport r;
  r.method = "structural";
  r.certified = true;
  r.upper_bound_factor = pauli_structural_factor(spec);
  const Eigen::Index d = Eigen::Index(1) << n;
  r.witness = CMat::Zero(d, d);
  double best = 0.0;
  for (std::uint64_t g = 1; g < total; ++g) {
    const PauliString s = PauliString::from_index(n, g);
    if (pauli_fixed(spec, s)) continue;
    const double mu = std::abs(pauli_eigenvalue(spec, s));
    if (mu > best || r.witness.isZero()) {
      best = std::max(best, mu);
      r.witness = s.matrix() / 2.0;  // some generator anticommutes, so L(sigma_gamma) = 2
    }
  }
  r.lower_bound_factor = best;
  if (!r.witness.isZero()) {
    const Channel ch = pauli_channel(spec);
    r.residuals["witness_check"] = std::abs(lipschitz_ratio(ch, L, r.witness) - best);
  }
  r.residuals["structural_excess"] = best - r.upper_bound_factor;
  return r;
}

std::vector<CMat> ge_sample_states(Rng& rng, int d, int count) {
  std::vector<CMat> out;
  const int full = count / 2;
  const int pure = count / 4;
  for (int i = 0; i < full; ++i) out.push_back(random_state(rng, d));
  for (int i = 0; i < pure; ++i) out.push_back(near_pure_state(rng, d, 1e-3));
  for (int i = 0; static_cast<int>(out.size()) < count; ++i) {
    RVec p(d);
    if (i % 2 == 0) {
      const double beta = 0.25 * (i / 2 + 1);
      for (int k = 0; k < d; ++k) p(k) = std::exp(-beta * k);
    } else {
      p = random_simplex(rng, d);
      p.array() += 1e-3;
    }
    p /= p.sum();
    out.push_back(p.cast<cplx>().asDiagonal());
  }
  return out;
}

namespace {

struct GEPair {
  CMat a;  // S^dag M_rho S
  CMat b;  // M_{P^dag rho}
  double leak = 0.0;
};

GEPair ge_pair(const Channel& ch, const DerivationStructure& ds, const CMat& rho, const std::optional<CMat>& q) {
  CMat out = hermitize(ch.apply_adjoint(rho));
  const double tr = out.trace().real();
  GEPair g;
  g.leak = std::abs(1.0 - tr);
  if (tr <= 0) throw NumericalError("verify_ge: output state has no weight");
  out /= tr;
  const CMat& S = ch.superop;
  g.a = S.adjoint() * metric_tensor(rho, ds) * S;
  g.b = metric_tensor(out, ds);
  if (q) {
    g.a = q->adjoint() * g.a * *q;
    g.b = q->adjoint() * g.b * *q;
  }
  g.a = hermitize(g.a);
  g.b = hermitize(g.b);
  return g;
}

// Smallest f with A <= f^2 B up to margin_tol, located by bisection.
double ge_factor(const GEPair& g, const GEOptions& opt) {
  auto pass = [&](double f) { return psd_gap(g.a, CMat(f * f * g.b)) >= -opt.margin_tol; };
  const double est = relative_max_eig(g.a, g.b);
  double hi = std::isfinite(est) ? std::sqrt(std::max(est, 0.0)) * (1 + 1e-6) + 1e-9 : 1.0;
  int guard = 0;
  while (!pass(hi)) {
    hi = hi * 1.5 + 1e-6;
    if (++guard > 80) return kInf;
  }
  double lo = std::isfinite(est) ? std::max(0.0, std::sqrt(std::max(est, 0.0)) * (1 - 1e-4) - 1e-9) : 0.0;
  while (lo > 0 && pass(lo)) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-12) lo = 0;
  }
  while (hi - lo > opt.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    (pass(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

GEReport verify_ge(const Channel& ch, const DerivationStructure& ds, const std::vector<CMat>& states,
                   const GEOptions& opt) {
  ds.validate();
  if (ch.dim != ds.dim()) throw DimensionError("verify_ge: channel and derivation dimensions differ");
  if (states.empty()) throw PreconditionError("verify_ge: no sample states");
  GEReport r;
  r.states = states;
  const size_t n = states.size();
  std::vector<GEPair> pairs(n);
  r.per_sample_kappa.assign(n, 0.0);
  parallel_for(static_cast<int>(n), [&](int i) {
    pairs[static_cast<size_t>(i)] = ge_pair(ch, ds, states[static_cast<size_t>(i)], opt.observable_subspace);
    r.per_sample_kappa[static_cast<size_t>(i)] = 1.0 - ge_factor(pairs[static_cast<size_t>(i)], opt);
  });
  r.kappa_star = *std::min_element(r.per_sample_kappa.begin(), r.per_sample_kappa.end());
  const double f = 1.0 - r.kappa_star;
  for (const auto& g : pairs) {
    r.margins.push_back(std::isfinite(f) ? psd_gap(g.a, CMat(f * f * g.b)) : -kInf);
    r.max_trace_leak = std::max(r.max_trace_leak, g.leak);
  }
  return r;
}

double ge_quadratic_margin(const Channel& ch, const DerivationStructure& ds, const CMat& rho, const CMat& x,
                           double factor) {
  const GEPair g = ge_pair(ch, ds, rho, std::nullopt);
  const CVec v = vec(x);
  return factor * factor * (v.adjoint() * g.b * v)(0).real() - (v.adjoint() * g.a * v)(0).real();
}

IntertwiningReport verify_intertwining(const Channel& ch, const DerivationStructure& ds, const CMat& hat,
                                       const std::vector<CMat>& states,
                                       const std::optional<CMat>& observable_subspace) {
  ds.validate();
  const Eigen::Index d = ds.dim();
  const Eigen::Index dd = d * d;
  const auto J = static_cast<Eigen::Index>(ds.v.size());
  if (hat.rows() != J * dd || hat.cols() != J * dd) throw DimensionError("verify_intertwining: hat shape");
  CMat D(J * dd, dd);
  for (Eigen::Index j = 0; j < J; ++j) D.middleRows(j * dd, dd) = ds.derivation_superop(static_cast<size_t>(j));
  CMat R = D * ch.superop - hat * D;
  if (observable_subspace) R = R * *observable_subspace;
  IntertwiningReport r;
  for (Eigen::Index c = 0; c < R.cols(); ++c)
    for (Eigen::Index j = 0; j < J; ++j)
      r.residual = std::max(r.residual, op_norm(unvec(R.block(j * dd, c, dd, 1), d)));

  // Restrict to the range of the gradient on the chosen observables.
  CMat W = observable_subspace ? CMat(D * *observable_subspace) : D;
  {
    Eigen::JacobiSVD<CMat> svd(W, Eigen::ComputeThinU);
    const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()(k) > 1e-10 * std::max(top, 1e-300)) ++rank;
    W = svd.matrixU().leftCols(rank);
  }
  auto layer = [&](const CMat& rho) {
    CMat l = CMat::Zero(J * dd, J * dd);
    for (Eigen::Index j = 0; j < J; ++j) l.block(j * dd, j * dd, dd, dd) = mean_superop(rho, ds, static_cast<size_t>(j));
    return l;
  };
  r.per_sample_constant.assign(states.size(), 0.0);
  parallel_for(static_cast<int>(states.size()), [&](int i) {
    const CMat& rho = states[static_cast<size_t>(i)];
    CMat out = hermitize(ch.apply_adjoint(rho));
    out /= out.trace().real();
    const CMat lhs = W.adjoint() * hat.adjoint() * layer(rho) * hat * W;
    const CMat rhs = W.adjoint() * layer(out) * W;
    r.per_sample_constant[static_cast<size_t>(i)] = relative_max_eig(hermitize(lhs), hermitize(rhs));
  });
  for (double c : r.per_sample_constant) r.constant = std::max(r.constant, c);
  return r;
}

double spectral_gap(const Channel& ch, const CMat& omega, const ConditionalExpectation& E) {
  check_state(omega, "spectral_gap: omega");
  if (gns_symmetry_residual(ch.superop, omega) > 1e-8)
    throw PreconditionError("spectral_gap: channel is not GNS-symmetric for omega");
  const Eigen::Index d = ch.dim;
  const CMat id = CMat::Identity(d, d);
  const CMat gh = kron(CMat(sqrtm_psd(omega).transpose()), id);
  const CMat ghi = kron(CMat(inv_sqrtm_psd(omega).transpose()), id);
  const CMat T = gh * ch.superop * ghi;
  const CMat Pi = hermitize(CMat(gh * E.map.superop * ghi));
  const CMat M = T * (CMat::Identity(d * d, d * d) - Pi);
  return 1.0 - op_norm(M);
}

PoincareReport poincare_2inf_constant(const SemiNormSpec& spec, const CMat& omega, const ConditionalExpectation& E,
                                      int restarts, std::uint64_t seed, const SdpOptions& opt) {
  check_state(omega, "poincare_2inf_constant: omega");
  const Eigen::Index d = spec.dim;
  const Eigen::Index dd = d * d;
  const CMat G = kron(CMat(omega.transpose()), CMat::Identity(d, d));
  const CMat IE = CMat::Identity(dd, dd) - E.map.superop;
  const CMat Q = hermitize(CMat(IE.adjoint() * G * IE));
  PoincareReport r;
  r.restarts = restarts;
  const CMat K = spec.kernel_basis();
  for (Eigen::Index j = 0; j < K.cols(); ++j) {
    const CVec k = K.col(j);
    if (std::sqrt(std::max(0.0, (k.adjoint() * Q * k)(0).real())) > 1e-8) {
      r.infinite = true;
      r.constant = kInf;
      r.witness = unvec(k, d);
      return r;
    }
  }
  auto value = [&](const CMat& x) {
    const CVec v = vec(x);
    return std::sqrt(std::max(0.0, (v.adjoint() * Q * v)(0).real()));
  };
  Rng rng(seed);
  r.witness = CMat::Zero(d, d);
  for (int s = 0; s < restarts; ++s) {
    CMat x = project_out(random_hermitian(rng, static_cast<int>(d)), K);
    const double lx = seminorm_eval(spec, x, opt);
    if (lx < 1e-12) continue;
    x /= lx;
    double f = value(x);
    for (int step = 0; step < 50; ++step) {
      const CMat grad = hermitize(CMat(unvec(Q * vec(x), d).adjoint()));
      const TransportResult t = dual_transport(spec, grad, opt, true);
      if (t.infinite || !t.witness) break;
      CMat xn = project_out(*t.witness, K);
      const double ln = seminorm_eval(spec, xn, opt);
      if (ln < 1e-12) break;
      xn /= ln;
      const double fn = value(xn);
      if (fn <= f + 1e-10) break;
      f = fn;
      x = xn;
    }
    if (f > r.constant) {
      r.constant = f;
      r.witness = x;
    }
  }
  return r;
}

InequalityReport tc_inequality_check(const std::vector<ConditionalExpectation>& Es, const SemiNormSpec& spec,
                                     double kappa, double C, const CMat& rho,
                                     std::optional<double> measured_factor, const SdpOptions& opt) {
  if (Es.empty()) throw PreconditionError("tc_inequality_check: no conditional expectations");
  check_state(rho, "tc_inequality_check: rho");
  const int d = Es.front().map.dim;
  const auto n = static_cast<double>(Es.size());
  CMat avg = CMat::Zero(Es.front().map.superop.rows(), Es.front().map.superop.cols());
  for (const auto& e : Es) avg += e.map.superop / n;
  const Channel mean = channel_from_superop(avg, false);
  const CMat tau = CMat::Identity(d, d) / static_cast<double>(d);
  const ConditionalExpectation EN = fixed_point_expectation(mean, tau);
  const CMat rho_n = hermitize(EN.map.apply_adjoint(rho));

  InequalityReport r;
  bool premise = true;
  // Each E_i must already be a contraction of the semi-norm.
  double worst = 0.0;
  Rng rng(7);
  for (const auto& e : Es)
    for (int s = 0; s < 4; ++s) worst = std::max(worst, lipschitz_ratio(e.map, spec, random_hermitian(rng, d), opt));
  if (worst > 1.0 + 1e-7) premise = false;
  if (measured_factor && *measured_factor > 1.0 - kappa + 1e-7) premise = false;

  const TransportResult t = w1_dual(spec, rho, rho_n, opt);
  const double D = relative_entropy(rho, rho_n);
  const double denom = 1.0 - std::pow(1.0 - kappa, n);
  const double rhs = (kappa > 0 && denom > 0) ? C / denom * std::sqrt(2.0 * n * D) : kInf;
  r = finish(t.infinite ? kInf : t.value, rhs);
  r.premise_ok = premise;
  r.details["relative_entropy"] = D;
  r.details["transport_upper"] = t.upper;
  r.details["max_site_ratio"] = worst;
  if (kappa <= 0) r.note = "kappa must be positive";
  return r;
}

double dirichlet_form(const DerivationStructure& ds, const CMat& sigma, const CMat& x) {
  const CMat s_half = kms_root(sigma, 0.5);
  double e = 0.0;
  for (const auto& v : ds.v) e += kms_norm2(comm(v, x), s_half);
  return e;
}

double generator_energy(const CMat& heisenberg_generator, const CMat& sigma, const CMat& x) {
  const CMat s_half = kms_root(sigma, 0.5);
  const CMat lx = apply_superop(heisenberg_generator, x);
  return -(x.adjoint() * s_half * lx * s_half).trace().real();
}

InequalityReport ti_inequality_check(const DerivationStructure& ds, const GeneratorSpec& gen, double C,
                                     double kappa, const CMat& rho, const SdpOptions& opt) {
  ds.validate();
  if (!ds.sigma) throw PreconditionError("ti_inequality_check: derivation structure needs a reference state");
  check_state(rho, "ti_inequality_check: rho");
  const CMat& sigma = *ds.sigma;
  const double sym = gns_symmetry_residual(gen.superop, sigma);
  const ConditionalExpectation EN = fixed_point_expectation(semigroup_channel(gen, 1.0), sigma);
  const CMat rho_n = hermitize(EN.map.apply_adjoint(rho));
  const TransportResult t = w1_dual(SemiNormSpec::commutator_l2(ds.v), rho, rho_n, opt);
  const CMat z = relative_density_root(rho, sigma);
  const double energy = dirichlet_form(ds, sigma, z);
  double factor = 0.0;
  for (double w : ds.omega) factor = std::max(factor, std::exp(-w / 4) + std::exp(w / 4));
  const double rhs = kappa > 0 ? C / kappa * factor * std::sqrt(std::max(energy, 0.0)) : kInf;
  InequalityReport r = finish(t.infinite ? kInf : t.value, rhs);
  r.premise_ok = sym <= 1e-8 && kappa > 0;
  r.details["gns_residual"] = sym;
  r.details["dirichlet_energy"] = energy;
  r.details["generator_energy"] = generator_energy(ds.lindbladian(), sigma, z);
  r.details["frequency_factor"] = factor;
  return r;
}

double semigroup_decay_constant(const DerivationStructure& ds, const GeneratorSpec& gen, double kappa,
                                const std::vector<double>& t_grid, Rng& rng, int samples) {
  const SemiNormSpec L = SemiNormSpec::commutator_l2(ds.v);
  std::vector<Channel> P;
  for (double t : t_grid) P.push_back(semigroup_channel(gen, t));
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const CMat x = random_hermitian(rng, gen.dim);
    const double lx = seminorm_eval(L, x);
    if (lx < 1e-12) continue;
    for (size_t i = 0; i < t_grid.size(); ++i)
      worst = std::max(worst, seminorm_eval(L, P[i].apply(x)) / (std::exp(-kappa * t_grid[i]) * lx));
  }
  return worst;
}

double generator_gap(const CMat& heisenberg_generator, const CMat& sigma) {
  const Eigen::Index d = sigma.rows();
  const CMat id = CMat::Identity(d, d);
  const CMat gh = kron(CMat(sqrtm_psd(sigma).transpose()), id);
  const CMat ghi = kron(CMat(inv_sqrtm_psd(sigma).transpose()), id);
  const HermEig e = herm_eig(hermitize(CMat(-gh * heisenberg_generator * ghi)), 1e-8);
  const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  double gap = kInf;
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (e.values(k) > 1e-9 * scale) gap = std::min(gap, e.values(k));
  return gap;
}

BohrDecomposition bohr_decomposition(const CMat& heisenberg_channel, const CMat& sigma) {
  const Eigen::Index d = sigma.rows();
  const HermEig es = herm_eig(hermitize(sigma), 1e-10);
  if (es.values.minCoeff() <= 1e-12) throw PreconditionError("bohr_decomposition: reference state must be faithful");
  const CMat& U = es.vectors;
  const CMat Utr = kron(CMat(U.transpose()), CMat(U.adjoint()));
  const CMat J = Utr * choi_of_superop(heisenberg_channel, d, d) * Utr.adjoint();
  // Index i + j d holds entry (i, j) of a Kraus adjoint in the eigenbasis of sigma.
  std::vector<double> freq(static_cast<size_t>(d * d));
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      freq[static_cast<size_t>(i + j * d)] = std::log(es.values(i)) - std::log(es.values(j));
  std::vector<std::vector<Eigen::Index>> clusters;
  std::vector<double> centers;
  for (Eigen::Index k = 0; k < d * d; ++k) {
    size_t c = 0;
    while (c < centers.size() && std::abs(centers[c] - freq[static_cast<size_t>(k)]) > 1e-9) ++c;
    if (c == centers.size()) {
      centers.push_back(freq[static_cast<size_t>(k)]);
      clusters.emplace_back();
    }
    clusters[c].push_back(k);
  }
  BohrDecomposition out;
  double off = 0.0;
  std::vector<int> label(static_cast<size_t>(d * d));
  for (size_t c = 0; c < clusters.size(); ++c)
    for (auto k : clusters[c]) label[static_cast<size_t>(k)] = static_cast<int>(c);
  for (Eigen::Index a = 0; a < d * d; ++a)
    for (Eigen::Index b = 0; b < d * d; ++b)
      if (label[static_cast<size_t>(a)] != label[static_cast<size_t>(b)]) off = std::max(off, std::abs(J(a, b)));
  out.covariance_residual = off;
  const double top = std::max(max_eig(hermitize(J)), 1e-300);
  for (size_t c = 0; c < clusters.size(); ++c) {
    const auto& idx = clusters[c];
    const auto m = static_cast<Eigen::Index>(idx.size());
    CMat sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = J(idx[static_cast<size_t>(a)], idx[static_cast<size_t>(b)]);
    const HermEig e = herm_eig(hermitize(sub), 1e-10);
    for (Eigen::Index k = 0; k < m; ++k) {
      if (e.values(k) <= 1e-12 * top) continue;
      CVec w = CVec::Zero(d * d);
      for (Eigen::Index a = 0; a < m; ++a) w(idx[static_cast<size_t>(a)]) = e.vectors(a, k) * std::sqrt(e.values(k));
      const CMat kd = U * unvec(w, d) * U.adjoint();
      const double om = centers[c];
      out.v.push_back(std::exp(om / 2) * kd.adjoint() / std::sqrt(2.0));
      out.omega.push_back(om);
    }
  }
  return out;
}

InequalityReport local_ti_check(const GeneratorSpec& gen, const CMat& sigma, double C, double kappa,
                                const CMat& rho, const LocalTIOptions& opt) {
  check_state(rho, "local_ti_check: rho");
  check_state(sigma, "local_ti_check: sigma");
  if (gen.local.empty() || gen.local.size() != gen.neighborhoods.size())
    throw PreconditionError("local_ti_check: generator needs local parts with neighborhoods");
  const auto& dims = gen.site_dims;
  const CMat s_half = kms_root(sigma, 0.5);
  const CMat s_mhalf = kms_root(sigma, -0.5);
  const int ne = static_cast<int>(gen.local.size());
  std::vector<double> term(static_cast<size_t>(ne)), gap(static_cast<size_t>(ne)), cb(static_cast<size_t>(ne)),
      ce(static_cast<size_t>(ne));
  parallel_for(ne, [&](int e) {
    const auto ue = static_cast<size_t>(e);
    const CMat& Le = gen.local[ue];
    const ConditionalExpectation Ee =
        fixed_point_expectation(channel_from_superop(mat_exp(Le), false), sigma);
    const BohrDecomposition bd = bohr_decomposition(Ee.map.superop, sigma);
    double c = 0.0;
    for (size_t j = 0; j < bd.v.size(); ++j) {
      const double w = bd.omega[j];
      c = std::max(c, std::exp(-w) * op_norm(CMat(s_half * bd.v[j].adjoint() * s_mhalf)) *
                          (std::exp(-w / 4) + std::exp(w / 4)));
    }
    ce[ue] = 2.0 * c;
    // Restriction of L_e^dag to its support.
    const auto& sup = gen.neighborhoods[ue];
    std::vector<int> rest;
    int dl = 1;
    int drest = 1;
    for (int i = 0; i < static_cast<int>(dims.size()); ++i) {
      if (std::find(sup.begin(), sup.end(), i) != sup.end()) {
        dl *= dims[static_cast<size_t>(i)];
      } else {
        rest.push_back(i);
        drest *= dims[static_cast<size_t>(i)];
      }
    }
    const CMat loc = superop_from_map(dl, [&](const CMat& x) {
      return CMat(partial_trace(apply_superop(Le, embed(x, sup, dims)), dims, sup) / static_cast<double>(drest));
    });
    cb[ue] = diamond_norm(choi_of_superop(CMat(loc.adjoint()), dl, dl), dl, dl, opt.sdp);
    gap[ue] = generator_gap(Le, sigma);
    term[ue] = ce[ue] * std::sqrt(static_cast<double>(bd.v.size())) * static_cast<double>(sup.size()) * cb[ue];
  });
  const double lambda = *std::min_element(gap.begin(), gap.end());
  const double worst = *std::max_element(term.begin(), term.end());
  const double constant = (kappa > 0 && lambda > 0) ? C * worst / (kappa * std::sqrt(lambda)) : kInf;

  const ConditionalExpectation EV = fixed_point_expectation(semigroup_channel(gen, 1.0), sigma);
  const CMat rho_n = hermitize(EV.map.apply_adjoint(rho));
  const SemiNormSpec orn = SemiNormSpec::ornstein(dims);
  const TransportResult t = w1_dual(orn, rho, rho_n, opt.sdp);
  const CMat z = relative_density_root(rho, sigma);
  const double energy = generator_energy(gen.superop, sigma, z);
  const double rhs = constant * std::sqrt(std::max(0.0, static_cast<double>(ne) * energy));
  InequalityReport r = finish(t.infinite ? kInf : t.value, rhs);

  // Premise: |||P_t x||| <= C e^{-kappa t} |||x||| for the Ornstein semi-norm.
  Rng rng(opt.seed);
  double viol = 0.0;
  std::vector<Channel> P;
  for (double tt : opt.t_grid) P.push_back(semigroup_channel(gen, tt));
  for (int s = 0; s < opt.premise_samples; ++s) {
    const CMat x = random_hermitian(rng, gen.dim);
    const double lx = seminorm_eval(orn, x, opt.sdp);
    for (size_t i = 0; i < P.size(); ++i)
      viol = std::max(viol, seminorm_eval(orn, P[i].apply(x), opt.sdp) - C * std::exp(-kappa * opt.t_grid[i]) * lx);
  }
  r.premise_ok = viol <= 1e-9 && kappa > 0;
  r.details["premise_violation"] = viol;
  r.details["lambda"] = lambda;
  r.details["max_local_term"] = worst;
  r.details["max_local_diamond"] = *std::max_element(cb.begin(), cb.end());
  r.details["max_local_constant"] = *std::max_element(ce.begin(), ce.end());
  r.details["generator_energy"] = energy;
  r.details["constant"] = constant;
  return r;
}

InequalityReport jump_diameter_bound(const SemiNormSpec& spec, const Channel& ch, const CMat& rho1,
                                     const CMat& rho2, double kappa, const SdpOptions& opt) {
  if (kappa <= 0) throw PreconditionError("jump_diameter_bound: kappa must be positive");
  const TransportResult t = w1_dual(spec, rho1, rho2, opt);
  const TransportResult j1 = jump(spec, rho1, ch, opt);
  const TransportResult j2 = jump(spec, rho2, ch, opt);
  const double J1 = j1.infinite ? kInf : j1.value;
  const double J2 = j2.infinite ? kInf : j2.value;
  InequalityReport r = finish(t.infinite ? kInf : t.value, (J1 + J2) / kappa);
  r.details["jump1"] = J1;
  r.details["jump2"] = J2;
  return r;
}

std::vector<MixingRow> pauli_mixing_check(const PauliChannelSpec& spec, const CMat& rho, int max_steps,
                                          const SdpOptions& opt) {
  spec.validate();
  check_state(rho, "pauli_mixing_check: rho");
  const Channel ch = pauli_channel(spec);
  const ConditionalExpectation E = pauli_conditional_expectation(spec);
  const double m = spec.min_weight();
  const double kappa = 2.0 * m;
  if (kappa <= 0) throw PreconditionError("pauli_mixing_check: minimum weight must be positive");
  const TransportResult j = jump(pauli_seminorm(spec), rho, ch, opt);
  const double J = j.infinite ? kInf : j.value;
  const CMat target = hermitize(E.map.apply_adjoint(rho));
  std::vector<MixingRow> rows;
  CMat cur = rho;
  for (int k = 0; k <= max_steps; ++k) {
    // ||.||_1 <= 2 W, then the contraction and W(rho, E rho) <= J / kappa.
    rows.push_back({k, trace_norm(CMat(cur - target)), 2.0 * std::pow(1.0 - kappa, k) / kappa * J});
    cur = hermitize(ch.apply_adjoint(cur));
  }
  return rows;
}

namespace {

SemiNormSpec lift_spec(const SemiNormSpec& s, const std::vector<int>& sites, const std::vector<int>& dims) {
  std::vector<CMat> g;
  for (const auto& a : s.generators) g.push_back(embed(a, sites, dims));
  switch (s.kind) {
    case SemiNormKind::CommutatorMax: return SemiNormSpec::commutator_max(std::move(g));
    case SemiNormKind::CommutatorL2: return SemiNormSpec::commutator_l2(std::move(g));
    default: throw PreconditionError("tensorization: factors need commutator-type semi-norms");
  }
}

std::vector<CMat> lifted_kraus(const Channel& ch, const std::vector<int>& sites, const std::vector<int>& dims,
                               double weight) {
  if (ch.kraus.empty()) throw PreconditionError("tensorization: factor channels need Kraus operators");
  std::vector<CMat> out;
  for (const auto& k : ch.kraus) out.push_back(std::sqrt(weight) * embed(k, sites, dims));
  return out;
}

}  // namespace

TensorizationReport tensorization_check(const std::vector<SemiNormSpec>& specs, const std::vector<Channel>& chs,
                                        const std::vector<double>& alphas, const LipschitzOptions& opt) {
  const size_t n = specs.size();
  if (n == 0 || chs.size() != n || alphas.size() != n)
    throw PreconditionError("tensorization_check: one semi-norm, channel and weight per factor");
  double total = 0.0;
  for (double a : alphas) {
    if (a < 0) throw PreconditionError("tensorization_check: negative weight");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("tensorization_check: weights must sum to one");
  TensorizationReport r;
  std::vector<int> dims;
  for (size_t i = 0; i < n; ++i) {
    if (chs[i].dim != specs[i].dim) throw DimensionError("tensorization_check: factor dimension mismatch");
    dims.push_back(chs[i].dim);
    // Complete version: the factor channel with an equal-size ancilla.
    const std::vector<int> pair{chs[i].dim, chs[i].dim};
    const Channel big = channel_from_kraus(lifted_kraus(chs[i], {0}, pair, 1.0));
    const CurvatureReport f = lipschitz_factor(big, lift_spec(specs[i], {0}, pair), opt);
    r.factor_kappas.push_back(1.0 - f.upper_bound_factor);
  }
  std::vector<CMat> kraus;
  std::vector<SemiNormSpec> parts;
  for (size_t i = 0; i < n; ++i) {
    const std::vector<int> site{static_cast<int>(i)};
    if (alphas[i] > 0) {
      auto k = lifted_kraus(chs[i], site, dims, alphas[i]);
      kraus.insert(kraus.end(), k.begin(), k.end());
    }
    parts.push_back(lift_spec(specs[i], site, dims));
  }
  const Channel prod = channel_from_kraus(kraus);
  const CurvatureReport f = lipschitz_factor(prod, SemiNormSpec::sum(parts), opt);
  double m = kInf;
  for (size_t i = 0; i < n; ++i) m = std::min(m, alphas[i] * r.factor_kappas[i]);
  r.bound = 1.0 - m;
  r.measured = f.lower_bound_factor;
  r.slack = r.bound - r.measured;
  return r;
}

void FiniteGroup::validate() const {
  const int n = order();
  if (n == 0) throw PreconditionError("finite group: empty table");
  for (int g = 0; g < n; ++g) {
    if (static_cast<int>(table[static_cast<size_t>(g)].size()) != n)
      throw PreconditionError("finite group: table is not square");
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (int h = 0; h < n; ++h) {
      const int gh = table[static_cast<size_t>(g)][static_cast<size_t>(h)];
      if (gh < 0 || gh >= n || seen[static_cast<size_t>(gh)]) throw PreconditionError("finite group: row is not a permutation");
      seen[static_cast<size_t>(gh)] = true;
    }
    if (table[0][static_cast<size_t>(g)] != g || table[static_cast<size_t>(g)][0] != g)
      throw PreconditionError("finite group: element 0 is not the identity");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const auto& t = table;
        if (t[static_cast<size_t>(t[static_cast<size_t>(a)][static_cast<size_t>(b)])][static_cast<size_t>(c)] !=
            t[static_cast<size_t>(a)][static_cast<size_t>(t[static_cast<size_t>(b)][static_cast<size_t>(c)])])
          throw PreconditionError("finite group: product is not associative");
      }
}

namespace {

// sup of sum_s sign_s w_s ((K f)(h_s s) - (K f)(h_s)) over f with Lipschitz norm <= 1 (p = 1 or infinity).
double classical_lp(const FiniteGroup& G, const std::vector<double>& k, const std::vector<int>& gens,
                    const std::vector<double>& w, bool p_one, const std::vector<int>& base, const std::vector<int>& sign,
                    const SdpOptions& opt) {
  const int N = G.order();
  const auto S = gens.size();
  LmiProblem lp;
  for (int i = 1; i < N; ++i) lp.add_var();  // f(0) = 0 fixes the additive constant
  std::vector<int> t;
  if (p_one)
    for (size_t s = 0; s < S; ++s) t.push_back(lp.add_var());
  auto var = [](int g) { return g - 1; };
  auto add_entry = [&](int block, int v, double c) {
    if (v < 0) return;
    lp.F[static_cast<size_t>(v)].push_back({block, {{0, 0, c}}});
  };
  for (int h = 0; h < N; ++h)
    for (size_t s = 0; s < S; ++s) {
      const int hs = G.table[static_cast<size_t>(h)][static_cast<size_t>(gens[s])];
      for (int sg : {1, -1}) {
        const int blk = lp.add_block(1, BlockKind::Real);
        // bound - sg w (f(hs) - f(h)) >= 0
        if (p_one) {
          add_entry(blk, t[s], 1.0);
        } else {
          lp.F0.push_back({blk, {{0, 0, 1.0}}});
        }
        add_entry(blk, var(hs), -sg * w[s]);
        add_entry(blk, var(h), sg * w[s]);
      }
    }
  if (p_one) {
    const int blk = lp.add_block(1, BlockKind::Real);
    lp.F0.push_back({blk, {{0, 0, 1.0}}});
    for (size_t s = 0; s < S; ++s) add_entry(blk, t[s], -1.0);
  }
  for (size_t s = 0; s < S; ++s) {
    if (sign[s] == 0) continue;
    const int h = base[s];
    const int hs = G.table[static_cast<size_t>(h)][static_cast<size_t>(gens[s])];
    for (int g = 0; g < N; ++g) {
      const double c = sign[s] * w[s] * k[static_cast<size_t>(g)] / N;
      const int a = G.table[static_cast<size_t>(hs)][static_cast<size_t>(g)];
      const int b = G.table[static_cast<size_t>(h)][static_cast<size_t>(g)];
      if (a > 0) lp.b(var(a)) += c;
      if (b > 0) lp.b(var(b)) -= c;
    }
  }
  return solve_lmi(lp, opt).value;
}

}  // namespace

std::pair<Channel, TransferenceReport> transfer_finite_group(const FiniteGroup& group, const std::vector<double>& k,
                                                             const std::vector<CMat>& u,
                                                             const std::vector<int>& generators,
                                                             const std::vector<double>& weights,
                                                             const LipschitzOptions& opt) {
  group.validate();
  const int N = group.order();
  if (static_cast<int>(k.size()) != N || static_cast<int>(u.size()) != N)
    throw DimensionError("transfer_finite_group: one weight and one unitary per element");
  if (generators.empty() || weights.size() != generators.size())
    throw PreconditionError("transfer_finite_group: one weight per generator");
  double mass = 0.0;
  for (double x : k) {
    if (x < 0) throw PreconditionError("transfer_finite_group: negative kernel value");
    mass += x;
  }
  if (std::abs(mass - N) > 1e-9 * N) throw PreconditionError("transfer_finite_group: kernel must average to one");
  const Eigen::Index d = u.front().rows();
  TransferenceReport r;
  for (int g = 0; g < N; ++g) {
    if (op_norm(CMat(u[static_cast<size_t>(g)].adjoint() * u[static_cast<size_t>(g)] - CMat::Identity(d, d))) > 1e-9)
      throw PreconditionError("transfer_finite_group: representation is not unitary");
    for (int h = 0; h < N; ++h) {
      const CMat gh = u[static_cast<size_t>(g)] * u[static_cast<size_t>(h)];
      const CMat& ref = u[static_cast<size_t>(group.table[static_cast<size_t>(g)][static_cast<size_t>(h)])];
      const cplx c = (ref.adjoint() * gh).trace() / static_cast<double>(d);
      r.cocycle_residual = std::max(r.cocycle_residual, op_norm(CMat(gh - c * ref)) + std::abs(std::abs(c) - 1.0));
    }
  }
  if (r.cocycle_residual > 1e-8) throw PreconditionError("transfer_finite_group: not a projective representation");

  std::vector<CMat> kraus;
  for (int g = 0; g < N; ++g)
    if (k[static_cast<size_t>(g)] > 0)
      kraus.push_back(std::sqrt(k[static_cast<size_t>(g)] / N) * u[static_cast<size_t>(g)].adjoint());
  Channel ch = channel_from_kraus(kraus);

  const auto S = generators.size();
  // Left translations commute with K and preserve the norm, so the first difference sits at the identity.
  {
    double best = 0.0;
    for (size_t s0 = 0; s0 < S; ++s0) {
      std::vector<int> base(S, 0), sign(S, 0);
      sign[s0] = 1;
      best = std::max(best, classical_lp(group, k, generators, weights, false, base, sign, opt.sdp));
    }
    r.classical_factor_inf = best;
  }
  {
    double combos = 1.0;
    for (size_t s = 1; s < S; ++s) combos *= 2.0 * N;
    if (combos <= 4096) {
      double best = 0.0;
      std::vector<int> base(S, 0), sign(S, 1);
      const auto total = static_cast<long>(combos);
      for (long c = 0; c < total; ++c) {
        long rem = c;
        for (size_t s = 1; s < S; ++s) {
          base[s] = static_cast<int>(rem % N);
          rem /= N;
          sign[s] = (rem % 2) ? -1 : 1;
          rem /= 2;
        }
        best = std::max(best, classical_lp(group, k, generators, weights, true, base, sign, opt.sdp));
      }
      r.classical_factor_one = best;
    } else {
      r.classical_factor_one = std::numeric_limits<double>::quiet_NaN();
    }
  }

  std::vector<CMat> diffs;
  std::vector<SemiNormSpec> parts;
  for (size_t s = 0; s < S; ++s) {
    const CMat a = weights[s] * u[static_cast<size_t>(generators[s])];
    diffs.push_back(a);
    parts.push_back(SemiNormSpec::commutator_max({a}));
  }
  r.quantum_factor_inf = lipschitz_factor(ch, SemiNormSpec::commutator_max(diffs), opt).lower_bound_factor;
  r.quantum_factor_one = lipschitz_factor(ch, SemiNormSpec::sum(parts), opt).lower_bound_factor;
  return {std::move(ch), r};
}

FiniteGroup pauli_group_table(int n) {
  if (n < 1 || n > 4) throw PreconditionError("pauli_group_table: 1 <= n <= 4");
  const int N = 1 << (2 * n);
  FiniteGroup g;
  g.table.assign(static_cast<size_t>(N), std::vector<int>(static_cast<size_t>(N)));
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) g.table[static_cast<size_t>(a)][static_cast<size_t>(b)] = a ^ b;
  return g;
}

std::vector<CMat> pauli_group_rep(int n) {
  const int N = 1 << (2 * n);
  std::vector<CMat> out;
  for (int a = 0; a < N; ++a) out.push_back(PauliString::from_index(n, static_cast<std::uint64_t>(a)).matrix());
  return out;
}

double max_site_seminorm(const CMat& x, const std::vector<int>& dims) {
  double m = 0.0;
  for (int v = 0; v < static_cast<int>(dims.size()); ++v) m = std::max(m, op_norm(CMat(x - site_average(x, dims, v))));
  return m;
}

GibbsCertificate gibbs_contraction_certificate(const LocalHamiltonian& H, double beta,
                                               const std::vector<double>& t_grid, int samples, Rng& rng,
                                               const SdpOptions& opt) {
  const GeneratorSpec gen = heat_bath_generator(H, beta);
  GibbsCertificate c;
  c.local_diamond.assign(static_cast<size_t>(H.n), 0.0);
  std::vector<std::vector<int>> nbhd(static_cast<size_t>(H.n));
  parallel_for(H.n, [&](int w) {
    const LocalPetzDifference lp = local_petz_difference(H, beta, w);
    c.local_diamond[static_cast<size_t>(w)] = diamond_norm(lp.choi, lp.d_in, lp.d_out, opt);
    nbhd[static_cast<size_t>(w)] = lp.region;
  });
  int max_nv = 0;
  for (int v = 0; v < H.n; ++v) {
    int nv = 0;
    for (const auto& r : nbhd)
      if (std::find(r.begin(), r.end(), v) != r.end()) ++nv;
    max_nv = std::max(max_nv, nv);
  }
  double worst = 0.0;
  for (int w = 0; w < H.n; ++w)
    worst = std::max(worst, c.local_diamond[static_cast<size_t>(w)] * static_cast<double>(nbhd[static_cast<size_t>(w)].size()));
  c.kappa_beta = 2.0 * max_nv * worst;
  c.applicable = c.kappa_beta < 1.0;

  const auto dims = H.dims();
  std::vector<Channel> P;
  for (double t : t_grid) P.push_back(semigroup_channel(gen, t));
  c.empirical_rate = kInf;
  c.worst_ratio = 0.0;
  c.max_violation = -kInf;
  for (int s = 0; s < samples; ++s) {
    const CMat x = random_hermitian(rng, gen.dim);
    const double lx = max_site_seminorm(x, dims);
    if (lx < 1e-12) continue;
    for (size_t i = 0; i < t_grid.size(); ++i) {
      const double ly = max_site_seminorm(P[i].apply(x), dims);
      const double bound = std::exp(-(1.0 - c.kappa_beta) * t_grid[i]) * lx;
      c.worst_ratio = std::max(c.worst_ratio, ly / bound);
      c.max_violation = std::max(c.max_violation, ly - bound);
      if (t_grid[i] > 0 && ly > 0) c.empirical_rate = std::min(c.empirical_rate, -std::log(ly / lx) / t_grid[i]);
    }
  }
  return c;
}

double operator_lemma_margin(const CMat& A, const CMat& B, const CMat& C, double lambda) {
  const HermEig ea = herm_eig(hermitize(A), 1e-10);
  const double top = std::max(ea.values.cwiseAbs().maxCoeff(), 1e-300);
  CMat PA = CMat::Zero(A.rows(), A.cols());
  for (Eigen::Index k = 0; k < ea.values.size(); ++k)
    if (ea.values(k) > 1e-10 * top) PA += ea.vectors.col(k) * ea.vectors.col(k).adjoint();
  const CMat lhs = PA * C * pinv_on_support(hermitize(B)) * C.adjoint() * PA;
  return psd_gap(hermitize(lhs), CMat(lambda * pinv_on_support(hermitize(A))));
}

}  // namespace qcurv
