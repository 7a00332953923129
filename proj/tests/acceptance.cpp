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

// Acceptance runner: one PASS/FAIL line per criterion.
// Usage: qcurv_acceptance [criterion ...]   (no arguments runs all 13)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "qcurv/curvature.hpp"
#include "qcurv/cvmodels.hpp"

using namespace qcurv;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

PauliChannelSpec random_spec(Rng& rng, int n) {
  const int total = 1 << (2 * n);
  const int terms = rng.integer(2, std::min(8, total));
  PauliChannelSpec s;
  s.n = n;
  const RVec w = random_simplex(rng, terms);
  std::vector<std::uint64_t> used{0};
  s.terms.push_back({PauliString::from_index(n, 0), w(0)});
  while (static_cast<int>(s.terms.size()) < terms) {
    const auto g = static_cast<std::uint64_t>(rng.integer(1, total - 1));
    if (std::find(used.begin(), used.end(), g) != used.end()) continue;
    used.push_back(g);
    s.terms.push_back({PauliString::from_index(n, g), w(static_cast<Eigen::Index>(s.terms.size()))});
  }
  return s;
}

std::vector<PauliChannelSpec> spec_batch(std::uint64_t seed, int count, int max_n) {
  Rng rng(seed);
  std::vector<PauliChannelSpec> out;
  for (int i = 0; i < count; ++i) out.push_back(random_spec(rng, 1 + i % max_n));
  return out;
}

PauliChannelSpec depolarizing(double p) {
  PauliChannelSpec s;
  s.n = 1;
  s.terms = {{PauliString::parse("I"), 1 - p},
             {PauliString::parse("X"), p / 3},
             {PauliString::parse("Y"), p / 3},
             {PauliString::parse("Z"), p / 3}};
  return s;
}

double trace_norm_eig(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(CMat((h + h.adjoint()) / 2.0));
  return es.eigenvalues().cwiseAbs().sum();
}

CMat fock(int N, int k) {
  CMat r = CMat::Zero(N + 1, N + 1);
  r(k, k) = 1.0;
  return r;
}

// 1. Symbolic Pauli eigenvalues against the dense superoperator spectrum.
Outcome pauli_eigenvalue_law() {
  double worst = 0.0;
  for (const auto& s : spec_batch(101, 100, 3)) {
    const CMat S = pauli_channel(s).superop;
    Eigen::SelfAdjointEigenSolver<CMat> es(CMat((S + S.adjoint()) / 2.0));
    std::vector<double> dense(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::vector<double> mu = pauli_channel_eigenvalues(s);
    std::sort(dense.begin(), dense.end());
    std::sort(mu.begin(), mu.end());
    for (size_t i = 0; i < mu.size(); ++i) worst = std::max(worst, std::abs(mu[i] - dense[i]));
    worst = std::max(worst, (S - S.adjoint()).norm());
  }
  return {worst <= 1e-12, "max |mu - eig| = " + fmt(worst)};
}

// 2. Witness factors below 1 - 2 min lambda; depolarizing p = 1/4 values.
Outcome pauli_curvature_bound() {
  double excess = -1.0;
  for (const auto& s : spec_batch(101, 100, 3)) {
    const std::vector<double> mu = pauli_channel_eigenvalues(s);
    double wit = 0.0;
    for (std::uint64_t g = 0; g < mu.size(); ++g)
      if (!pauli_fixed(s, PauliString::from_index(s.n, g))) wit = std::max(wit, std::abs(mu[g]));
    excess = std::max(excess, wit - (1.0 - 2.0 * s.min_weight()));
  }
  const CurvatureReport dep = pauli_lipschitz_factor(depolarizing(0.25));
  const double e1 = std::abs(dep.upper_bound_factor - (1.0 - 2.0 * (0.25 / 3.0)));
  const double e2 = std::abs(dep.lower_bound_factor - 2.0 / 3.0);
  return {excess <= 1e-12 && e1 <= 1e-12 && e2 <= 1e-12,
          "max excess " + fmt(excess) + ", |upper - 5/6| " + fmt(e1) + ", |witness - 2/3| " + fmt(e2)};
}

// 3. Mixing bound with powers, group average and the SDP jump computed separately.
Outcome pauli_mixing() {
  Rng rng(303);
  const auto specs = spec_batch(302, 20, 2);
  double worst = -1e300, ratio = 0.0, doubled = -1e300;
  for (const auto& s : specs) {
    const int d = 1 << s.n;
    const CMat rho = random_state(rng, d);
    const Channel ch = pauli_channel(s);
    const CMat EI = pauli_conditional_expectation(s).map.apply_adjoint(rho);
    const double J = jump(pauli_seminorm(s), rho, ch).value;
    const double lam = s.min_weight();
    CMat r = rho;
    for (int k = 0; k <= 20; ++k) {
      const double measured = trace_norm_eig(CMat(r - EI));
      const double bound = std::pow(1.0 - 2.0 * lam, k) / (2.0 * lam) * J;
      worst = std::max(worst, measured - bound);
      ratio = std::max(ratio, measured / bound);
      doubled = std::max(doubled, measured - 2.0 * bound);
      r = ch.apply_adjoint(r);
    }
  }
  return {worst <= 1e-6, "max (measured - bound) = " + fmt(worst) + ", max measured / bound = " + fmt(ratio) +
                            ", max (measured - 2 bound) = " + fmt(doubled)};
}

// 4. Trace-norm duals and coupling primal/dual agreement.
Outcome sdp_solver() {
  Rng rng(404);
  SdpOptions so;
  so.tol = 1e-10;
  double tn = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + i % 7;
    const CMat delta = random_hermitian(rng, d);
    const TransportResult t = dual_transport(SemiNormSpec::operator_norm(d), delta, so);
    tn = std::max(tn, std::abs(t.value - trace_norm_eig(delta)));
  }
  double pd = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int d = 2 + i % 2;
    const CMat g = random_ginibre(rng, d * d, d * d);
    const TransportResult t = coupling_cost(CMat(g * g.adjoint()), random_state(rng, d), random_state(rng, d), so);
    pd = std::max(pd, std::abs(t.upper - t.value));
  }
  return {tn <= 1e-7 && pd <= 1e-7, "trace-norm error " + fmt(tn) + ", coupling gap " + fmt(pd)};
}

// 5. Bosonic intertwining and the gradient estimate at kappa = 1 - lambda.
Outcome bose_intertwining() {
  const int N = 20;
  const CMat env = thermal_state(1.0, N).rho;
  double res = 0.0, leak = 0.0, shortfall = -1.0;
  std::string kappas;
  for (double lambda : {0.25, 0.5, 0.75}) {
    const BoseChannel ch = bose_channel({lambda, env, N});
    res = std::max(res, bose_intertwining_residual(ch, N / 2));
    Rng rng(505);
    auto states = ge_sample_states(rng, N / 2 + 1, 16);
    for (auto& s : states) {
      s = embed_fock_state(s, N);
      leak = std::max(leak, bose_leakage(ch, s));
    }
    GEOptions go;
    go.observable_subspace = fock_sector_basis(N, N / 2);
    const GEReport ge = verify_ge(ch.channel, bose_derivations(N), states, go);
    shortfall = std::max(shortfall, (1.0 - lambda) - ge.kappa_star);
    kappas += (kappas.empty() ? "" : " ") + fmt(ge.kappa_star);
  }
  return {res <= 1e-8 && leak <= 1e-6 && shortfall <= 1e-4,
          "residual " + fmt(res) + ", leakage " + fmt(leak) + ", kappa_star [" + kappas + "], max (1 - lambda) - kappa_star " +
              fmt(shortfall)};
}

// 6. Regularity slack on 10 pairs and the end-to-end mixing bound.
Outcome bose_regularity() {
  const int N = 20;
  const BoseChannel ch = bose_channel({0.5, thermal_state(1.0, N).rho, N});
  Rng rng(606);
  std::vector<std::pair<CMat, CMat>> pairs{{fock(N, 0), fock(N, 1)}, {fock(N, 0), fock(N, 2)}, {fock(N, 1), fock(N, 2)},
                                           {fock(N, 0), embed_fock_state(thermal_state(1.0, 10).rho, N)},
                                           {fock(N, 2), fock(N, 3)}};
  while (pairs.size() < 10)
    pairs.emplace_back(embed_fock_state(random_state(rng, 4), N), embed_fock_state(random_state(rng, 4), N));
  double slack = 1e300, chain = -1e300;
  for (const auto& [a, b] : pairs) {
    const RegularityReport r = regularity_check(ch, a, b, 6);
    slack = std::min(slack, r.slack);
    for (const auto& row : r.chain) chain = std::max(chain, row.measured - row.bound);
  }
  double mix = -1e300;
  for (const auto& row : bose_mixing_corollary(ch, fock(N, 1), 6))
    mix = std::max(mix, row.measured - std::min(row.bound_jump, row.bound_closed));
  return {slack >= -1e-6 && chain <= 1e-6 && mix <= 1e-6,
          "min slack " + fmt(slack) + ", chain excess " + fmt(chain) + ", mixing excess " + fmt(mix)};
}

// 7. Gibbs sampler certificate for the commuting Ising chain at beta = 0.05.
Outcome gibbs_certificate() {
  Rng rng(707);
  const GibbsCertificate c =
      gibbs_contraction_certificate(ising_chain(3, 1.0, 0.0), 0.05, {0.1, 0.5, 1.0, 2.0, 5.0}, 20, rng);
  return {c.kappa_beta < 1.0 && c.max_violation <= 1e-7,
          "kappa(beta) " + fmt(c.kappa_beta) + ", max violation " + fmt(c.max_violation) + ", empirical rate " +
              fmt(c.empirical_rate)};
}

// 8. Spectral gap against the structural curvature.
Outcome gap_vs_curvature() {
  double worst = 1e300;
  for (const auto& s : spec_batch(808, 50, 2)) {
    const int d = 1 << s.n;
    const CMat omega = CMat::Identity(d, d) / static_cast<double>(d);
    const Channel ch = pauli_channel(s);
    const double gap = spectral_gap(ch, omega, fixed_point_expectation(ch, omega));
    worst = std::min(worst, gap - (1.0 - pauli_structural_factor(s)));
  }
  return {worst >= -1e-9, "min (gap - kappa) = " + fmt(worst)};
}

// 9. Transport-entropy inequality for two-qubit site replacements.
Outcome tc_inequality() {
  const std::vector<int> dims{2, 2};
  const std::vector<ConditionalExpectation> Es{site_replacement(dims, 0), site_replacement(dims, 1)};
  const SemiNormSpec L = SemiNormSpec::oscillator(dims);
  const Channel avg = channel_from_superop(CMat((Es[0].map.superop + Es[1].map.superop) / 2.0));
  LipschitzOptions lo;
  lo.restarts = 10;
  lo.seed = 909;
  const double factor = lipschitz_factor(avg, L, lo).lower_bound_factor;
  Rng rng(909);
  double slack = 1e300;
  bool premise = true;
  for (int i = 0; i < 50; ++i) {
    const InequalityReport r = tc_inequality_check(Es, L, 0.5, 1.0, random_state(rng, 4), factor);
    slack = std::min(slack, r.slack);
    premise = premise && r.premise_ok;
  }
  return {premise && slack >= -1e-7, "measured factor " + fmt(factor) + ", min slack " + fmt(slack)};
}

// 10. Transport-information inequality for the qubit depolarizing semigroup.
Outcome ti_inequality() {
  DerivationStructure ds;
  for (const char* p : {"X", "Y", "Z"}) {
    ds.v.push_back(PauliString::parse(p).matrix() / (2.0 * std::sqrt(2.0)));
    ds.omega.push_back(0.0);
  }
  ds.sigma = CMat(CMat::Identity(2, 2) / 2.0);
  const GeneratorSpec gen = generator_from_superop(ds.lindbladian());
  Rng rng(1010);
  const double C = semigroup_decay_constant(ds, gen, 1.0, {0.1, 0.5, 1.0, 2.0, 5.0}, rng, 20);
  double slack = 1e300, ident = 0.0;
  for (int i = 0; i < 20; ++i) {
    const InequalityReport r = ti_inequality_check(ds, gen, 1.0, 1.0, random_state(rng, 2));
    slack = std::min(slack, r.slack);
    const CMat x = random_hermitian(rng, 2);
    ident = std::max(ident, std::abs(dirichlet_form(ds, *ds.sigma, x) - generator_energy(gen.superop, *ds.sigma, x)));
  }
  return {slack >= 0.0 && ident <= 1e-10 && C <= 1.0 + 1e-12,
          "min slack " + fmt(slack) + ", Dirichlet identity " + fmt(ident) + ", decay constant " + fmt(C)};
}

// 11. Fermionic beam splitter relations and Lipschitz factor.
Outcome fermi_beam_splitter_check() {
  double car = 0.0, rel = 0.0, excess = -1.0;
  for (int n : {1, 2})
    for (double lambda : {0.25, 0.5}) {
      const int d = 1 << n;
      const auto [ch, rep] = fermi_beam_splitter(lambda, n, CMat(CMat::Identity(d, d) / static_cast<double>(d)));
      car = std::max(car, rep.car_residual);
      rel = std::max(rel, rep.relation_residual);
      LipschitzOptions lo;
      lo.restarts = 8;
      lo.seed = 1111;
      const CurvatureReport f = lipschitz_factor(ch, fermi_seminorm(n), lo);
      excess = std::max(excess, f.lower_bound_factor - std::sqrt(lambda));
    }
  return {car <= 1e-14 && rel <= 1e-10 && excess <= 1e-8,
          "CAR " + fmt(car) + ", relations " + fmt(rel) + ", max (factor - sqrt(lambda)) " + fmt(excess)};
}

// 12. Operator lemma on random premise-satisfying triples.
Outcome operator_lemma() {
  Rng rng(1212);
  double worst = 1e300;
  for (int i = 0; i < 100; ++i) {
    const int d = 2 + i % 4;
    const CMat ga = random_ginibre(rng, d, 1 + i % d);
    const CMat A = ga * ga.adjoint();
    const CMat gb = random_ginibre(rng, d, d);
    const CMat B = gb * gb.adjoint() + 0.1 * CMat::Identity(d, d);
    const CMat C = random_ginibre(rng, d, d);
    Eigen::SelfAdjointEigenSolver<CMat> eb(B);
    const CMat bi = eb.operatorInverseSqrt();
    Eigen::SelfAdjointEigenSolver<CMat> ec(CMat(bi * C.adjoint() * A * C * bi));
    const double lambda = ec.eigenvalues().maxCoeff();
    worst = std::min(worst, operator_lemma_margin(A, B, C, lambda));
  }
  return {worst >= -1e-9, "min margin " + fmt(worst)};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 13. Two runs of the command-line tool with the same seed and spec.
Outcome determinism() {
  const std::string bin = QCURV_BIN;
  const std::string dir = QCURV_SPEC_DIR;
  const std::string tmp = QCURV_WORK_DIR;
  const std::vector<std::pair<std::string, std::string>> runs{
      {"mixing", "pauli_mixing.json"}, {"certify-tc", "site_replacements.json"}, {"curvature", "fermi.json"}};
  bool same = true;
  for (const auto& [cmd, spec] : runs)
    for (const char* fmt_name : {"json", "csv"}) {
      std::string files[2];
      for (int k = 0; k < 2; ++k) {
        files[k] = tmp + "/determinism_" + cmd + "_" + fmt_name + "_" + std::to_string(k);
        const std::string line = bin + " " + cmd + " --spec " + dir + "/" + spec + " --seed 42 --format " + fmt_name +
                                 " --out " + files[k];
        const int rc = std::system(line.c_str());
        if (rc == -1) return {false, "could not run " + bin};
      }
      const std::string a = slurp(files[0]), b = slurp(files[1]);
      if (a.empty() || a != b) same = false;
    }
  return {same, same ? "byte-identical reports" : "reports differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Pauli eigenvalue law", pauli_eigenvalue_law},
      {"Pauli curvature bound", pauli_curvature_bound},
      {"Pauli mixing", pauli_mixing},
      {"SDP solver", sdp_solver},
      {"bosonic intertwining", bose_intertwining},
      {"bosonic regularity and mixing", bose_regularity},
      {"Gibbs certificate", gibbs_certificate},
      {"spectral gap vs curvature", gap_vs_curvature},
      {"transport-entropy inequality", tc_inequality},
      {"transport-information inequality", ti_inequality},
      {"fermionic beam splitter", fermi_beam_splitter_check},
      {"operator lemma", operator_lemma},
      {"determinism", determinism},
  };
  // Wall-clock limits in seconds; zero means none.
  const double limits[] = {10, 0, 120, 0, 300, 0, 300, 0, 0, 0, 0, 0, 0};

  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
  if (pick.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) pick.push_back(i);

  bool all = true;
  for (int id : pick) {
    if (id < 1 || id > static_cast<int>(criteria.size())) {
      std::cerr << "unknown criterion " << id << "\n";
      return 1;
    }
    const auto& [name, run] = criteria[static_cast<size_t>(id - 1)];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double limit = limits[id - 1];
    if (limit > 0 && secs > limit) {
      o.pass = false;
      o.detail += ", over the " + std::to_string(static_cast<int>(limit)) + " s limit";
    }
    std::printf("criterion %2d %-34s %s  (%s; %.1f s)\n", id, name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs);
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
