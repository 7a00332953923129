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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "qcurv/curvature.hpp"

using namespace qcurv;

namespace {

PauliChannelSpec depolarizing(double p) {
  PauliChannelSpec s;
  s.n = 1;
  s.terms = {{PauliString::parse("I"), 1 - p},
             {PauliString::parse("X"), p / 3},
             {PauliString::parse("Y"), p / 3},
             {PauliString::parse("Z"), p / 3}};
  return s;
}

PauliChannelSpec random_spec(Rng& rng, int n, int terms) {
  PauliChannelSpec s;
  s.n = n;
  const RVec w = random_simplex(rng, terms);
  std::vector<std::uint64_t> used{0};
  s.terms.push_back({PauliString::from_index(n, 0), w(0)});
  while (static_cast<int>(s.terms.size()) < terms) {
    const auto g = static_cast<std::uint64_t>(rng.integer(1, (1 << (2 * n)) - 1));
    if (std::find(used.begin(), used.end(), g) != used.end()) continue;
    used.push_back(g);
    s.terms.push_back({PauliString::from_index(n, g), w(static_cast<Eigen::Index>(s.terms.size()))});
  }
  return s;
}

// mu_gamma by counting anticommuting letters.
double mu_oracle(const PauliChannelSpec& s, const std::string& gamma) {
  double mu = 0.0;
  for (const auto& t : s.terms) mu += t.weight * (oracle::anticommute(t.string.str(), gamma) ? -1.0 : 1.0);
  return mu;
}

DerivationStructure qubit_derivations() {
  DerivationStructure ds;
  for (char c : {'X', 'Y', 'Z'}) {
    ds.v.push_back(oracle::pauli(c) / (2 * std::sqrt(2.0)));
    ds.omega.push_back(0.0);
  }
  ds.sigma = CMat(CMat::Identity(2, 2) / 2.0);
  return ds;
}

// ||d y||_rho^2 with the logarithmic mean, evaluated in the eigenbasis of rho.
double log_mean_norm2(const DerivationStructure& ds, const CMat& rho, const CMat& y) {
  Eigen::SelfAdjointEigenSolver<CMat> es(rho);
  const Eigen::VectorXd p = es.eigenvalues();
  const CMat U = es.eigenvectors();
  double s = 0.0;
  for (const auto& v : ds.v) {
    const CMat g = U.adjoint() * (v * y - y * v) * U;
    for (Eigen::Index k = 0; k < p.size(); ++k)
      for (Eigen::Index l = 0; l < p.size(); ++l) {
        const double lm = std::abs(p(k) - p(l)) < 1e-14 ? p(k) : (p(k) - p(l)) / (std::log(p(k)) - std::log(p(l)));
        s += lm * std::norm(g(k, l));
      }
  }
  return s;
}

}  // namespace

TEST_SUITE("curvature") {
  TEST_CASE("identity channel has factor one") {
    LipschitzOptions lo;
    lo.restarts = 3;
    const CurvatureReport r =
        lipschitz_factor(identity_channel(2), SemiNormSpec::commutator_max({oracle::pauli('Z')}), lo);
    CHECK(std::abs(r.lower_bound_factor - 1.0) <= 1e-9);
  }

  TEST_CASE("depolarizing structural bound and witness") {
    const PauliChannelSpec s = depolarizing(0.25);
    const CurvatureReport r = pauli_lipschitz_factor(s);
    CHECK(std::abs(r.upper_bound_factor - (1.0 - 2.0 * (0.25 / 3.0))) <= 1e-14);
    double wit = 0.0;
    for (const char* g : {"X", "Y", "Z"}) wit = std::max(wit, std::abs(mu_oracle(s, g)));
    CHECK(std::abs(wit - 2.0 / 3.0) <= 1e-14);
    CHECK(std::abs(r.lower_bound_factor - wit) <= 1e-12);
    CHECK(r.certified);
  }

  TEST_CASE("sampled witness stays below the structural bound") {
    Rng rng(51);
    for (int trial = 0; trial < 3; ++trial) {
      const PauliChannelSpec s = random_spec(rng, 2, 4);
      LipschitzOptions lo;
      lo.restarts = 4;
      lo.seed = static_cast<std::uint64_t>(trial);
      const CurvatureReport r = lipschitz_factor(pauli_channel(s), pauli_seminorm(s), lo);
      CHECK(r.lower_bound_factor <= pauli_structural_factor(s) + 1e-9);
    }
  }

  TEST_CASE("gradient estimate of the identity channel") {
    Rng rng(52);
    const GEReport r = verify_ge(identity_channel(2), qubit_derivations(), ge_sample_states(rng, 2, 8));
    CHECK(r.kappa_star >= -1e-6);
    CHECK(r.kappa_star <= 1e-6);
  }

  TEST_CASE("gradient estimate of the depolarizing semigroup against the direct form") {
    const DerivationStructure ds = qubit_derivations();
    const GeneratorSpec gen = generator_from_superop(ds.lindbladian());
    Rng rng(53);
    for (double t : {0.3, 1.0}) {
      const Channel P = semigroup_channel(gen, t);
      const auto states = ge_sample_states(rng, 2, 8);
      const GEReport r = verify_ge(P, ds, states);
      const double f = 1.0 - r.kappa_star;
      double worst = 0.0;
      for (const auto& rho : states)
        for (int k = 0; k < 10; ++k) {
          const CMat x = random_hermitian(rng, 2);
          const double lhs = log_mean_norm2(ds, rho, P.apply(x));
          const double rhs = f * f * log_mean_norm2(ds, hermitize(P.apply_adjoint(rho)), x);
          worst = std::max(worst, (lhs - rhs) / std::max(rhs, 1e-12));
        }
      CHECK(worst <= 1e-6);
    }
  }

  TEST_CASE("intertwining of the identity channel") {
    const DerivationStructure ds = qubit_derivations();
    const IntertwiningReport r = verify_intertwining(identity_channel(2), ds, CMat::Identity(12, 12));
    CHECK(r.residual <= 1e-14);
  }

  TEST_CASE("Pauli intertwining with sign-twisted blocks") {
    Rng rng(54);
    const PauliChannelSpec s = random_spec(rng, 2, 5);
    DerivationStructure ds;
    std::vector<std::string> betas;
    for (const auto& str : oracle::all_strings(2))
      if (str != "II") {
        betas.push_back(str);
        ds.v.push_back(oracle::pauli_string(str));
        ds.omega.push_back(0.0);
      }
    const Eigen::Index dd = 16;
    CMat hat = CMat::Zero(dd * static_cast<Eigen::Index>(betas.size()), dd * static_cast<Eigen::Index>(betas.size()));
    for (size_t b = 0; b < betas.size(); ++b) {
      CMat blk = CMat::Zero(dd, dd);
      for (const auto& t : s.terms) {
        const CMat a = oracle::pauli_string(t.string.str());
        const double sign = oracle::anticommute(t.string.str(), betas[b]) ? -1.0 : 1.0;
        blk += sign * t.weight * lr_superop(a, a);
      }
      hat.block(static_cast<Eigen::Index>(b) * dd, static_cast<Eigen::Index>(b) * dd, dd, dd) = blk;
    }
    CHECK(verify_intertwining(pauli_channel(s), ds, hat).residual <= 1e-12);
  }

  TEST_CASE("spectral gap") {
    const CMat w = CMat::Identity(2, 2) / 2.0;
    const Channel id = identity_channel(2);
    CHECK(std::abs(spectral_gap(id, w, fixed_point_expectation(id, w, FixedPointMode::Primitive))) <= 1e-12);
    const Channel dep = pauli_channel(depolarizing(0.25));
    CHECK(std::abs(spectral_gap(dep, w, fixed_point_expectation(dep, w)) - 1.0 / 3.0) <= 1e-10);

    Rng rng(55);
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 1 + trial % 2;
      const PauliChannelSpec s = random_spec(rng, n, 3);
      const int d = 1 << n;
      const CMat omega = CMat::Identity(d, d) / static_cast<double>(d);
      const Channel ch = pauli_channel(s);
      double top = 0.0;
      for (const auto& g : oracle::all_strings(n)) {
        const double mu = mu_oracle(s, g);
        if (std::abs(mu - 1.0) > 1e-12) top = std::max(top, std::abs(mu));
      }
      const double gap = spectral_gap(ch, omega, fixed_point_expectation(ch, omega));
      CHECK(std::abs(gap - (1.0 - top)) <= 1e-10);
      CHECK(gap >= 1.0 - pauli_structural_factor(s) - 1e-7);
    }
  }

  TEST_CASE("Poincare constant for the operator norm") {
    const CMat w = CMat::Identity(2, 2) / 2.0;
    const ConditionalExpectation E = pauli_conditional_expectation(depolarizing(0.3));
    const PoincareReport r = poincare_2inf_constant(SemiNormSpec::operator_norm(2), w, E, 6, 1);
    Rng rng(56);
    double search = 0.0;
    for (int s = 0; s < 2000; ++s) {
      const CMat x = random_hermitian(rng, 2);
      const CMat y = x - x.trace() / 2.0 * CMat::Identity(2, 2);
      search = std::max(search, std::sqrt((y * y).trace().real() / 2) / oracle::spectral_norm(x));
    }
    CHECK(search <= r.constant + 1e-9);
    CHECK(r.constant <= 1.0 + 1e-7);
  }

  TEST_CASE("Poincare constant with a single orbit of directions") {
    // L(x) = ||[Z, x]||, E the diagonal pinching: every off-diagonal direction gives 1/2.
    CMat p0 = CMat::Zero(2, 2), p1 = CMat::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    ConditionalExpectation E{channel_from_kraus({p0, p1}), "pinching"};
    const PoincareReport r =
        poincare_2inf_constant(SemiNormSpec::commutator_max({oracle::pauli('Z')}), CMat(CMat::Identity(2, 2) / 2.0), E, 4);
    CHECK(!r.infinite);
    CHECK(std::abs(r.constant - 0.5) <= 1e-8);

    const ConditionalExpectation tr = pauli_conditional_expectation(depolarizing(0.3));
    CHECK(poincare_2inf_constant(SemiNormSpec::commutator_max({oracle::pauli('Z')}), CMat(CMat::Identity(2, 2) / 2.0), tr, 2)
              .infinite);
  }

  TEST_CASE("transport-entropy inequality") {
    const std::vector<int> dims{2, 2};
    const std::vector<ConditionalExpectation> Es{site_replacement(dims, 0), site_replacement(dims, 1)};
    const SemiNormSpec L = SemiNormSpec::oscillator(dims);
    const InequalityReport inv = tc_inequality_check(Es, L, 0.5, 1.0, CMat(CMat::Identity(4, 4) / 4.0));
    CHECK(std::abs(inv.lhs) <= 1e-7);
    CHECK(inv.slack >= -1e-7);

    Rng rng(57);
    for (int s = 0; s < 8; ++s) {
      const InequalityReport r = tc_inequality_check(Es, L, 0.5, 1.0, random_state(rng, 4));
      CHECK(r.premise_ok);
      CHECK(r.slack >= -1e-7);
      // Both sides from independent oracles: Pinsker bounds the transport by the trace distance.
      CHECK(r.details.at("relative_entropy") >= 0.0);
    }
    // One expectation with kappa = 1 reduces to T <= C sqrt(2 D).
    const std::vector<ConditionalExpectation> one{site_replacement(dims, 0)};
    for (int s = 0; s < 4; ++s) {
      const CMat rho = random_state(rng, 4);
      const InequalityReport r = tc_inequality_check(one, L, 1.0, 1.0, rho);
      const CMat rho_e = one[0].map.apply_adjoint(rho);
      CHECK(std::abs(r.rhs - std::sqrt(2.0 * oracle::rel_entropy(rho, rho_e))) <= 1e-9);
      CHECK(r.slack >= -1e-7);
    }
  }

  TEST_CASE("transport-information inequality and the Dirichlet identity") {
    const DerivationStructure ds = qubit_derivations();
    const GeneratorSpec gen = generator_from_superop(ds.lindbladian());
    Rng rng(58);
    for (int s = 0; s < 8; ++s) {
      const CMat x = random_hermitian(rng, 2);
      const double a = dirichlet_form(ds, *ds.sigma, x);
      const double b = generator_energy(ds.lindbladian(), *ds.sigma, x);
      CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, a));
      const InequalityReport r = ti_inequality_check(ds, gen, 1.0, 1.0, random_state(rng, 2));
      CHECK(r.premise_ok);
      CHECK(r.slack >= 0.0);
    }
    const InequalityReport fixed = ti_inequality_check(ds, gen, 1.0, 1.0, CMat(CMat::Identity(2, 2) / 2.0));
    CHECK(std::abs(fixed.lhs) <= 1e-7);
  }

  TEST_CASE("local transport-information at infinite temperature") {
    const LocalHamiltonian H = ising_chain(2, 1.0, 0.0);
    const GeneratorSpec gen = heat_bath_generator(H, 0.0);
    const CMat sigma = CMat::Identity(4, 4) / 4.0;
    Rng rng(59);
    const InequalityReport r = local_ti_check(gen, sigma, 1.0, 1.0, random_state(rng, 4));
    // With sigma maximally mixed and zero frequencies C_e = 2 (1 + 1) max ||v||.
    const BohrDecomposition bd = bohr_decomposition(site_trace_superop({2, 2}, 0), sigma);
    double vmax = 0.0;
    for (size_t j = 0; j < bd.v.size(); ++j) {
      CHECK(std::abs(bd.omega[j]) <= 1e-9);
      vmax = std::max(vmax, oracle::spectral_norm(bd.v[j]));
    }
    CHECK(std::abs(r.details.at("max_local_constant") - 4.0 * vmax) <= 1e-8);
    CHECK(r.slack >= 0.0);
  }

  TEST_CASE("local transport-information for a warm Ising chain") {
    const LocalHamiltonian H = ising_chain(3, 1.0, 0.0);
    const GeneratorSpec gen = heat_bath_generator(H, 0.1);
    const CMat sigma = gibbs_state(H.dense(), 0.1);
    Rng rng(60);
    LocalTIOptions lo;
    lo.premise_samples = 2;
    for (int s = 0; s < 2; ++s) CHECK(local_ti_check(gen, sigma, 1.0, 1.0, random_state(rng, 8), lo).slack >= 0.0);
  }

  TEST_CASE("jump diameter bound") {
    const Channel dep = pauli_channel(depolarizing(0.25));
    const SemiNormSpec L = SemiNormSpec::commutator_max({oracle::pauli('X'), oracle::pauli('Y'), oracle::pauli('Z')});
    Rng rng(61);
    const CMat rho = random_state(rng, 2);
    const InequalityReport same = jump_diameter_bound(L, dep, rho, rho, 1.0 / 6.0);
    CHECK(std::abs(same.lhs) <= 1e-7);
    CHECK(same.slack >= -1e-7);
    for (int s = 0; s < 3; ++s)
      CHECK(jump_diameter_bound(L, dep, random_state(rng, 2), random_state(rng, 2), 1.0 / 6.0).slack >= -1e-7);
    CHECK_THROWS_AS(jump_diameter_bound(L, dep, rho, rho, 0.0), PreconditionError);
  }

  TEST_CASE("tensorization") {
    const SemiNormSpec L = SemiNormSpec::commutator_max({oracle::pauli('X'), oracle::pauli('Y'), oracle::pauli('Z')});
    const Channel dep = pauli_channel(depolarizing(0.3));
    LipschitzOptions lo;
    lo.restarts = 3;
    const TensorizationReport one = tensorization_check({L}, {dep}, {1.0}, lo);
    const CurvatureReport direct = lipschitz_factor(dep, L, lo);
    CHECK(std::abs(one.measured - direct.lower_bound_factor) <= 1e-6);

    const TensorizationReport two = tensorization_check({L, L}, {dep, dep}, {0.5, 0.5}, lo);
    CHECK(two.slack >= -1e-7);

    const TensorizationReport flat = tensorization_check({L, L}, {identity_channel(2), identity_channel(2)}, {0.5, 0.5}, lo);
    CHECK(std::abs(flat.bound - 1.0) <= 1e-9);
    CHECK(flat.measured <= 1.0 + 1e-7);
  }

  TEST_CASE("finite-group transference") {
    const FiniteGroup G = pauli_group_table(1);
    const std::vector<CMat> u = pauli_group_rep(1);
    LipschitzOptions lo;
    lo.restarts = 2;
    const auto [dep, rep] = transfer_finite_group(G, {1, 1, 1, 1}, u, {1, 2}, {1, 1}, lo);
    const CMat full = pauli_channel(depolarizing(0.75)).superop;
    CHECK((dep.superop - full).norm() <= 1e-12);

    const auto [id, rid] = transfer_finite_group(G, {4, 0, 0, 0}, u, {1, 2}, {1, 1}, lo);
    CHECK((id.superop - CMat::Identity(4, 4)).norm() <= 1e-12);
    CHECK(std::abs(rid.classical_factor_inf - 1.0) <= 1e-7);

    std::vector<CMat> bad = u;
    bad[3] = (oracle::pauli('X') + oracle::pauli('Z')) / std::sqrt(2.0);
    CHECK_THROWS_AS(transfer_finite_group(G, {1, 1, 1, 1}, bad, {1, 2}, {1, 1}, lo), PreconditionError);
  }

  TEST_CASE("Pauli group representation recovers the Pauli channel") {
    Rng rng(62);
    const PauliChannelSpec s = random_spec(rng, 2, 5);
    const FiniteGroup G = pauli_group_table(2);
    const std::vector<CMat> u = pauli_group_rep(2);
    std::vector<double> k(16, 0.0);
    for (const auto& t : s.terms) k[t.string.index()] = 16 * t.weight;
    LipschitzOptions lo;
    lo.restarts = 1;
    const auto [ch, rep] = transfer_finite_group(G, k, u, {1, 2}, {1, 1}, lo);
    CHECK((ch.superop - pauli_channel(s).superop).norm() <= 1e-12);
  }

  TEST_CASE("Gibbs certificate at infinite temperature") {
    Rng rng(63);
    const GibbsCertificate c = gibbs_contraction_certificate(ising_chain(3, 1.0, 0.0), 0.0, {0.1, 0.5, 1.0, 2.0, 5.0}, 6, rng);
    CHECK(std::abs(c.kappa_beta) <= 1e-7);
    CHECK(c.worst_ratio <= 1.0 + 1e-9);
  }

  TEST_CASE("Gibbs certificate without interactions") {
    Rng rng(64);
    for (double beta : {0.1, 1.0, 3.0}) {
      const GibbsCertificate c = gibbs_contraction_certificate(ising_chain(1, 1.0, 0.0), beta, {0.5, 1.0}, 3, rng);
      CHECK(std::abs(c.kappa_beta) <= 1e-7);
    }
  }

  TEST_CASE("Gibbs certificate at small beta") {
    Rng rng(65);
    const GibbsCertificate c = gibbs_contraction_certificate(ising_chain(3, 1.0, 0.0), 0.01, {0.1, 0.5, 1.0, 2.0, 5.0}, 8, rng);
    CHECK(c.applicable);
    CHECK(c.max_violation <= 1e-7);
  }

  TEST_CASE("operator lemma") {
    Rng rng(66);
    for (int s = 0; s < 20; ++s) {
      const int d = 2 + s % 3;
      const CMat ga = random_ginibre(rng, d, 1 + s % d);
      const CMat A = ga * ga.adjoint();
      const CMat gb = random_ginibre(rng, d, d);
      const CMat B = gb * gb.adjoint() + 0.1 * CMat::Identity(d, d);
      const CMat C = random_ginibre(rng, d, d);
      // Smallest lambda with C^dag A C <= lambda B.
      Eigen::SelfAdjointEigenSolver<CMat> eb(B);
      const CMat bi = eb.operatorInverseSqrt();
      const double lambda = oracle::eigenvalues(CMat(bi * C.adjoint() * A * C * bi)).maxCoeff();
      CHECK(operator_lemma_margin(A, B, C, lambda) >= -1e-9);
    }
  }

  TEST_CASE("Pauli mixing bound") {
    Rng rng(67);
    const PauliChannelSpec s = depolarizing(0.2);
    const auto rows = pauli_mixing_check(s, random_state(rng, 2), 10);
    const Channel ch = pauli_channel(s);
    for (const auto& r : rows) CHECK(r.measured <= r.bound + 1e-6);
  }

  TEST_CASE("Pauli mixing bound is tight for a single dephasing string") {
    // P = 0.64 id + 0.36 Y.Y on |0><0|: distance 0.28^k, J = 0.36, kappa = 0.72.
    PauliChannelSpec s;
    s.n = 1;
    s.terms = {{PauliString::parse("I"), 0.64}, {PauliString::parse("Y"), 0.36}};
    CMat rho = CMat::Zero(2, 2);
    rho(0, 0) = 1.0;
    for (const auto& r : pauli_mixing_check(s, rho, 4)) {
      const double exact = std::pow(0.28, r.step);
      CHECK(std::abs(r.measured - exact) <= 1e-12);
      CHECK(std::abs(r.bound - exact) <= 1e-7);
    }
  }
}
