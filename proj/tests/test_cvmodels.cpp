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
#include "qcurv/cvmodels.hpp"

using namespace qcurv;

namespace {

CMat fock(int N, int k) {
  CMat r = CMat::Zero(N + 1, N + 1);
  r(k, k) = 1.0;
  return r;
}

// Tr_2[(1 (x) sigma) U^dag (x (x) 1) U], contracted entry by entry.
CMat contract(const CMat& U, const CMat& x, const CMat& sigma) {
  const Eigen::Index n = x.rows();
  const CMat M = U.adjoint() * kron(x, CMat(CMat::Identity(n, n))) * U;
  const CMat Y = kron(CMat(CMat::Identity(n, n)), sigma) * M;
  CMat out = CMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) out(i, j) += Y(i * n + k, j * n + k);
  return out;
}

}  // namespace

TEST_SUITE("cvmodels") {
  TEST_CASE("Fock operators") {
    const int N = 6;
    const FockOps f = fock_ops(N);
    CVec one = CVec::Zero(N + 1);
    one(1) = 1.0;
    CVec zero = CVec::Zero(N + 1);
    zero(0) = 1.0;
    CHECK((f.a * one - zero).norm() <= 1e-15);
    const Eigen::VectorXd ev = oracle::eigenvalues(f.number);
    for (int k = 0; k <= N; ++k) CHECK(std::abs(ev(k) - k) <= 1e-13);
    CMat defect = f.a * f.adag - f.adag * f.a - CMat::Identity(N + 1, N + 1);
    CHECK(std::abs(defect(N, N) + cplx(N + 1.0)) <= 1e-13);
    defect(N, N) = 0.0;
    CHECK(defect.norm() <= 1e-13);
  }

  TEST_CASE("beam splitter unitary") {
    const int N = 5;
    const Eigen::Index n1 = N + 1;
    CHECK((beam_splitter_unitary(1.0, N) - CMat::Identity(n1 * n1, n1 * n1)).norm() <= 1e-14);
    // lambda = 0 swaps the one-photon states up to a relative sign.
    const CMat U = beam_splitter_unitary(0.0, N);
    const Eigen::Index i10 = 1 * n1 + 0, i01 = 0 * n1 + 1;
    CHECK(std::abs(std::abs(U(i01, i10)) - 1.0) <= 1e-14);
    CHECK(std::abs(std::abs(U(i10, i01)) - 1.0) <= 1e-14);
    CHECK(std::abs(U(i01, i10) + U(i10, i01)) <= 1e-14);
    CHECK((U.adjoint() * U - CMat::Identity(n1 * n1, n1 * n1)).norm() <= 1e-12);
    CHECK(bose_angle_addition_residual(0.3, 0.6) <= 1e-12);
  }

  TEST_CASE("rotation relations on low sectors") {
    const int N = 8;
    const Eigen::Index n1 = N + 1;
    const double lambda = 0.4;
    const CMat U = beam_splitter_unitary(lambda, N);
    const FockOps f = fock_ops(N);
    const CMat I = CMat::Identity(n1, n1);
    const CMat a = kron(f.a, I), b = kron(I, f.a);
    const CMat lhs = U.adjoint() * a * U;
    const CMat rhs = std::sqrt(lambda) * a + std::sqrt(1 - lambda) * b;
    // Compare on states with at most N - 1 photons in total.
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n1; ++i)
      for (Eigen::Index k = 0; k + i < N; ++k) worst = std::max(worst, (lhs.col(i * n1 + k) - rhs.col(i * n1 + k)).norm());
    CHECK(worst <= 1e-10);
  }

  TEST_CASE("channel at the endpoints") {
    const int N = 6;
    BeamSplitterSpec s{1.0, thermal_state(1.0, N).rho, N};
    CHECK((bose_channel(s).channel.superop - CMat::Identity(49, 49)).norm() <= 1e-12);
  }

  TEST_CASE("channel against direct contraction") {
    const int N = 7;
    Rng rng(71);
    CMat sigma = CMat::Zero(N + 1, N + 1);
    sigma.topLeftCorner(3, 3) = random_state(rng, 3);
    for (double lambda : {0.0, 0.5}) {
      const BoseChannel ch = bose_channel({lambda, sigma, N});
      const CMat U = beam_splitter_unitary(lambda, N);
      const CMat x = random_hermitian(rng, N + 1);
      const CMat got = ch.channel.apply(x);
      const CMat want = contract(U, x, sigma);
      CHECK((got - want).topLeftCorner(N - 1, N - 1).norm() <= 1e-12);
    }
  }

  TEST_CASE("thermal state") {
    const ThermalState t = thermal_state(1.0, 40);
    CHECK(std::abs(t.energy - 1.0 / (std::exp(1.0) - 1.0)) <= 1e-12);
    CHECK((thermal_state(50.0, 10).rho - fock(10, 0)).norm() <= 1e-15);
    const double q = std::exp(-0.7);
    const ThermalState u = thermal_state(0.7, 80);
    CHECK(std::abs((u.rho * u.rho).trace().real() - (1 - q) / (1 + q)) <= 1e-12);
  }

  TEST_CASE("energy bound") {
    const int N = 8;
    const BoseChannel vac = bose_channel({0.5, fock(N, 0), N});
    CHECK(std::abs(energy_bound_check(vac, fock(N, 0), false).energy_out) <= 1e-14);

    // Direct expectation: Tr_2 U (|1><1| (x) |0><0|) U^dag has mean photon number lambda.
    const EnergyReport e = energy_bound_check(vac, fock(N, 1), false);
    const CMat U = beam_splitter_unitary(0.5, N);
    const CMat out = U * kron(fock(N, 1), fock(N, 0)) * U.adjoint();
    double want = 0.0;
    for (int i = 0; i <= N; ++i)
      for (int k = 0; k <= N; ++k) want += i * out(i * (N + 1) + k, i * (N + 1) + k).real();
    CHECK(std::abs(e.energy_out - want) <= 1e-12);
    CHECK(std::abs(e.energy_out - 0.5) <= 1e-12);
    CHECK(e.slack >= -1e-12);

    const int M = 16;
    for (double lambda : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const BoseChannel ch = bose_channel({lambda, thermal_state(1.5, M).rho, M});
      CHECK(energy_bound_check(ch, thermal_state(2.0, M).rho, false).slack >= -1e-9);
    }
  }

  TEST_CASE("intertwining on the half sector") {
    const int N = 20;
    const BoseChannel ch = bose_channel({0.5, thermal_state(1.0, N).rho, N});
    CHECK(bose_intertwining_residual(ch, N / 2) <= 1e-8);
    Rng rng(72);
    for (int s = 0; s < 4; ++s) {
      const CMat rho = embed_fock_state(random_state(rng, N / 2 + 1), N);
      CHECK(bose_leakage(ch, rho) <= 1e-6);
    }
  }

  TEST_CASE("regularity") {
    const int N = 20;
    const BoseChannel ch = bose_channel({0.5, thermal_state(1.0, N).rho, N});
    const RegularityReport same = regularity_check(ch, fock(N, 1), fock(N, 1), 3);
    CHECK(std::abs(same.lhs) <= 1e-12);
    CHECK(same.slack >= -1e-9);
    const RegularityReport r = regularity_check(ch, fock(N, 0), fock(N, 1), 6);
    CHECK(r.slack >= -1e-6);
    for (const auto& row : r.chain) CHECK(row.measured <= row.bound + 1e-6);

    const BoseChannel flat = bose_channel({1.0, thermal_state(1.0, 6).rho, 6});
    CHECK_THROWS_AS(regularity_check(flat, fock(6, 0), fock(6, 1), 2), PreconditionError);
  }

  TEST_CASE("Clifford generators") {
    const auto c1 = clifford_generators(1);
    CHECK((c1[0] - oracle::pauli('X')).norm() <= 1e-15);
    CHECK((c1[1] - oracle::pauli('Y')).norm() <= 1e-15);
    for (int n : {1, 2, 3}) {
      const auto c = clifford_generators(n);
      const int d = 1 << n;
      double car = 0.0;
      for (size_t j = 0; j < c.size(); ++j)
        for (size_t k = 0; k < c.size(); ++k) {
          const CMat ac = c[j] * c[k] + c[k] * c[j] - (j == k ? 2.0 : 0.0) * CMat::Identity(d, d);
          car = std::max(car, ac.norm());
        }
      CHECK(car <= 1e-14);
    }
    const auto c2 = clifford_generators(2);
    CHECK((c2[2] * c2[0] + c2[0] * c2[2]).norm() <= 1e-15);
    CHECK((c2[2] * c2[1] + c2[1] * c2[2]).norm() <= 1e-15);
    for (int mask = 1; mask < 16; ++mask) {
      std::vector<int> A;
      for (int j = 0; j < 4; ++j)
        if (mask & (1 << j)) A.push_back(j);
      CHECK(std::abs(clifford_product(c2, A).trace()) <= 1e-14);
    }
  }

  TEST_CASE("fermionic beam splitter") {
    const auto [id, rid] = fermi_beam_splitter(1.0, 2, CMat(CMat::Identity(4, 4) / 4.0));
    CHECK((id.superop - CMat::Identity(16, 16)).norm() <= 1e-10);

    const auto [ch, rep] = fermi_beam_splitter(0.5, 1, CMat(CMat::Identity(2, 2) / 2.0));
    CHECK(rep.car_residual <= 1e-14);
    CHECK(rep.relation_residual <= 1e-10);
    CHECK(rep.intertwining_residual_even <= 1e-9);
    CHECK(rep.even_residual <= 1e-12);
  }

  // The relation holds on the even part only; kept as a tracked failure.
  TEST_CASE("fermionic intertwining over the full matrix basis" * doctest::should_fail()) {
    const auto [ch, rep] = fermi_beam_splitter(0.5, 1, CMat(CMat::Identity(2, 2) / 2.0));
    CHECK(rep.intertwining_residual <= 1e-9);
  }
}
