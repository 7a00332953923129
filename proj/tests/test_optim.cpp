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
#include "qcurv/optim.hpp"
#include "qcurv/random.hpp"

using namespace qcurv;

namespace {

// max Tr(delta X) over ||X|| <= 1, written as [[I, X], [X, I]] >= 0.
double trace_norm_by_lmi(const CMat& delta) {
  const auto d = static_cast<int>(delta.rows());
  const std::vector<CMat> basis = hermitian_basis(d);
  LmiProblem p;
  const int blk = p.add_block(2 * d);
  p.F0.push_back({blk, dense_coeff(CMat(CMat::Identity(2 * d, 2 * d)))});
  for (const CMat& h : basis) {
    const int v = p.add_var();
    p.b(v) = (delta * h).trace().real();
    CMat f = CMat::Zero(2 * d, 2 * d);
    f.topRightCorner(d, d) = h;
    f.bottomLeftCorner(d, d) = h;
    p.F[static_cast<size_t>(v)].push_back({blk, dense_coeff(f)});
  }
  return solve_lmi(p).value;
}

// Brute force over pure inputs on the doubled system with local refinement.
double diamond_brute(const std::vector<CMat>& k1, const std::vector<CMat>& k2, Rng& rng) {
  const Eigen::Index d = k1.front().cols();
  std::vector<CMat> e1, e2;
  const CMat id = CMat::Identity(d, d);
  for (const auto& k : k1) e1.push_back(kron(k, id));
  for (const auto& k : k2) e2.push_back(kron(k, id));
  auto value = [&](const qcurv::CVec& psi) {
    const CMat rho = psi * psi.adjoint();
    return oracle::trace_norm(CMat(oracle::apply_kraus(e1, rho) - oracle::apply_kraus(e2, rho)));
  };
  double best = 0.0;
  for (int start = 0; start < 40; ++start) {
    qcurv::CVec psi = random_ginibre(rng, static_cast<int>(d * d), 1).col(0).normalized();
    double f = value(psi);
    double step = 0.5;
    while (step > 1e-7) {
      bool moved = false;
      for (int trial = 0; trial < 30; ++trial) {
        qcurv::CVec cand = (psi + step * random_ginibre(rng, static_cast<int>(d * d), 1).col(0)).normalized();
        const double fc = value(cand);
        if (fc > f) {
          f = fc;
          psi = cand;
          moved = true;
        }
      }
      if (!moved) step /= 2;
    }
    best = std::max(best, f);
  }
  return best;
}

}  // namespace

TEST_SUITE("optim") {
  TEST_CASE("one-dimensional program") {
    SdpProblem p;
    const int b = p.add_block(1, BlockKind::Real);
    p.objective.push_back({b, {{0, 0, 1.0}}});
    p.constraints.push_back({{{b, {{0, 0, 1.0}}}}, 3.0});
    const SdpSolution s = solve_sdp(p);
    CHECK(s.status == SdpStatus::Optimal);
    CHECK(s.primal_obj == doctest::Approx(3.0).epsilon(1e-8));
  }

  TEST_CASE("trace norm as a dual program") {
    Rng rng(21);
    for (int d : {2, 3, 5}) {
      const CMat delta = random_hermitian(rng, d);
      CHECK(std::abs(trace_norm_by_lmi(delta) - oracle::trace_norm(delta)) <= 1e-7);
    }
  }

  TEST_CASE("planted strictly complementary optimum") {
    Rng rng(22);
    const int d = 4;
    const CMat U = random_unitary(rng, d);
    CMat X = CMat::Zero(d, d), S = CMat::Zero(d, d);
    X += 1.5 * U.col(0) * U.col(0).adjoint() + 0.7 * U.col(1) * U.col(1).adjoint();
    S += 0.9 * U.col(2) * U.col(2).adjoint() + 2.1 * U.col(3) * U.col(3).adjoint();
    SdpProblem p;
    const int blk = p.add_block(d);
    CMat C = S;
    double opt = 0.0;
    for (int i = 0; i < 6; ++i) {
      const CMat A = random_hermitian(rng, d);
      const double y = rng.normal();
      const double b = (A * X).trace().real();
      C += y * A;
      opt += y * b;
      p.constraints.push_back({{{blk, dense_coeff(A)}}, b});
    }
    p.objective.push_back({blk, dense_coeff(C)});
    const SdpSolution s = solve_sdp(p);
    CHECK(s.status == SdpStatus::Optimal);
    CHECK(std::abs(s.primal_obj - opt) <= 1e-7 * std::max(1.0, std::abs(opt)));
    CHECK(std::abs(s.dual_obj - opt) <= 1e-7 * std::max(1.0, std::abs(opt)));
  }

  TEST_CASE("diamond norm of the identity channel") {
    const std::vector<CMat> id{CMat::Identity(2, 2)};
    CHECK(diamond_norm(oracle::choi_from_kraus(id), 2, 2) == doctest::Approx(1.0).epsilon(1e-7));
  }

  TEST_CASE("diamond norm of a unitary difference against brute force") {
    Rng rng(23);
    for (double theta : {0.4, 1.3, 2.5}) {
      CMat U = CMat::Identity(2, 2);
      U(1, 1) = std::polar(1.0, theta);
      const std::vector<CMat> id{CMat::Identity(2, 2)};
      const std::vector<CMat> u{U};
      const CMat choi = oracle::choi_from_kraus(id) - oracle::choi_from_kraus(u);
      const double sdp = diamond_norm(choi, 2, 2);
      const double brute = diamond_brute(id, u, rng);
      CHECK(sdp >= brute - 1e-7);
      CHECK(sdp <= brute + 1e-5);
      CHECK(std::abs(sdp - 2 * std::abs(std::sin(theta / 2))) <= 1e-6);
    }
  }

  TEST_CASE("diamond norm dominates the induced trace norm") {
    Rng rng(24);
    for (int trial = 0; trial < 3; ++trial) {
      const auto k1 = random_kraus(rng, 2, 2);
      const auto k2 = random_kraus(rng, 2, 3);
      const double sdp = diamond_norm(CMat(oracle::choi_from_kraus(k1) - oracle::choi_from_kraus(k2)), 2, 2);
      double induced = 0.0;
      for (int s = 0; s < 200; ++s) {
        const CMat rho = random_pure_state(rng, 2);
        induced = std::max(induced, oracle::trace_norm(CMat(oracle::apply_kraus(k1, rho) - oracle::apply_kraus(k2, rho))));
      }
      CHECK(sdp >= induced - 1e-7);
      CHECK(sdp <= 2.0 + 1e-7);
    }
  }

  TEST_CASE("diamond norm rejects a non-Hermitian Choi matrix") {
    CMat c = CMat::Zero(4, 4);
    c(0, 1) = 1.0;
    CHECK_THROWS_AS(diamond_norm(c, 2, 2), PreconditionError);
  }

  TEST_CASE("psd gap") {
    const CMat I = CMat::Identity(3, 3);
    CHECK(psd_gap(CMat(CMat::Zero(3, 3)), I) == doctest::Approx(1.0));
    Rng rng(25);
    const CMat a = random_hermitian(rng, 3);
    CHECK(std::abs(psd_gap(a, a)) <= 1e-14);
  }
}
