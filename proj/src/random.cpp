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

#include "qcurv/random.hpp"

#include <cmath>

namespace qcurv {

CMat random_ginibre(Rng& rng, int rows, int cols) {
  CMat g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
  return g;
}

CMat random_hermitian(Rng& rng, int d) { return hermitize(random_ginibre(rng, d, d)); }

CMat random_unitary(Rng& rng, int d) {
  Eigen::HouseholderQR<CMat> qr(random_ginibre(rng, d, d));
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR();
  // fix the phases so the distribution is Haar
  for (int k = 0; k < d; ++k) {
    const cplx rk = r(k, k);
    const double a = std::abs(rk);
    if (a > 0) q.col(k) *= rk / a;
  }
  return q;
}

CMat random_state(Rng& rng, int d) {
  const CMat g = random_ginibre(rng, d, d);
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return hermitize(rho);
}

CMat random_pure_state(Rng& rng, int d) {
  CVec v = random_ginibre(rng, d, 1).col(0);
  v.normalize();
  return v * v.adjoint();
}

CMat near_pure_state(Rng& rng, int d, double eps) {
  return (1 - eps) * random_pure_state(rng, d) + eps * CMat::Identity(d, d) / static_cast<double>(d);
}

std::vector<CMat> random_kraus(Rng& rng, int d, int k) {
  const CMat u = random_unitary(rng, d * k);
  std::vector<CMat> out;
  for (int j = 0; j < k; ++j) out.push_back(u.block(j * d, 0, d, d));
  return out;
}

RVec random_simplex(Rng& rng, int k) {
  RVec p(k);
  for (int i = 0; i < k; ++i) p(i) = -std::log(1 - rng.uniform());
  return p / p.sum();
}

}  // namespace qcurv
