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

#ifndef QCURV_RANDOM_HPP
#define QCURV_RANDOM_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "qcurv/matcore.hpp"

namespace qcurv {

// Single seeded source for every random draw in the library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : eng_(seed) {}
  double normal() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

CMat random_ginibre(Rng& rng, int rows, int cols);
CMat random_hermitian(Rng& rng, int d);
CMat random_unitary(Rng& rng, int d);
// Hilbert-Schmidt random state, full rank almost surely.
CMat random_state(Rng& rng, int d);
CMat random_pure_state(Rng& rng, int d);
// (1 - eps) |psi><psi| + eps I/d
CMat near_pure_state(Rng& rng, int d, double eps);
// Kraus operators of a random channel from a Haar isometry.
std::vector<CMat> random_kraus(Rng& rng, int d, int k);
// Probability vector from normalized exponentials.
RVec random_simplex(Rng& rng, int k);

}  // namespace qcurv

#endif  // QCURV_RANDOM_HPP
