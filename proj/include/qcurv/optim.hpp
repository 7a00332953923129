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

#ifndef QCURV_OPTIM_HPP
#define QCURV_OPTIM_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "qcurv/matcore.hpp"

namespace qcurv {

// One entry of a Hermitian coefficient matrix. Both triangles must be listed;
// duplicates are summed. Imaginary parts are ignored on real blocks.
struct Entry {
  int row;
  int col;
  cplx val;
};
using Coeff = std::vector<Entry>;

struct BlockTerm {
  int block;
  Coeff coeff;
};

enum class BlockKind { Real, Complex };

struct SdpBlockSpec {
  int dim;
  BlockKind kind;
};

enum class Sense { Minimize, Maximize };

enum class SdpStatus { Optimal, MaxIter, Infeasible, Unbounded };

std::string to_string(SdpStatus s);

struct SdpConstraint {
  std::vector<BlockTerm> terms;
  double rhs = 0.0;
};

// optimize <C, X> subject to <A_i, X> = b_i and X = diag(X_1, ..., X_k) >= 0,
// with <A, X> = Re Tr(A X) on complex blocks.
struct SdpProblem {
  std::vector<SdpBlockSpec> blocks;
  Sense sense = Sense::Minimize;
  std::vector<BlockTerm> objective;
  std::vector<SdpConstraint> constraints;

  int add_block(int dim, BlockKind kind = BlockKind::Complex) {
    blocks.push_back({dim, kind});
    return static_cast<int>(blocks.size()) - 1;
  }
};

struct SdpOptions {
  double tol = 1e-8;
  int max_iter = 200;
  // When set, one CSV row "iteration,primal,dual,gap" per iterate.
  std::ostream* trace = nullptr;
};

struct SdpSolution {
  std::vector<CMat> X;  // primal blocks
  std::vector<CMat> S;  // dual slack blocks
  // Dual multipliers. For Minimize: max b'y s.t. C - sum y_i A_i >= 0.
  // For Maximize: min b'y s.t. sum y_i A_i - C >= 0.
  RVec y;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;  // relative duality gap
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  SdpStatus status = SdpStatus::MaxIter;
  int iterations = 0;
};

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt = {});

// maximize b'y subject to F0 + sum_i y_i F_i >= 0 blockwise.
struct LmiProblem {
  std::vector<SdpBlockSpec> blocks;
  int num_vars = 0;
  RVec b;
  std::vector<BlockTerm> F0;
  std::vector<std::vector<BlockTerm>> F;  // one list per variable

  int add_block(int dim, BlockKind kind = BlockKind::Complex) {
    blocks.push_back({dim, kind});
    return static_cast<int>(blocks.size()) - 1;
  }
  int add_var() {
    F.emplace_back();
    b.conservativeResize(num_vars + 1);
    b(num_vars) = 0.0;
    return num_vars++;
  }
};

struct LmiSolution {
  RVec y;
  double value = 0.0;        // b'y at the returned feasible point
  double upper = 0.0;        // certified upper bound from the dual block
  double gap = 0.0;
  SdpStatus status = SdpStatus::MaxIter;
  int iterations = 0;
  std::vector<CMat> Z;       // dual certificate blocks
};

LmiSolution solve_lmi(const LmiProblem& p, const SdpOptions& opt = {});

// Coefficient helpers.
Coeff dense_coeff(const CMat& h, double drop = 0.0);
// Real-linear functionals giving the independent real coordinates of a
// Hermitian d x d matrix: Re Tr(F_k M) = k-th coordinate of M.
std::vector<Coeff> hermitian_coordinate_functionals(int d);

// Diamond norm of a Hermiticity-preserving map from its Choi matrix
// sum_ij E_ij (x) Phi(E_ij) (input factor first).
struct DiamondResult {
  double value = 0.0;
  double upper = 0.0;
  double gap = 0.0;
  SdpStatus status = SdpStatus::MaxIter;
};
DiamondResult diamond_norm_sdp(const CMat& choi, int d_in, int d_out, const SdpOptions& opt = {});
double diamond_norm(const CMat& choi, int d_in, int d_out, const SdpOptions& opt = {});

// Minimum eigenvalue of B - A: A <= B iff the result is >= -tol.
double psd_gap(const CMat& a, const CMat& b);

}  // namespace qcurv

#endif  // QCURV_OPTIM_HPP
