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

#include "qcurv/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace qcurv {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::MaxIter: return "max_iter";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

struct RCoeff {
  std::vector<int> r, c;
  std::vector<double> v;
  Eigen::Index nnz() const { return static_cast<Eigen::Index>(v.size()); }
};

struct Realified {
  std::vector<int> dims;
  std::vector<BlockKind> kinds;
  std::vector<RMat> C;
  std::vector<std::vector<std::pair<int, RCoeff>>> A;
  RVec b;
  // (constraint index, coefficient) grouped by block
  std::vector<std::vector<std::pair<int, const RCoeff*>>> by_block;
};

RCoeff realify_coeff(const Coeff& coeff, int dim, BlockKind kind) {
  std::vector<std::tuple<int, int, double>> t;
  t.reserve(coeff.size() * 4);
  for (const auto& e : coeff) {
    if (e.row < 0 || e.col < 0 || e.row >= dim || e.col >= dim)
      throw DimensionError("sdp: coefficient entry outside its block");
    if (kind == BlockKind::Real) {
      t.emplace_back(e.row, e.col, e.val.real());
    } else {
      const double re = e.val.real() / 2, im = e.val.imag() / 2;
      t.emplace_back(e.row, e.col, re);
      t.emplace_back(e.row + dim, e.col + dim, re);
      t.emplace_back(e.row, e.col + dim, -im);
      t.emplace_back(e.row + dim, e.col, im);
    }
  }
  std::sort(t.begin(), t.end(), [](const auto& x, const auto& y) {
    return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
  });
  RCoeff out;
  for (size_t k = 0; k < t.size();) {
    const int r = std::get<0>(t[k]), c = std::get<1>(t[k]);
    double acc = 0;
    while (k < t.size() && std::get<0>(t[k]) == r && std::get<1>(t[k]) == c) acc += std::get<2>(t[k++]);
    if (acc != 0.0) {
      out.r.push_back(r);
      out.c.push_back(c);
      out.v.push_back(acc);
    }
  }
  return out;
}

Realified realify_problem(const SdpProblem& p) {
  Realified q;
  const int nb = static_cast<int>(p.blocks.size());
  for (const auto& blk : p.blocks) {
    if (blk.dim <= 0) throw DimensionError("sdp: block dimension must be positive");
    q.dims.push_back(blk.kind == BlockKind::Complex ? 2 * blk.dim : blk.dim);
    q.kinds.push_back(blk.kind);
  }
  for (int k = 0; k < nb; ++k) q.C.push_back(RMat::Zero(q.dims[k], q.dims[k]));
  const double sign = p.sense == Sense::Maximize ? -1.0 : 1.0;
  for (const auto& term : p.objective) {
    if (term.block < 0 || term.block >= nb) throw DimensionError("sdp: objective block index");
    RCoeff rc = realify_coeff(term.coeff, p.blocks[term.block].dim, p.blocks[term.block].kind);
    for (Eigen::Index e = 0; e < rc.nnz(); ++e) q.C[term.block](rc.r[e], rc.c[e]) += sign * rc.v[e];
  }
  for (auto& c : q.C) c = (c + c.transpose()).eval() / 2.0;
  q.b.resize(static_cast<Eigen::Index>(p.constraints.size()));
  q.A.resize(p.constraints.size());
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    q.b(static_cast<Eigen::Index>(i)) = p.constraints[i].rhs;
    // merge repeated blocks within one constraint
    std::vector<Coeff> merged(nb);
    std::vector<bool> used(nb, false);
    for (const auto& term : p.constraints[i].terms) {
      if (term.block < 0 || term.block >= nb) throw DimensionError("sdp: constraint block index");
      merged[term.block].insert(merged[term.block].end(), term.coeff.begin(), term.coeff.end());
      used[term.block] = true;
    }
    for (int k = 0; k < nb; ++k)
      if (used[k]) {
        RCoeff rc = realify_coeff(merged[k], p.blocks[k].dim, p.blocks[k].kind);
        if (rc.nnz() > 0) q.A[i].emplace_back(k, std::move(rc));
      }
  }
  q.by_block.resize(nb);
  for (size_t i = 0; i < q.A.size(); ++i)
    for (const auto& [k, rc] : q.A[i]) q.by_block[k].emplace_back(static_cast<int>(i), &rc);
  return q;
}

using Blocks = std::vector<RMat>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

double fro(const Blocks& a) { return std::sqrt(inner(a, a)); }

// <A_i, G> = Tr(A_i G) for every constraint (G need not be symmetric).
RVec apply_A(const Realified& q, const Blocks& g) {
  RVec out = RVec::Zero(q.b.size());
  for (size_t i = 0; i < q.A.size(); ++i) {
    double s = 0;
    for (const auto& [k, rc] : q.A[i])
      for (Eigen::Index e = 0; e < rc.nnz(); ++e) s += rc.v[e] * g[k](rc.c[e], rc.r[e]);
    out(static_cast<Eigen::Index>(i)) = s;
  }
  return out;
}

Blocks adjoint_A(const Realified& q, const RVec& y) {
  Blocks out;
  for (int d : q.dims) out.push_back(RMat::Zero(d, d));
  for (size_t i = 0; i < q.A.size(); ++i) {
    const double yi = y(static_cast<Eigen::Index>(i));
    if (yi == 0.0) continue;
    for (const auto& [k, rc] : q.A[i])
      for (Eigen::Index e = 0; e < rc.nnz(); ++e) out[k](rc.r[e], rc.c[e]) += yi * rc.v[e];
  }
  return out;
}

RMat dense_of(const RCoeff& rc, int d) {
  RMat m = RMat::Zero(d, d);
  for (Eigen::Index e = 0; e < rc.nnz(); ++e) m(rc.r[e], rc.c[e]) += rc.v[e];
  return m;
}

// M_ij = sum_blocks Tr(A_i X A_j Z) with Z = S^{-1}.
RMat schur_matrix(const Realified& q, const Blocks& X, const Blocks& Z) {
  const Eigen::Index m = q.b.size();
  RMat M = RMat::Zero(m, m);
  for (size_t k = 0; k < q.dims.size(); ++k) {
    const auto& list = q.by_block[k];
    if (list.empty()) continue;
    const double n = q.dims[k];
    double total = 0, dense_cost = 0;
    for (const auto& [i, rc] : list) {
      total += static_cast<double>(rc->nnz());
      dense_cost += std::min(static_cast<double>(rc->nnz()) * n * n, 2 * n * n * n);
    }
    dense_cost += static_cast<double>(list.size()) * total;
    const RMat& Xk = X[k];
    const RMat& Zk = Z[k];
    if (total * total / 2 <= dense_cost) {
      for (size_t a = 0; a < list.size(); ++a) {
        const RCoeff& Ai = *list[a].second;
        for (size_t bb = a; bb < list.size(); ++bb) {
          const RCoeff& Aj = *list[bb].second;
          double s = 0;
          for (Eigen::Index e = 0; e < Ai.nnz(); ++e) {
            const int p = Ai.r[e], qq = Ai.c[e];
            double inner_sum = 0;
            for (Eigen::Index f = 0; f < Aj.nnz(); ++f)
              inner_sum += Aj.v[f] * Xk(qq, Aj.r[f]) * Zk(Aj.c[f], p);
            s += Ai.v[e] * inner_sum;
          }
          M(list[a].first, list[bb].first) += s;
          if (bb != a) M(list[bb].first, list[a].first) += s;
        }
      }
    } else {
      const int d = q.dims[k];
      for (size_t bb = 0; bb < list.size(); ++bb) {
        const RCoeff& Aj = *list[bb].second;
        RMat G;
        if (static_cast<double>(Aj.nnz()) * n * n < 2 * n * n * n) {
          G = RMat::Zero(d, d);
          for (Eigen::Index f = 0; f < Aj.nnz(); ++f)
            G.noalias() += Aj.v[f] * Xk.col(Aj.r[f]) * Zk.row(Aj.c[f]);
        } else {
          G = Xk * dense_of(Aj, d) * Zk;
        }
        for (size_t a = 0; a < list.size(); ++a) {
          const RCoeff& Ai = *list[a].second;
          double s = 0;
          for (Eigen::Index e = 0; e < Ai.nnz(); ++e) s += Ai.v[e] * G(Ai.c[e], Ai.r[e]);
          M(list[a].first, list[bb].first) += s;
        }
      }
    }
  }
  return (M + M.transpose()) / 2;
}

// Largest alpha with X + alpha dX >= 0 (X positive definite).
double max_step(const RMat& X, const RMat& dX) {
  Eigen::LLT<RMat> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  RMat L = llt.matrixL();
  RMat W = L.triangularView<Eigen::Lower>().solve(dX);
  W = L.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<RMat> es((W + W.transpose()) / 2, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

double step_all(const Blocks& X, const Blocks& dX) {
  double a = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < X.size(); ++k) a = std::min(a, max_step(X[k], dX[k]));
  return a;
}

bool inverse_spd(const RMat& S, RMat& out) {
  Eigen::LLT<RMat> llt(S);
  if (llt.info() != Eigen::Success) return false;
  out = llt.solve(RMat::Identity(S.rows(), S.cols()));
  return true;
}

CMat unrealify(const RMat& r, BlockKind kind) {
  if (kind == BlockKind::Real) return r.cast<cplx>();
  const Eigen::Index n = r.rows() / 2;
  CMat out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = cplx((r(i, j) + r(i + n, j + n)) / 2, (r(i + n, j) - r(i, j + n)) / 2);
  return out;
}

struct SchurSolver {
  Eigen::LLT<RMat> llt;
  Eigen::LDLT<RMat> ldlt;
  bool use_ldlt = false;
  const RMat* M = nullptr;

  void factor(const RMat& m) {
    M = &m;
    use_ldlt = false;
    llt.compute(m);
    if (llt.info() == Eigen::Success) return;
    RMat reg = m;
    const double scale = std::max(m.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    for (double eps = 1e-14; eps < 1e-4; eps *= 100) {
      reg.diagonal().array() = m.diagonal().array() + eps * scale;
      llt.compute(reg);
      if (llt.info() == Eigen::Success) return;
    }
    use_ldlt = true;
    ldlt.compute(m);
    if (ldlt.info() != Eigen::Success) throw NumericalError("sdp: singular Schur complement system");
  }

  RVec solve(const RVec& rhs) const {
    RVec x = use_ldlt ? RVec(ldlt.solve(rhs)) : RVec(llt.solve(rhs));
    // one step of iterative refinement against the unregularized matrix
    RVec r = rhs - (*M) * x;
    x += use_ldlt ? RVec(ldlt.solve(r)) : RVec(llt.solve(r));
    return x;
  }
};

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt) {
  const Realified q = realify_problem(p);
  const size_t nb = q.dims.size();
  const Eigen::Index m = q.b.size();
  double ntot = 0;
  for (int d : q.dims) ntot += d;

  // Initial point following the usual scaling heuristics of infeasible IPMs.
  std::vector<double> a_norm(static_cast<size_t>(m), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    double s = 0;
    for (const auto& [k, rc] : q.A[static_cast<size_t>(i)])
      for (double v : rc.v) s += v * v;
    a_norm[static_cast<size_t>(i)] = std::sqrt(s);
  }
  Blocks X, S;
  for (size_t k = 0; k < nb; ++k) {
    const double n = q.dims[k];
    double xi = std::max(10.0, std::sqrt(n)), eta = std::max(10.0, std::sqrt(n));
    for (const auto& [i, rc] : q.by_block[k]) {
      double s = 0;
      for (double v : rc->v) s += v * v;
      const double fn = std::sqrt(s);
      xi = std::max(xi, n * (1 + std::abs(q.b(i))) / (1 + fn));
      eta = std::max(eta, fn);
    }
    eta = std::max(eta, q.C[k].norm());
    X.push_back(xi * RMat::Identity(q.dims[k], q.dims[k]));
    S.push_back(eta * RMat::Identity(q.dims[k], q.dims[k]));
  }
  RVec y = RVec::Zero(m);

  const double bnorm = q.b.norm();
  double cnorm = 0;
  for (const auto& c : q.C) cnorm += c.squaredNorm();
  cnorm = std::sqrt(cnorm);

  SdpSolution sol;
  sol.status = SdpStatus::MaxIter;
  int stall = 0;
  double pobj = 0, dobj = 0, pinf = 0, dinf = 0, rgap = 0;
  int it = 0;
  for (; it <= opt.max_iter; ++it) {
    const RVec rp = q.b - apply_A(q, X);
    const Blocks ATy = adjoint_A(q, y);
    Blocks Rd(nb);
    for (size_t k = 0; k < nb; ++k) Rd[k] = q.C[k] - S[k] - ATy[k];
    pobj = inner(q.C, X);
    dobj = q.b.dot(y);
    pinf = rp.norm() / (1 + bnorm);
    dinf = fro(Rd) / (1 + cnorm);
    rgap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
    if (opt.trace) {
      const double sg = p.sense == Sense::Maximize ? -1.0 : 1.0;
      *opt.trace << it << ',' << sg * pobj << ',' << sg * dobj << ',' << rgap << '\n';
    }
    if (pinf <= opt.tol && dinf <= opt.tol && rgap <= opt.tol) {
      sol.status = SdpStatus::Optimal;
      break;
    }
    const double big = std::max(1.0, std::max(bnorm, cnorm)) / opt.tol;
    if (dobj > big && dinf <= 1e-6) {
      sol.status = SdpStatus::Infeasible;
      break;
    }
    if (pobj < -big && pinf <= 1e-6) {
      sol.status = SdpStatus::Unbounded;
      break;
    }
    if (it == opt.max_iter || stall >= 5) break;

    const double mu = inner(X, S) / ntot;
    // Rounding can push an iterate onto the cone boundary; keep the last good point.
    Blocks Z(nb);
    bool interior = true;
    for (size_t k = 0; k < nb && interior; ++k) interior = inverse_spd(S[k], Z[k]);
    if (!interior) break;
    const RMat M = schur_matrix(q, X, Z);
    SchurSolver solver;
    solver.factor(M);

    Blocks XRdZ(nb);
    for (size_t k = 0; k < nb; ++k) XRdZ[k] = X[k] * Rd[k] * Z[k];
    const RVec aXRdZ = apply_A(q, XRdZ);
    const RVec aZ = apply_A(q, Z);

    auto direction = [&](double sigma_mu, const Blocks* corr, RVec& dy, Blocks& dX, Blocks& dS) {
      RVec rhs = q.b - sigma_mu * aZ + aXRdZ;
      if (corr) rhs += apply_A(q, *corr);
      dy = solver.solve(rhs);
      const Blocks ATdy = adjoint_A(q, dy);
      dS.resize(nb);
      dX.resize(nb);
      for (size_t k = 0; k < nb; ++k) {
        dS[k] = Rd[k] - ATdy[k];
        RMat t = sigma_mu * Z[k] - X[k] - X[k] * dS[k] * Z[k];
        if (corr) t -= (*corr)[k];
        dX[k] = (t + t.transpose()) / 2;
      }
    };

    RVec dy;
    Blocks dX, dS;
    direction(0.0, nullptr, dy, dX, dS);
    const double ap_a = std::min(1.0, step_all(X, dX));
    const double ad_a = std::min(1.0, step_all(S, dS));
    Blocks Xa(nb), Sa(nb);
    for (size_t k = 0; k < nb; ++k) {
      Xa[k] = X[k] + ap_a * dX[k];
      Sa[k] = S[k] + ad_a * dS[k];
    }
    const double mu_aff = inner(Xa, Sa) / ntot;
    const double ratio = std::max(0.0, mu_aff / mu);
    double sigma = std::min(1.0, ratio * ratio * ratio);
    Blocks corr(nb);
    for (size_t k = 0; k < nb; ++k) corr[k] = dX[k] * dS[k] * Z[k];
    direction(sigma * mu, &corr, dy, dX, dS);

    const double gamma = 0.9 + 0.09 * std::min(ap_a, ad_a);
    const double ap = std::min(1.0, gamma * step_all(X, dX));
    const double ad = std::min(1.0, gamma * step_all(S, dS));
    if (ap < 1e-10 && ad < 1e-10) ++stall;
    else stall = 0;
    for (size_t k = 0; k < nb; ++k) {
      X[k] += ap * dX[k];
      S[k] += ad * dS[k];
    }
    y += ad * dy;
  }

  const double sg = p.sense == Sense::Maximize ? -1.0 : 1.0;
  sol.primal_obj = sg * pobj;
  sol.dual_obj = sg * dobj;
  sol.gap = rgap;
  sol.primal_infeas = pinf;
  sol.dual_infeas = dinf;
  sol.iterations = it;
  sol.y = sg * y;
  for (size_t k = 0; k < nb; ++k) {
    sol.X.push_back(unrealify(X[k], q.kinds[k]));
    // S on complex blocks carries the 1/2 of the realified inner product
    const double f = q.kinds[k] == BlockKind::Complex ? 2.0 : 1.0;
    sol.S.push_back(f * sg * unrealify(S[k], q.kinds[k]));
  }
  return sol;
}

LmiSolution solve_lmi(const LmiProblem& p, const SdpOptions& opt) {
  if (static_cast<int>(p.F.size()) != p.num_vars || p.b.size() != p.num_vars)
    throw DimensionError("lmi: variable bookkeeping mismatch");
  SdpProblem sp;
  sp.blocks = p.blocks;
  sp.sense = Sense::Minimize;
  sp.objective = p.F0;
  for (int i = 0; i < p.num_vars; ++i) {
    SdpConstraint c;
    c.rhs = p.b(i);
    for (const auto& term : p.F[static_cast<size_t>(i)]) {
      BlockTerm neg{term.block, term.coeff};
      for (auto& e : neg.coeff) e.val = -e.val;
      c.terms.push_back(std::move(neg));
    }
    sp.constraints.push_back(std::move(c));
  }
  const SdpSolution s = solve_sdp(sp, opt);
  LmiSolution out;
  out.y = s.y;
  out.value = s.dual_obj;
  out.upper = s.primal_obj;
  out.gap = s.gap;
  out.iterations = s.iterations;
  out.Z = s.X;
  switch (s.status) {
    case SdpStatus::Infeasible: out.status = SdpStatus::Unbounded; break;
    case SdpStatus::Unbounded: out.status = SdpStatus::Infeasible; break;
    default: out.status = s.status;
  }
  return out;
}

Coeff dense_coeff(const CMat& h, double drop) {
  Coeff c;
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      if (std::abs(h(i, j)) > drop) c.push_back({static_cast<int>(i), static_cast<int>(j), h(i, j)});
  return c;
}

std::vector<Coeff> hermitian_coordinate_functionals(int d) {
  std::vector<Coeff> out;
  out.reserve(static_cast<size_t>(d) * d);
  for (int k = 0; k < d; ++k) out.push_back({{k, k, 1.0}});
  for (int k = 0; k < d; ++k)
    for (int l = k + 1; l < d; ++l) {
      out.push_back({{k, l, 0.5}, {l, k, 0.5}});
      out.push_back({{l, k, cplx(0, -0.5)}, {k, l, cplx(0, 0.5)}});
    }
  return out;
}

DiamondResult diamond_norm_sdp(const CMat& choi, int d_in, int d_out, const SdpOptions& opt) {
  const int D = d_in * d_out;
  if (choi.rows() != D || choi.cols() != D) throw DimensionError("diamond_norm: Choi size mismatch");
  if (!is_hermitian(choi, 1e-10))
    throw PreconditionError("diamond_norm: Choi matrix is not Hermitian");
  // max <J, P - Q> s.t. P + Q = rho (x) I, Tr rho = 1, P, Q, rho >= 0
  SdpProblem sp;
  sp.sense = Sense::Maximize;
  const int bp = sp.add_block(D), bq = sp.add_block(D), br = sp.add_block(d_in);
  const CMat J = hermitize(choi);
  sp.objective.push_back({bp, dense_coeff(J)});
  sp.objective.push_back({bq, dense_coeff(-J)});
  for (const Coeff& f : hermitian_coordinate_functionals(D)) {
    SdpConstraint c;
    c.terms.push_back({bp, f});
    c.terms.push_back({bq, f});
    Coeff fr;
    // Re Tr(F (rho (x) I)) = Re Tr(Tr_out(F) rho)
    for (const auto& e : f)
      if (e.row % d_out == e.col % d_out) fr.push_back({e.row / d_out, e.col / d_out, -e.val});
    if (!fr.empty()) c.terms.push_back({br, fr});
    sp.constraints.push_back(std::move(c));
  }
  SdpConstraint tr;
  for (int k = 0; k < d_in; ++k) tr.terms.push_back({br, {{k, k, 1.0}}});
  tr.rhs = 1.0;
  sp.constraints.push_back(std::move(tr));
  const SdpSolution s = solve_sdp(sp, opt);
  DiamondResult r;
  r.value = s.primal_obj;
  r.upper = s.dual_obj;
  r.gap = s.gap;
  r.status = s.status;
  return r;
}

double diamond_norm(const CMat& choi, int d_in, int d_out, const SdpOptions& opt) {
  return diamond_norm_sdp(choi, d_in, d_out, opt).value;
}

double psd_gap(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw DimensionError("psd_gap: dimension mismatch");
  return min_eig(b - a);
}

}  // namespace qcurv
