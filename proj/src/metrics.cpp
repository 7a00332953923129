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

#include "qcurv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace qcurv {

std::string to_string(SemiNormKind k) {
  switch (k) {
    case SemiNormKind::OperatorNorm: return "operator_norm";
    case SemiNormKind::CommutatorMax: return "commutator_max";
    case SemiNormKind::CommutatorL2: return "commutator_l2";
    case SemiNormKind::Oscillator: return "oscillator";
    case SemiNormKind::Ornstein: return "ornstein";
    case SemiNormKind::Gamma: return "gamma";
    case SemiNormKind::Sum: return "sum";
  }
  return "unknown";
}

namespace {

int product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, [](int a, int b) { return a * b; });
}

int superop_dim(const CMat& s) {
  return static_cast<int>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
}

CMat ad_superop(const CMat& a) {
  const Eigen::Index d = a.rows();
  const CMat id = CMat::Identity(d, d);
  return lr_superop(a, id) - lr_superop(id, a);
}

std::vector<int> complement(int n, int site) {
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (i != site) keep.push_back(i);
  return keep;
}

// tau_i(x) = Tr_i(x)/d_i (x) 1_i
CMat site_average(const CMat& x, const std::vector<int>& dims, int site) {
  const auto keep = complement(static_cast<int>(dims.size()), site);
  return embed(partial_trace(x, dims, keep), keep, dims) / static_cast<double>(dims[static_cast<size_t>(site)]);
}

// Jump operators V_j of a Lindblad decomposition L(x) = sum V_j^dag x V_j + G^dag x + x G.
std::vector<CMat> lindblad_jumps(const CMat& heisenberg) {
  const int d = superop_dim(heisenberg);
  const CMat J = choi_of_superop(heisenberg, d, d);
  const CVec omega = vec(CMat::Identity(d, d)) / std::sqrt(static_cast<double>(d));
  const CMat P = CMat::Identity(d * d, d * d) - omega * omega.adjoint();
  const CMat K = hermitize(CMat(P * J * P));
  Eigen::SelfAdjointEigenSolver<CMat> es(K);
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  if (es.eigenvalues()(0) < -1e-9 * std::max(top, 1.0))
    throw PreconditionError("gamma semi-norm: generator is not conditionally completely positive");
  std::vector<CMat> jumps;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double ev = es.eigenvalues()(k);
    if (ev <= 1e-12 * top) continue;
    const CMat a = unvec(CVec(std::sqrt(ev) * es.eigenvectors().col(k)), d);
    jumps.push_back(a.adjoint());
  }
  return jumps;
}

CMat stacked_kernel(const std::vector<CMat>& superops, int d) {
  if (superops.empty()) return CMat::Identity(d * d, d * d);
  CMat stack(static_cast<Eigen::Index>(superops.size()) * d * d, d * d);
  for (size_t k = 0; k < superops.size(); ++k)
    stack.middleRows(static_cast<Eigen::Index>(k) * d * d, d * d) = superops[k];
  return null_space(stack, 1e-9);
}

// Orthonormal Hermitian basis of the Hilbert-Schmidt complement of the kernel.
std::vector<CMat> variable_basis(const SemiNormSpec& spec) {
  const int d = spec.dim;
  const auto herm = hermitian_basis(d);
  const CMat K = spec.kernel_basis();
  if (K.cols() == 0) return herm;
  const Eigen::Index nh = static_cast<Eigen::Index>(herm.size());
  RMat R(2 * K.cols(), nh);
  for (Eigen::Index b = 0; b < nh; ++b) {
    const CVec hb = vec(herm[static_cast<size_t>(b)]);
    for (Eigen::Index j = 0; j < K.cols(); ++j) {
      const cplx ip = K.col(j).dot(hb);
      R(2 * j, b) = ip.real();
      R(2 * j + 1, b) = ip.imag();
    }
  }
  Eigen::SelfAdjointEigenSolver<RMat> es(R.transpose() * R);
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  std::vector<CMat> out;
  for (Eigen::Index k = 0; k < nh; ++k) {
    if (es.eigenvalues()(k) > 1e-16 * top) continue;
    CMat m = CMat::Zero(d, d);
    for (Eigen::Index b = 0; b < nh; ++b) m += es.eigenvectors()(b, k) * herm[static_cast<size_t>(b)];
    out.push_back(m);
  }
  return out;
}

Coeff coeff_at(const CMat& m, int r0, int c0, bool with_adjoint) {
  Coeff c;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const cplx v = m(i, j);
      if (std::abs(v) <= 1e-15) continue;
      c.push_back({r0 + static_cast<int>(i), c0 + static_cast<int>(j), v});
      if (with_adjoint) c.push_back({c0 + static_cast<int>(j), r0 + static_cast<int>(i), std::conj(v)});
    }
  return c;
}

Coeff scaled_identity(int n, int offset = 0) {
  Coeff c;
  for (int k = 0; k < n; ++k) c.push_back({offset + k, offset + k, 1.0});
  return c;
}

// Adds ||f(x)|| <= s. `images[m]` is f applied to the m-th variable's basis
// element; s is 1 when scale_var < 0 and the variable scale_var otherwise.
void add_norm_bound(LmiProblem& p, const std::vector<std::pair<int, CMat>>& images, int scale_var,
                    bool hermitian) {
  if (images.empty()) return;
  const int rows = static_cast<int>(images.front().second.rows());
  const int cols = static_cast<int>(images.front().second.cols());
  auto put_scale = [&](int blk, int n) {
    if (scale_var < 0) p.F0.push_back({blk, scaled_identity(n)});
    else p.F[static_cast<size_t>(scale_var)].push_back({blk, scaled_identity(n)});
  };
  if (hermitian) {
    for (double sign : {1.0, -1.0}) {
      const int blk = p.add_block(rows);
      put_scale(blk, rows);
      for (const auto& [m, img] : images) {
        Coeff c = coeff_at(sign * img, 0, 0, false);
        if (!c.empty()) p.F[static_cast<size_t>(m)].push_back({blk, std::move(c)});
      }
    }
  } else {
    const int blk = p.add_block(rows + cols);
    put_scale(blk, rows + cols);
    for (const auto& [m, img] : images) {
      Coeff c = coeff_at(img, 0, rows, true);
      if (!c.empty()) p.F[static_cast<size_t>(m)].push_back({blk, std::move(c)});
    }
  }
}

double ornstein_site(const CMat& x, const std::vector<int>& dims, int site, const SdpOptions& opt) {
  // min t s.t. -t I <= x - y (x) 1_site <= t I
  const int d = product(dims);
  const auto keep = complement(static_cast<int>(dims.size()), site);
  const int dc = d / dims[static_cast<size_t>(site)];
  // Already constant along the site: y = x is optimal.
  if ((x - site_average(x, dims, site)).norm() <= 1e-14 * std::max(1.0, x.norm())) return 0.0;
  LmiProblem p;
  const int t = p.add_var();
  p.b(t) = -1.0;
  const auto yb = hermitian_basis(dc);
  std::vector<int> yv;
  for (size_t k = 0; k < yb.size(); ++k) yv.push_back(p.add_var());
  for (double sign : {1.0, -1.0}) {
    const int blk = p.add_block(d);
    p.F[static_cast<size_t>(t)].push_back({blk, scaled_identity(d)});
    p.F0.push_back({blk, coeff_at(CMat(sign * x), 0, 0, false)});
    for (size_t k = 0; k < yb.size(); ++k) {
      Coeff c = coeff_at(CMat(-sign * embed(yb[k], keep, dims)), 0, 0, false);
      p.F[static_cast<size_t>(yv[k])].push_back({blk, std::move(c)});
    }
  }
  const LmiSolution s = solve_lmi(p, opt);
  return -s.value;
}

}  // namespace

SemiNormSpec SemiNormSpec::operator_norm(int d) {
  SemiNormSpec s;
  s.kind = SemiNormKind::OperatorNorm;
  s.dim = d;
  return s;
}

SemiNormSpec SemiNormSpec::commutator_max(std::vector<CMat> gens) {
  if (gens.empty()) throw PreconditionError("commutator semi-norm: no generators");
  SemiNormSpec s;
  s.kind = SemiNormKind::CommutatorMax;
  s.dim = static_cast<int>(gens.front().rows());
  s.generators = std::move(gens);
  return s;
}

SemiNormSpec SemiNormSpec::commutator_l2(std::vector<CMat> gens) {
  SemiNormSpec s = commutator_max(std::move(gens));
  s.kind = SemiNormKind::CommutatorL2;
  return s;
}

SemiNormSpec SemiNormSpec::oscillator(std::vector<int> dims) {
  SemiNormSpec s;
  s.kind = SemiNormKind::Oscillator;
  s.dim = product(dims);
  s.site_dims = std::move(dims);
  return s;
}

SemiNormSpec SemiNormSpec::ornstein(std::vector<int> dims) {
  SemiNormSpec s = oscillator(std::move(dims));
  s.kind = SemiNormKind::Ornstein;
  return s;
}

SemiNormSpec SemiNormSpec::gamma(const CMat& heisenberg_generator) {
  SemiNormSpec s;
  s.kind = SemiNormKind::Gamma;
  s.dim = superop_dim(heisenberg_generator);
  s.generator = heisenberg_generator;
  return s;
}

SemiNormSpec SemiNormSpec::sum(std::vector<SemiNormSpec> parts) {
  if (parts.empty()) throw PreconditionError("sum semi-norm: no parts");
  SemiNormSpec s;
  s.kind = SemiNormKind::Sum;
  s.dim = parts.front().dim;
  for (const auto& p : parts)
    if (p.dim != s.dim) throw DimensionError("sum semi-norm: parts act on different spaces");
  s.parts = std::move(parts);
  return s;
}

CMat SemiNormSpec::kernel_basis() const {
  const int d = dim;
  switch (kind) {
    case SemiNormKind::OperatorNorm: return CMat(d * d, 0);
    case SemiNormKind::CommutatorMax:
    case SemiNormKind::CommutatorL2: {
      std::vector<CMat> ops;
      for (const auto& g : generators) ops.push_back(ad_superop(g));
      return stacked_kernel(ops, d);
    }
    case SemiNormKind::Oscillator:
    case SemiNormKind::Ornstein: {
      std::vector<CMat> ops;
      const CMat id = CMat::Identity(d * d, d * d);
      for (int i = 0; i < static_cast<int>(site_dims.size()); ++i)
        ops.push_back(id - site_trace_superop(site_dims, i));
      return stacked_kernel(ops, d);
    }
    case SemiNormKind::Gamma: {
      std::vector<CMat> ops;
      for (const auto& v : lindblad_jumps(generator)) ops.push_back(ad_superop(v));
      return stacked_kernel(ops, d);
    }
    case SemiNormKind::Sum: {
      std::vector<CMat> ops;
      const CMat id = CMat::Identity(d * d, d * d);
      for (const auto& part : parts) {
        const CMat k = part.kernel_basis();
        ops.push_back(id - k * k.adjoint());
      }
      return stacked_kernel(ops, d);
    }
  }
  return CMat(d * d, 0);
}

CMat gradient_form(const CMat& heisenberg_generator, const CMat& x) {
  const auto L = [&](const CMat& y) { return apply_superop(heisenberg_generator, y); };
  const CMat xd = x.adjoint();
  return (L(xd * x) - L(xd) * x - xd * L(x)) / 2.0;
}

double seminorm_eval(const SemiNormSpec& spec, const CMat& x, const SdpOptions& opt) {
  if (x.rows() != spec.dim || x.cols() != spec.dim) throw DimensionError("seminorm_eval: dimension mismatch");
  switch (spec.kind) {
    case SemiNormKind::OperatorNorm: return op_norm(x);
    case SemiNormKind::CommutatorMax: {
      double m = 0;
      for (const auto& a : spec.generators) m = std::max(m, op_norm(comm(a, x)));
      return m;
    }
    case SemiNormKind::CommutatorL2: {
      double s = 0;
      for (const auto& a : spec.generators) s += std::pow(op_norm(comm(a, x)), 2);
      return std::sqrt(s);
    }
    case SemiNormKind::Oscillator: {
      double s = 0;
      for (int i = 0; i < static_cast<int>(spec.site_dims.size()); ++i)
        s += op_norm(x - site_average(x, spec.site_dims, i));
      return s;
    }
    case SemiNormKind::Ornstein: {
      if (product(spec.site_dims) != spec.dim) throw DimensionError("ornstein: site dims do not factor d");
      double m = 0;
      for (int i = 0; i < static_cast<int>(spec.site_dims.size()); ++i)
        m = std::max(m, ornstein_site(x, spec.site_dims, i, opt));
      return m;
    }
    case SemiNormKind::Gamma: {
      const double a = op_norm(gradient_form(spec.generator, x));
      const double b = op_norm(gradient_form(spec.generator, CMat(x.adjoint())));
      return std::sqrt(std::max(a, b));
    }
    case SemiNormKind::Sum: {
      double s = 0;
      for (const auto& part : spec.parts) s += seminorm_eval(part, x, opt);
      return s;
    }
  }
  return 0.0;
}

namespace {

// Functional of the top (signed) eigenvector of a Hermitian-valued map.
CMat top_eigen_functional(const CMat& h) {
  const HermEig e = herm_eig(hermitize(h), 1e-8);
  const Eigen::Index n = e.values.size();
  const bool low = std::abs(e.values(0)) > std::abs(e.values(n - 1));
  const CVec u = e.vectors.col(low ? 0 : n - 1);
  return (low ? -1.0 : 1.0) * u * u.adjoint();
}

// Delta with Tr(Delta y) = ||[a, y]|| and dual norm at most one.
CMat commutator_subgradient(const CMat& a, const CMat& y) {
  if (is_hermitian(a, 1e-13)) {
    const CMat m = top_eigen_functional(CMat(cplx(0, 1) * comm(a, y)));
    return hermitize(CMat(cplx(0, 1) * comm(m, a)));
  }
  Eigen::JacobiSVD<CMat> svd(comm(a, y), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const CVec u = svd.matrixU().col(0), v = svd.matrixV().col(0);
  return hermitize(comm(CMat(v * u.adjoint()), a));
}

CMat numeric_subgradient(const SemiNormSpec& spec, const CMat& y, const SdpOptions& opt) {
  const double h = 1e-6 * std::max(1.0, y.norm());
  CMat g = CMat::Zero(y.rows(), y.cols());
  for (const auto& b : hermitian_basis(y.rows())) {
    const double up = seminorm_eval(spec, CMat(y + h * b), opt);
    const double dn = seminorm_eval(spec, CMat(y - h * b), opt);
    g += (up - dn) / (2 * h) * b;
  }
  return g;
}

}  // namespace

CMat seminorm_subgradient(const SemiNormSpec& spec, const CMat& y, const SdpOptions& opt) {
  const CMat x = hermitize(y);
  const Eigen::Index d = x.rows();
  switch (spec.kind) {
    case SemiNormKind::OperatorNorm: return top_eigen_functional(x);
    case SemiNormKind::CommutatorMax: {
      size_t best = 0;
      double m = -1;
      for (size_t j = 0; j < spec.generators.size(); ++j) {
        const double v = op_norm(comm(spec.generators[j], x));
        if (v > m) m = v, best = j;
      }
      return commutator_subgradient(spec.generators[best], x);
    }
    case SemiNormKind::CommutatorL2: {
      const double total = seminorm_eval(spec, x);
      CMat g = CMat::Zero(d, d);
      if (total == 0.0) return g;
      for (const auto& a : spec.generators)
        g += op_norm(comm(a, x)) / total * commutator_subgradient(a, x);
      return g;
    }
    case SemiNormKind::Oscillator: {
      CMat g = CMat::Zero(d, d);
      for (int i = 0; i < static_cast<int>(spec.site_dims.size()); ++i) {
        const CMat m = top_eigen_functional(CMat(x - site_average(x, spec.site_dims, i)));
        g += m - site_average(m, spec.site_dims, i);
      }
      return g;
    }
    case SemiNormKind::Gamma: {
      const double l = seminorm_eval(spec, x);
      if (l == 0.0) return CMat::Zero(d, d);
      const HermEig e = herm_eig(hermitize(gradient_form(spec.generator, x)), 1e-8);
      const CVec u = e.vectors.col(d - 1);
      const CMat uu = u * u.adjoint();
      // d/dh of <u, Gamma(x, x) u> = Re Tr(h M)
      CMat m = CMat::Zero(d, d);
      for (const auto& v : lindblad_jumps(spec.generator)) {
        const CMat c = comm(v, x);
        m += uu * c.adjoint() * v - v * uu * c.adjoint();
      }
      return hermitize(m) / (2 * l);
    }
    case SemiNormKind::Sum: {
      CMat g = CMat::Zero(d, d);
      for (const auto& part : spec.parts) g += seminorm_subgradient(part, x, opt);
      return g;
    }
    case SemiNormKind::Ornstein: break;
  }
  return numeric_subgradient(spec, x, opt);
}

namespace {

struct BallBuilder {
  LmiProblem& p;
  const std::vector<CMat>& basis;
  const std::vector<int>& xv;

  std::vector<std::pair<int, CMat>> images(const std::function<CMat(const CMat&)>& f) const {
    std::vector<std::pair<int, CMat>> im;
    for (size_t m = 0; m < basis.size(); ++m) im.emplace_back(xv[m], f(basis[m]));
    return im;
  }

  void put_scale(int blk, int n, int scale_var, int offset = 0) {
    if (scale_var < 0) p.F0.push_back({blk, scaled_identity(n, offset)});
    else p.F[static_cast<size_t>(scale_var)].push_back({blk, scaled_identity(n, offset)});
  }

  // sum_k vars_k <= s
  void add_budget(const std::vector<int>& vars, int scale_var) {
    const int blk = p.add_block(1, BlockKind::Real);
    put_scale(blk, 1, scale_var);
    for (int t : vars) p.F[static_cast<size_t>(t)].push_back({blk, {{0, 0, -1.0}}});
  }

  // L(x) <= s with s = 1 for scale_var < 0.
  void add(const SemiNormSpec& spec, int scale_var) {
    const int d = spec.dim;
    switch (spec.kind) {
      case SemiNormKind::OperatorNorm:
        add_norm_bound(p, images([](const CMat& b) { return b; }), scale_var, true);
        break;
      case SemiNormKind::CommutatorMax:
        for (const auto& a : spec.generators) {
          const bool herm = is_hermitian(a, 1e-13);
          const cplx phase = herm ? cplx(0, 1) : cplx(1, 0);
          add_norm_bound(p, images([&](const CMat& b) { return CMat(phase * comm(a, b)); }), scale_var, herm);
        }
        break;
      case SemiNormKind::CommutatorL2: {
        std::vector<int> svars;
        for (const auto& a : spec.generators) {
          const bool herm = is_hermitian(a, 1e-13);
          const cplx phase = herm ? cplx(0, 1) : cplx(1, 0);
          const int t = p.add_var();
          const int s = p.add_var();
          svars.push_back(s);
          // [[scale, t], [t, s]] >= 0 gives t^2 <= scale * s
          const int blk = p.add_block(2, BlockKind::Real);
          if (scale_var < 0) p.F0.push_back({blk, {{0, 0, 1.0}}});
          else p.F[static_cast<size_t>(scale_var)].push_back({blk, {{0, 0, 1.0}}});
          p.F[static_cast<size_t>(t)].push_back({blk, {{0, 1, 1.0}, {1, 0, 1.0}}});
          p.F[static_cast<size_t>(s)].push_back({blk, {{1, 1, 1.0}}});
          add_norm_bound(p, images([&](const CMat& b) { return CMat(phase * comm(a, b)); }), t, herm);
        }
        add_budget(svars, scale_var);
        break;
      }
      case SemiNormKind::Oscillator: {
        std::vector<int> tv;
        for (int i = 0; i < static_cast<int>(spec.site_dims.size()); ++i) {
          const int t = p.add_var();
          tv.push_back(t);
          add_norm_bound(p, images([&](const CMat& b) { return CMat(b - site_average(b, spec.site_dims, i)); }), t,
                         true);
        }
        add_budget(tv, scale_var);
        break;
      }
      case SemiNormKind::Ornstein: {
        const int n = static_cast<int>(spec.site_dims.size());
        for (int i = 0; i < n; ++i) {
          const auto keep = complement(n, i);
          const int dc = d / spec.site_dims[static_cast<size_t>(i)];
          auto img = images([](const CMat& b) { return b; });
          for (const auto& yb : hermitian_basis(dc))
            img.emplace_back(p.add_var(), CMat(-embed(yb, keep, spec.site_dims)));
          add_norm_bound(p, img, scale_var, true);
        }
        break;
      }
      case SemiNormKind::Gamma: {
        // [[s I, D^dag/sqrt2], [D/sqrt2, s I]] >= 0, i.e. sum_j D_j^dag D_j / 2 <= s^2
        const auto jumps = lindblad_jumps(spec.generator);
        const int k = static_cast<int>(jumps.size());
        const int blk = p.add_block(d * (1 + k));
        put_scale(blk, d * (1 + k), scale_var);
        const double r = 1.0 / std::sqrt(2.0);
        for (size_t m = 0; m < basis.size(); ++m) {
          Coeff c;
          for (int j = 0; j < k; ++j) {
            const CMat dj = r * comm(jumps[static_cast<size_t>(j)], basis[m]);
            Coeff cj = coeff_at(CMat(dj.adjoint()), 0, d * (1 + j), true);
            c.insert(c.end(), cj.begin(), cj.end());
          }
          if (!c.empty()) p.F[static_cast<size_t>(xv[m])].push_back({blk, std::move(c)});
        }
        break;
      }
      case SemiNormKind::Sum: {
        std::vector<int> tv;
        for (const auto& part : spec.parts) {
          const int t = p.add_var();
          tv.push_back(t);
          add(part, t);
        }
        add_budget(tv, scale_var);
        break;
      }
    }
  }
};

}  // namespace

TransportResult dual_transport(const SemiNormSpec& spec, const CMat& functional, const SdpOptions& opt,
                               bool project_kernel) {
  const int d = spec.dim;
  if (functional.rows() != d || functional.cols() != d) throw DimensionError("dual_transport: dimension mismatch");
  TransportResult res;
  CMat delta = hermitize(functional);
  const CMat K = spec.kernel_basis();
  if (K.cols() > 0) {
    const CMat proj = unvec(CVec(K * (K.adjoint() * vec(delta))), d);
    if (project_kernel) {
      delta = hermitize(CMat(delta - proj));
    } else if (trace_norm(proj) > 1e-8) {
      // Differences supported on ker L cannot be bounded.
      res.infinite = true;
      res.value = res.upper = std::numeric_limits<double>::infinity();
      res.status = SdpStatus::Unbounded;
      return res;
    }
  }
  if (delta.cwiseAbs().maxCoeff() < 1e-15) {
    res.witness = CMat(CMat::Zero(d, d));
    return res;
  }

  const auto basis = variable_basis(spec);
  LmiProblem p;
  std::vector<int> xv;
  for (const auto& b : basis) {
    const int v = p.add_var();
    p.b(v) = (delta * b).trace().real();
    xv.push_back(v);
  }
  BallBuilder builder{p, basis, xv};
  builder.add(spec, -1);

  const LmiSolution s = solve_lmi(p, opt);
  res.status = s.status;
  res.iterations = s.iterations;
  res.gap = s.gap;
  if (s.status == SdpStatus::Unbounded) {
    res.infinite = true;
    res.value = res.upper = std::numeric_limits<double>::infinity();
    return res;
  }
  CMat x = CMat::Zero(d, d);
  for (size_t m = 0; m < basis.size(); ++m) x += s.y(xv[m]) * basis[m];
  x = hermitize(x);
  const double lx = seminorm_eval(spec, x, opt);
  if (lx > 1.0) x /= lx;
  res.witness = x;
  res.value = (delta * x).trace().real();
  res.upper = std::max(s.upper, res.value);
  return res;
}

TransportResult w1_dual(const SemiNormSpec& spec, const CMat& rho1, const CMat& rho2, const SdpOptions& opt) {
  check_state(rho1, "w1_dual: rho1");
  check_state(rho2, "w1_dual: rho2");
  if (rho1.rows() != spec.dim || rho2.rows() != spec.dim) throw DimensionError("w1_dual: dimension mismatch");
  return dual_transport(spec, CMat(rho1 - rho2), opt, false);
}

TransportResult coupling_cost(const CMat& cost, const CMat& rho1, const CMat& rho2, const SdpOptions& opt) {
  check_state(rho1, "coupling_cost: rho1");
  check_state(rho2, "coupling_cost: rho2");
  const int d1 = static_cast<int>(rho1.rows()), d2 = static_cast<int>(rho2.rows());
  if (cost.rows() != d1 * d2 || cost.cols() != d1 * d2) throw DimensionError("coupling_cost: cost size");
  if (!is_hermitian(cost, 1e-10)) throw PreconditionError("coupling_cost: cost not Hermitian");
  if (min_eig(cost) < -1e-10) throw PreconditionError("coupling_cost: cost not PSD");
  // A coupling lives on supp(rho1) (x) supp(rho2); restricting there keeps the SDP strictly feasible.
  auto support = [](const CMat& rho) {
    const HermEig e = herm_eig(rho, 1e-10);
    const double top = e.values.maxCoeff();
    std::vector<Eigen::Index> cols;
    for (Eigen::Index k = 0; k < e.values.size(); ++k)
      if (e.values(k) > 1e-12 * top) cols.push_back(k);
    CMat v(rho.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t k = 0; k < cols.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = e.vectors.col(cols[k]);
    return v;
  };
  const CMat V1 = support(rho1), V2 = support(rho2);
  const CMat V = kron(V1, V2);
  const int r1 = static_cast<int>(V1.cols()), r2 = static_cast<int>(V2.cols());
  const CMat s1 = hermitize(CMat(V1.adjoint() * rho1 * V1)), s2 = hermitize(CMat(V2.adjoint() * rho2 * V2));

  SdpProblem sp;
  sp.sense = Sense::Minimize;
  const int b = sp.add_block(r1 * r2);
  sp.objective.push_back({b, dense_coeff(hermitize(CMat(V.adjoint() * cost * V)), 1e-15)});
  const CMat i1 = CMat::Identity(r1, r1), i2 = CMat::Identity(r2, r2);
  auto coeff_of = [](const Coeff& f, int dim) {
    CMat m = CMat::Zero(dim, dim);
    for (const auto& e : f) m(e.row, e.col) += e.val;
    return m;
  };
  for (const Coeff& f : hermitian_coordinate_functionals(r1)) {
    const CMat F = coeff_of(f, r1);
    sp.constraints.push_back({{{b, dense_coeff(kron(F, i2), 1e-15)}}, (F * s1).trace().real()});
  }
  bool skipped = false;
  for (const Coeff& f : hermitian_coordinate_functionals(r2)) {
    if (!skipped && f.size() == 1) {
      // the trace is already fixed by the first marginal
      skipped = true;
      continue;
    }
    const CMat F = coeff_of(f, r2);
    sp.constraints.push_back({{{b, dense_coeff(kron(i1, F), 1e-15)}}, (F * s2).trace().real()});
  }
  const SdpSolution s = solve_sdp(sp, opt);
  TransportResult r;
  r.status = s.status;
  r.iterations = s.iterations;
  r.value = s.primal_obj;
  r.upper = s.dual_obj;  // dual lower bound for a minimization
  r.gap = s.gap;
  r.witness = CMat(V * s.X[0] * V.adjoint());
  return r;
}

CMat singlet_projector() {
  CVec s = CVec::Zero(4);
  s(1) = 1.0 / std::sqrt(2.0);
  s(2) = -1.0 / std::sqrt(2.0);
  return s * s.adjoint();
}

void DerivationStructure::validate() const {
  if (v.empty()) throw PreconditionError("derivation structure: no generators");
  if (omega.size() != v.size()) throw PreconditionError("derivation structure: one Bohr frequency per generator");
  const Eigen::Index d = v.front().rows();
  for (const auto& a : v)
    if (a.rows() != d || a.cols() != d) throw DimensionError("derivation structure: generator shape");
  for (const auto& a : v) {
    bool found = false;
    for (const auto& b : v)
      if ((b - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff())) found = true;
    if (!found) throw PreconditionError("derivation structure: generator set is not self-adjoint");
  }
  if (sigma) {
    const CMat inv = pinv_on_support(*sigma);
    for (size_t j = 0; j < v.size(); ++j)
      if (op_norm(CMat(*sigma * v[j] * inv - std::exp(-omega[j]) * v[j])) > 1e-8)
        throw PreconditionError("derivation structure: Bohr frequency does not match the reference state");
  }
}

CMat DerivationStructure::derivation_superop(size_t j) const { return ad_superop(v.at(j)); }

CMat DerivationStructure::lindbladian() const {
  const Eigen::Index d = dim();
  const CMat id = CMat::Identity(d, d);
  CMat L = CMat::Zero(d * d, d * d);
  for (size_t j = 0; j < v.size(); ++j) {
    const CMat vd = v[j].adjoint();
    const CMat vv = vd * v[j];
    L += std::exp(-omega[j]) * (2.0 * lr_superop(vd, v[j]) - lr_superop(vv, id) - lr_superop(id, vv));
  }
  return L;
}

CMat mean_superop(const CMat& rho, const DerivationStructure& ds, size_t j) {
  check_state(rho, "mean_superop: rho");
  const Eigen::Index d = rho.rows();
  const double w = j < ds.omega.size() ? ds.omega[j] : 0.0;
  CMat r = rho;
  if (ds.mean != MeanKind::Arithmetic) {
    const double eps = 1e-12;
    r = (1 - eps) * rho + eps * CMat::Identity(d, d) / static_cast<double>(d);
  }
  const HermEig e = herm_eig(r, 1e-10);
  const RVec p = e.values.cwiseMax(0.0);
  CMat c(d, d);
  for (Eigen::Index l = 0; l < d; ++l)
    for (Eigen::Index k = 0; k < d; ++k) {
      double val = 0;
      switch (ds.mean) {
        case MeanKind::Arithmetic: val = (p(k) + p(l)) / 2; break;
        case MeanKind::Logarithmic:
        case MeanKind::WeightedExponential: {
          const double om = ds.mean == MeanKind::Logarithmic ? 0.0 : w;
          // e^{-om/2} p_l (e^u - 1)/u with u = ln p_k - ln p_l + om
          const double u = std::log(p(k)) - std::log(p(l)) + om;
          const double ratio = std::abs(u) < 1e-12 ? 1.0 + u / 2 : std::expm1(u) / u;
          val = std::exp(-om / 2) * p(l) * ratio;
          break;
        }
      }
      c(k, l) = val;
    }
  const CMat U = e.vectors;
  return kron(CMat(U.conjugate()), U) * vec(c).asDiagonal() * kron(CMat(U.transpose()), CMat(U.adjoint()));
}

CMat metric_tensor(const CMat& rho, const DerivationStructure& ds) {
  const Eigen::Index d = rho.rows();
  CMat M = CMat::Zero(d * d, d * d);
  for (size_t j = 0; j < ds.v.size(); ++j) {
    const CMat D = ds.derivation_superop(j);
    M += D.adjoint() * mean_superop(rho, ds, j) * D;
  }
  return hermitize(M);
}

double metric_tensor_norm(const CMat& x, const CMat& rho, const DerivationStructure& ds) {
  const double xn = x.norm();
  if (xn == 0.0) return 0.0;
  if (std::abs(x.trace()) > 1e-10 * std::max(1.0, xn)) throw PreconditionError("metric_tensor_norm: x not traceless");
  const CMat M = metric_tensor(rho, ds);
  const CMat Mp = pinv_on_support(M, 1e-10);
  const CVec vx = vec(x);
  const CVec off_range = vx - M * (Mp * vx);
  if (off_range.norm() > 1e-8 * xn) throw InfiniteMetricError("metric_tensor_norm: x has a component in ker M_rho");
  return std::sqrt(std::max(0.0, vx.dot(Mp * vx).real()));
}

TransportResult jump(const SemiNormSpec& spec, const CMat& rho, const Channel& ch, const SdpOptions& opt) {
  return w1_dual(spec, rho, hermitize(ch.apply_adjoint(rho)), opt);
}

double relative_entropy(const CMat& rho, const CMat& sigma) {
  check_state(rho, "relative_entropy: rho");
  check_state(sigma, "relative_entropy: sigma");
  const HermEig es = herm_eig(sigma, 1e-10);
  const double top = es.values.maxCoeff();
  CMat log_sigma = CMat::Zero(sigma.rows(), sigma.cols());
  CMat off_support = CMat::Zero(sigma.rows(), sigma.cols());
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const CVec u = es.vectors.col(k);
    if (es.values(k) > 1e-14 * top) log_sigma += std::log(es.values(k)) * u * u.adjoint();
    else off_support += u * u.adjoint();
  }
  if ((rho * off_support).trace().real() > 1e-12) return std::numeric_limits<double>::infinity();
  const HermEig er = herm_eig(rho, 1e-10);
  double ent = 0;
  for (Eigen::Index k = 0; k < er.values.size(); ++k)
    if (er.values(k) > 0) ent += er.values(k) * std::log(er.values(k));
  const double D = ent - (rho * log_sigma).trace().real();
  const double tn = trace_norm(CMat(rho - sigma));
  if (D < 0.5 * tn * tn - 1e-9) throw NumericalError("relative_entropy: Pinsker post-check failed");
  return std::max(D, 0.0);
}

}  // namespace qcurv
