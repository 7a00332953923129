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

#include "qcurv/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

namespace qcurv {

CMat kron_all(const std::vector<CMat>& factors) {
  CMat out = CMat::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

bool is_hermitian(const CMat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale + 1e-300;
}

HermEig herm_eig(const CMat& m, double rel_tol) {
  if (m.rows() != m.cols()) throw DimensionError("herm_eig: matrix not square");
  if (m.size() == 0) throw DimensionError("herm_eig: empty matrix");
  // Loose guard on input; the symmetrized matrix is what gets diagonalized.
  const double scale = m.cwiseAbs().maxCoeff();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > std::max(rel_tol, 1e-8) * std::max(scale, 1.0))
    throw PreconditionError("herm_eig: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(m));
  if (es.info() != Eigen::Success) throw NumericalError("herm_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

CMat herm_func(const CMat& m, const std::function<double(double)>& f) {
  HermEig e = herm_eig(m, 1e-8);
  RVec fv = e.values.unaryExpr(f);
  return e.vectors * fv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

CMat mat_exp(const CMat& m) {
  if (m.rows() != m.cols()) throw DimensionError("mat_exp: matrix not square");
  if (!m.allFinite()) throw PreconditionError("mat_exp: non-finite entries");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(m));
    RVec ev = es.eigenvalues();
    CVec ex = ev.unaryExpr([](double x) { return std::exp(x); }).cast<cplx>();
    return es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().adjoint();
  }
  if ((m + m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale) {
    // m = -i h with h Hermitian
    CMat h = cplx(0, 1) * m;
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(h));
    CVec ex(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < ex.size(); ++k)
      ex(k) = std::exp(cplx(0, -es.eigenvalues()(k)));
    return es.eigenvectors() * ex.asDiagonal() * es.eigenvectors().adjoint();
  }
  return m.exp();
}

double trace_norm(const CMat& m) {
  if (is_hermitian(m, 1e-10)) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues().sum();
}

double min_eig(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

CMat partial_trace(const CMat& m, const std::vector<int>& dims, const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  Eigen::Index total = 1;
  for (int d : dims) {
    if (d <= 0) throw DimensionError("partial_trace: non-positive factor dimension");
    total *= d;
  }
  if (m.rows() != total || m.cols() != total)
    throw DimensionError("partial_trace: dims do not match matrix size");
  std::vector<bool> kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw DimensionError("partial_trace: keep index out of range");
    kept[k] = true;
  }
  std::vector<Eigen::Index> stride(n);
  Eigen::Index s = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = s;
    s *= dims[i];
  }
  std::vector<int> kf, tf;
  for (int i = 0; i < n; ++i) (kept[i] ? kf : tf).push_back(i);
  auto offsets = [&](const std::vector<int>& f) {
    std::vector<Eigen::Index> off{0};
    for (int i : f) {
      std::vector<Eigen::Index> next;
      next.reserve(off.size() * dims[i]);
      for (Eigen::Index o : off)
        for (int a = 0; a < dims[i]; ++a) next.push_back(o + a * stride[i]);
      off.swap(next);
    }
    return off;
  };
  const auto ko = offsets(kf);
  const auto to = offsets(tf);
  const Eigen::Index dk = static_cast<Eigen::Index>(ko.size());
  CMat out = CMat::Zero(dk, dk);
  for (Eigen::Index j = 0; j < dk; ++j)
    for (Eigen::Index i = 0; i < dk; ++i) {
      cplx acc = 0;
      for (Eigen::Index t : to) acc += m(ko[i] + t, ko[j] + t);
      out(i, j) = acc;
    }
  return out;
}

CMat pinv_on_support(const CMat& m, double eps) {
  HermEig e = herm_eig(m, 1e-8);
  const double lmax = std::max(e.values.cwiseAbs().maxCoeff(), 0.0);
  if (lmax == 0.0) return CMat::Zero(m.rows(), m.cols());
  if (e.values(0) < -std::max(1e-9, 10 * eps) * lmax)
    throw PreconditionError("pinv_on_support: matrix has a negative eigenvalue");
  RVec inv = RVec::Zero(e.values.size());
  for (Eigen::Index k = 0; k < inv.size(); ++k)
    if (e.values(k) > eps * lmax) inv(k) = 1.0 / e.values(k);
  return e.vectors * inv.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

CMat sqrtm_psd(const CMat& m) {
  return herm_func(m, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

CMat inv_sqrtm_psd(const CMat& m, double eps) {
  return herm_func(m, [eps](double x) { return x > eps ? 1.0 / std::sqrt(x) : 0.0; });
}

CVec vec(const CMat& m) { return Eigen::Map<const CVec>(m.data(), m.size()); }

CMat unvec(const CVec& v, Eigen::Index rows) {
  if (rows <= 0 || v.size() % rows != 0) throw DimensionError("unvec: size mismatch");
  return Eigen::Map<const CMat>(v.data(), rows, v.size() / rows);
}

CMat lr_superop(const CMat& a, const CMat& b) { return kron(b.transpose(), a); }

CMat apply_superop(const CMat& s, const CMat& x) {
  if (s.cols() != x.size()) throw DimensionError("apply_superop: size mismatch");
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
  return unvec(s * vec(x), d);
}

CMat superop_from_map(Eigen::Index d, const std::function<CMat(const CMat&)>& f) {
  CMat s(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) s.col(i + j * d) = vec(f(unit(d, i, j)));
  return s;
}

CMat choi_of_superop(const CMat& s, Eigen::Index d_in, Eigen::Index d_out) {
  if (s.cols() != d_in * d_in || s.rows() != d_out * d_out)
    throw DimensionError("choi_of_superop: size mismatch");
  CMat j = CMat::Zero(d_in * d_out, d_in * d_out);
  for (Eigen::Index b = 0; b < d_in; ++b)
    for (Eigen::Index a = 0; a < d_in; ++a)
      j.block(a * d_out, b * d_out, d_out, d_out) = unvec(s.col(a + b * d_in), d_out);
  return j;
}

CMat comm(const CMat& a, const CMat& b) { return a * b - b * a; }

CMat unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  CMat e = CMat::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}

std::vector<CMat> hermitian_basis(Eigen::Index d) {
  std::vector<CMat> basis;
  basis.reserve(d * d);
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < d; ++i) basis.push_back(unit(d, i, i));
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) {
      basis.push_back(r * (unit(d, i, j) + unit(d, j, i)));
      basis.push_back(r * (cplx(0, -1) * unit(d, i, j) + cplx(0, 1) * unit(d, j, i)));
    }
  return basis;
}

CMat null_space(const CMat& m, double rel_tol) {
  if (m.cols() == 0) return CMat(0, 0);
  // Eigen decomposition of m^dagger m keeps this robust for wide and tall inputs.
  CMat g = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(g));
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) <= rel_tol * rel_tol * top || es.eigenvalues()(k) <= 1e-300)
      idx.push_back(k);
  if (m.rows() == 0) return CMat::Identity(m.cols(), m.cols());
  CMat out(m.cols(), static_cast<Eigen::Index>(idx.size()));
  for (size_t c = 0; c < idx.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(idx[c]);
  return out;
}

}  // namespace qcurv
