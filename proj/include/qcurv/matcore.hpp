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

#ifndef QCURV_MATCORE_HPP
#define QCURV_MATCORE_HPP

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcurv {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kronecker product, first factor is the most significant index.
template <typename DA, typename DB>
Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMat kron_all(const std::vector<CMat>& factors);

template <typename Derived>
double op_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) throw DimensionError("op_norm: empty matrix");
  Eigen::JacobiSVD<Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>>
      svd(m.eval());
  return svd.singularValues()(0);
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> hermitize(
    const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / 2.0;
}

bool is_hermitian(const CMat& m, double rel_tol = 1e-12);

struct HermEig {
  RVec values;  // ascending
  CMat vectors;
};

HermEig herm_eig(const CMat& m, double rel_tol = 1e-12);

// Applies f to the spectrum of a Hermitian matrix.
CMat herm_func(const CMat& m, const std::function<double(double)>& f);

CMat mat_exp(const CMat& m);

double trace_norm(const CMat& m);
double min_eig(const CMat& m);
double max_eig(const CMat& m);

// Keeps the factors listed in `keep` (ascending order is not required).
CMat partial_trace(const CMat& m, const std::vector<int>& dims, const std::vector<int>& keep);

CMat pinv_on_support(const CMat& m, double eps = 1e-10);

// Square root and inverse square root of a PSD matrix on its support.
CMat sqrtm_psd(const CMat& m);
CMat inv_sqrtm_psd(const CMat& m, double eps = 1e-14);

// Column-stacking vectorization.
CVec vec(const CMat& m);
CMat unvec(const CVec& v, Eigen::Index rows);

// Superoperator of X -> A X B.
CMat lr_superop(const CMat& a, const CMat& b);
CMat apply_superop(const CMat& s, const CMat& x);
CMat superop_from_map(Eigen::Index d, const std::function<CMat(const CMat&)>& f);
// Hilbert-Schmidt adjoint of a superoperator.
inline CMat superop_adjoint(const CMat& s) { return s.adjoint(); }

// Choi matrix sum_ij E_ij (x) f(E_ij), input factor first.
CMat choi_of_superop(const CMat& s, Eigen::Index d_in, Eigen::Index d_out);

CMat comm(const CMat& a, const CMat& b);

// Matrix unit |i><j|.
CMat unit(Eigen::Index d, Eigen::Index i, Eigen::Index j);

// Orthonormal Hermitian basis of d x d matrices in the Hilbert-Schmidt product.
std::vector<CMat> hermitian_basis(Eigen::Index d);

// Orthonormal basis of the null space of m (columns).
CMat null_space(const CMat& m, double rel_tol = 1e-9);

}  // namespace qcurv

#endif  // QCURV_MATCORE_HPP
