// SPDX-License-Identifier: Apache-2.0
//
// Small dense complex linear-algebra helpers on top of Eigen.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace eerelay {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// SplitMix64 finaliser; used to derive well-separated stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

/// Entries i.i.d. CN(0, 1): real and imaginary parts N(0, 1/2).
inline CMatrix complex_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = cd(re, im);
    }
  return m;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal phases
/// folded back into Q (Mezzadri's correction).
inline CMatrix haar_unitary(Eigen::Index n, Rng& rng) {
  const CMatrix z = complex_gaussian(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    const cd phase = mag > 0.0 ? r(k, k) / mag : cd(1.0, 0.0);
    q.col(k) *= phase;
  }
  return q;
}

inline double unitarity_error(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).norm();
}

inline double hermitian_error(const CMatrix& a) { return (a - a.adjoint()).norm(); }

/// Hermitian PSD square root via eigendecomposition; tiny negative eigenvalues are clamped.
inline CMatrix hermitian_sqrt(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  const RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

/// log2 det of a Hermitian positive-definite matrix.
inline double log2_det_hpd(const CMatrix& a) {
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::LLT<CMatrix> llt(sym);
  if (llt.info() != Eigen::Success) throw std::domain_error("matrix is not positive definite");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sym.rows(); ++i) acc += std::log2(llt.matrixLLT()(i, i).real());
  return 2.0 * acc;
}

/// Copy of `v` sorted in descending order.
inline RVector sorted_descending(RVector v) {
  std::sort(v.data(), v.data() + v.size(), [](double a, double b) { return a > b; });
  return v;
}

inline RVector sorted_ascending(RVector v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

}  // namespace eerelay
