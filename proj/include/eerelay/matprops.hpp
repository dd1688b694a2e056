// SPDX-License-Identifier: Apache-2.0
//
// Eigenvalue bounds for traces and determinants of Hermitian pairs. These are
// the matrix facts behind the closed-form precoder directions: the bounds are
// attained exactly when the two matrices commute with suitably ordered
// eigenvalues.

#pragma once

#include "eerelay/linalg.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eerelay::matprops {

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kSingularTol = 1e-12;

struct HermitianPair {
  CMatrix a;
  CMatrix b;
  RVector eig_a;  // ascending, as returned by the eigensolver
  RVector eig_b;
};

inline HermitianPair make_hermitian_pair(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("Hermitian pair: dimension mismatch");
  if (hermitian_error(a) >= kHermitianTol || hermitian_error(b) >= kHermitianTol)
    throw std::invalid_argument("Hermitian pair: input is not Hermitian");
  HermitianPair p{a, b, {}, {}};
  p.eig_a = Eigen::SelfAdjointEigenSolver<CMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
  p.eig_b = Eigen::SelfAdjointEigenSolver<CMatrix>(b, Eigen::EigenvaluesOnly).eigenvalues();
  return p;
}

struct BoundTriple {
  double lower = 0.0;
  double value = 0.0;
  double upper = 0.0;

  /// lower <= value <= upper with `rel` slack relative to the bound magnitudes.
  bool holds(double rel = 1e-9) const {
    const double scale = 1.0 + std::max({std::abs(lower), std::abs(value), std::abs(upper)});
    return value >= lower - rel * scale && value <= upper + rel * scale;
  }
};

namespace detail {

inline RVector clamp_psd(const RVector& ev, const char* which) {
  if (ev.size() > 0 && ev.minCoeff() < -kPsdTol)
    throw std::domain_error(std::string("matrix ") + which + " has a negative eigenvalue");
  return ev.cwiseMax(0.0);
}

}  // namespace detail

/// sum lambda_i(desc) gamma_i(asc) <= tr(AB) <= sum lambda_i(desc) gamma_i(desc).
inline BoundTriple trace_product_bounds(const HermitianPair& p) {
  const RVector la = sorted_descending(p.eig_a);
  const RVector gd = sorted_descending(p.eig_b);
  const RVector ga = sorted_ascending(p.eig_b);
  return {la.dot(ga), (p.a * p.b).trace().real(), la.dot(gd)};
}

/// prod(lambda(desc) + gamma(desc)) <= det(A + B) <= prod(lambda(desc) + gamma(asc)), A, B PSD.
inline BoundTriple det_sum_bounds(const HermitianPair& p) {
  const RVector la = sorted_descending(detail::clamp_psd(p.eig_a, "A"));
  const RVector lb = detail::clamp_psd(p.eig_b, "B");
  const RVector gd = sorted_descending(lb);
  const RVector ga = sorted_ascending(lb);
  return {(la + gd).prod(), (p.a + p.b).determinant().real(), (la + ga).prod()};
}

/// prod(1 + gamma(desc)/lambda(desc)) <= det(I + A^{-1} B) <= prod(1 + gamma(asc)/lambda(desc)),
/// A positive definite, B PSD.
inline BoundTriple det_identity_inverse_bounds(const HermitianPair& p) {
  const RVector la = sorted_descending(detail::clamp_psd(p.eig_a, "A"));
  if (la.size() > 0 && la.minCoeff() < kSingularTol) throw std::domain_error("matrix A is singular");
  const RVector lb = detail::clamp_psd(p.eig_b, "B");
  const RVector gd = sorted_descending(lb);
  const RVector ga = sorted_ascending(lb);
  const Eigen::Index n = p.a.rows();
  const CMatrix m = CMatrix::Identity(n, n) + p.a.partialPivLu().solve(p.b);
  const RVector ones = RVector::Ones(n);
  return {(ones + gd.cwiseQuotient(la)).prod(), m.determinant().real(), (ones + ga.cwiseQuotient(la)).prod()};
}

enum class MatrixKind { Hermitian, PositiveSemidefinite, PositiveDefinite };

/// Random test matrices: Hermitian (G + G^H)/2, PSD G G^H, PD G G^H + 0.1 I.
inline CMatrix random_matrix(Eigen::Index n, MatrixKind kind, Rng& rng) {
  const CMatrix g = complex_gaussian(n, n, rng);
  switch (kind) {
    case MatrixKind::Hermitian:
      return 0.5 * (g + g.adjoint());
    case MatrixKind::PositiveSemidefinite: {
      // Rank-deficient half the time so the PSD edge gets exercised.
      const CMatrix h = complex_gaussian(n, std::max<Eigen::Index>(1, n - static_cast<Eigen::Index>(rng() % 2)), rng);
      return h * h.adjoint();
    }
    case MatrixKind::PositiveDefinite:
      return g * g.adjoint() + 0.1 * CMatrix::Identity(n, n);
  }
  return g;
}

struct SuiteCount {
  int trials = 0;
  int violations = 0;
  double worst_excess = 0.0;  // largest relative violation seen (0 when none)
};

struct PropertySuiteReport {
  SuiteCount trace_product;
  SuiteCount det_sum;
  SuiteCount det_identity_inverse;

  bool all_hold() const {
    return trace_product.violations == 0 && det_sum.violations == 0 && det_identity_inverse.violations == 0;
  }
};

namespace detail {

inline void tally(SuiteCount& c, const BoundTriple& t, double slack) {
  ++c.trials;
  if (!t.holds(slack)) {
    ++c.violations;
    const double scale = 1.0 + std::max({std::abs(t.lower), std::abs(t.value), std::abs(t.upper)});
    const double excess = std::max(t.lower - t.value, t.value - t.upper) / scale;
    c.worst_excess = std::max(c.worst_excess, excess);
  }
}

}  // namespace detail

/// Runs the three bound checks on `trials` random n x n instances each.
inline PropertySuiteReport run_property_suites(int trials, Eigen::Index n, std::uint64_t seed, double slack = 1e-9) {
  Rng rng(mix_seed(seed));
  PropertySuiteReport r;
  for (int k = 0; k < trials; ++k) {
    const auto p = make_hermitian_pair(random_matrix(n, MatrixKind::Hermitian, rng), random_matrix(n, MatrixKind::Hermitian, rng));
    detail::tally(r.trace_product, trace_product_bounds(p), slack);
  }
  for (int k = 0; k < trials; ++k) {
    const auto p = make_hermitian_pair(random_matrix(n, MatrixKind::PositiveSemidefinite, rng),
                             random_matrix(n, MatrixKind::PositiveSemidefinite, rng));
    detail::tally(r.det_sum, det_sum_bounds(p), slack);
  }
  for (int k = 0; k < trials; ++k) {
    const auto p = make_hermitian_pair(random_matrix(n, MatrixKind::PositiveDefinite, rng),
                             random_matrix(n, MatrixKind::PositiveSemidefinite, rng));
    detail::tally(r.det_identity_inverse, det_identity_inverse_bounds(p), slack);
  }
  return r;
}

}  // namespace eerelay::matprops
