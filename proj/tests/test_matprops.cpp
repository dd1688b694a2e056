// SPDX-License-Identifier: Apache-2.0

#include "eerelay/matprops.hpp"

#include <catch_amalgamated.hpp>

using namespace eerelay;
using namespace eerelay::matprops;
using Catch::Approx;

namespace {

CMatrix diag(std::initializer_list<double> v) {
  RVector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<cd>().asDiagonal();
}

}  // namespace

TEST_CASE("identity and opposite-order diagonal examples") {
  const CMatrix i2 = CMatrix::Identity(2, 2);
  const auto t = trace_product_bounds(make_hermitian_pair(i2, i2));
  CHECK(t.lower == Approx(2.0));
  CHECK(t.value == Approx(2.0));
  CHECK(t.upper == Approx(2.0));
  const auto o = trace_product_bounds(make_hermitian_pair(diag({2, 1}), diag({1, 2})));
  CHECK(o.lower == Approx(4.0));
  CHECK(o.value == Approx(4.0));
  CHECK(o.upper == Approx(5.0));
  const auto d = det_sum_bounds(make_hermitian_pair(i2, i2));
  CHECK(d.lower == Approx(4.0));
  CHECK(d.value == Approx(4.0));
  CHECK(d.upper == Approx(4.0));
  const auto c = det_identity_inverse_bounds(make_hermitian_pair(diag({2, 1}), diag({2, 1})));
  CHECK(c.lower == Approx(4.0));
  CHECK(c.value == Approx(4.0));
  CHECK(c.holds());
}

TEST_CASE("trace bounds on hand examples") {
  const auto same = trace_product_bounds(make_hermitian_pair(diag({2, 0}), diag({1, 0})));
  CHECK(same.lower == Approx(0.0));
  CHECK(same.value == Approx(2.0));
  CHECK(same.upper == Approx(2.0));

  const auto t = trace_product_bounds(make_hermitian_pair(diag({1, 2}), diag({1, 2})));
  CHECK(t.lower == Approx(4.0));
  CHECK(t.value == Approx(5.0));
  CHECK(t.upper == Approx(5.0));

  const auto opp = trace_product_bounds(make_hermitian_pair(diag({1, 2}), diag({2, 1})));
  CHECK(opp.lower == Approx(4.0));
  CHECK(opp.value == Approx(4.0));
  CHECK(opp.upper == Approx(5.0));
}

TEST_CASE("determinant bounds on hand examples") {
  const auto d = det_sum_bounds(make_hermitian_pair(diag({3, 1}), diag({1, 3})));
  CHECK(d.lower == Approx(12.0));
  CHECK(d.value == Approx(16.0));
  CHECK(d.upper == Approx(16.0));

  const auto id = det_identity_inverse_bounds(make_hermitian_pair(diag({1, 1}), diag({0, 0})));
  CHECK(id.lower == Approx(1.0));
  CHECK(id.value == Approx(1.0));
  CHECK(id.upper == Approx(1.0));
}

TEST_CASE("commuting pairs with matching order attain the bound") {
  Rng rng(mix_seed(3));
  const CMatrix u = haar_unitary(3, rng);
  const CMatrix a = u * diag({4, 2, 1}) * u.adjoint();
  const CMatrix b = u * diag({3, 2, 0.5}) * u.adjoint();
  const auto t = trace_product_bounds(make_hermitian_pair(a, b));
  CHECK(t.value == Approx(t.upper).epsilon(1e-12));
  const CMatrix b_rev = u * diag({0.5, 2, 3}) * u.adjoint();
  const auto d = det_sum_bounds(make_hermitian_pair(a, b_rev));
  CHECK(d.value == Approx(d.upper).epsilon(1e-12));
  const auto dl = det_sum_bounds(make_hermitian_pair(a, b));
  CHECK(dl.value == Approx(dl.lower).epsilon(1e-12));
  const auto ii = det_identity_inverse_bounds(make_hermitian_pair(a, b));
  CHECK(ii.value == Approx(ii.lower).epsilon(1e-12));
}

TEST_CASE("randomised suites hold on 4x4 instances") {
  const auto r = run_property_suites(200, 4, 17);
  CHECK(r.trace_product.trials == 200);
  CHECK(r.trace_product.violations == 0);
  CHECK(r.det_sum.violations == 0);
  CHECK(r.det_identity_inverse.violations == 0);
  CHECK(r.all_hold());
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(make_hermitian_pair(CMatrix::Identity(2, 2), CMatrix::Identity(3, 3)), std::invalid_argument);
  CMatrix nh = CMatrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(make_hermitian_pair(nh, CMatrix::Identity(2, 2)), std::invalid_argument);
  CHECK_THROWS_AS(det_sum_bounds(make_hermitian_pair(diag({-1, 1}), diag({1, 1}))), std::domain_error);
  CHECK_THROWS_AS(det_identity_inverse_bounds(make_hermitian_pair(diag({0, 1}), diag({1, 1}))), std::domain_error);
}
