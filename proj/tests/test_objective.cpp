// SPDX-License-Identifier: Apache-2.0

#include "eerelay/objective.hpp"
#include "eerelay/solver.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace eerelay;
using Catch::Approx;

namespace {

ChannelSpectra unit_spectra(int nr) {
  ChannelSpectra s;
  s.lambda_h1 = RVector::Ones(nr);
  s.lambda_h2 = RVector::Ones(nr);
  return s;
}

SpectrumPoint uniform(const NetworkConfig& c, double alpha, double v) {
  return {alpha, RVector::Constant(c.n1, v), RVector::Constant(c.n2, v), RVector::Constant(c.nr, v)};
}

RVector random_vector(int n, double hi, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, hi);
  RVector v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace

TEST_CASE("rates on the all-ones instance") {
  NetworkConfig c;
  c.sigma2_d = 0.0;
  const auto sp = unit_spectra(2);
  const auto pt = uniform(c, 1.0 - 1e-15, 1.0);
  CHECK(rate_tr1(pt, sp, c) == Approx(std::log2(3.5)).epsilon(1e-12));
  CHECK(rate_tr2(pt, sp, c) == Approx(std::log2(3.5)).epsilon(1e-12));
  CHECK(std::log2(3.5) == Approx(1.8074).margin(1e-4));
}

TEST_CASE("zero eigenvalues give zero rate terms") {
  NetworkConfig c;
  const auto sp = unit_spectra(2);
  auto pt = uniform(c, 0.5, 1.0);
  pt.lambda_q2.setZero();
  CHECK(rate_tr1(pt, sp, c) == 0.0);
  pt = uniform(c, 0.5, 1.0);
  pt.lambda_q1.setZero();
  CHECK(rate_tr2(pt, sp, c) == 0.0);
  pt = uniform(c, 1e-300, 1.0);
  CHECK(rate_tr1(pt, sp, c) < 1e-250);
}

TEST_CASE("TR2 rate saturates as the relay gain grows") {
  NetworkConfig c;
  c.nr = c.n1 = c.n2 = 1;
  ChannelSpectra sp;
  sp.lambda_h1 = RVector::Constant(1, 1.3);
  sp.lambda_h2 = RVector::Constant(1, 0.7);
  SpectrumPoint pt{0.5, RVector::Constant(1, 2.0), RVector::Constant(1, 1.0), RVector::Constant(1, 1e9)};
  const double limit = 0.5 * std::log2(1.0 + 2.0 * 1.3 / c.sigma2_r);
  CHECK(rate_tr2(pt, sp, c) == Approx(limit).epsilon(1e-7));
}

TEST_CASE("consumed power examples") {
  NetworkConfig c;
  const auto sp = unit_spectra(2);
  CHECK(consumed_power(SpectrumPoint::zeros(c), sp, c) == Approx(3.0));
  auto pt = uniform(c, 0.5, 1.0);
  pt.lambda_qr.setZero();
  CHECK(consumed_power(pt, sp, c) == Approx(7.0));
  CHECK(consumed_power(uniform(c, 0.5, 1.0), sp, c) == Approx(11.4));
}

TEST_CASE("energy efficiency on the all-ones instance") {
  NetworkConfig c;
  c.sigma2_d = 0.0;
  const auto sp = unit_spectra(2);
  const double ee = energy_efficiency(uniform(c, 1.0 - 1e-15, 1.0), sp, c);
  CHECK(ee == Approx(2.0 * std::log2(3.5) / 11.4).epsilon(1e-12));
  CHECK(ee == Approx(0.3171).margin(1e-4));
  CHECK(energy_efficiency(SpectrumPoint::zeros(c), sp, c) == 0.0);
  NetworkConfig slow = c;
  slow.time_interval = 17.0;
  CHECK(energy_efficiency(uniform(c, 0.5, 1.0), sp, slow) == energy_efficiency(uniform(c, 0.5, 1.0), sp, c));
}

TEST_CASE("harvested power examples") {
  NetworkConfig c;
  const auto sp = unit_spectra(2);
  CHECK(harvested_power(uniform(c, 1.0, 1.0), sp, c) == 0.0);
  CHECK(harvested_power(uniform(c, 0.0, 1.0), sp, c) == Approx(4.6));
  auto pt = uniform(c, 0.0, 1.0);
  pt.lambda_qr.setZero();
  CHECK(harvested_power(pt, sp, c) == Approx(0.2));
}

TEST_CASE("feasibility report") {
  NetworkConfig c;
  const auto sp = unit_spectra(2);
  const auto r0 = check_feasibility(SpectrumPoint::zeros(c), sp, c);
  CHECK_FALSE(r0.feasible);
  CHECK(r0.rate_tr1.slack == Approx(-0.5));
  CHECK(r0.worst_violation() == "energy_harvesting");  // -0.9 W beats -0.5 bits/s/Hz

  NetworkConfig z = c;
  z.rt_min = 0.0;
  z.p1_ct = z.p1_cr = 0.0;
  const auto r1 = check_feasibility(SpectrumPoint::zeros(z, 0.5), sp, z);
  CHECK(r1.feasible);
  CHECK(r1.eh_balance.slack == Approx(0.1));

  auto pt = uniform(c, 0.5, 0.0);
  pt.lambda_q1 << c.p1_max + 0.1, 0.0;
  const auto r2 = check_feasibility(pt, sp, c);
  CHECK_FALSE(r2.feasible);
  CHECK(r2.power_tr1.slack == Approx(-0.1));
}

TEST_CASE("scalar forms agree with the independent evaluator") {
  NetworkConfig c;
  c.xi_1 = 0.8;
  c.xi_r = 0.6;
  c.eh_efficiency = 0.7;
  Rng rng(mix_seed(21));
  for (int t = 0; t < 100; ++t) {
    const auto ch = generate_channels(c, static_cast<std::uint64_t>(t));
    const SpectrumPoint pt{0.05 + 0.9 * std::uniform_real_distribution<double>(0, 1)(rng), random_vector(2, 3, rng),
                           random_vector(2, 3, rng), random_vector(2, 2, rng)};
    const auto e = oracle::evaluate(pt.alpha, pt.lambda_q1, pt.lambda_q2, pt.lambda_qr, ch.spectra.lambda_h1,
                                    ch.spectra.lambda_h2, c);
    CHECK(rate_tr1(pt, ch.spectra, c) == Approx(e.r1).epsilon(1e-12));
    CHECK(rate_tr2(pt, ch.spectra, c) == Approx(e.r2).epsilon(1e-12));
    CHECK(relay_power(pt, ch.spectra, c) == Approx(e.relay).epsilon(1e-12));
    CHECK(consumed_power(pt, ch.spectra, c) == Approx(e.consumed).epsilon(1e-12));
    CHECK(harvested_power(pt, ch.spectra, c) == Approx(e.harvested).epsilon(1e-12));
    CHECK(energy_efficiency(pt, ch.spectra, c) == Approx(e.ee).epsilon(1e-12));
  }
}

TEST_CASE("eigenmode and matrix forms coincide on shared-unitary channels") {
  NetworkConfig c;
  Rng rng(mix_seed(5));
  for (int t = 0; t < 50; ++t) {
    const auto ch = generate_channels(c, 1000 + static_cast<std::uint64_t>(t));
    const SpectrumPoint pt{0.3 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng), random_vector(2, 4, rng),
                           random_vector(2, 4, rng), random_vector(2, 1, rng)};
    const double a = energy_efficiency(pt, ch.spectra, c);
    const double b = ee_matrix_form(pt.alpha, assemble_precoders(pt, ch), ch, c);
    CHECK(std::abs(a - b) / a < 1e-8);
  }
}

TEST_CASE("matrix form special cases") {
  NetworkConfig c;
  const auto ch = generate_channels(c, 3);
  PrecoderSet p;
  p.q1 = CMatrix::Zero(2, 2);
  p.q2 = CMatrix::Zero(2, 2);
  p.qr = CMatrix::Identity(2, 2);
  CHECK(ee_matrix_form(0.5, p, ch, c) == Approx(0.0).margin(1e-14));
  p.q1 = CMatrix::Identity(2, 2);
  p.q2 = 2.0 * CMatrix::Identity(2, 2);
  p.qr = CMatrix::Zero(2, 2);
  CHECK(ee_matrix_form(0.5, p, ch, c) == Approx(0.0).margin(1e-14));
  NetworkConfig silent = c;
  silent.sigma2_2 = 0.0;
  CHECK_THROWS_AS(ee_matrix_form(0.5, p, ch, silent), std::domain_error);
}

TEST_CASE("closed-form relay curvature matches the second difference and is nonpositive") {
  NetworkConfig c;
  Rng rng(mix_seed(8));
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int t = 0; t < 100; ++t) {
    const double q1 = u(rng), h1 = u(rng), h2 = u(rng), x = u(rng);
    auto g = [&](double v) { return std::log(1.0 + v * q1 * h1 * h2 / (c.sigma2_2 + c.sigma2_r * v * h2)); };
    const double fd = oracle::second_difference(g, x, 1e-4 * (1.0 + x));
    const double cf = relay_mode_curvature(x, q1, h1, h2, c);
    CHECK(cf <= 0.0);
    CHECK(cf == Approx(fd).epsilon(1e-4).margin(1e-8));
  }
}

TEST_CASE("rate sums are nondecreasing in the transceiver eigenvalues") {
  NetworkConfig c;
  Rng rng(mix_seed(12));
  for (int t = 0; t < 50; ++t) {
    const auto ch = generate_channels(c, static_cast<std::uint64_t>(t));
    SpectrumPoint pt{0.6, random_vector(2, 3, rng), random_vector(2, 3, rng), random_vector(2, 1, rng)};
    const double base = sum_rate(pt, ch.spectra, c);
    for (int i = 0; i < 2; ++i) {
      auto up = pt;
      up.lambda_q1(i) += 1e-3;
      CHECK(sum_rate(up, ch.spectra, c) - base >= -1e-9);
      up = pt;
      up.lambda_q2(i) += 1e-3;
      CHECK(sum_rate(up, ch.spectra, c) - base >= -1e-9);
    }
  }
}

TEST_CASE("mode permutation leaves every quantity unchanged") {
  NetworkConfig c;
  const auto ch = generate_channels(c, 4);
  SpectrumPoint pt{0.4, RVector(2), RVector(2), RVector(2)};
  pt.lambda_q1 << 1.0, 2.5;
  pt.lambda_q2 << 0.3, 1.7;
  pt.lambda_qr << 0.8, 0.2;
  auto flip = [](RVector v) { return RVector(v.reverse()); };
  ChannelSpectra sp = ch.spectra;
  ChannelSpectra spf = sp;
  spf.lambda_h1 = flip(sp.lambda_h1);
  spf.lambda_h2 = flip(sp.lambda_h2);
  const SpectrumPoint pf{pt.alpha, flip(pt.lambda_q1), flip(pt.lambda_q2), flip(pt.lambda_qr)};
  CHECK(energy_efficiency(pf, spf, c) == Approx(energy_efficiency(pt, sp, c)).epsilon(1e-14));
  CHECK(harvested_power(pf, spf, c) == Approx(harvested_power(pt, sp, c)).epsilon(1e-14));
  CHECK(relay_power(pf, spf, c) == Approx(relay_power(pt, sp, c)).epsilon(1e-14));
}
