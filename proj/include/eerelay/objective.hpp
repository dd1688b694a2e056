// SPDX-License-Identifier: Apache-2.0
//
// Rates, powers, harvested energy and energy efficiency of the two-way relay
// network, in both the per-eigenmode scalar form and the full matrix form.
//
// Per-mode sums run over the nr relay modes. Transceiver eigenvalue vectors
// shorter than nr are treated as zero-padded; entries past nr only cost power.

#pragma once

#include "eerelay/config.hpp"
#include "eerelay/linalg.hpp"
#include "eerelay/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eerelay {

/// Optimisation variables: power-splitting factor and the three eigenvalue vectors.
struct SpectrumPoint {
  double alpha = 0.5;
  RVector lambda_q1;  // length n1
  RVector lambda_q2;  // length n2
  RVector lambda_qr;  // length nr

  static SpectrumPoint zeros(const NetworkConfig& cfg, double alpha = 0.5) {
    return {alpha, RVector::Zero(cfg.n1), RVector::Zero(cfg.n2), RVector::Zero(cfg.nr)};
  }

  bool valid() const {
    auto nonneg = [](const RVector& v) { return v.size() == 0 || v.minCoeff() >= 0.0; };
    return alpha > 0.0 && alpha < 1.0 && nonneg(lambda_q1) && nonneg(lambda_q2) && nonneg(lambda_qr);
  }
};

struct PrecoderSet {
  CMatrix q1;  // n1 x n1 transmit covariance of TR1
  CMatrix q2;
  CMatrix qr;  // nr x nr relay amplification matrix
  CMatrix f1;  // Hermitian square roots of q1, q2
  CMatrix f2;
  bool exact = true;  // false when built on a channel without a shared left unitary
};

namespace detail {

inline double mode(const RVector& v, Eigen::Index i) { return i < v.size() ? v(i) : 0.0; }

/// log2(1 + num/den) with the 0/0 -> 0 convention.
inline double log2_ratio_term(double num, double den) {
  if (num <= 0.0) return 0.0;
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(1.0 + num / den);
}

}  // namespace detail

/// Rate decoded at TR1 (signal from TR2), bits/s/Hz, with the 1/2 half-duplex pre-log.
inline double rate_tr1(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg) {
  const double a = pt.alpha;
  const double base = cfg.sigma2_d + a * cfg.sigma2_1;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < cfg.nr; ++i) {
    const double qr = detail::mode(pt.lambda_qr, i);
    const double h1 = detail::mode(sp.lambda_h1, i);
    const double h2 = detail::mode(sp.lambda_h2, i);
    const double q2 = detail::mode(pt.lambda_q2, i);
    acc += detail::log2_ratio_term(a * qr * q2 * h1 * h2, base + a * cfg.sigma2_r * qr * h1);
  }
  return 0.5 * acc;
}

/// Rate decoded at TR2 (signal from TR1), bits/s/Hz.
inline double rate_tr2(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < cfg.nr; ++i) {
    const double qr = detail::mode(pt.lambda_qr, i);
    const double h1 = detail::mode(sp.lambda_h1, i);
    const double h2 = detail::mode(sp.lambda_h2, i);
    const double q1 = detail::mode(pt.lambda_q1, i);
    acc += detail::log2_ratio_term(qr * q1 * h1 * h2, cfg.sigma2_2 + cfg.sigma2_r * qr * h2);
  }
  return 0.5 * acc;
}

inline double sum_rate(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg) {
  return rate_tr1(pt, sp, cfg) + rate_tr2(pt, sp, cfg);
}

/// Relay transmit power sum_i lambda_qr (lambda_q2 lambda_h2 + lambda_q1 lambda_h1 + sigma_r^2).
inline double relay_power(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < cfg.nr; ++i) {
    acc += detail::mode(pt.lambda_qr, i) *
           (detail::mode(pt.lambda_q2, i) * detail::mode(sp.lambda_h2, i) +
            detail::mode(pt.lambda_q1, i) * detail::mode(sp.lambda_h1, i) + cfg.sigma2_r);
  }
  return acc;
}

/// Total consumed power P1/xi1 + P2/xi2 + PR/xiR + Pc, in W.
inline double consumed_power(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg) {
  return pt.lambda_q1.sum() / cfg.xi_1 + pt.lambda_q2.sum() / cfg.xi_2 + relay_power(pt, sp, cfg) / cfg.xi_r +
         cfg.pc_total;
}

/// Power reaching TR1 through the relay, before splitting:
/// sum_i lambda_h1 lambda_qr (lambda_q2 lambda_h2 + lambda_q1 lambda_h1 + sigma_r^2) + sigma_1^2.
inline double received_power_tr1(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < cfg.nr; ++i) {
    const double h1 = detail::mode(sp.lambda_h1, i);
    acc += h1 * detail::mode(pt.lambda_qr, i) *
           (detail::mode(pt.lambda_q2, i) * detail::mode(sp.lambda_h2, i) +
            detail::mode(pt.lambda_q1, i) * h1 + cfg.sigma2_r);
  }
  return acc + cfg.sigma2_1;
}

/// Harvested power eta (1 - alpha) (sum(...) + sigma_1^2), in W. The receiver noise
/// sits inside the (1 - alpha) factor, which is what makes the closed-form alpha
/// land exactly on the harvesting constraint.
inline double harvested_power(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg) {
  return cfg.eh_efficiency * (1.0 - pt.alpha) * received_power_tr1(pt, sp, cfg);
}

/// Power TR1 must cover from the harvested energy: P1 + P1^cr + P1^ct.
inline double harvest_requirement(const SpectrumPoint& pt, const NetworkConfig& cfg) {
  return pt.lambda_q1.sum() + cfg.p1_cr + cfg.p1_ct;
}

/// Energy efficiency in bits/Hz/J.
inline double energy_efficiency(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg) {
  return sum_rate(pt, sp, cfg) / consumed_power(pt, sp, cfg);
}

/// Second derivative (natural-log units) of the per-mode TR2 rate term
/// g(x) = ln(1 + x q1 h1 h2 / (sigma_2^2 + sigma_r^2 x h2)) with respect to the relay
/// eigenvalue x. Nonpositive for nonnegative inputs.
inline double relay_mode_curvature(double lambda_qr, double lambda_q1, double lambda_h1, double lambda_h2,
                                   const NetworkConfig& cfg) {
  const double s2 = cfg.sigma2_2, sr = cfg.sigma2_r, x = lambda_qr;
  const double c = lambda_q1 * lambda_h1 * lambda_h2;
  const double num = (s2 * c) * (-s2 * c - 2.0 * s2 * sr * lambda_h2 - 2.0 * sr * sr * lambda_h2 * lambda_h2 * x -
                                 2.0 * sr * c * lambda_h2 * x);
  const double den = s2 * s2 + (s2 * c + 2.0 * s2 * sr * lambda_h2) * x +
                     (lambda_h2 * lambda_h2 * sr * sr + sr * c * lambda_h2) * x * x;
  return num / (den * den);
}

/// Energy efficiency evaluated from the matrix expressions (log-determinants and
/// traces); no eigenvalue shortcut is taken.
inline double ee_matrix_form(double alpha, const PrecoderSet& prec, const ChannelRealization& ch,
                             const NetworkConfig& cfg) {
  const double d1 = cfg.sigma2_d + alpha * cfg.sigma2_1;
  const double d2 = cfg.sigma2_2;
  if (d1 <= 0.0 || d2 <= 0.0) throw std::domain_error("singular receiver noise covariance");
  const auto nr = ch.h1.rows();
  const auto n1 = ch.h1.cols();
  const auto n2 = ch.h2.cols();
  const CMatrix i_r = CMatrix::Identity(nr, nr);
  const CMatrix m = ch.h1 * prec.q1 * ch.h1.adjoint();
  const CMatrix n = ch.h2 * prec.q2 * ch.h2.adjoint();
  const CMatrix a = cfg.sigma2_r * i_r + n;
  const CMatrix b = cfg.sigma2_r * i_r + m;
  const CMatrix qr = prec.qr;
  const CMatrix x1 = ch.h1.adjoint() * qr;
  const CMatrix x2 = ch.h2.adjoint() * qr;

  const CMatrix i1 = CMatrix::Identity(n1, n1);
  const CMatrix i2 = CMatrix::Identity(n2, n2);
  const double r1 = log2_det_hpd(d1 * i1 + alpha * x1 * a * x1.adjoint()) -
                    log2_det_hpd(d1 * i1 + alpha * cfg.sigma2_r * x1 * x1.adjoint());
  const double r2 = log2_det_hpd(d2 * i2 + x2 * b * x2.adjoint()) -
                    log2_det_hpd(d2 * i2 + cfg.sigma2_r * x2 * x2.adjoint());

  const double p1 = prec.q1.trace().real();
  const double p2 = prec.q2.trace().real();
  const double pr = (qr * (m + n + cfg.sigma2_r * i_r) * qr.adjoint()).trace().real();
  const double power = p1 / cfg.xi_1 + p2 / cfg.xi_2 + pr / cfg.xi_r + cfg.pc_total;
  return 0.5 * (r1 + r2) / power;
}

/// Consumed-versus-limit bookkeeping for one constraint; slack >= 0 means satisfied.
struct ConstraintSlack {
  double value = 0.0;
  double limit = 0.0;
  double slack = 0.0;
};

struct ConstraintReport {
  static constexpr double kTolerance = 1e-8;

  ConstraintSlack power_tr1;
  ConstraintSlack power_tr2;
  ConstraintSlack power_relay;
  ConstraintSlack rate_tr1;
  ConstraintSlack rate_tr2;
  ConstraintSlack eh_balance;  // value = harvested, limit = required
  bool feasible = false;

  double min_slack() const {
    return std::min({power_tr1.slack, power_tr2.slack, power_relay.slack, rate_tr1.slack, rate_tr2.slack,
                     eh_balance.slack});
  }

  /// Name of the most violated constraint, or empty when feasible.
  std::string worst_violation() const {
    if (feasible) return {};
    const std::pair<const char*, double> all[] = {
        {"power_tr1", power_tr1.slack}, {"power_tr2", power_tr2.slack}, {"power_relay", power_relay.slack},
        {"rate_tr1", rate_tr1.slack},   {"rate_tr2", rate_tr2.slack},   {"energy_harvesting", eh_balance.slack}};
    const auto* worst = &all[0];
    for (const auto& c : all)
      if (c.second < worst->second) worst = &c;
    return worst->first;
  }
};

inline ConstraintReport check_feasibility(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg,
                                          bool with_harvesting = true) {
  ConstraintReport r;
  auto fill = [](ConstraintSlack& c, double value, double limit, bool upper) {
    c.value = value;
    c.limit = limit;
    c.slack = upper ? limit - value : value - limit;
  };
  fill(r.power_tr1, pt.lambda_q1.sum(), cfg.p1_max, true);
  fill(r.power_tr2, pt.lambda_q2.sum(), cfg.p2_max, true);
  fill(r.power_relay, relay_power(pt, sp, cfg), cfg.pr_max, true);
  fill(r.rate_tr1, rate_tr1(pt, sp, cfg), 0.5 * cfg.rt_min, false);
  fill(r.rate_tr2, rate_tr2(pt, sp, cfg), 0.5 * cfg.rt_min, false);
  if (with_harvesting) {
    fill(r.eh_balance, harvested_power(pt, sp, cfg), harvest_requirement(pt, cfg), false);
  } else {
    r.eh_balance = {0.0, 0.0, 0.0};
  }
  r.feasible = r.min_slack() >= -ConstraintReport::kTolerance;
  return r;
}

}  // namespace eerelay
