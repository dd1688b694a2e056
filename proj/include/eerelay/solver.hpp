// SPDX-License-Identifier: Apache-2.0
//
// Energy-efficiency maximisation for the SWIPT two-way relay network.
//
// With the precoder directions fixed in closed form (relay along U_H,
// transceivers along V_Hi) only eigenvalues and the power-splitting factor
// remain. They are optimised by alternation:
//   1. relay eigenvalues      (Dinkelbach, transceivers and alpha fixed)
//   2. transceiver eigenvalues (Dinkelbach, relay and alpha fixed)
//   3. alpha from the energy-harvesting equality
// Every accepted step keeps the energy efficiency nondecreasing.

#pragma once

#include "eerelay/config.hpp"
#include "eerelay/fractional.hpp"
#include "eerelay/model.hpp"
#include "eerelay/objective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

namespace eerelay {

inline constexpr double kAlphaMin = 1e-6;
/// Relative EE gain per outer round below which the stall search runs.
inline constexpr double kSlowRound = 1e-4;

/// Which parts of the problem are optimised. The proposed scheme optimises all.
struct Scheme {
  bool energy_harvesting = true;       // enforce the TR1 harvesting constraint
  bool optimize_relay = true;          // false keeps lambda_qr as given
  std::optional<double> fixed_alpha;   // skip the alpha step and hold alpha here

  static Scheme proposed() { return {}; }
  static Scheme no_energy_harvesting() { return {false, true, 1.0 - kAlphaMin}; }
  static Scheme no_relay_precoding() { return {true, false, std::nullopt}; }
  static Scheme at_alpha(double alpha) { return {true, true, alpha}; }
};

enum class SolveStatus { Converged, NotConverged, Infeasible };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NotConverged: return "not_converged";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

struct TraceRow {
  int iteration = 0;
  double ee = 0.0;
  double alpha = 0.0;
  double mu_relay = 0.0;        // final Dinkelbach ratio of step 1
  double mu_transceiver = 0.0;  // final Dinkelbach ratio of step 2
  int dinkelbach_relay = 0;
  int dinkelbach_transceiver = 0;
  ConstraintReport report;
};

struct SolverTrace {
  std::vector<TraceRow> rows;

  bool monotone(double slack = 1e-9) const {
    for (std::size_t k = 1; k < rows.size(); ++k)
      if (rows[k].ee < rows[k - 1].ee - slack) return false;
    return true;
  }
};

struct Solution {
  SpectrumPoint point;
  PrecoderSet precoders;
  double ee = 0.0;
  double rate1 = 0.0;
  double rate2 = 0.0;
  ConstraintReport report;
  SolverTrace trace;
  bool converged = false;
  SolveStatus status = SolveStatus::Infeasible;
  int outer_iters = 0;
  int dinkelbach_iters = 0;
  int newton_steps = 0;
  double kkt_residual = 0.0;  // worst inner KKT residual in the final outer iteration
  bool alpha_clamped = false;

  bool feasible() const { return status != SolveStatus::Infeasible; }
};

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Q1 = V_H1 diag(l_q1) V_H1^H, Q2 = V_H2 diag(l_q2) V_H2^H, Q_R = U_H diag(l_qr)^{1/2} U_H^H.
inline PrecoderSet assemble_precoders(const SpectrumPoint& pt, const ChannelRealization& ch) {
  const auto& s = ch.spectra;
  PrecoderSet p;
  auto sandwich = [](const CMatrix& u, const RVector& d) {
    return CMatrix(u * d.cast<cd>().asDiagonal() * u.adjoint());
  };
  p.q1 = sandwich(s.v_h1, pt.lambda_q1);
  p.q2 = sandwich(s.v_h2, pt.lambda_q2);
  p.qr = sandwich(s.u_h, pt.lambda_qr.cwiseMax(0.0).cwiseSqrt());
  p.f1 = sandwich(s.v_h1, pt.lambda_q1.cwiseMax(0.0).cwiseSqrt());
  p.f2 = sandwich(s.v_h2, pt.lambda_q2.cwiseMax(0.0).cwiseSqrt());
  p.exact = ch.shared_left();
  return p;
}

struct AlphaResult {
  double alpha = kAlphaMin;  // clamped to [kAlphaMin, 1 - kAlphaMin]
  double raw = 0.0;          // unclamped closed-form value
  bool clamped = false;
  bool eh_feasible = false;  // raw > 0: the harvest can cover TR1's consumption
};

/// alpha = 1 - (sum l_q1 + P1^cr + P1^ct) / (eta (sum l_h1 l_qr (l_q2 l_h2 + l_q1 l_h1 + s_r^2) + s_1^2)),
/// the largest alpha meeting the harvesting constraint with equality.
inline AlphaResult optimal_alpha(const RVector& lambda_q1, const RVector& lambda_q2, const RVector& lambda_qr,
                                 const ChannelSpectra& sp, const NetworkConfig& cfg) {
  SpectrumPoint pt{0.5, lambda_q1, lambda_q2, lambda_qr};
  const double need = harvest_requirement(pt, cfg);
  const double avail = cfg.eh_efficiency * received_power_tr1(pt, sp, cfg);
  AlphaResult r;
  if (!(avail > 0.0)) return r;
  r.raw = 1.0 - need / avail;
  r.eh_feasible = r.raw > 0.0;
  r.alpha = std::clamp(r.raw, kAlphaMin, 1.0 - kAlphaMin);
  r.clamped = r.alpha != r.raw;
  return r;
}

// ---------------------------------------------------------------------------
// Block subproblems
// ---------------------------------------------------------------------------

/// One alternation block as a fractional program; constraints that do not
/// depend on the block's free variables are folded into `fixed_min_slack`.
struct BlockProblem {
  fractional::FractionalProblem problem;
  double fixed_min_slack = std::numeric_limits<double>::infinity();
};

namespace detail {

inline bool depends_on_free(const fractional::ConcaveFunction& h, const fractional::FractionalProblem& p) {
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (!(p.upper(i) > p.lower(i))) continue;
    if (h.linear.size() && h.linear(i) != 0.0) return true;
    for (const auto& t : h.terms)
      if (t.var == i && t.active()) return true;
  }
  return false;
}

inline void add_constraint(BlockProblem& b, fractional::ConcaveFunction h, double scale,
                           const fractional::Vec& at) {
  if (depends_on_free(h, b.problem)) {
    b.problem.constraints.push_back(std::move(h));
    b.problem.constraint_scale.push_back(scale);
  } else {
    b.fixed_min_slack = std::min(b.fixed_min_slack, h.value(at) / scale);
  }
}

inline double harvest_scale(const NetworkConfig& cfg) {
  return std::max(cfg.p1_max + cfg.p1_cr + cfg.p1_ct + cfg.sigma2_1, 1e-9);
}
inline double cap_scale(double cap) { return std::max(cap, 1e-9); }

}  // namespace detail

/// Relay block: variables lambda_qr (length nr).
inline BlockProblem relay_subproblem(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg,
                                     const Scheme& scheme = {}) {
  using fractional::ConcaveFunction;
  using fractional::LogRatioTerm;
  const Eigen::Index m = cfg.nr;
  const double a = pt.alpha;
  const double d1 = cfg.sigma2_d + a * cfg.sigma2_1;
  const double sr = cfg.sigma2_r;

  BlockProblem b;
  auto& p = b.problem;
  p.lower = fractional::Vec::Zero(m);
  p.upper = fractional::Vec::Constant(m, cfg.pr_max > 0.0 ? fractional::kInf : 0.0);

  ConcaveFunction r1, r2;
  fractional::Vec cost(m), harvest(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double h1 = detail::mode(sp.lambda_h1, i), h2 = detail::mode(sp.lambda_h2, i);
    const double q1 = detail::mode(pt.lambda_q1, i), q2 = detail::mode(pt.lambda_q2, i);
    const auto var = static_cast<std::size_t>(i);
    r1.terms.push_back(LogRatioTerm{var, 0.5, a * q2 * h1 * h2, d1, a * sr * h1});
    r2.terms.push_back(LogRatioTerm{var, 0.5, q1 * h1 * h2, cfg.sigma2_2, sr * h2});
    cost(i) = q2 * h2 + q1 * h1 + sr;
    harvest(i) = h1 * cost(i);
  }
  p.numerator.terms = r1.terms;
  p.numerator.terms.insert(p.numerator.terms.end(), r2.terms.begin(), r2.terms.end());
  p.denominator.constant = pt.lambda_q1.sum() / cfg.xi_1 + pt.lambda_q2.sum() / cfg.xi_2 + cfg.pc_total;
  p.denominator.linear = cost / cfg.xi_r;

  const fractional::Vec at = pt.lambda_qr;
  // Transmit caps of the transceivers do not involve lambda_qr.
  b.fixed_min_slack = std::min((cfg.p1_max - pt.lambda_q1.sum()) / detail::cap_scale(cfg.p1_max),
                               (cfg.p2_max - pt.lambda_q2.sum()) / detail::cap_scale(cfg.p2_max));

  detail::add_constraint(b, ConcaveFunction{cfg.pr_max, -cost, {}, {}}, detail::cap_scale(cfg.pr_max), at);
  if (cfg.rt_min > 0.0) {
    r1.constant = -0.5 * cfg.rt_min;
    r2.constant = -0.5 * cfg.rt_min;
    detail::add_constraint(b, r1, 1.0, at);
    detail::add_constraint(b, r2, 1.0, at);
  }
  if (scheme.energy_harvesting) {
    const double k = cfg.eh_efficiency * (1.0 - a);
    ConcaveFunction eh{k * cfg.sigma2_1 - harvest_requirement(pt, cfg), k * harvest, {}, {}};
    detail::add_constraint(b, eh, detail::harvest_scale(cfg), at);
  }
  return b;
}

/// Transceiver block: variables [lambda_q1 (n1), lambda_q2 (n2)]; entries past nr are pinned to 0.
inline BlockProblem transceiver_subproblem(const SpectrumPoint& pt, const ChannelSpectra& sp,
                                           const NetworkConfig& cfg, const Scheme& scheme = {}) {
  using fractional::ConcaveFunction;
  using fractional::LogRatioTerm;
  const Eigen::Index n1 = cfg.n1, n2 = cfg.n2, nr = cfg.nr, dim = n1 + n2;
  const double a = pt.alpha;
  const double d1 = cfg.sigma2_d + a * cfg.sigma2_1;
  const double sr = cfg.sigma2_r;

  BlockProblem b;
  auto& p = b.problem;
  p.lower = fractional::Vec::Zero(dim);
  p.upper = fractional::Vec::Zero(dim);
  for (Eigen::Index i = 0; i < n1; ++i) p.upper(i) = (i < nr && cfg.p1_max > 0.0) ? fractional::kInf : 0.0;
  for (Eigen::Index i = 0; i < n2; ++i) p.upper(n1 + i) = (i < nr && cfg.p2_max > 0.0) ? fractional::kInf : 0.0;

  ConcaveFunction r1, r2;
  fractional::Vec g = fractional::Vec::Zero(dim);
  fractional::Vec cap1 = fractional::Vec::Zero(dim), cap2 = fractional::Vec::Zero(dim);
  fractional::Vec relay = fractional::Vec::Zero(dim), eh = fractional::Vec::Zero(dim);
  double relay_const = 0.0, harvest_const = cfg.sigma2_1;
  const double k = cfg.eh_efficiency * (1.0 - a);
  for (Eigen::Index i = 0; i < n1; ++i) {
    g(i) = 1.0 / cfg.xi_1;
    cap1(i) = -1.0;
    eh(i) = -1.0;
  }
  for (Eigen::Index i = 0; i < n2; ++i) {
    g(n1 + i) = 1.0 / cfg.xi_2;
    cap2(n1 + i) = -1.0;
  }
  for (Eigen::Index i = 0; i < nr; ++i) {
    const double h1 = detail::mode(sp.lambda_h1, i), h2 = detail::mode(sp.lambda_h2, i);
    const double qr = detail::mode(pt.lambda_qr, i);
    relay_const += qr * sr;
    harvest_const += h1 * qr * sr;
    if (i < n2) {
      const auto var = static_cast<std::size_t>(n1 + i);
      r1.terms.push_back(LogRatioTerm{var, 0.5, a * qr * h1 * h2, d1 + a * sr * qr * h1, 0.0});
      g(n1 + i) += qr * h2 / cfg.xi_r;
      relay(n1 + i) = -qr * h2;
      eh(n1 + i) = k * h1 * qr * h2;
    }
    if (i < n1) {
      const auto var = static_cast<std::size_t>(i);
      r2.terms.push_back(LogRatioTerm{var, 0.5, qr * h1 * h2, cfg.sigma2_2 + sr * qr * h2, 0.0});
      g(i) += qr * h1 / cfg.xi_r;
      relay(i) = -qr * h1;
      eh(i) += k * h1 * qr * h1;
    }
  }
  p.numerator.terms = r1.terms;
  p.numerator.terms.insert(p.numerator.terms.end(), r2.terms.begin(), r2.terms.end());
  p.denominator.constant = cfg.pc_total + relay_const / cfg.xi_r;
  p.denominator.linear = g;

  fractional::Vec at(dim);
  at << pt.lambda_q1, pt.lambda_q2;
  detail::add_constraint(b, ConcaveFunction{cfg.p1_max, cap1, {}, {}}, detail::cap_scale(cfg.p1_max), at);
  detail::add_constraint(b, ConcaveFunction{cfg.p2_max, cap2, {}, {}}, detail::cap_scale(cfg.p2_max), at);
  detail::add_constraint(b, ConcaveFunction{cfg.pr_max - relay_const, relay, {}, {}}, detail::cap_scale(cfg.pr_max),
                         at);
  if (cfg.rt_min > 0.0) {
    r1.constant = -0.5 * cfg.rt_min;
    r2.constant = -0.5 * cfg.rt_min;
    detail::add_constraint(b, r1, 1.0, at);
    detail::add_constraint(b, r2, 1.0, at);
  }
  if (scheme.energy_harvesting) {
    ConcaveFunction h{k * harvest_const - cfg.p1_cr - cfg.p1_ct, eh, {}, {}};
    detail::add_constraint(b, h, detail::harvest_scale(cfg), at);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Block steps
// ---------------------------------------------------------------------------

inline fractional::DinkelbachOptions dinkelbach_options(const SolverOptions& o) {
  fractional::DinkelbachOptions d;
  d.tol = o.dinkelbach_tol;
  d.max_iters = o.max_dinkelbach_iters;
  d.barrier.mu0 = o.barrier_mu0;
  d.barrier.shrink = o.barrier_shrink;
  d.barrier.gap_tol = o.inner_tol;
  return d;
}

struct BlockOutcome {
  SpectrumPoint point;  // the state after the step (unchanged when not accepted)
  fractional::DinkelbachResult info;
  bool accepted = false;
  double ee = 0.0;
};

namespace detail {

inline bool point_feasible(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg,
                           const Scheme& scheme) {
  return check_feasibility(pt, sp, cfg, scheme.energy_harvesting).feasible;
}

inline BlockOutcome finish_block(const SpectrumPoint& current, SpectrumPoint candidate,
                                 fractional::DinkelbachResult info, const ChannelSpectra& sp,
                                 const NetworkConfig& cfg, const Scheme& scheme) {
  BlockOutcome out;
  out.info = std::move(info);
  const double ee_now = energy_efficiency(current, sp, cfg);
  out.point = current;
  out.ee = ee_now;
  if (out.info.status == fractional::Status::Infeasible) return out;
  const double ee_new = energy_efficiency(candidate, sp, cfg);
  const bool ok = point_feasible(candidate, sp, cfg, scheme);
  const bool current_ok = point_feasible(current, sp, cfg, scheme);
  if (ok && (ee_new >= ee_now || !current_ok)) {
    out.point = std::move(candidate);
    out.ee = ee_new;
    out.accepted = true;
  }
  return out;
}

}  // namespace detail

/// Step 1: Dinkelbach over lambda_qr with alpha, lambda_q1, lambda_q2 held.
inline BlockOutcome optimize_relay_spectrum(const SpectrumPoint& state, const ChannelSpectra& sp,
                                            const NetworkConfig& cfg, const SolverOptions& opts,
                                            const Scheme& scheme = {}) {
  const auto block = relay_subproblem(state, sp, cfg, scheme);
  if (block.fixed_min_slack < -ConstraintReport::kTolerance) {
    fractional::DinkelbachResult r;
    r.status = fractional::Status::Infeasible;
    return detail::finish_block(state, state, r, sp, cfg, scheme);
  }
  auto r = fractional::dinkelbach(block.problem, state.lambda_qr, dinkelbach_options(opts));
  SpectrumPoint cand = state;
  cand.lambda_qr = r.x.cwiseMax(0.0);
  return detail::finish_block(state, std::move(cand), std::move(r), sp, cfg, scheme);
}

/// Step 2: joint Dinkelbach over (lambda_q1, lambda_q2) with alpha and lambda_qr held.
inline BlockOutcome optimize_transceiver_spectra(const SpectrumPoint& state, const ChannelSpectra& sp,
                                                 const NetworkConfig& cfg, const SolverOptions& opts,
                                                 const Scheme& scheme = {}) {
  const auto block = transceiver_subproblem(state, sp, cfg, scheme);
  if (block.fixed_min_slack < -ConstraintReport::kTolerance) {
    fractional::DinkelbachResult r;
    r.status = fractional::Status::Infeasible;
    return detail::finish_block(state, state, r, sp, cfg, scheme);
  }
  fractional::Vec start(cfg.n1 + cfg.n2);
  start << state.lambda_q1, state.lambda_q2;
  auto r = fractional::dinkelbach(block.problem, start, dinkelbach_options(opts));
  SpectrumPoint cand = state;
  cand.lambda_q1 = r.x.head(cfg.n1).cwiseMax(0.0);
  cand.lambda_q2 = r.x.tail(cfg.n2).cwiseMax(0.0);
  return detail::finish_block(state, std::move(cand), std::move(r), sp, cfg, scheme);
}

// ---------------------------------------------------------------------------
// Initial points and feasibility repair
// ---------------------------------------------------------------------------

namespace detail {

inline void set_alpha_from_closed_form(SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg,
                                       const Scheme& scheme) {
  if (scheme.fixed_alpha) {
    pt.alpha = *scheme.fixed_alpha;
    return;
  }
  const auto a = optimal_alpha(pt.lambda_q1, pt.lambda_q2, pt.lambda_qr, sp, cfg);
  pt.alpha = a.eh_feasible ? a.alpha : 0.5;
}

/// Scales lambda_qr so that the relay spends at most `fraction` of its cap.
inline void fit_relay_power(SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg, double fraction) {
  const double pr = relay_power(pt, sp, cfg);
  if (pr > fraction * cfg.pr_max && pr > 0.0) pt.lambda_qr *= fraction * cfg.pr_max / pr;
}

}  // namespace detail

/// Half-power uniform start: lambda = P^max / (2 n) per node, relay trimmed to
/// half its cap if needed, alpha from the closed form. Without relay
/// optimisation the relay holds lambda_qr = P_R^max / N_R.
inline SpectrumPoint default_initial_point(const ChannelSpectra& sp, const NetworkConfig& cfg,
                                           const Scheme& scheme = {}) {
  SpectrumPoint pt;
  pt.lambda_q1 = RVector::Constant(cfg.n1, cfg.p1_max / (2.0 * cfg.n1));
  pt.lambda_q2 = RVector::Constant(cfg.n2, cfg.p2_max / (2.0 * cfg.n2));
  for (Eigen::Index i = cfg.nr; i < cfg.n1; ++i) pt.lambda_q1(i) = 0.0;
  for (Eigen::Index i = cfg.nr; i < cfg.n2; ++i) pt.lambda_q2(i) = 0.0;
  if (scheme.optimize_relay) {
    pt.lambda_qr = RVector::Constant(cfg.nr, cfg.pr_max / (2.0 * cfg.nr));
    detail::fit_relay_power(pt, sp, cfg, 0.5);
  } else {
    pt.lambda_qr = RVector::Constant(cfg.nr, cfg.pr_max / cfg.nr);
  }
  detail::set_alpha_from_closed_form(pt, sp, cfg, scheme);
  return pt;
}

/// Random start: random directions on the simplex with random total powers.
inline SpectrumPoint random_initial_point(const ChannelSpectra& sp, const NetworkConfig& cfg, Rng& rng,
                                          const Scheme& scheme = {}) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](int n, double total) {
    RVector v = RVector::Zero(n);
    for (int i = 0; i < std::min(n, cfg.nr); ++i) v(i) = -std::log(1.0 - u(rng));  // Exp(1): uniform on simplex
    const double s = v.sum();
    if (s > 0.0) v *= total / s;
    return v;
  };
  SpectrumPoint pt;
  pt.lambda_q1 = draw(cfg.n1, (0.05 + 0.95 * u(rng)) * cfg.p1_max);
  pt.lambda_q2 = draw(cfg.n2, (0.05 + 0.95 * u(rng)) * cfg.p2_max);
  if (scheme.optimize_relay) {
    pt.lambda_qr = draw(cfg.nr, 1.0);
    const double frac = 0.05 + 0.95 * u(rng);
    const double pr = relay_power(pt, sp, cfg);
    if (pr > 0.0) pt.lambda_qr *= frac * cfg.pr_max / pr;
  } else {
    pt.lambda_qr = RVector::Constant(cfg.nr, cfg.pr_max / cfg.nr);
  }
  detail::set_alpha_from_closed_form(pt, sp, cfg, scheme);
  return pt;
}

namespace detail {

/// Smallest constraint slack, each normalised by the same scales the block phase-I uses.
inline double normalized_min_slack(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg,
                                   const Scheme& scheme) {
  const auto r = check_feasibility(pt, sp, cfg, scheme.energy_harvesting);
  double m = std::min({r.power_tr1.slack / cap_scale(cfg.p1_max), r.power_tr2.slack / cap_scale(cfg.p2_max),
                       r.power_relay.slack / cap_scale(cfg.pr_max)});
  if (cfg.rt_min > 0.0) m = std::min({m, r.rate_tr1.slack, r.rate_tr2.slack});
  if (scheme.energy_harvesting) m = std::min(m, r.eh_balance.slack / harvest_scale(cfg));
  return m;
}

/// Picks alpha to balance the harvesting slack (falls with alpha) against the TR1
/// rate slack (rises with alpha).
inline void balance_alpha(SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg,
                          const Scheme& scheme) {
  if (scheme.fixed_alpha) {
    pt.alpha = *scheme.fixed_alpha;
    return;
  }
  if (!scheme.energy_harvesting) {
    pt.alpha = 1.0 - kAlphaMin;
    return;
  }
  const double need = harvest_requirement(pt, cfg);
  const double avail = cfg.eh_efficiency * received_power_tr1(pt, sp, cfg);
  const double hs = harvest_scale(cfg);
  if (cfg.rt_min <= 0.0) {
    const double raw = avail > 0.0 ? 1.0 - need / avail : 0.0;
    pt.alpha = raw > 0.0 ? std::clamp(0.5 * raw, kAlphaMin, 1.0 - kAlphaMin) : kAlphaMin;
    return;
  }
  auto gap = [&](double a) {
    SpectrumPoint t = pt;
    t.alpha = a;
    const double eh = ((1.0 - a) * avail - need) / hs;
    const double r1 = rate_tr1(t, sp, cfg) - 0.5 * cfg.rt_min;
    return eh - r1;
  };
  double lo = kAlphaMin, hi = 1.0 - kAlphaMin;
  if (gap(lo) <= 0.0) {
    pt.alpha = lo;
    return;
  }
  if (gap(hi) >= 0.0) {
    pt.alpha = hi;
    return;
  }
  for (int k = 0; k < 60; ++k) {
    const double mid = 0.5 * (lo + hi);
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  pt.alpha = 0.5 * (lo + hi);
}

}  // namespace detail

/// Feasibility repair (phase I of the whole problem): block-wise maximisation of
/// the smallest normalised slack, alternating alpha balancing, transceiver and
/// relay blocks. Returns a feasible point or nothing.
inline std::optional<SpectrumPoint> repair_feasibility(SpectrumPoint pt, const ChannelSpectra& sp,
                                                       const NetworkConfig& cfg, const SolverOptions& opts,
                                                       const Scheme& scheme = {}) {
  pt.lambda_q1 = pt.lambda_q1.cwiseMax(0.0);
  pt.lambda_q2 = pt.lambda_q2.cwiseMax(0.0);
  pt.lambda_qr = pt.lambda_qr.cwiseMax(0.0);
  if (scheme.fixed_alpha) pt.alpha = *scheme.fixed_alpha;
  if (detail::point_feasible(pt, sp, cfg, scheme)) return pt;

  const auto bopt = dinkelbach_options(opts).barrier;
  double best = detail::normalized_min_slack(pt, sp, cfg, scheme);
  int stalls = 0;
  for (int round = 0; round < 30 && stalls < 3; ++round) {
    detail::balance_alpha(pt, sp, cfg, scheme);
    if (detail::point_feasible(pt, sp, cfg, scheme)) return pt;

    {
      const auto block = transceiver_subproblem(pt, sp, cfg, scheme);
      fractional::Vec start(cfg.n1 + cfg.n2);
      start << pt.lambda_q1, pt.lambda_q2;
      const auto r = fractional::find_interior(block.problem, start, bopt, true);
      SpectrumPoint cand = pt;
      cand.lambda_q1 = r.x.head(cfg.n1).cwiseMax(0.0);
      cand.lambda_q2 = r.x.tail(cfg.n2).cwiseMax(0.0);
      if (detail::normalized_min_slack(cand, sp, cfg, scheme) >= detail::normalized_min_slack(pt, sp, cfg, scheme))
        pt = cand;
      if (detail::point_feasible(pt, sp, cfg, scheme)) return pt;
    }
    if (scheme.optimize_relay) {
      detail::balance_alpha(pt, sp, cfg, scheme);
      const auto block = relay_subproblem(pt, sp, cfg, scheme);
      const auto r = fractional::find_interior(block.problem, pt.lambda_qr, bopt, true);
      SpectrumPoint cand = pt;
      cand.lambda_qr = r.x.cwiseMax(0.0);
      if (detail::normalized_min_slack(cand, sp, cfg, scheme) >= detail::normalized_min_slack(pt, sp, cfg, scheme))
        pt = cand;
      if (detail::point_feasible(pt, sp, cfg, scheme)) return pt;
    }
    const double now = detail::normalized_min_slack(pt, sp, cfg, scheme);
    stalls = now > best + 1e-9 ? 0 : stalls + 1;
    best = std::max(best, now);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Alternating optimisation
// ---------------------------------------------------------------------------

namespace detail {

inline TraceRow make_row(int it, const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg,
                         const Scheme& scheme, double mu1, double mu2, int d1, int d2) {
  TraceRow row;
  row.iteration = it;
  row.ee = energy_efficiency(pt, sp, cfg);
  row.alpha = pt.alpha;
  row.mu_relay = mu1;
  row.mu_transceiver = mu2;
  row.dinkelbach_relay = d1;
  row.dinkelbach_transceiver = d2;
  row.report = check_feasibility(pt, sp, cfg, scheme.energy_harvesting);
  return row;
}

inline Solution finalize(const SpectrumPoint& pt, const ChannelRealization& ch, const NetworkConfig& cfg,
                         const Scheme& scheme) {
  Solution s;
  s.point = pt;
  s.precoders = assemble_precoders(pt, ch);
  s.ee = energy_efficiency(pt, ch.spectra, cfg);
  s.rate1 = rate_tr1(pt, ch.spectra, cfg);
  s.rate2 = rate_tr2(pt, ch.spectra, cfg);
  s.report = check_feasibility(pt, ch.spectra, cfg, scheme.energy_harvesting);
  return s;
}

/// Reduced coordinates used when the block iteration stalls: lambda_q1, lambda_q2
/// and the relay output power per mode, p_i = lambda_qr_i (lambda_h2_i lambda_q2_i
/// + lambda_h1_i lambda_q1_i + sigma_R^2), with alpha back on its closed form.
/// In these coordinates the harvested power depends on p alone, so moves that
/// trade TR2 power for relay gain no longer fight the harvesting constraint.
struct ReducedMap {
  const ChannelSpectra& sp;
  const NetworkConfig& cfg;
  const Scheme& scheme;
  SpectrumPoint base;

  int size() const { return cfg.n1 + cfg.n2 + (scheme.optimize_relay ? cfg.nr : 0); }

  double relay_input(const SpectrumPoint& pt, Eigen::Index i) const {
    return mode(pt.lambda_q2, i) * mode(sp.lambda_h2, i) + mode(pt.lambda_q1, i) * mode(sp.lambda_h1, i) +
           cfg.sigma2_r;
  }

  fractional::Vec encode(const SpectrumPoint& pt) const {
    fractional::Vec z(size());
    z.head(cfg.n1) = pt.lambda_q1;
    z.segment(cfg.n1, cfg.n2) = pt.lambda_q2;
    if (scheme.optimize_relay)
      for (Eigen::Index i = 0; i < cfg.nr; ++i) z(cfg.n1 + cfg.n2 + i) = pt.lambda_qr(i) * relay_input(pt, i);
    return z;
  }

  std::optional<SpectrumPoint> decode(const fractional::Vec& z) const {
    SpectrumPoint pt = base;
    pt.lambda_q1 = z.head(cfg.n1);
    pt.lambda_q2 = z.segment(cfg.n1, cfg.n2);
    if (scheme.optimize_relay)
      for (Eigen::Index i = 0; i < cfg.nr; ++i) {
        const double in = relay_input(pt, i);
        pt.lambda_qr(i) = in > 0.0 ? z(cfg.n1 + cfg.n2 + i) / in : 0.0;
      }
    if (scheme.fixed_alpha) {
      pt.alpha = *scheme.fixed_alpha;
    } else {
      const auto a = optimal_alpha(pt.lambda_q1, pt.lambda_q2, pt.lambda_qr, sp, cfg);
      if (!a.eh_feasible) return std::nullopt;
      pt.alpha = a.alpha;
    }
    if (!point_feasible(pt, sp, cfg, scheme)) return std::nullopt;
    return pt;
  }

  /// Coordinates with a zero cap or without a matching relay mode never move.
  bool frozen(Eigen::Index k) const {
    const Eigen::Index mode_index = k < cfg.n1 ? k : (k < cfg.n1 + cfg.n2 ? k - cfg.n1 : k - cfg.n1 - cfg.n2);
    return scale(k) <= 0.0 || mode_index >= cfg.nr;
  }

  double scale(Eigen::Index k) const {
    if (k < cfg.n1) return cfg.p1_max;
    if (k < cfg.n1 + cfg.n2) return cfg.p2_max;
    return cfg.pr_max;
  }
};

/// Compass search in the reduced coordinates from `z`, which must decode. Returns
/// the final coordinates and EE.
inline std::pair<fractional::Vec, double> compass_search(const ReducedMap& map, fractional::Vec z, double ee,
                                                         int max_evals) {
  double h = 0.05;
  int evals = 0;
  while (h > 1e-7 && evals < max_evals) {
    bool moved = false;
    for (Eigen::Index k = 0; k < z.size() && !moved; ++k) {
      if (map.frozen(k)) continue;
      const double step = h * map.scale(k);
      for (double sgn : {1.0, -1.0}) {
        fractional::Vec trial = z;
        trial(k) = std::max(0.0, trial(k) + sgn * step);
        if (trial(k) == z(k)) continue;
        ++evals;
        const auto cand = map.decode(trial);
        if (!cand) continue;
        const double e = energy_efficiency(*cand, map.sp, map.cfg);
        if (e > ee) {
          ee = e;
          z = std::move(trial);
          moved = true;
          break;
        }
      }
    }
    if (!moved) h *= 0.5;
  }
  return {std::move(z), ee};
}

/// Local search used when the block iteration stalls: compass search, then jumps
/// that switch off one coordinate or one whole mode, or shrink one node's power,
/// each followed by another compass search. Returns a point whose EE beats the
/// input by more than alt_tol (relative), or nothing.
inline std::optional<SpectrumPoint> reduced_search(const SpectrumPoint& pt, const ChannelSpectra& sp,
                                                   const NetworkConfig& cfg, const SolverOptions& opts,
                                                   const Scheme& scheme) {
  const ReducedMap map{sp, cfg, scheme, pt};
  const double ee0 = energy_efficiency(pt, sp, cfg);
  auto [z, best] = compass_search(map, map.encode(pt), ee0, 20000);

  const Eigen::Index n1 = cfg.n1, n2 = cfg.n2, dim = z.size();
  for (int round = 0; round < 4; ++round) {
    std::vector<fractional::Vec> jumps;
    for (Eigen::Index k = 0; k < dim; ++k)
      if (z(k) > 0.0) {
        fractional::Vec j = z;
        j(k) = 0.0;
        jumps.push_back(std::move(j));
      }
    for (Eigen::Index i = 0; i < cfg.nr; ++i) {
      fractional::Vec j = z;
      if (i < n1) j(i) = 0.0;
      if (i < n2) j(n1 + i) = 0.0;
      if (n1 + n2 + i < dim) j(n1 + n2 + i) = 0.0;
      if (j != z) jumps.push_back(std::move(j));
    }
    const std::pair<Eigen::Index, Eigen::Index> blocks[] = {{0, n1}, {n1, n2}, {n1 + n2, dim - n1 - n2}};
    for (const auto& [start, len] : blocks)
      for (double f : {0.5, 0.25}) {
        if (len == 0) continue;
        fractional::Vec j = z;
        j.segment(start, len) *= f;
        jumps.push_back(std::move(j));
      }

    bool improved = false;
    for (const auto& j : jumps) {
      const auto cand = map.decode(j);
      if (!cand) continue;
      auto [zj, ej] = compass_search(map, j, energy_efficiency(*cand, sp, cfg), 20000);
      if (ej > best) {
        best = ej;
        z = std::move(zj);
        improved = true;
      }
    }
    if (!improved) break;
  }
  if (best > ee0 + opts.alt_tol * std::max(std::abs(ee0), 1e-300)) return map.decode(z);
  return std::nullopt;
}

}  // namespace detail

/// Alternating optimisation from `init` (repaired first if infeasible).
inline Solution alternate(const ChannelRealization& ch, const NetworkConfig& cfg, const SolverOptions& opts,
                          const SpectrumPoint& init, const Scheme& scheme = {}) {
  const auto& sp = ch.spectra;
  auto start = repair_feasibility(init, sp, cfg, opts, scheme);
  if (!start) {
    Solution s = detail::finalize(init, ch, cfg, scheme);
    s.status = SolveStatus::Infeasible;
    return s;
  }
  SpectrumPoint pt = *start;
  double ee = energy_efficiency(pt, sp, cfg);
  SolverTrace trace;
  trace.rows.push_back(detail::make_row(0, pt, sp, cfg, scheme, ee, ee, 0, 0));

  int dinkelbach_total = 0, newton_total = 0, outer = 0;
  bool converged = false;
  bool clamped = false;
  double kkt = 0.0;
  for (int n = 1; n <= opts.max_outer_iters; ++n) {
    outer = n;
    const double ee_prev = ee;
    double mu1 = ee, mu2 = ee;
    int d1 = 0, d2 = 0;
    kkt = 0.0;

    if (scheme.optimize_relay) {
      auto step = optimize_relay_spectrum(pt, sp, cfg, opts, scheme);
      d1 = step.info.iterations;
      newton_total += step.info.newton_steps;
      if (step.accepted) {
        pt = std::move(step.point);
        ee = step.ee;
        kkt = std::max(kkt, step.info.kkt_residual);
      }
      mu1 = ee;
    }
    {
      auto step = optimize_transceiver_spectra(pt, sp, cfg, opts, scheme);
      d2 = step.info.iterations;
      newton_total += step.info.newton_steps;
      if (step.accepted) {
        pt = std::move(step.point);
        ee = step.ee;
        kkt = std::max(kkt, step.info.kkt_residual);
      }
      mu2 = ee;
    }
    if (!scheme.fixed_alpha) {
      const auto a = optimal_alpha(pt.lambda_q1, pt.lambda_q2, pt.lambda_qr, sp, cfg);
      if (a.eh_feasible) {
        SpectrumPoint cand = pt;
        cand.alpha = a.alpha;
        const double ee_new = energy_efficiency(cand, sp, cfg);
        if (detail::point_feasible(cand, sp, cfg, scheme) && ee_new >= ee) {
          pt = cand;
          ee = ee_new;
          clamped = a.clamped;
        }
      }
    }
    dinkelbach_total += d1 + d2;
    // Slow rounds mean the blocks are crawling along the harvesting constraint;
    // hand over to the reduced-coordinate search before declaring convergence.
    const double change = std::abs(ee - ee_prev) / std::max(std::abs(ee_prev), 1e-300);
    if (change <= kSlowRound) {
      if (auto moved = detail::reduced_search(pt, sp, cfg, opts, scheme)) {
        pt = std::move(*moved);
        ee = energy_efficiency(pt, sp, cfg);
        trace.rows.push_back(detail::make_row(n, pt, sp, cfg, scheme, mu1, mu2, d1, d2));
        continue;
      }
    }
    trace.rows.push_back(detail::make_row(n, pt, sp, cfg, scheme, mu1, mu2, d1, d2));
    if (change <= opts.alt_tol) {
      converged = true;
      break;
    }
  }

  Solution s = detail::finalize(pt, ch, cfg, scheme);
  s.trace = std::move(trace);
  s.converged = converged && s.report.feasible;
  s.status = s.converged ? SolveStatus::Converged : SolveStatus::NotConverged;
  s.outer_iters = outer;
  s.dinkelbach_iters = dinkelbach_total;
  s.newton_steps = newton_total;
  s.kkt_residual = kkt;
  s.alpha_clamped = clamped;
  return s;
}

/// Alternation from the default half-power start.
inline Solution solve(const ChannelRealization& ch, const NetworkConfig& cfg, const SolverOptions& opts,
                      const Scheme& scheme = {}) {
  return alternate(ch, cfg, opts, default_initial_point(ch.spectra, cfg, scheme), scheme);
}

/// Start k of a multistart run: k = 0 is the default start, k >= 1 are random
/// starts drawn from (opts.rng_seed, k) only, so the start sets are nested in k.
inline SpectrumPoint multistart_initial_point(const ChannelSpectra& sp, const NetworkConfig& cfg,
                                              const SolverOptions& opts, int k, const Scheme& scheme = {}) {
  if (k == 0) return default_initial_point(sp, cfg, scheme);
  Rng rng(mix_seed(mix_seed(opts.rng_seed) ^ static_cast<std::uint64_t>(k)));
  return random_initial_point(sp, cfg, rng, scheme);
}

/// Best of `k` alternations (by EE, among feasible runs).
inline Solution multistart(const ChannelRealization& ch, const NetworkConfig& cfg, const SolverOptions& opts, int k,
                           const Scheme& scheme = {}) {
  if (k < 1) throw std::invalid_argument("multistart needs k >= 1");
  std::optional<Solution> best;
  Solution first;
  for (int i = 0; i < k; ++i) {
    Solution s = alternate(ch, cfg, opts, multistart_initial_point(ch.spectra, cfg, opts, i, scheme), scheme);
    if (i == 0) first = s;
    if (!s.feasible()) continue;
    if (!best || s.ee > best->ee) best = std::move(s);
  }
  return best ? *best : first;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Sum-rate numerator with the "+1" dropped inside every log (high-SNR surrogate).
/// Modes with a zero eigenvalue are skipped.
inline double high_snr_numerator(const SpectrumPoint& pt, const ChannelSpectra& sp, const NetworkConfig& cfg) {
  const double a = pt.alpha;
  const double d1 = cfg.sigma2_d + a * cfg.sigma2_1;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < cfg.nr; ++i) {
    const double qr = detail::mode(pt.lambda_qr, i), h1 = detail::mode(sp.lambda_h1, i);
    const double h2 = detail::mode(sp.lambda_h2, i), q1 = detail::mode(pt.lambda_q1, i);
    const double q2 = detail::mode(pt.lambda_q2, i);
    if (qr <= 0.0 || h1 <= 0.0 || h2 <= 0.0) continue;
    if (q2 > 0.0) acc += std::log2(a * qr * h1 * h2 / (d1 + a * cfg.sigma2_r * qr * h1)) + std::log2(q2);
    if (q1 > 0.0) acc += std::log2(qr * h1 * h2 / (cfg.sigma2_2 + cfg.sigma2_r * qr * h2)) + std::log2(q1);
  }
  return 0.5 * acc;
}

struct MappingEntry {
  double alpha = 0.0;
  bool feasible = false;
  double mapped = 0.0;             // M(alpha)
  double sum_rate = 0.0;           // exact numerator at the eigenvalue optimum
  double surrogate_sum_rate = 0.0; // high-SNR numerator at the same point
};

struct MappingReport {
  std::vector<MappingEntry> entries;  // sorted by alpha
  double beta = 1.0;
  int nonnegativity_violations = 0;
  int monotonicity_violations = 0;
  double worst_monotonicity = 0.0;    // most negative M(a') - M(a) over a' > a
  int scalability_violations = 0;
  double worst_scalability = 0.0;     // most negative beta M(a) - M(beta a)
  std::vector<double> scalability_gaps;  // beta M(a) - M(beta a) per feasible entry with beta a < 1
};

/// The alpha-to-alpha map of one alternation round: optimise all eigenvalues at
/// fixed alpha, then apply the closed-form alpha. Returns nothing if the fixed-alpha
/// problem is infeasible.
inline std::optional<MappingEntry> evaluate_mapping(double alpha, const ChannelRealization& ch,
                                                    const NetworkConfig& cfg, const SolverOptions& opts) {
  const Scheme scheme = Scheme::at_alpha(alpha);
  const Solution s = solve(ch, cfg, opts, scheme);
  MappingEntry e;
  e.alpha = alpha;
  if (!s.feasible()) return std::nullopt;
  const auto a = optimal_alpha(s.point.lambda_q1, s.point.lambda_q2, s.point.lambda_qr, ch.spectra, cfg);
  e.feasible = true;
  e.mapped = a.alpha;
  e.sum_rate = s.rate1 + s.rate2;
  e.surrogate_sum_rate = high_snr_numerator(s.point, ch.spectra, cfg);
  return e;
}

/// Checks positivity, monotonicity and scalability of the alpha map on a grid.
/// Informational: the properties are only guaranteed at high SNR.
inline MappingReport mapping_diagnostics(const ChannelRealization& ch, const NetworkConfig& cfg,
                                         const SolverOptions& opts, std::vector<double> alphas, double beta,
                                         double tol = 1e-9) {
  std::sort(alphas.begin(), alphas.end());
  std::map<double, std::optional<MappingEntry>> cache;
  auto eval = [&](double a) -> const std::optional<MappingEntry>& {
    auto it = cache.find(a);
    if (it == cache.end()) it = cache.emplace(a, evaluate_mapping(a, ch, cfg, opts)).first;
    return it->second;
  };
  MappingReport rep;
  rep.beta = beta;
  for (double a : alphas) {
    const auto& e = eval(a);
    MappingEntry entry = e ? *e : MappingEntry{a, false, 0.0, 0.0, 0.0};
    rep.entries.push_back(entry);
    if (entry.feasible && entry.mapped < 0.0) ++rep.nonnegativity_violations;
  }
  const MappingEntry* prev = nullptr;
  for (const auto& e : rep.entries) {
    if (!e.feasible) continue;
    if (prev && e.alpha > prev->alpha) {
      const double d = e.mapped - prev->mapped;
      if (d < -tol) {
        ++rep.monotonicity_violations;
        rep.worst_monotonicity = std::min(rep.worst_monotonicity, d);
      }
    }
    prev = &e;
  }
  for (const auto& e : rep.entries) {
    if (!e.feasible || beta * e.alpha >= 1.0 - kAlphaMin) continue;
    const auto& scaled = eval(beta * e.alpha);
    if (!scaled) continue;
    const double gap = beta * e.mapped - scaled->mapped;
    rep.scalability_gaps.push_back(gap);
    if (gap < -tol) {
      ++rep.scalability_violations;
      rep.worst_scalability = std::min(rep.worst_scalability, gap);
    }
  }
  return rep;
}

/// iteration, ee, alpha, mu1, mu2, dinkelbach iterations and all six slacks.
inline void write_trace_csv(std::ostream& os, const SolverTrace& trace, bool header = true) {
  if (header)
    os << "iteration,ee,alpha,mu1,mu2,dinkelbach_relay,dinkelbach_transceiver,slack_p1,slack_p2,slack_pr,"
          "slack_r1,slack_r2,slack_eh\n";
  char buf[512];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  r.iteration, r.ee, r.alpha, r.mu_relay, r.mu_transceiver, r.dinkelbach_relay,
                  r.dinkelbach_transceiver, r.report.power_tr1.slack, r.report.power_tr2.slack,
                  r.report.power_relay.slack, r.report.rate_tr1.slack, r.report.rate_tr2.slack,
                  r.report.eh_balance.slack);
    os << buf;
  }
}

}  // namespace eerelay
