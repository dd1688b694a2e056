// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo harness: parameter sweeps with baselines, feasibility
// probability, convergence traces and the single-start vs multistart gap.
//
// Realization r uses the same channel seed at every grid value (common random
// numbers), so curves along a sweep are compared on identical channels. Work
// items are independent and written into fixed slots; the emitted CSV does not
// depend on the number of threads.

#pragma once

#include "eerelay/config.hpp"
#include "eerelay/model.hpp"
#include "eerelay/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace eerelay {

enum class PlanKind { SweepPmax, SweepRtMin, FeasibilityVsPmax, FeasibilityVsRtMin, Convergence, MultistartCompare };

enum class Baseline { Proposed, NoEH, NoRelayPrecoding, Multistart };

inline const char* to_string(PlanKind k) {
  switch (k) {
    case PlanKind::SweepPmax: return "sweep_pmax";
    case PlanKind::SweepRtMin: return "sweep_rt_min";
    case PlanKind::FeasibilityVsPmax: return "feasibility_pmax";
    case PlanKind::FeasibilityVsRtMin: return "feasibility_rt_min";
    case PlanKind::Convergence: return "convergence";
    case PlanKind::MultistartCompare: return "multistart_compare";
  }
  return "?";
}

inline const char* to_string(Baseline b) {
  switch (b) {
    case Baseline::Proposed: return "proposed";
    case Baseline::NoEH: return "no_eh";
    case Baseline::NoRelayPrecoding: return "no_relay_precoding";
    case Baseline::Multistart: return "multistart";
  }
  return "?";
}

/// Name of the swept quantity for each plan kind.
inline const char* sweep_param(PlanKind k) {
  switch (k) {
    case PlanKind::SweepPmax:
    case PlanKind::FeasibilityVsPmax: return "pmax";
    case PlanKind::SweepRtMin:
    case PlanKind::FeasibilityVsRtMin: return "rt_min";
    case PlanKind::Convergence: return "init";
    case PlanKind::MultistartCompare: return "snr";
  }
  return "?";
}

struct ExperimentPlan {
  PlanKind kind = PlanKind::SweepPmax;
  std::vector<double> grid;
  int n_realizations = 100;
  std::uint64_t master_seed = 1;
  std::vector<Baseline> baselines{Baseline::Proposed, Baseline::NoEH, Baseline::NoRelayPrecoding};
  ChannelMode mode = ChannelMode::SharedLeftUnitary;
  int multistart_k = 100;     // starts per channel for Multistart / MultistartCompare
  int convergence_inits = 10; // random starts for the Convergence plan
  int feasibility_starts = 4; // extra random starts tried by the feasibility search
  unsigned threads = 0;       // 0: hardware concurrency

  void validate() const {
    if (kind != PlanKind::Convergence && grid.empty()) throw ConfigError("plan grid is empty");
    if (n_realizations < 1) throw ConfigError("n_realizations must be at least 1");
    if (multistart_k < 1 || convergence_inits < 1 || feasibility_starts < 0)
      throw ConfigError("start counts must be positive");
  }
};

/// Applies one grid value to the network. "pmax" sets all three caps, "rt_min" the
/// rate target, "snr" the noise variance sigma^2 = P^max / snr.
inline void apply_sweep_value(NetworkConfig& cfg, PlanKind kind, double v) {
  switch (kind) {
    case PlanKind::SweepPmax:
    case PlanKind::FeasibilityVsPmax: cfg.set_power_caps(v); break;
    case PlanKind::SweepRtMin:
    case PlanKind::FeasibilityVsRtMin: cfg.rt_min = v; break;
    case PlanKind::MultistartCompare:
      if (!(v > 0.0)) throw ConfigError("snr grid values must be positive");
      cfg.set_noise(cfg.p1_max / v);
      break;
    case PlanKind::Convergence: break;
  }
}

/// Channel seed of realization r; independent of the grid value.
inline std::uint64_t realization_seed(std::uint64_t master_seed, int r) {
  return mix_seed(master_seed ^ mix_seed(static_cast<std::uint64_t>(r) + 0x5eedULL));
}

struct ExperimentRecord {
  PlanKind kind = PlanKind::SweepPmax;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  Baseline baseline = Baseline::Proposed;
  bool feasible = false;
  double ee = 0.0;
  double rate1 = 0.0;
  double rate2 = 0.0;
  double alpha = 0.0;
  int outer_iters = 0;
  int dinkelbach_iters = 0;
};

struct AggregateRow {
  double sweep_value = 0.0;
  Baseline baseline = Baseline::Proposed;
  int n_feasible = 0;
  int n_total = 0;
  double mean_ee = 0.0;  // over feasible records; NaN when none
  double ci95_ee = 0.0;  // 1.96 s / sqrt(n); 0 when n < 2
};

struct ConvergenceTrace {
  int init = 0;
  SolverTrace trace;
  double final_ee = 0.0;
  bool feasible = false;
};

struct FeasibilityRow {
  double sweep_value = 0.0;
  int n_feasible = 0;
  int n_total = 0;
  double fraction = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
  bool ergodically_infeasible = false;  // fraction < 1/2
};

struct GapRow {
  double sweep_value = 0.0;
  int n_pairs = 0;          // channels where both runs were feasible
  double median_gap = 0.0;  // median of (EE_multistart - EE_single) / EE_multistart
  double max_gap = 0.0;
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<ExperimentRecord> records;
  std::vector<AggregateRow> aggregates;
  std::vector<FeasibilityRow> feasibility;  // feasibility plans
  std::vector<ConvergenceTrace> traces;     // convergence plan
  std::vector<GapRow> gaps;                 // multistart comparison
  std::uint64_t convergence_seed = 0;
};

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// 95% Wilson score interval for k successes in n trials.
inline std::pair<double, double> wilson_interval(int k, int n, double z = 1.959963984540054) {
  if (n <= 0) return {0.0, 1.0};
  const double p = static_cast<double>(k) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ---------------------------------------------------------------------------
// Parallel execution
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `threads` workers. The first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

namespace detail {

inline const Solution& better(const Solution& a, const Solution& b) {
  if (a.feasible() != b.feasible()) return a.feasible() ? a : b;
  return b.ee > a.ee ? b : a;
}

}  // namespace detail

/// Relay fixed at lambda_qr = P_R^max / N_R; transceivers and alpha optimised.
inline Solution run_baseline_no_relay_precoding(const ChannelRealization& ch, const NetworkConfig& cfg,
                                                const SolverOptions& opts) {
  return solve(ch, cfg, opts, Scheme::no_relay_precoding());
}

/// Proposed scheme. Also started from `warm` (typically the no-relay-precoding
/// optimum, which is feasible here), keeping the better result.
inline Solution run_proposed(const ChannelRealization& ch, const NetworkConfig& cfg, const SolverOptions& opts,
                             const Solution* warm = nullptr) {
  Solution s = solve(ch, cfg, opts);
  if (warm && warm->feasible()) {
    Solution w = alternate(ch, cfg, opts, warm->point, Scheme::proposed());
    return detail::better(s, w);
  }
  return s;
}

/// No energy harvesting: alpha held at 1 - 1e-6 and the harvesting constraint dropped.
/// Also started from `warm` (typically the proposed optimum) with alpha raised.
inline Solution run_baseline_no_eh(const ChannelRealization& ch, const NetworkConfig& cfg, const SolverOptions& opts,
                                   const Solution* warm = nullptr) {
  const Scheme scheme = Scheme::no_energy_harvesting();
  Solution s = solve(ch, cfg, opts, scheme);
  if (warm && warm->feasible()) {
    SpectrumPoint init = warm->point;
    init.alpha = *scheme.fixed_alpha;
    Solution w = alternate(ch, cfg, opts, init, scheme);
    return detail::better(s, w);
  }
  return s;
}

/// Whether any feasible point is found from the default start or `extra_starts`
/// random starts; returns the first feasible repaired point.
inline std::optional<SpectrumPoint> find_feasible_point(const ChannelRealization& ch, const NetworkConfig& cfg,
                                                        const SolverOptions& opts, int extra_starts) {
  const Scheme scheme = Scheme::proposed();
  for (int k = 0; k <= extra_starts; ++k) {
    auto init = multistart_initial_point(ch.spectra, cfg, opts, k, scheme);
    if (auto p = repair_feasibility(init, ch.spectra, cfg, opts, scheme)) return p;
  }
  // The no-relay-precoding start is often feasible when the uniform ones are not.
  auto init = default_initial_point(ch.spectra, cfg, Scheme::no_relay_precoding());
  return repair_feasibility(init, ch.spectra, cfg, opts, scheme);
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

namespace detail {

inline ExperimentRecord to_record(PlanKind kind, double v, std::uint64_t seed, Baseline b, const Solution& s) {
  ExperimentRecord r;
  r.kind = kind;
  r.sweep_value = v;
  r.seed = seed;
  r.baseline = b;
  r.feasible = s.feasible();
  if (r.feasible) {
    r.ee = s.ee;
    r.rate1 = s.rate1;
    r.rate2 = s.rate2;
    r.alpha = s.point.alpha;
  }
  r.outer_iters = s.outer_iters;
  r.dinkelbach_iters = s.dinkelbach_iters;
  return r;
}

inline bool wants(const ExperimentPlan& p, Baseline b) {
  return std::find(p.baselines.begin(), p.baselines.end(), b) != p.baselines.end();
}

/// Records of one (grid value, realization) cell, in plan baseline order.
inline std::vector<ExperimentRecord> run_sweep_cell(const ExperimentPlan& plan, const NetworkConfig& cfg,
                                                    const SolverOptions& opts, double v, std::uint64_t seed) {
  const auto ch = generate_channels(cfg, seed, plan.mode);
  std::map<Baseline, Solution> sol;
  const bool need_nr = wants(plan, Baseline::NoRelayPrecoding) || wants(plan, Baseline::Proposed) ||
                       wants(plan, Baseline::NoEH);
  if (need_nr) sol[Baseline::NoRelayPrecoding] = run_baseline_no_relay_precoding(ch, cfg, opts);
  if (wants(plan, Baseline::Proposed) || wants(plan, Baseline::NoEH))
    sol[Baseline::Proposed] = run_proposed(ch, cfg, opts, &sol[Baseline::NoRelayPrecoding]);
  if (wants(plan, Baseline::NoEH)) sol[Baseline::NoEH] = run_baseline_no_eh(ch, cfg, opts, &sol[Baseline::Proposed]);
  if (wants(plan, Baseline::Multistart)) sol[Baseline::Multistart] = multistart(ch, cfg, opts, plan.multistart_k);
  std::vector<ExperimentRecord> out;
  for (Baseline b : plan.baselines) out.push_back(to_record(plan.kind, v, seed, b, sol.at(b)));
  return out;
}

inline std::vector<AggregateRow> aggregate(const std::vector<ExperimentRecord>& recs, const ExperimentPlan& plan) {
  std::vector<AggregateRow> rows;
  for (double v : plan.grid) {
    for (Baseline b : plan.baselines) {
      AggregateRow a;
      a.sweep_value = v;
      a.baseline = b;
      double sum = 0.0, sum2 = 0.0;
      for (const auto& r : recs) {
        if (r.sweep_value != v || r.baseline != b) continue;
        ++a.n_total;
        if (!r.feasible) continue;
        ++a.n_feasible;
        sum += r.ee;
      }
      if (a.n_feasible == 0) {
        a.mean_ee = std::numeric_limits<double>::quiet_NaN();
      } else {
        a.mean_ee = sum / a.n_feasible;
        for (const auto& r : recs)
          if (r.sweep_value == v && r.baseline == b && r.feasible) sum2 += (r.ee - a.mean_ee) * (r.ee - a.mean_ee);
        if (a.n_feasible >= 2) a.ci95_ee = 1.96 * std::sqrt(sum2 / (a.n_feasible - 1)) / std::sqrt(a.n_feasible);
      }
      rows.push_back(a);
    }
  }
  return rows;
}

}  // namespace detail

/// Runs a plan. Deterministic in (plan, cfg, opts); thread count does not affect results.
inline ExperimentResult run_plan(const ExperimentPlan& plan, const NetworkConfig& base, const SolverOptions& opts) {
  plan.validate();
  base.validate();
  opts.validate();
  ExperimentResult res;
  res.plan = plan;
  const auto& grid = plan.grid;
  const std::size_t nr = static_cast<std::size_t>(plan.n_realizations);

  switch (plan.kind) {
    case PlanKind::SweepPmax:
    case PlanKind::SweepRtMin: {
      if (plan.baselines.empty()) throw ConfigError("sweep needs at least one baseline");
      std::vector<std::vector<ExperimentRecord>> cells(grid.size() * nr);
      parallel_for(cells.size(), plan.threads, [&](std::size_t i) {
        const double v = grid[i / nr];
        NetworkConfig cfg = base;
        apply_sweep_value(cfg, plan.kind, v);
        cells[i] = detail::run_sweep_cell(plan, cfg, opts, v, realization_seed(plan.master_seed, int(i % nr)));
      });
      for (auto& c : cells) res.records.insert(res.records.end(), c.begin(), c.end());
      res.aggregates = detail::aggregate(res.records, plan);
      break;
    }
    case PlanKind::FeasibilityVsPmax:
    case PlanKind::FeasibilityVsRtMin: {
      ExperimentPlan p = plan;
      p.baselines = {Baseline::Proposed};
      res.plan.baselines = p.baselines;
      std::vector<ExperimentRecord> cells(grid.size() * nr);
      parallel_for(cells.size(), plan.threads, [&](std::size_t i) {
        const double v = grid[i / nr];
        NetworkConfig cfg = base;
        apply_sweep_value(cfg, plan.kind, v);
        const std::uint64_t seed = realization_seed(plan.master_seed, int(i % nr));
        const auto ch = generate_channels(cfg, seed, plan.mode);
        const auto start = find_feasible_point(ch, cfg, opts, plan.feasibility_starts);
        Solution s;
        if (start) {
          s = alternate(ch, cfg, opts, *start);
        } else {
          s.status = SolveStatus::Infeasible;
        }
        cells[i] = detail::to_record(plan.kind, v, seed, Baseline::Proposed, s);
      });
      res.records = std::move(cells);
      res.aggregates = detail::aggregate(res.records, p);
      for (const auto& a : res.aggregates) {
        FeasibilityRow f;
        f.sweep_value = a.sweep_value;
        f.n_feasible = a.n_feasible;
        f.n_total = a.n_total;
        f.fraction = a.n_total ? static_cast<double>(a.n_feasible) / a.n_total : 0.0;
        std::tie(f.wilson_lo, f.wilson_hi) = wilson_interval(a.n_feasible, a.n_total);
        f.ergodically_infeasible = f.fraction < 0.5;
        res.feasibility.push_back(f);
      }
      break;
    }
    case PlanKind::Convergence: {
      // First realization with a feasible instance; then the given number of random starts on it.
      std::optional<ChannelRealization> chosen;
      for (int r = 0; r < plan.n_realizations && !chosen; ++r) {
        auto ch = generate_channels(base, realization_seed(plan.master_seed, r), plan.mode);
        if (find_feasible_point(ch, base, opts, plan.feasibility_starts)) chosen = std::move(ch);
      }
      if (!chosen) break;
      res.convergence_seed = chosen->seed;
      const int m = plan.convergence_inits;
      res.traces.resize(static_cast<std::size_t>(m));
      std::vector<Solution> sols(static_cast<std::size_t>(m));
      parallel_for(sols.size(), plan.threads, [&](std::size_t i) {
        sols[i] = alternate(*chosen, base, opts,
                            multistart_initial_point(chosen->spectra, base, opts, int(i) + 1, Scheme::proposed()));
      });
      res.plan.grid.clear();
      res.plan.baselines = {Baseline::Proposed};
      for (std::size_t i = 0; i < sols.size(); ++i) {
        const double v = static_cast<double>(i + 1);
        res.plan.grid.push_back(v);
        res.traces[i] = {int(i) + 1, sols[i].trace, sols[i].ee, sols[i].feasible()};
        res.records.push_back(detail::to_record(plan.kind, v, chosen->seed, Baseline::Proposed, sols[i]));
      }
      res.aggregates = detail::aggregate(res.records, res.plan);
      break;
    }
    case PlanKind::MultistartCompare: {
      res.plan.baselines = {Baseline::Proposed, Baseline::Multistart};
      std::vector<std::vector<ExperimentRecord>> cells(grid.size() * nr);
      parallel_for(cells.size(), plan.threads, [&](std::size_t i) {
        const double v = grid[i / nr];
        NetworkConfig cfg = base;
        apply_sweep_value(cfg, plan.kind, v);
        const std::uint64_t seed = realization_seed(plan.master_seed, int(i % nr));
        const auto ch = generate_channels(cfg, seed, plan.mode);
        const Solution single = solve(ch, cfg, opts);
        const Solution best = multistart(ch, cfg, opts, plan.multistart_k);
        cells[i] = {detail::to_record(plan.kind, v, seed, Baseline::Proposed, single),
                    detail::to_record(plan.kind, v, seed, Baseline::Multistart, best)};
      });
      for (auto& c : cells) res.records.insert(res.records.end(), c.begin(), c.end());
      res.aggregates = detail::aggregate(res.records, res.plan);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        GapRow row;
        row.sweep_value = grid[g];
        std::vector<double> gaps;
        for (std::size_t r = 0; r < nr; ++r) {
          const auto& c = cells[g * nr + r];
          if (!c[0].feasible || !c[1].feasible || !(c[1].ee > 0.0)) continue;
          gaps.push_back((c[1].ee - c[0].ee) / c[1].ee);
        }
        row.n_pairs = static_cast<int>(gaps.size());
        row.median_gap = median(gaps);
        row.max_gap = gaps.empty() ? std::numeric_limits<double>::quiet_NaN()
                                   : *std::max_element(gaps.begin(), gaps.end());
        res.gaps.push_back(row);
      }
      break;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// CSV output
// ---------------------------------------------------------------------------

/// Fixed-format number: %.10g, "nan" for NaN.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_records_csv(std::ostream& os, const ExperimentResult& r) {
  os << "plan_kind,sweep_param,sweep_value,seed,baseline,feasible,ee_bits_per_hz_joule,rate1,rate2,alpha,"
        "outer_iters,dinkelbach_iters_total\n";
  for (const auto& x : r.records) {
    os << to_string(x.kind) << ',' << sweep_param(x.kind) << ',' << format_number(x.sweep_value) << ',' << x.seed
       << ',' << to_string(x.baseline) << ',' << (x.feasible ? 1 : 0) << ',';
    if (x.feasible) {
      os << format_number(x.ee) << ',' << format_number(x.rate1) << ',' << format_number(x.rate2) << ','
         << format_number(x.alpha);
    } else {
      os << ",,,";
    }
    os << ',' << x.outer_iters << ',' << x.dinkelbach_iters << '\n';
  }
}

inline void write_aggregate_csv(std::ostream& os, const ExperimentResult& r) {
  os << "sweep_value,baseline,n_feasible,n_total,mean_ee,ci95_ee\n";
  for (const auto& a : r.aggregates) {
    os << format_number(a.sweep_value) << ',' << to_string(a.baseline) << ',' << a.n_feasible << ',' << a.n_total
       << ',';
    if (a.n_feasible > 0) os << format_number(a.mean_ee) << ',' << format_number(a.ci95_ee);
    else os << ',';
    os << '\n';
  }
}

inline void write_feasibility_csv(std::ostream& os, const ExperimentResult& r) {
  os << "sweep_value,n_feasible,n_total,fraction,wilson_lo,wilson_hi,ergodically_infeasible\n";
  for (const auto& f : r.feasibility)
    os << format_number(f.sweep_value) << ',' << f.n_feasible << ',' << f.n_total << ',' << format_number(f.fraction)
       << ',' << format_number(f.wilson_lo) << ',' << format_number(f.wilson_hi) << ','
       << (f.ergodically_infeasible ? 1 : 0) << '\n';
}

inline void write_traces_csv(std::ostream& os, const ExperimentResult& r) {
  os << "init,iteration,ee,alpha,mu1,mu2\n";
  for (const auto& t : r.traces)
    for (const auto& row : t.trace.rows)
      os << t.init << ',' << row.iteration << ',' << format_number(row.ee) << ',' << format_number(row.alpha) << ','
         << format_number(row.mu_relay) << ',' << format_number(row.mu_transceiver) << '\n';
}

inline void write_gaps_csv(std::ostream& os, const ExperimentResult& r) {
  os << "snr,n_pairs,median_gap,max_gap\n";
  for (const auto& g : r.gaps)
    os << format_number(g.sweep_value) << ',' << g.n_pairs << ',' << format_number(g.median_gap) << ','
       << format_number(g.max_gap) << '\n';
}

// ---------------------------------------------------------------------------
// Line charts
// ---------------------------------------------------------------------------

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line chart with axes, tick labels and a legend.
inline void write_line_chart_svg(std::ostream& os, const std::vector<Series>& series, const std::string& title,
                                 const std::string& xlabel, const std::string& ylabel) {
  const double W = 640, H = 420, L = 70, R = 170, T = 40, B = 55;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n";
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", L, H - B, W - R,
                H - B);
  os << buf;
  std::snprintf(buf, sizeof buf, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", L, T, L, H - B);
  os << buf;
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + k * (x1 - x0) / 4, yv = y0 + k * (y1 - y0) / 4;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n", px(xv),
                  H - B + 16, xv);
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n", L - 6, py(yv) + 4,
                  yv);
    os << buf;
  }
  os << "<text x=\"" << (L + (W - L - R) / 2) << "\" y=\"" << (H - 12) << "\" text-anchor=\"middle\">" << xlabel
     << "</text>\n";
  os << "<text transform=\"translate(16," << (T + (H - T - B) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << ylabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(series[s].x[i]), py(series[s].y[i]));
      os << buf;
    }
    os << "\"/>\n";
    const double ly = T + 16 + 18 * static_cast<double>(s);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/>"
                  "<text x=\"%g\" y=\"%g\">",
                  W - R + 10, ly, W - R + 30, ly, c, W - R + 36, ly + 4);
    os << buf << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
}

/// Chart of the main metric of a result: mean EE per baseline, feasibility
/// fraction, or EE per iteration for convergence traces.
inline void write_result_chart(std::ostream& os, const ExperimentResult& r) {
  std::vector<Series> series;
  const PlanKind k = r.plan.kind;
  if (k == PlanKind::Convergence) {
    for (const auto& t : r.traces) {
      Series s{"init " + std::to_string(t.init), {}, {}};
      for (const auto& row : t.trace.rows) {
        s.x.push_back(row.iteration);
        s.y.push_back(row.ee);
      }
      series.push_back(std::move(s));
    }
    write_line_chart_svg(os, series, "EE per outer iteration", "iteration", "EE (bits/Hz/J)");
    return;
  }
  if (k == PlanKind::FeasibilityVsPmax || k == PlanKind::FeasibilityVsRtMin) {
    Series s{"feasible fraction", {}, {}};
    for (const auto& f : r.feasibility) {
      s.x.push_back(f.sweep_value);
      s.y.push_back(f.fraction);
    }
    series.push_back(std::move(s));
    write_line_chart_svg(os, series, "Feasibility probability", sweep_param(k), "fraction");
    return;
  }
  for (Baseline b : r.plan.baselines) {
    Series s{to_string(b), {}, {}};
    for (const auto& a : r.aggregates)
      if (a.baseline == b) {
        s.x.push_back(a.sweep_value);
        s.y.push_back(a.mean_ee);
      }
    series.push_back(std::move(s));
  }
  write_line_chart_svg(os, series, "Mean energy efficiency", sweep_param(k), "EE (bits/Hz/J)");
}

}  // namespace eerelay
