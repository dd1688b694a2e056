// SPDX-License-Identifier: Apache-2.0

#include "eerelay/experiments.hpp"

#include <catch_amalgamated.hpp>

#include <atomic>
#include <sstream>

using namespace eerelay;
using Catch::Approx;

namespace {

std::string all_csv(const ExperimentResult& r) {
  std::ostringstream os;
  write_records_csv(os, r);
  write_aggregate_csv(os, r);
  write_feasibility_csv(os, r);
  write_traces_csv(os, r);
  write_gaps_csv(os, r);
  return os.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("Wilson interval") {
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == Approx(0.4038).margin(1e-4));
  CHECK(hi == Approx(0.5962).margin(1e-4));
  const auto [lo0, hi0] = wilson_interval(0, 20);
  CHECK(lo0 == 0.0);
  CHECK(hi0 == Approx(0.1611).margin(1e-4));
  const auto [lo1, hi1] = wilson_interval(20, 20);
  CHECK(hi1 == Approx(1.0).margin(1e-12));
  CHECK(lo1 == Approx(0.8389).margin(1e-4));
}

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(8, 3, [](std::size_t i) {
                    if (i == 5) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("realization seeds do not depend on the grid value") {
  CHECK(realization_seed(1, 0) == realization_seed(1, 0));
  CHECK(realization_seed(1, 0) != realization_seed(1, 1));
  CHECK(realization_seed(1, 0) != realization_seed(2, 0));
  NetworkConfig c;
  apply_sweep_value(c, PlanKind::MultistartCompare, 40.0);
  CHECK(c.sigma2_r == Approx(8.0 / 40.0));
  CHECK_THROWS_AS(apply_sweep_value(c, PlanKind::MultistartCompare, 0.0), ConfigError);
  apply_sweep_value(c, PlanKind::SweepPmax, 3.0);
  CHECK(c.pr_max == 3.0);
}

TEST_CASE("a single realization aggregates to itself") {
  ExperimentPlan p;
  p.grid = {8.0};
  p.n_realizations = 1;
  p.threads = 1;
  const auto r = run_plan(p, NetworkConfig{}, SolverOptions{});
  REQUIRE(r.records.size() == 3);
  REQUIRE(r.aggregates.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.aggregates[i].baseline == r.records[i].baseline);
    CHECK(r.aggregates[i].n_total == 1);
    if (r.records[i].feasible) {
      CHECK(r.aggregates[i].mean_ee == r.records[i].ee);
      CHECK(r.aggregates[i].ci95_ee == 0.0);
    }
  }
}

TEST_CASE("small sweep: ordering, dominance and CSV layout") {
  ExperimentPlan p;
  p.grid = {2.0, 8.0};
  p.n_realizations = 6;
  p.master_seed = 3;
  const auto r = run_plan(p, NetworkConfig{}, SolverOptions{});
  REQUIRE(r.records.size() == 2 * 6 * 3);
  REQUIRE(r.aggregates.size() == 2 * 3);
  for (std::size_t i = 0; i < r.records.size(); i += 3) {
    const auto& prop = r.records[i];
    const auto& noeh = r.records[i + 1];
    const auto& nrp = r.records[i + 2];
    REQUIRE(prop.baseline == Baseline::Proposed);
    REQUIRE(noeh.baseline == Baseline::NoEH);
    REQUIRE(nrp.baseline == Baseline::NoRelayPrecoding);
    if (prop.feasible) {
      CHECK(noeh.feasible);
      CHECK(noeh.ee >= prop.ee - 1e-6);
    }
    if (nrp.feasible) {
      CHECK(prop.feasible);
      CHECK(prop.ee >= nrp.ee - 1e-6);
    }
  }
  std::ostringstream rec, agg;
  write_records_csv(rec, r);
  write_aggregate_csv(agg, r);
  CHECK(first_line(rec.str()) ==
        "plan_kind,sweep_param,sweep_value,seed,baseline,feasible,ee_bits_per_hz_joule,rate1,rate2,alpha,"
        "outer_iters,dinkelbach_iters_total");
  CHECK(first_line(agg.str()) == "sweep_value,baseline,n_feasible,n_total,mean_ee,ci95_ee");
  const std::string agg_text = agg.str();
  CHECK(std::count(agg_text.begin(), agg_text.end(), '\n') == 7);
}

TEST_CASE("output bytes do not depend on threads or repetition") {
  ExperimentPlan p;
  p.grid = {4.0, 8.0};
  p.n_realizations = 4;
  p.master_seed = 11;
  p.threads = 1;
  const auto a = all_csv(run_plan(p, NetworkConfig{}, SolverOptions{}));
  const auto b = all_csv(run_plan(p, NetworkConfig{}, SolverOptions{}));
  p.threads = 4;
  const auto c = all_csv(run_plan(p, NetworkConfig{}, SolverOptions{}));
  CHECK(a == b);
  CHECK(a == c);
  p.master_seed = 12;
  CHECK(all_csv(run_plan(p, NetworkConfig{}, SolverOptions{})) != a);
}

TEST_CASE("zero rate target without circuit drain is always feasible") {
  NetworkConfig c;
  c.rt_min = 0.0;
  c.p1_ct = c.p1_cr = 0.0;
  ExperimentPlan p;
  p.kind = PlanKind::FeasibilityVsPmax;
  p.grid = {2.0, 8.0};
  p.n_realizations = 10;
  const auto r = run_plan(p, c, SolverOptions{});
  REQUIRE(r.feasibility.size() == 2);
  for (const auto& f : r.feasibility) {
    CHECK(f.fraction == 1.0);
    CHECK_FALSE(f.ergodically_infeasible);
    CHECK(f.wilson_hi == Approx(1.0));
  }
  std::ostringstream os;
  write_feasibility_csv(os, r);
  CHECK(first_line(os.str()) == "sweep_value,n_feasible,n_total,fraction,wilson_lo,wilson_hi,ergodically_infeasible");
}

TEST_CASE("an unreachable rate target is ergodically infeasible") {
  ExperimentPlan p;
  p.kind = PlanKind::FeasibilityVsRtMin;
  p.grid = {40.0};
  p.n_realizations = 5;
  const auto r = run_plan(p, NetworkConfig{}, SolverOptions{});
  REQUIRE(r.feasibility.size() == 1);
  CHECK(r.feasibility[0].n_feasible == 0);
  CHECK(r.feasibility[0].ergodically_infeasible);
  std::ostringstream os;
  write_records_csv(os, r);
  CHECK(os.str().find(",0,,,,,") != std::string::npos);  // EE fields stay empty
}

TEST_CASE("convergence plan traces are monotone and agree") {
  ExperimentPlan p;
  p.kind = PlanKind::Convergence;
  p.n_realizations = 5;
  p.convergence_inits = 10;
  const auto r = run_plan(p, NetworkConfig{}, SolverOptions{});
  REQUIRE(r.traces.size() == 10);
  double lo = 1e300, hi = -1e300;
  for (const auto& t : r.traces) {
    REQUIRE(t.feasible);
    CHECK(t.trace.monotone(1e-12));
    lo = std::min(lo, t.final_ee);
    hi = std::max(hi, t.final_ee);
  }
  CHECK((hi - lo) / hi < 1e-3);
  std::ostringstream os;
  write_traces_csv(os, r);
  CHECK(first_line(os.str()) == "init,iteration,ee,alpha,mu1,mu2");
}

TEST_CASE("multistart comparison has nonnegative gaps") {
  ExperimentPlan p;
  p.kind = PlanKind::MultistartCompare;
  p.grid = {10.0, 40.0};
  p.n_realizations = 3;
  p.multistart_k = 4;
  const auto r = run_plan(p, NetworkConfig{}, SolverOptions{});
  REQUIRE(r.gaps.size() == 2);
  for (const auto& g : r.gaps) {
    CHECK(g.n_pairs >= 1);
    CHECK(g.median_gap >= 0.0);
    CHECK(g.max_gap >= g.median_gap);
  }
  std::ostringstream os;
  write_gaps_csv(os, r);
  CHECK(first_line(os.str()) == "snr,n_pairs,median_gap,max_gap");
}

TEST_CASE("without harvesting demand the two schemes coincide at a silent TR1") {
  NetworkConfig c;
  c.p1_ct = c.p1_cr = 0.0;
  c.rt_min = 0.0;
  const auto ch = generate_channels(c, 9);
  SpectrumPoint pt{1.0 - kAlphaMin, RVector::Zero(2), RVector::Constant(2, 1.0), RVector::Constant(2, 0.5)};
  const auto a = optimal_alpha(pt.lambda_q1, pt.lambda_q2, pt.lambda_qr, ch.spectra, c);
  CHECK(a.alpha == pt.alpha);
  const auto with = check_feasibility(pt, ch.spectra, c, true);
  const auto without = check_feasibility(pt, ch.spectra, c, false);
  CHECK(with.feasible == without.feasible);
  CHECK(with.eh_balance.slack >= 0.0);
}

TEST_CASE("invalid plans are rejected") {
  ExperimentPlan p;
  CHECK_THROWS_AS(run_plan(p, NetworkConfig{}, SolverOptions{}), ConfigError);
  p.grid = {1.0};
  p.n_realizations = 0;
  CHECK_THROWS_AS(run_plan(p, NetworkConfig{}, SolverOptions{}), ConfigError);
}

TEST_CASE("chart output is a standalone SVG") {
  ExperimentPlan p;
  p.grid = {4.0, 8.0};
  p.n_realizations = 2;
  const auto r = run_plan(p, NetworkConfig{}, SolverOptions{});
  std::ostringstream os;
  write_result_chart(os, r);
  const std::string svg = os.str();
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("proposed") != std::string::npos);
}
