// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Kept in a header so tests can drive it in-process.
//
// Exit codes: 0 ok, 1 configuration/usage error, 2 infeasible instance,
// 3 solver did not converge, 4 matrix-property check failed, 5 I/O error.
// Every error path prints exactly one line "error: <kind>: <reason>" on stderr.

#pragma once

#include "eerelay/eerelay.hpp"
#include "eerelay/experiments.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace eerelay::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kInfeasible = 2, kNotConverged = 3, kCheckFailed = 4, kIoError = 5 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridSpec {
  std::string param;  // empty when not given
  std::vector<double> values;
};

/// "param=start:stop:step", "start:stop:step", "param=v" or "v". Stop is inclusive.
inline GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  std::string body = text;
  if (const auto eq = text.find('='); eq != std::string::npos) {
    g.param = detail::trim(text.substr(0, eq));
    body = text.substr(eq + 1);
  }
  std::vector<std::string> parts;
  std::stringstream ss(body);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(detail::trim(p));
  if (parts.size() == 1) {
    g.values.push_back(detail::parse_double("grid", parts[0]));
    return g;
  }
  if (parts.size() != 3) throw ConfigError("grid must be start:stop:step, got '" + text + "'");
  const double a = detail::parse_double("grid", parts[0]);
  const double b = detail::parse_double("grid", parts[1]);
  const double h = detail::parse_double("grid", parts[2]);
  if (!(h > 0.0) || !(b >= a)) throw ConfigError("grid needs step > 0 and stop >= start, got '" + text + "'");
  const auto n = static_cast<long>(std::floor((b - a) / h + 1e-9));
  if (n > 100000) throw ConfigError("grid has too many points");
  for (long k = 0; k <= n; ++k) g.values.push_back(a + static_cast<double>(k) * h);
  return g;
}

struct Invocation {
  std::string subcommand;
  std::string config_path = "defaults";
  std::string out_dir = "out";
  std::uint64_t seed = 7;
  bool seed_given = false;
  std::vector<std::string> overrides;
  int realizations = 0;  // 0: subcommand default
  std::string grid;
  std::string mode = "shared";
  bool plot = false;
  int starts = 0;        // 0: subcommand default
  unsigned threads = 0;
};

/// defaults < config file < --set overrides (last wins).
inline Settings resolve_settings(const Invocation& inv) {
  Settings s = inv.config_path == "defaults" ? Settings{} : load_settings(inv.config_path);
  for (const auto& kv : inv.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override must be KEY=VALUE, got '" + kv + "'");
    apply_setting(s, kv.substr(0, eq), kv.substr(eq + 1));
  }
  s.validate();
  return s;
}

namespace detail {

inline std::filesystem::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& w) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  w(f);
  f.flush();
  if (!f) throw IoError("write failed for '" + path.string() + "'");
}

inline void print_slack(std::ostream& out, const char* name, const ConstraintSlack& c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "  %-18s value %-12.6g limit %-12.6g slack %.6g\n", name, c.value, c.limit, c.slack);
  out << buf;
}

inline void print_solution(std::ostream& out, const Solution& s, const ChannelRealization& ch) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "status            %s\n", to_string(s.status));
  out << buf;
  std::snprintf(buf, sizeof buf, "seed              %llu (%s channel)\n", static_cast<unsigned long long>(ch.seed),
                to_string(ch.mode));
  out << buf;
  std::snprintf(buf, sizeof buf, "ee                %.10g bits/Hz/J\n", s.ee);
  out << buf;
  std::snprintf(buf, sizeof buf, "alpha             %.10g%s\n", s.point.alpha, s.alpha_clamped ? " (clamped)" : "");
  out << buf;
  std::snprintf(buf, sizeof buf, "rates             R1 %.10g  R2 %.10g bits/s/Hz\n", s.rate1, s.rate2);
  out << buf;
  std::snprintf(buf, sizeof buf, "iterations        outer %d  dinkelbach %d  newton %d\n", s.outer_iters,
                s.dinkelbach_iters, s.newton_steps);
  out << buf;
  auto vec = [](const RVector& v) {
    std::string t;
    char b[32];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      std::snprintf(b, sizeof b, "%s%.6g", i ? " " : "", v(i));
      t += b;
    }
    return t;
  };
  out << "lambda_q1         " << vec(s.point.lambda_q1) << '\n';
  out << "lambda_q2         " << vec(s.point.lambda_q2) << '\n';
  out << "lambda_qr         " << vec(s.point.lambda_qr) << '\n';
  out << "constraints\n";
  print_slack(out, "power_tr1", s.report.power_tr1);
  print_slack(out, "power_tr2", s.report.power_tr2);
  print_slack(out, "power_relay", s.report.power_relay);
  print_slack(out, "rate_tr1", s.report.rate_tr1);
  print_slack(out, "rate_tr2", s.report.rate_tr2);
  print_slack(out, "energy_harvesting", s.report.eh_balance);
  if (!s.precoders.exact) out << "warning           channel has no shared left unitary; closed-form precoders are approximate\n";
}

inline PlanKind kind_for(const std::string& sub, const std::string& param) {
  if (sub == "sweep") {
    if (param.empty() || param == "pmax") return PlanKind::SweepPmax;
    if (param == "rt_min") return PlanKind::SweepRtMin;
  } else if (sub == "feasibility") {
    if (param.empty() || param == "rt_min") return PlanKind::FeasibilityVsRtMin;
    if (param == "pmax") return PlanKind::FeasibilityVsPmax;
  } else if (sub == "multistart") {
    if (param.empty() || param == "snr") return PlanKind::MultistartCompare;
  } else if (sub == "convergence") {
    return PlanKind::Convergence;
  }
  throw ConfigError("grid parameter '" + param + "' is not supported by '" + sub + "'");
}

inline std::string default_grid(PlanKind k) {
  switch (k) {
    case PlanKind::SweepPmax: return "2:8:2";
    case PlanKind::SweepRtMin: return "0:4:1";
    case PlanKind::FeasibilityVsPmax: return "2:8:2";
    case PlanKind::FeasibilityVsRtMin: return "1:12:1";
    case PlanKind::MultistartCompare: return "10:40:30";
    case PlanKind::Convergence: return "1";
  }
  return "1";
}

inline int run_solve(const Invocation& inv, const Settings& s, std::ostream& out, std::ostream& err) {
  const auto ch = generate_channels(s.network, inv.seed, parse_channel_mode(inv.mode));
  const Solution sol = inv.starts > 1 ? multistart(ch, s.network, s.solver, inv.starts) : solve(ch, s.network, s.solver);
  const auto dir = ensure_dir(inv.out_dir);
  write_file(dir / "trace.csv", [&](std::ostream& f) { write_trace_csv(f, sol.trace); });
  if (!sol.feasible()) {
    err << "error: infeasible: no feasible point found; most violated constraint " << sol.report.worst_violation()
        << " (slack " << format_number(sol.report.min_slack()) << ")\n";
    return kInfeasible;
  }
  print_solution(out, sol, ch);
  if (!sol.converged) {
    err << "error: not_converged: outer iteration cap " << s.solver.max_outer_iters
        << " reached; trace written to " << (dir / "trace.csv").string() << '\n';
    return kNotConverged;
  }
  return kOk;
}

inline int run_experiment(const Invocation& inv, const Settings& s, std::ostream& out) {
  ExperimentPlan plan;
  const GridSpec grid = parse_grid(inv.grid.empty() ? std::string{} + default_grid(kind_for(inv.subcommand, ""))
                                                    : inv.grid);
  plan.kind = kind_for(inv.subcommand, grid.param);
  plan.grid = grid.values;
  if (plan.kind == PlanKind::Convergence) plan.grid.clear();
  plan.n_realizations = inv.realizations > 0 ? inv.realizations : (plan.kind == PlanKind::MultistartCompare ? 50 : 100);
  plan.master_seed = inv.seed;
  plan.mode = parse_channel_mode(inv.mode);
  plan.threads = inv.threads;
  if (plan.kind == PlanKind::Convergence) plan.convergence_inits = inv.starts > 0 ? inv.starts : 10;
  else plan.multistart_k = inv.starts > 0 ? inv.starts : 100;

  const auto res = run_plan(plan, s.network, s.solver);
  const auto dir = ensure_dir(inv.out_dir);
  write_file(dir / "records.csv", [&](std::ostream& f) { write_records_csv(f, res); });
  write_file(dir / "aggregate.csv", [&](std::ostream& f) { write_aggregate_csv(f, res); });
  if (!res.feasibility.empty())
    write_file(dir / "feasibility.csv", [&](std::ostream& f) { write_feasibility_csv(f, res); });
  if (!res.traces.empty()) write_file(dir / "traces.csv", [&](std::ostream& f) { write_traces_csv(f, res); });
  if (!res.gaps.empty()) write_file(dir / "gaps.csv", [&](std::ostream& f) { write_gaps_csv(f, res); });
  if (inv.plot) write_file(dir / "chart.svg", [&](std::ostream& f) { write_result_chart(f, res); });

  out << to_string(plan.kind) << ": " << res.records.size() << " records, " << res.aggregates.size()
      << " aggregate rows -> " << dir.string() << '\n';
  write_aggregate_csv(out, res);
  if (!res.feasibility.empty()) write_feasibility_csv(out, res);
  if (!res.gaps.empty()) write_gaps_csv(out, res);
  if (plan.kind == PlanKind::Convergence && res.traces.empty()) {
    out << "no feasible realization found for the convergence plan\n";
    return kInfeasible;
  }
  return kOk;
}

inline int run_props_check(const Invocation& inv, std::ostream& out) {
  const int trials = inv.realizations > 0 ? inv.realizations : 1000;
  const auto r = matprops::run_property_suites(trials, 4, inv.seed);
  auto line = [&](const char* name, const matprops::SuiteCount& c) {
    out << name << ": " << (c.trials - c.violations) << '/' << c.trials << " hold, " << c.violations
        << " violations" << (c.violations ? " (worst relative excess " + format_number(c.worst_excess) + ")" : "")
        << '\n';
  };
  line("trace_product_bounds", r.trace_product);
  line("det_sum_bounds", r.det_sum);
  line("det_identity_inverse_bounds", r.det_identity_inverse);
  out << (r.all_hold() ? "PASS" : "FAIL") << '\n';
  return r.all_hold() ? kOk : kCheckFailed;
}

}  // namespace detail

/// Parses and runs one command line. Never throws.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Invocation inv;
  CLI::App app{"Energy-efficient precoding and power splitting for a SWIPT MIMO two-way relay network"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", inv.config_path, "Config file (key = value), or 'defaults'");
    sub->add_option("--out", inv.out_dir, "Output directory");
    sub->add_option("--seed", inv.seed, "Channel seed (solve) or master seed (plans)");
    sub->add_option("--set", inv.overrides, "Override KEY=VALUE (repeatable)")->take_all()->allow_extra_args(false);
    sub->add_option("--mode", inv.mode, "Channel model: shared or iid")->check(CLI::IsMember({"shared", "iid"}));
    sub->add_option("--threads", inv.threads, "Worker threads (0: all cores)");
  };
  auto plan_opts = [&](CLI::App* sub) {
    sub->add_option("--realizations", inv.realizations, "Channel realizations per grid value");
    sub->add_option("--grid", inv.grid, "Sweep grid param=start:stop:step");
    sub->add_flag("--plot", inv.plot, "Also write an SVG line chart");
  };
  auto* solve_cmd = app.add_subcommand("solve", "Solve one channel realization");
  common(solve_cmd);
  solve_cmd->add_option("--starts", inv.starts, "Best of this many starts (default 1)");
  auto* sweep_cmd = app.add_subcommand("sweep", "EE of all baselines over a pmax or rt_min grid");
  common(sweep_cmd);
  plan_opts(sweep_cmd);
  auto* feas_cmd = app.add_subcommand("feasibility", "Feasibility probability over an rt_min or pmax grid");
  common(feas_cmd);
  plan_opts(feas_cmd);
  auto* conv_cmd = app.add_subcommand("convergence", "EE traces from several random starts on one channel");
  common(conv_cmd);
  plan_opts(conv_cmd);
  conv_cmd->add_option("--starts", inv.starts, "Number of random starts (default 10)");
  auto* ms_cmd = app.add_subcommand("multistart", "Single-start vs best-of-k EE over an SNR grid");
  common(ms_cmd);
  plan_opts(ms_cmd);
  ms_cmd->add_option("--starts", inv.starts, "Starts per channel (default 100)");
  auto* props_cmd = app.add_subcommand("props-check", "Randomised checks of the trace and determinant bounds");
  props_cmd->add_option("--seed", inv.seed, "Seed");
  props_cmd->add_option("--realizations", inv.realizations, "Trials per suite (default 1000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& c : msg)
      if (c == '\n') c = ' ';
    err << "error: usage: " << msg << '\n';
    return kConfigError;
  }
  for (auto* sub : app.get_subcommands()) inv.subcommand = sub->get_name();

  try {
    if (inv.subcommand == "props-check") return detail::run_props_check(inv, out);
    const Settings s = resolve_settings(inv);
    parse_channel_mode(inv.mode);
    if (inv.subcommand == "solve") return detail::run_solve(inv, s, out, err);
    return detail::run_experiment(inv, s, out);
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: config: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "error: io: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace eerelay::cli
