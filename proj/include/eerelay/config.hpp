// SPDX-License-Identifier: Apache-2.0
//
// Network and solver configuration, plus the flat key = value file format
// used by the command-line tool.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eerelay {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Physical parameters of the two-way relay network. Powers in W, rates in bits/s/Hz.
///
/// The six circuit-power terms are folded into `pc_total`; only the two that
/// belong to the battery-limited transceiver (TR1) are kept separately because
/// the harvested energy has to cover them.
struct NetworkConfig {
  int n1 = 2;
  int n2 = 2;
  int nr = 2;

  double sigma2_1 = 0.2;
  double sigma2_2 = 0.2;
  double sigma2_r = 0.2;
  double sigma2_d = 0.2;

  double p1_max = 8.0;
  double p2_max = 8.0;
  double pr_max = 8.0;

  double pc_total = 3.0;
  double p1_ct = 0.5;
  double p1_cr = 0.5;

  double rt_min = 1.0;

  double xi_1 = 1.0;
  double xi_2 = 1.0;
  double xi_r = 1.0;

  double time_interval = 1.0;
  double eh_efficiency = 1.0;

  /// Same noise variance at every receiver and decoder.
  void set_noise(double sigma2) { sigma2_1 = sigma2_2 = sigma2_r = sigma2_d = sigma2; }
  /// Same transmit power cap at all three nodes.
  void set_power_caps(double pmax) { p1_max = p2_max = pr_max = pmax; }

  void validate() const {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    if (n1 <= 0 || n2 <= 0 || nr <= 0) fail("antenna counts must be positive");
    for (double v : {sigma2_1, sigma2_2, sigma2_r, sigma2_d})
      if (!(v >= 0.0) || !std::isfinite(v)) fail("noise variances must be finite and nonnegative");
    for (double v : {p1_max, p2_max, pr_max})
      if (!(v >= 0.0) || !std::isfinite(v)) fail("power caps must be finite and nonnegative");
    if (!(p1_ct >= 0.0) || !(p1_cr >= 0.0)) fail("circuit powers must be nonnegative");
    if (!(pc_total >= p1_ct + p1_cr)) fail("pc_total must cover p1_ct + p1_cr");
    if (!(rt_min >= 0.0) || !std::isfinite(rt_min)) fail("rt_min must be finite and nonnegative");
    for (double v : {xi_1, xi_2, xi_r, eh_efficiency})
      if (!(v > 0.0 && v <= 1.0)) fail("efficiencies must lie in (0, 1]");
    if (!(time_interval > 0.0)) fail("time_interval must be positive");
    if (sigma2_2 + sigma2_r == 0.0 && sigma2_d + sigma2_1 == 0.0)
      fail("at least one receiver needs nonzero noise");
  }
};

struct SolverOptions {
  double dinkelbach_tol = 1e-6;
  double inner_tol = 1e-7;
  double barrier_mu0 = 1.0;
  double barrier_shrink = 0.2;
  int max_outer_iters = 200;
  int max_dinkelbach_iters = 50;
  double alt_tol = 1e-6;
  std::uint64_t rng_seed = 1;

  void validate() const {
    if (!(dinkelbach_tol > 0.0) || !(inner_tol > 0.0) || !(alt_tol > 0.0) || !(barrier_mu0 > 0.0))
      throw ConfigError("solver tolerances must be positive");
    if (!(barrier_shrink > 0.0 && barrier_shrink < 1.0))
      throw ConfigError("solver.barrier_shrink must lie in (0, 1)");
    if (max_outer_iters < 1 || max_dinkelbach_iters < 1)
      throw ConfigError("solver iteration caps must be at least 1");
  }
};

struct Settings {
  NetworkConfig network;
  SolverOptions solver;

  void validate() const {
    network.validate();
    solver.validate();
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("bad numeric value for '" + key + "': '" + text + "'");
  return v;
}

inline long long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for '" + key + "': '" + text + "'");
  }
  if (used != text.size()) throw ConfigError("bad integer value for '" + key + "': '" + text + "'");
  return v;
}

}  // namespace detail

/// Applies one `key = value` setting. Unknown keys are an error.
///
/// Network keys are the bare field names (`p1_max`, `sigma2_r`, ...); the
/// shorthands `pmax` and `sigma2` set all caps / all noise variances at once.
/// Solver keys live under `solver.`.
inline void apply_setting(Settings& s, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = detail::trim(raw_key);
  const std::string value = detail::trim(raw_value);
  auto& n = s.network;
  auto& o = s.solver;
  auto num = [&] { return detail::parse_double(key, value); };
  auto integer = [&] { return detail::parse_integer(key, value); };

  struct DoubleKey {
    const char* name;
    double* field;
  };
  const DoubleKey doubles[] = {
      {"sigma2_1", &n.sigma2_1},       {"sigma2_2", &n.sigma2_2},
      {"sigma2_r", &n.sigma2_r},       {"sigma2_d", &n.sigma2_d},
      {"p1_max", &n.p1_max},           {"p2_max", &n.p2_max},
      {"pr_max", &n.pr_max},           {"pc_total", &n.pc_total},
      {"p1_ct", &n.p1_ct},             {"p1_cr", &n.p1_cr},
      {"rt_min", &n.rt_min},           {"xi_1", &n.xi_1},
      {"xi_2", &n.xi_2},               {"xi_r", &n.xi_r},
      {"time_interval", &n.time_interval}, {"eh_efficiency", &n.eh_efficiency},
      {"solver.dinkelbach_tol", &o.dinkelbach_tol}, {"solver.inner_tol", &o.inner_tol},
      {"solver.barrier_mu0", &o.barrier_mu0},       {"solver.barrier_shrink", &o.barrier_shrink},
      {"solver.alt_tol", &o.alt_tol},
  };
  for (const auto& d : doubles) {
    if (key == d.name) {
      *d.field = num();
      return;
    }
  }
  if (key == "n1") { n.n1 = static_cast<int>(integer()); return; }
  if (key == "n2") { n.n2 = static_cast<int>(integer()); return; }
  if (key == "nr") { n.nr = static_cast<int>(integer()); return; }
  if (key == "pmax") { n.set_power_caps(num()); return; }
  if (key == "sigma2") { n.set_noise(num()); return; }
  if (key == "solver.max_outer_iters") { o.max_outer_iters = static_cast<int>(integer()); return; }
  if (key == "solver.max_dinkelbach_iters") { o.max_dinkelbach_iters = static_cast<int>(integer()); return; }
  if (key == "solver.rng_seed") { o.rng_seed = static_cast<std::uint64_t>(integer()); return; }
  throw ConfigError("unknown key '" + key + "'");
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are ignored.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(std::string_view(body).substr(0, eq));
    std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

inline void apply_stream(Settings& s, std::istream& in) {
  for (const auto& [k, v] : parse_key_values(in)) apply_setting(s, k, v);
}

inline Settings load_settings(const std::string& path) {
  Settings s;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  apply_stream(s, in);
  return s;
}

/// Serialises every key so that `load_settings` round-trips it.
inline std::string to_config_text(const Settings& s) {
  std::ostringstream os;
  os.precision(17);
  const auto& n = s.network;
  const auto& o = s.solver;
  os << "n1 = " << n.n1 << "\nn2 = " << n.n2 << "\nnr = " << n.nr << '\n'
     << "sigma2_1 = " << n.sigma2_1 << "\nsigma2_2 = " << n.sigma2_2 << "\nsigma2_r = " << n.sigma2_r
     << "\nsigma2_d = " << n.sigma2_d << '\n'
     << "p1_max = " << n.p1_max << "\np2_max = " << n.p2_max << "\npr_max = " << n.pr_max << '\n'
     << "pc_total = " << n.pc_total << "\np1_ct = " << n.p1_ct << "\np1_cr = " << n.p1_cr << '\n'
     << "rt_min = " << n.rt_min << '\n'
     << "xi_1 = " << n.xi_1 << "\nxi_2 = " << n.xi_2 << "\nxi_r = " << n.xi_r << '\n'
     << "time_interval = " << n.time_interval << "\neh_efficiency = " << n.eh_efficiency << '\n'
     << "solver.dinkelbach_tol = " << o.dinkelbach_tol << "\nsolver.inner_tol = " << o.inner_tol
     << "\nsolver.barrier_mu0 = " << o.barrier_mu0 << "\nsolver.barrier_shrink = " << o.barrier_shrink
     << "\nsolver.max_outer_iters = " << o.max_outer_iters
     << "\nsolver.max_dinkelbach_iters = " << o.max_dinkelbach_iters << "\nsolver.alt_tol = " << o.alt_tol
     << "\nsolver.rng_seed = " << o.rng_seed << '\n';
  return os.str();
}

}  // namespace eerelay
