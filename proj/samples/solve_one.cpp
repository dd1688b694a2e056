// SPDX-License-Identifier: Apache-2.0
//
// Solves one channel realization with the default network and prints the
// solution and the outer-iteration trace.
//
//   solve_one [seed] [pmax] [rt_min]

#include "eerelay/eerelay.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  using namespace eerelay;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
  NetworkConfig cfg;
  if (argc > 2) cfg.set_power_caps(std::atof(argv[2]));
  if (argc > 3) cfg.rt_min = std::atof(argv[3]);
  const SolverOptions opts;

  const auto ch = generate_channels(cfg, seed);
  const auto t0 = std::chrono::steady_clock::now();
  const Solution s = solve(ch, cfg, opts);
  const auto t1 = std::chrono::steady_clock::now();

  std::printf("status     %s\n", to_string(s.status));
  std::printf("ee         %.8f bits/Hz/J\n", s.ee);
  std::printf("rates      %.6f %.6f\n", s.rate1, s.rate2);
  std::printf("alpha      %.6f\n", s.point.alpha);
  std::printf("outer      %d (dinkelbach %d, newton %d)\n", s.outer_iters, s.dinkelbach_iters, s.newton_steps);
  std::printf("elapsed    %.2f ms\n", std::chrono::duration<double, std::milli>(t1 - t0).count());
  if (s.feasible()) {
    std::printf("matrix-form ee %.8f\n", ee_matrix_form(s.point.alpha, s.precoders, ch, cfg));
  } else {
    std::printf("violated   %s\n", s.report.worst_violation().c_str());
  }
  std::cout << '\n';
  write_trace_csv(std::cout, s.trace);
  return s.feasible() ? 0 : 2;
}
