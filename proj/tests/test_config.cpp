// SPDX-License-Identifier: Apache-2.0

#include "eerelay/config.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace eerelay;

TEST_CASE("defaults describe the 2x2x2 reference network") {
  const Settings s;
  CHECK(s.network.n1 == 2);
  CHECK(s.network.n2 == 2);
  CHECK(s.network.nr == 2);
  CHECK(s.network.sigma2_1 == 0.2);
  CHECK(s.network.sigma2_r == 0.2);
  CHECK(s.network.pc_total == 3.0);
  CHECK(s.network.rt_min == 1.0);
  CHECK(s.network.p1_max == 8.0);
  CHECK(s.network.pr_max == 8.0);
  CHECK(s.solver.dinkelbach_tol == 1e-6);
  CHECK(s.solver.inner_tol == 1e-7);
  CHECK(s.solver.barrier_shrink == 0.2);
  CHECK(s.solver.max_outer_iters == 200);
  CHECK(s.solver.max_dinkelbach_iters == 50);
  CHECK(s.solver.alt_tol == 1e-6);
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("key-value text round-trips every field") {
  Settings s;
  s.network.n1 = 3;
  s.network.sigma2_d = 0.05;
  s.network.pr_max = 12.5;
  s.network.xi_r = 0.35;
  s.solver.rng_seed = 99;
  s.solver.alt_tol = 1e-9;
  std::istringstream in(to_config_text(s));
  Settings back;
  apply_stream(back, in);
  CHECK(back.network.n1 == 3);
  CHECK(back.network.sigma2_d == 0.05);
  CHECK(back.network.pr_max == 12.5);
  CHECK(back.network.xi_r == 0.35);
  CHECK(back.solver.rng_seed == 99);
  CHECK(back.solver.alt_tol == 1e-9);
}

TEST_CASE("comments, blanks and shorthands") {
  std::istringstream in("# network\n\npmax = 4   # all caps\nsigma2=0.1\nsolver.dinkelbach_tol = 1e-8\n");
  Settings s;
  apply_stream(s, in);
  CHECK(s.network.p1_max == 4.0);
  CHECK(s.network.p2_max == 4.0);
  CHECK(s.network.pr_max == 4.0);
  CHECK(s.network.sigma2_1 == 0.1);
  CHECK(s.network.sigma2_d == 0.1);
  CHECK(s.solver.dinkelbach_tol == 1e-8);
}

TEST_CASE("malformed input is rejected") {
  Settings s;
  CHECK_THROWS_AS(apply_setting(s, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "p1_max", "abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(s, "n1", "2.5"), ConfigError);
  std::istringstream bad("p1_max 3\n");
  CHECK_THROWS_AS(apply_stream(s, bad), ConfigError);
  CHECK_THROWS_AS(load_settings("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("validation bounds") {
  Settings s;
  s.network.xi_1 = 1.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = Settings{};
  s.network.nr = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = Settings{};
  s.network.p1_ct = 2.0;
  s.network.p1_cr = 2.0;  // exceeds pc_total = 3
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = Settings{};
  s.solver.barrier_shrink = 1.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = Settings{};
  s.network.p1_max = 0.0;
  CHECK_NOTHROW(s.validate());
}
