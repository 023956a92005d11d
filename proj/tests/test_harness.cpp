// Copyright 2026 The sgl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <catch_amalgamated.hpp>

#include "sgl/harness.hpp"

using namespace sgl;
using Catch::Approx;

TEST_CASE("reversible circuit count") {
  CHECK(reversible_count_bound(4, 1) == 161280);
  CHECK(reversible_count_bound(7, 0) == 1);
  CHECK(reversible_count_log2(4, 1) == Approx(std::log2(161280.0)));
  CHECK(reversible_count_log2(6, 3) > reversible_count_log2(6, 2));
  CHECK(reversible_count_bound(5, 2) == BigInt(403200) * 403200);
}

TEST_CASE("complexity calculator") {
  ComplexityConstants k{1, 1, 1};
  auto r = complexity_bound_calculator(10, 1e6, k);
  CHECK(r.t == Approx(100.0));
  CHECK(r.R == Approx(10 * 100.0 / std::log(10.0)));
  auto r2 = complexity_bound_calculator(10, 2e6, k);
  CHECK(r2.R == Approx(2 * r.R));
  auto re = complexity_bound_calculator(10, 1e6, k, 1.0);
  CHECK(re.log2_failure_bound - r.log2_failure_bound == Approx(1.0));
  CHECK(r.to_json()["label"] == "conditional on supplied constants");
  CHECK_THROWS_AS(complexity_bound_calculator(10, 1e6, {0, 1, 1}), ConfigError);
}

TEST_CASE("design test on exact uniform samples") {
  SeededRng rng(1);
  auto rep = design_statistical_test(uniform_group_sampler(3), 3, 2, {0, 5}, 200000, rng);
  CHECK(rep.method == "histogram");
  CHECK(rep.tv >= 0.0);
  CHECK(rep.tv <= 1.0);
  // Plug-in TV is biased upward, so the percentile interval can sit above it.
  CHECK(rep.tv_ci_low <= rep.tv_ci_high);
  CHECK(rep.tv <= rep.tv_ci_high);
  CHECK(rep.tv < 0.03);
  CHECK(rep.pass);
  CHECK(rep.ratio_min > 0.8);
  CHECK(rep.ratio_max < 1.2);
  CHECK(rep.bootstrap_resamples == 1000);
}

TEST_CASE("design test rejects a single gate") {
  SeededRng rng(2);
  auto rep = design_statistical_test(rev_walk_sampler(4, 1), 4, 2, {0, 1}, 100000, rng);
  CHECK(rep.tv > 0.3);
  CHECK_FALSE(rep.pass);
  CHECK_THROWS_AS(design_statistical_test(rev_walk_sampler(4, 1), 4, 2, {3, 3}, 10, rng), ConfigError);
}

TEST_CASE("design test falls back to collisions for large supports") {
  SeededRng rng(3);
  auto rep = design_statistical_test(uniform_group_sampler(6), 6, 3, {0, 1, 2}, 20000, rng, 0.5, 50);
  CHECK(rep.method == "collision");
  CHECK(rep.tv_ci_high >= rep.tv);
}

TEST_CASE("design test is independent of the thread count") {
  auto run_once = [] {
    SeededRng rng(9);
    return design_statistical_test(rev_walk_sampler(4, 3), 4, 2, {1, 2}, 20000, rng, 0.05, 100).to_json();
  };
  auto a = run_once();
  setenv("SGL_THREADS", "1", 1);
  auto b = run_once();
  unsetenv("SGL_THREADS");
  CHECK(a == b);
}

TEST_CASE("config runner") {
  auto empty = run(nlohmann::json::object());
  CHECK(empty.report["results"].empty());
  CHECK(empty.report.contains("build"));
  CHECK(empty.report["rng"] == SeededRng::algorithm());

  CHECK_THROWS_AS(run(nlohmann::json{{"seed", "abc"}}), ConfigError);
  CHECK_THROWS_AS(run(nlohmann::json{{"seed", -1}}), ConfigError);
  CHECK_THROWS_AS(run(nlohmann::json{{"experiments", {{{"name", "nope"}}}}}), ConfigError);
  CHECK_THROWS_AS(run(nlohmann::json{{"experiments", {{{"name", "gap"}, {"params", {{"n", "four"}}}}}}}), ConfigError);

  nlohmann::json cfg = {{"seed", 7},
                        {"experiments",
                         {{{"name", "gap"}, {"params", {{"n", 4}, {"t", 1}}}},
                          {{"name", "pzp"}, {"params", {{"n", 3}, {"t", 1}}}},
                          {{"name", "overlap"}, {"params", {{"t", 2}, {"b", {2, 4}}}}},
                          {{"name", "calc"}, {"params", {{"kind", "reversible-count"}, {"n", 4}, {"R", 1}}}}}}};
  auto a = run(cfg);
  auto b = run(cfg);
  strip_wall_times(a.report);
  strip_wall_times(b.report);
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.report["results"][1]["value"] == "1/7");
  CHECK(a.report["results"][3]["count"] == "161280");
  CHECK(a.report["results"][0]["seed"] == 7);
  CHECK(a.report["results"][1]["seed"] == 8);
  CHECK(a.csv.find("b,norm") != std::string::npos);
  CHECK(a.csv.find("# pzp\nkey,value\n") != std::string::npos);
  CHECK(a.csv.find("value,1/7\n") != std::string::npos);
}
