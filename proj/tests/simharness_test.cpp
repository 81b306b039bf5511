// Copyright 2026 The nerfplan Authors
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

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "json.hpp"
#include "nerfplan/error.hpp"
#include "nerfplan/simharness.hpp"

namespace nerfplan {
namespace {

double min_config_size(const SyntheticObjectSpec& spec) {
  return true_size(spec, {spec.space.g_min(), spec.space.p_min()});
}

TEST(GenerateSceneTest, Deterministic) {
  const auto a = generate_scene(7, 5, ComplexityProfile::kRandom);
  const auto b = generate_scene(7, 5, ComplexityProfile::kRandom);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].object_id, "obj" + std::to_string(i));
    EXPECT_EQ(a[i].true_size, b[i].true_size);
    EXPECT_EQ(a[i].true_quality, b[i].true_quality);
    EXPECT_EQ(a[i].space, b[i].space);
  }
  EXPECT_NE(generate_scene(8, 5, ComplexityProfile::kRandom)[0].true_size, a[0].true_size);
  EXPECT_EQ(generate_scene(7, 1, ComplexityProfile::kLow).size(), 1u);
}

TEST(GenerateSceneTest, HighDominatesLowAtMinConfig) {
  for (std::uint64_t seed : {1u, 7u, 99u, 12345u}) {
    const auto low = generate_scene(seed, 5, ComplexityProfile::kLow);
    const auto high = generate_scene(seed, 5, ComplexityProfile::kHigh);
    for (std::size_t i = 0; i < low.size(); ++i) {
      EXPECT_GE(min_config_size(high[i]), min_config_size(low[i])) << seed << " " << i;
    }
  }
}

TEST(GenerateSceneTest, TruthIsAdmissibleAndMonotone) {
  for (auto profile : {ComplexityProfile::kLow, ComplexityProfile::kHigh,
                       ComplexityProfile::kMixed, ComplexityProfile::kRandom}) {
    for (const auto& spec : generate_scene(3, 6, profile)) {
      EXPECT_TRUE(size_params_admissible(spec.true_size, spec.space));
      EXPECT_TRUE(quality_params_admissible(spec.true_quality, spec.space));
      double prev_size = -1.0, prev_quality = -1.0;
      for (int g : spec.space.g_values()) {
        const ConfigPair c{g, spec.space.p_max()};
        EXPECT_GT(true_size(spec, c), prev_size);
        EXPECT_GT(true_quality(spec, c), prev_quality);
        prev_size = true_size(spec, c);
        prev_quality = true_quality(spec, c);
      }
      EXPECT_LE(prev_quality, 1.0);
    }
  }
}

TEST(MeasureTest, ZeroNoiseIsExact) {
  auto spec = generate_scene(11, 1, ComplexityProfile::kRandom)[0];
  spec.noise_sd_size_mb = 0.0;
  spec.noise_sd_quality = 0.0;
  Rng rng(1);
  for (const auto& c : spec.space.pairs()) {
    const auto obs = measure(spec, c, rng);
    EXPECT_EQ(obs.config, c);
    EXPECT_EQ(obs.size_mb, true_size(spec, c));
    EXPECT_EQ(obs.quality, true_quality(spec, c));
  }
}

TEST(MeasureTest, ReproducibleAndClamped) {
  auto spec = generate_scene(11, 1, ComplexityProfile::kRandom)[0];
  const ConfigPair top{spec.space.g_max(), spec.space.p_max()};
  Rng r1(42), r2(42);
  EXPECT_EQ(measure(spec, top, r1), measure(spec, top, r2));

  // Scale the quality surface so the top config is 0.999, then add noise
  // large enough to cross the bound.
  spec.true_quality.k_q *= 0.999 / true_quality(spec, top);
  spec.noise_sd_quality = 0.5;
  int clamped_high = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto obs = measure(spec, top, rng);
    EXPECT_GE(obs.quality, 0.0);
    EXPECT_LE(obs.quality, 1.0);
    EXPECT_GE(obs.size_mb, 0.0);
    if (obs.quality == 1.0) ++clamped_high;
  }
  EXPECT_GT(clamped_high, 0);

  try {
    measure(spec, {17, 8}, r1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigOutOfSpace);
  }
}

const std::set<SolverKind> kAllSolvers = {SolverKind::kDp, SolverKind::kFairness,
                                          SolverKind::kGreedy, SolverKind::kOracle};

std::vector<SyntheticObjectSpec> noiseless_scene(std::uint64_t seed) {
  SceneOptions opts;
  opts.noise_sd_size_mb = 0.0;
  opts.noise_sd_quality = 0.0;
  return generate_scene(seed, 5, ComplexityProfile::kRandom, opts);
}

TEST(RunExperimentTest, ZeroNoiseDpRegretIsZero) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto result = run_experiment("s", "random", noiseless_scene(seed),
                                       *DeviceBudget::preset("pixel4"), kAllSolvers, seed);
    ASSERT_EQ(result.per_solver.size(), 4u);
    const auto& dp = result.per_solver[0];
    const auto& oracle = result.per_solver[3];
    EXPECT_EQ(dp.solver, SolverKind::kDp);
    EXPECT_EQ(oracle.solver, SolverKind::kOracle);
    if (!oracle.feasible) continue;
    ASSERT_TRUE(dp.regret_vs_oracle.has_value());
    EXPECT_EQ(*dp.regret_vs_oracle, 0.0);
    for (const auto& row : result.per_solver) {
      if (row.feasible) {
        EXPECT_GE(*row.regret_vs_oracle, 0.0);
        EXPECT_LE(row.total_true_size_mb, 150.0 + 1e-6);
      }
    }
    for (const auto& fe : result.fit_errors) {
      EXPECT_LT(fe.mae_size, 1e-6);
      EXPECT_LT(fe.mae_quality, 1e-8);
    }
  }
}

TEST(RunExperimentTest, UnconstrainedBudgetTakesTopConfigs) {
  const auto scene = noiseless_scene(5);
  const auto result = run_experiment("s", "random", scene, DeviceBudget::make("huge", 1e6),
                                     kAllSolvers, 5);
  double best = 0.0;
  for (const auto& spec : scene) {
    best += true_quality(spec, {spec.space.g_max(), spec.space.p_max()});
  }
  for (const auto& row : result.per_solver) {
    ASSERT_TRUE(row.feasible) << solver_name(row.solver);
    for (const auto& c : row.configs) EXPECT_EQ(c, (ConfigPair{144, 17}));
    EXPECT_NEAR(row.total_true_quality, best, 1e-12);
    EXPECT_EQ(*row.regret_vs_oracle, 0.0);
  }
}

TEST(RunExperimentTest, TinyBudgetIsInfeasibleEverywhere) {
  const auto result = run_experiment("s", "random", noiseless_scene(5),
                                     DeviceBudget::make("tiny", 1.0), kAllSolvers, 5);
  for (const auto& row : result.per_solver) {
    EXPECT_FALSE(row.feasible);
    EXPECT_EQ(row.error, "GloballyInfeasible");
    EXPECT_FALSE(row.regret_vs_oracle.has_value());
  }
}

TEST(RunExperimentTest, RegretNeedsOracle) {
  const auto result = run_experiment("s", "random", noiseless_scene(5),
                                     *DeviceBudget::preset("iphone13"),
                                     {SolverKind::kDp, SolverKind::kGreedy}, 5);
  ASSERT_EQ(result.per_solver.size(), 2u);
  for (const auto& row : result.per_solver) EXPECT_FALSE(row.regret_vs_oracle.has_value());
}

SimulationConfig small_config(unsigned threads) {
  SimulationConfig cfg;
  cfg.master_seed = 7;
  cfg.n_scenes = 3;
  cfg.budgets = {*DeviceBudget::preset("pixel4"), *DeviceBudget::preset("iphone13")};
  cfg.solvers = kAllSolvers;
  cfg.threads = threads;
  return cfg;
}

TEST(RunSimulationTest, DeterministicAcrossThreads) {
  const auto one = write_results_csv(to_rows(run_simulation(small_config(1)), false));
  const auto again = write_results_csv(to_rows(run_simulation(small_config(1)), false));
  const auto four = write_results_csv(to_rows(run_simulation(small_config(4)), false));
  EXPECT_EQ(one, again);
  EXPECT_EQ(one, four);
  EXPECT_EQ(one.substr(0, one.find('\n')), results_csv_header());
  EXPECT_NE(one.find("s000/pixel4"), std::string::npos);
  EXPECT_NE(one.find("s002/iphone13"), std::string::npos);
}

TEST(ResultsCsvTest, RoundTrip) {
  std::vector<ResultRow> rows = {
      {"s000/pixel4", 18446744073709551615ull, "low", "dp", true, 4.1, 149.5, 0.0, 1.25},
      {"s000/pixel4", 3, "low", "oracle", false, 0.0, 0.0, std::nullopt, std::nullopt}};
  const auto parsed = parse_results_csv(write_results_csv(rows));
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0].seed, rows[0].seed);
  EXPECT_EQ(parsed[0].total_true_quality, 4.1);
  EXPECT_EQ(parsed[0].wall_time_ms, 1.25);
  EXPECT_FALSE(parsed[1].feasible);
  EXPECT_FALSE(parsed[1].regret_vs_oracle.has_value());
  EXPECT_THROW(parse_results_csv("nonsense\n1,2\n"), Error);
}

TEST(SummarizeTest, SingleRowEchoes) {
  const std::vector<ResultRow> rows = {
      {"s000/pixel4", 1, "low", "greedy", true, 3.0, 100.0, 0.25, std::nullopt}};
  const auto summary = summarize(rows);
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[0].group, "all");
  EXPECT_EQ(summary[0].runs, 1);
  EXPECT_EQ(summary[0].infeasibility_rate, 0.0);
  EXPECT_EQ(*summary[0].mean_regret, 0.25);
  EXPECT_EQ(*summary[0].max_regret, 0.25);
  EXPECT_FALSE(summary[0].mean_wall_time_ms.has_value());
  EXPECT_EQ(summary[1].group, "profile=low");
}

TEST(SummarizeTest, IdenticalRowsHaveNoSpread) {
  std::vector<ResultRow> rows(4, {"s/p", 1, "high", "dp", true, 2.0, 50.0, 0.125, 3.0});
  rows.push_back({"s/p", 1, "high", "dp", false, 0.0, 0.0, std::nullopt, 3.0});
  const auto summary = summarize(rows);
  EXPECT_EQ(*summary[0].mean_regret, 0.125);
  EXPECT_EQ(*summary[0].max_regret, 0.125);
  EXPECT_DOUBLE_EQ(summary[0].infeasibility_rate, 0.2);
  EXPECT_EQ(*summary[0].mean_wall_time_ms, 3.0);
  for (const auto& s : summary) EXPECT_EQ(s.solver, "dp");
  EXPECT_THROW(summarize({}), Error);
}

TEST(RngTest, DeriveSeedIsStable) {
  EXPECT_EQ(derive_seed(7, "s000"), derive_seed(7, "s000"));
  EXPECT_NE(derive_seed(7, "s000"), derive_seed(7, "s001"));
  EXPECT_NE(derive_seed(7, "s000"), derive_seed(8, "s000"));
  Rng a(1), b(1);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace nerfplan
