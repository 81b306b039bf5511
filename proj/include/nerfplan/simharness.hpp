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

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nerfplan/core.hpp"
#include "nerfplan/profiler.hpp"
#include "nerfplan/rng.hpp"
#include "nerfplan/selector.hpp"

namespace nerfplan {

enum class ComplexityProfile { kLow, kHigh, kMixed, kRandom };

std::string profile_name(ComplexityProfile profile);
// Throws kInvalidInput for unknown names.
ComplexityProfile parse_profile(const std::string& name);

// An object whose true size and quality surfaces are known.
struct SyntheticObjectSpec {
  std::string object_id;
  SizeModelParams true_size;
  QualityModelParams true_quality;
  double noise_sd_size_mb = 1.0;
  double noise_sd_quality = 0.005;
  ConfigSpace space;
  // Coefficient of an extra g*p term added to the true size surface; zero
  // keeps the truth inside the fitted model family.
  double cross_term = 0.0;
};

double true_size(const SyntheticObjectSpec& spec, ConfigPair c);
double true_quality(const SyntheticObjectSpec& spec, ConfigPair c);

struct SceneOptions {
  ConfigSpace space;  // empty -> default_simulation_space()
  double noise_sd_size_mb = 1.0;
  double noise_sd_quality = 0.005;
  double cross_term = 0.0;
};

// g in {16, 48, 80, 112, 144} x p in {8, 10, 12, 14, 17}; 25 pairs, so a
// five-object scene stays within the oracle's enumeration guard.
ConfigSpace default_simulation_space();

// Deterministic in (seed, n_objects, profile, options). Objects are named
// obj0, obj1, ... Each object consumes the same draws under every profile;
// the profile only maps them into its ranges.
std::vector<SyntheticObjectSpec> generate_scene(std::uint64_t seed, int n_objects,
                                                ComplexityProfile profile,
                                                const SceneOptions& options = {});

// Noisy observation of the true surfaces. Always draws two normals.
// Throws kConfigOutOfSpace.
SampleObservation measure(const SyntheticObjectSpec& spec, ConfigPair c, Rng& rng);

struct SolverOutcome {
  SolverKind solver = SolverKind::kDp;
  bool feasible = false;
  std::string error;  // error code name when infeasible
  double total_true_quality = 0.0;
  double total_true_size_mb = 0.0;
  double total_fitted_quality = 0.0;
  std::optional<double> regret_vs_oracle;
  double wall_time_ms = 0.0;
  std::vector<ConfigPair> configs;
};

struct ObjectFitError {
  std::string object_id;
  double mae_size = 0.0;
  double mae_quality = 0.0;
};

struct ExperimentResult {
  std::string scene_id;
  std::uint64_t seed = 0;
  std::string profile;
  DeviceBudget budget;
  std::vector<SolverOutcome> per_solver;
  std::vector<ObjectFitError> fit_errors;
};

struct ExperimentOptions {
  double step_multiplier = 2.0;
  double unit_mb = 1.0;
};

// sampling_plan -> measure -> fit_profile per object, then every requested
// solver (in dp, fairness, greedy, oracle order) plans on the fitted
// surfaces. Reported totals come from the true surfaces at the chosen
// configs; regret is relative to the oracle when it was requested and
// feasible. Infeasibility and failed fits become infeasible rows.
ExperimentResult run_experiment(const std::string& scene_id,
                                const std::string& profile,
                                const std::vector<SyntheticObjectSpec>& scene,
                                const DeviceBudget& budget,
                                const std::set<SolverKind>& solvers,
                                std::uint64_t seed,
                                const ExperimentOptions& options = {});

struct SimulationConfig {
  std::uint64_t master_seed = 0;
  int n_scenes = 1;
  int n_objects = 5;
  ComplexityProfile profile = ComplexityProfile::kRandom;
  std::vector<DeviceBudget> budgets;
  std::set<SolverKind> solvers;
  SceneOptions scene;
  ExperimentOptions experiment;
  unsigned threads = 1;
};

// Scenes s000, s001, ... each run under every budget. Scene and
// measurement seeds derive from (master_seed, scene id). Results are sorted
// by (scene, budget order) whatever the thread count.
std::vector<ExperimentResult> run_simulation(const SimulationConfig& config);

// One results.csv row.
struct ResultRow {
  std::string scene_id;
  std::uint64_t seed = 0;
  std::string profile;
  std::string solver;
  bool feasible = false;
  double total_true_quality = 0.0;
  double total_true_size_mb = 0.0;
  std::optional<double> regret_vs_oracle;
  std::optional<double> wall_time_ms;
};

// scene_id is "<scene>/<budget name>" so both budgets fit the fixed columns.
// wall_time_ms is left empty unless include_timing is set.
std::vector<ResultRow> to_rows(const std::vector<ExperimentResult>& results,
                               bool include_timing);

std::string results_csv_header();
std::string write_results_csv(const std::vector<ResultRow>& rows);
// Throws kInvalidInput on a malformed file.
std::vector<ResultRow> parse_results_csv(const std::string& text);

struct SummaryRow {
  std::string group;  // "all" or "profile=<name>"
  std::string solver;
  int runs = 0;
  double infeasibility_rate = 0.0;
  std::optional<double> mean_regret;
  std::optional<double> max_regret;
  std::optional<double> mean_wall_time_ms;
};

// Per solver over all rows, then per (profile, solver). Solvers without
// rows are omitted. Throws kInvalidInput on empty input.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
std::string write_summary_csv(const std::vector<SummaryRow>& summary);

// Shortest round-trip decimal.
std::string format_double(double v);

}  // namespace nerfplan
