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
#include <string>
#include <vector>

#include "nerfplan/core.hpp"
#include "nerfplan/profiler.hpp"

namespace nerfplan {

// A configuration with its predicted cost and quality.
struct Candidate {
  ConfigPair config;
  double size_mb = 0.0;
  double quality = 0.0;
};

struct ObjectCandidates {
  std::string object_id;
  std::vector<Candidate> candidates;
};

struct PlanningProblem {
  std::vector<ObjectCandidates> objects;
  double budget_mb = 0.0;
  double unit_mb = 1.0;
};

// One candidate with its size rounded up to whole quantization units.
struct QuantizedItem {
  int object_index = 0;
  ConfigPair config;
  std::int64_t weight_units = 0;
  double value = 0.0;
  double size_mb = 0.0;
};

// groups[i] holds the items of object i.
using ItemGroups = std::vector<std::vector<QuantizedItem>>;

struct QuantizedInstance {
  ItemGroups groups;
  std::int64_t capacity = 0;
  double unit_mb = 1.0;
};

// One chosen index per group plus the totals, summed in object order.
struct Selection {
  std::vector<int> choice;
  double total_value = 0.0;
  std::int64_t total_weight = 0;
};

// Final-stage best values over capacities 0..h (-inf = unreachable) and the
// per-object argmax config index at every capacity (-1 = none).
struct DpState {
  std::vector<double> q;
  std::vector<std::vector<int>> choices;
};

struct FilterResult {
  ItemGroups groups;
  std::vector<int> removed;
};

// Smallest integer w with w * unit_mb >= size_mb.
std::int64_t quantize_size(double size_mb, double unit_mb);
// Largest integer h with h * unit_mb <= budget_mb.
std::int64_t quantize_budget(double budget_mb, double unit_mb);

// Quantizes every candidate and orders each group canonically: ascending
// weight, then g, then p. Throws kInvalidInput for a non-positive unit or
// budget, an empty object, or negative sizes.
QuantizedInstance quantize(const PlanningProblem& problem);

// Drops items whose weight exceeds capacity minus the other objects' minimum
// weights. Equality is kept unless `strict` is set. Throws
// kGloballyInfeasible when the minimum weights alone exceed the capacity.
FilterResult feasibility_filter(const ItemGroups& groups, std::int64_t capacity,
                                bool strict = false);

// Stage recurrence for exactly one item per group. O(n h c) time.
DpState run_dp(const ItemGroups& groups, std::int64_t capacity);

// Exact optimum via run_dp and backtracking. Among optimal selections the
// last object's lowest index wins, then the previous object's, and so on.
// Throws kInfeasible when no selection fits.
Selection solve_dp(const ItemGroups& groups, std::int64_t capacity);

// Each object independently takes its best item whose size fits in
// budget_mb / n. Throws kInfeasible when some object has no such item.
Selection solve_fairness(const ItemGroups& groups, double budget_mb,
                         double unit_mb);

// Starts from every object's lightest item and repeatedly applies the
// single upgrade with the best value gain per extra unit that still fits.
// Throws kInfeasible when the lightest items do not fit.
Selection solve_greedy(const ItemGroups& groups, std::int64_t capacity);

// Exhaustive enumeration with the same tie-break as solve_dp. Throws
// kTooLarge when the product of group sizes exceeds `guard`, kInfeasible
// when nothing fits.
inline constexpr std::uint64_t kOracleGuard = 10'000'000;
Selection solve_oracle(const ItemGroups& groups, std::int64_t capacity,
                       std::uint64_t guard = kOracleGuard);

// Value and weight of a choice vector, summed in object order.
Selection evaluate_selection(const ItemGroups& groups, std::vector<int> choice);

struct PlanOptions {
  // Drop items exactly at the feasibility bound as well.
  bool strict_filter = false;
  std::uint64_t oracle_guard = kOracleGuard;
};

// quantize -> feasibility_filter -> solver -> AllocationPlan, entries in
// problem order.
AllocationPlan plan_allocation(const PlanningProblem& problem,
                               SolverKind solver,
                               const PlanOptions& options = {});

// Predicted size and quality of every pair in the space.
ObjectCandidates candidates_from_profile(const ProfileModel& model,
                                         const ConfigSpace& space);

}  // namespace nerfplan
