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

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "nerfplan/error.hpp"

namespace nerfplan {

// One baking configuration: mesh granularity g (voxels per axis) and texture
// patch side p (pixels).
struct ConfigPair {
  int g = 1;
  int p = 1;

  friend auto operator<=>(const ConfigPair&, const ConfigPair&) = default;
};

// The admissible configurations of one object. Either the Cartesian product
// of g_values and p_values, or an explicit enumeration of pairs.
class ConfigSpace {
 public:
  ConfigSpace() = default;

  // Throws kInvalidInput if either list is empty, non-positive or not
  // strictly increasing.
  static ConfigSpace product(std::string object_id, std::vector<int> g_values,
                             std::vector<int> p_values);

  // g_values/p_values are derived as the sorted distinct coordinates.
  // Throws kInvalidInput on duplicates or non-positive values.
  static ConfigSpace enumerated(std::string object_id,
                                std::vector<ConfigPair> pairs);

  const std::string& object_id() const { return object_id_; }
  const std::vector<int>& g_values() const { return g_values_; }
  const std::vector<int>& p_values() const { return p_values_; }
  const std::vector<ConfigPair>& pairs() const { return pairs_; }
  bool is_product() const { return product_; }

  bool contains(ConfigPair c) const;
  int g_min() const { return g_values_.front(); }
  int g_max() const { return g_values_.back(); }
  int p_min() const { return p_values_.front(); }
  int p_max() const { return p_values_.back(); }

  friend bool operator==(const ConfigSpace&, const ConfigSpace&) = default;

 private:
  std::string object_id_;
  std::vector<int> g_values_;
  std::vector<int> p_values_;
  std::vector<ConfigPair> pairs_;
  bool product_ = true;
};

struct DeviceBudget {
  std::string name;
  double capacity_mb = 0.0;

  // Throws kInvalidInput unless capacity_mb > 0.
  static DeviceBudget make(std::string name, double capacity_mb);
  // "iphone13" (240 MB) or "pixel4" (150 MB); nullopt otherwise.
  static std::optional<DeviceBudget> preset(const std::string& name);

  friend bool operator==(const DeviceBudget&, const DeviceBudget&) = default;
};

struct SampleObservation {
  ConfigPair config;
  double size_mb = 0.0;
  double quality = 0.0;

  friend bool operator==(const SampleObservation&,
                         const SampleObservation&) = default;
};

enum class SolverKind { kDp, kFairness, kGreedy, kOracle };

std::string solver_name(SolverKind kind);
// Throws kInvalidInput for unknown names.
SolverKind parse_solver(const std::string& name);

struct PlanEntry {
  std::string object_id;
  ConfigPair config;
  double predicted_size_mb = 0.0;
  double predicted_quality = 0.0;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

// Solver output. Totals are always recomputed from the entries.
class AllocationPlan {
 public:
  AllocationPlan() = default;
  // Throws kInvalidInput on duplicate object ids and kInfeasible when the
  // summed size exceeds the budget.
  AllocationPlan(std::vector<PlanEntry> entries, double budget_mb,
                 SolverKind solver);

  const std::vector<PlanEntry>& entries() const { return entries_; }
  double total_size_mb() const { return total_size_mb_; }
  double total_quality() const { return total_quality_; }
  double budget_mb() const { return budget_mb_; }
  SolverKind solver() const { return solver_; }

  friend bool operator==(const AllocationPlan&,
                         const AllocationPlan&) = default;

 private:
  std::vector<PlanEntry> entries_;
  double total_size_mb_ = 0.0;
  double total_quality_ = 0.0;
  double budget_mb_ = 0.0;
  SolverKind solver_ = SolverKind::kDp;
};

// One scene.json object entry, held as parsed so that validate_scene can
// report malformed value lists instead of failing at parse time.
struct SceneObject {
  std::string id;
  std::vector<int> g_values;
  std::vector<int> p_values;
  std::vector<SampleObservation> samples;

  // Product space of the value lists; throws kInvalidInput if malformed.
  ConfigSpace space() const;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

// Parsed scene.json. Members are not validated on construction; see
// validate_scene.
struct SceneDescriptor {
  std::vector<SceneObject> objects;
  DeviceBudget budget;

  friend bool operator==(const SceneDescriptor&,
                         const SceneDescriptor&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate_scene(const SceneDescriptor& scene);

// Clamps to [0, 1], logging a warning when the value was outside.
double clamp_quality(double quality, const std::string& context);

}  // namespace nerfplan
