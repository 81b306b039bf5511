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

#include "nerfplan/core.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include "nerfplan/log.hpp"

namespace nerfplan {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "InvalidInput";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kUnknownObject: return "UnknownObject";
    case ErrorCode::kPoleInDomain: return "PoleInDomain";
    case ErrorCode::kEmptySpace: return "EmptySpace";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kDegenerateSamples: return "DegenerateSamples";
    case ErrorCode::kFitRejected: return "FitRejected";
    case ErrorCode::kGloballyInfeasible: return "GloballyInfeasible";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kConfigOutOfSpace: return "ConfigOutOfSpace";
  }
  return "Unknown";
}

namespace {

// Empty string when the list is a valid strictly increasing positive list.
std::string list_problem(const std::vector<int>& values, const char* name) {
  if (values.empty()) return std::string(name) + " is empty";
  for (int v : values) {
    if (v < 1) return std::string(name) + " contains a non-positive value";
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] <= values[i - 1]) {
      return std::string(name) + " not strictly increasing";
    }
  }
  return {};
}

}  // namespace

ConfigSpace ConfigSpace::product(std::string object_id,
                                 std::vector<int> g_values,
                                 std::vector<int> p_values) {
  for (const auto& problem : {list_problem(g_values, "g_values"),
                              list_problem(p_values, "p_values")}) {
    if (!problem.empty()) {
      throw Error(ErrorCode::kInvalidInput,
                  "config space '" + object_id + "': " + problem);
    }
  }
  ConfigSpace space;
  space.object_id_ = std::move(object_id);
  space.pairs_.reserve(g_values.size() * p_values.size());
  for (int g : g_values) {
    for (int p : p_values) space.pairs_.push_back({g, p});
  }
  space.g_values_ = std::move(g_values);
  space.p_values_ = std::move(p_values);
  space.product_ = true;
  return space;
}

ConfigSpace ConfigSpace::enumerated(std::string object_id,
                                    std::vector<ConfigPair> pairs) {
  if (pairs.empty()) {
    throw Error(ErrorCode::kInvalidInput,
                "config space '" + object_id + "' has no pairs");
  }
  std::set<ConfigPair> seen;
  std::set<int> gs;
  std::set<int> ps;
  for (const auto& c : pairs) {
    if (c.g < 1 || c.p < 1) {
      throw Error(ErrorCode::kInvalidInput,
                  "config space '" + object_id + "' has a non-positive pair");
    }
    if (!seen.insert(c).second) {
      throw Error(ErrorCode::kInvalidInput,
                  "config space '" + object_id + "' has a duplicate pair");
    }
    gs.insert(c.g);
    ps.insert(c.p);
  }
  ConfigSpace space;
  space.object_id_ = std::move(object_id);
  space.g_values_.assign(gs.begin(), gs.end());
  space.p_values_.assign(ps.begin(), ps.end());
  space.pairs_ = std::move(pairs);
  space.product_ =
      space.pairs_.size() == space.g_values_.size() * space.p_values_.size();
  return space;
}

bool ConfigSpace::contains(ConfigPair c) const {
  if (product_) {
    return std::binary_search(g_values_.begin(), g_values_.end(), c.g) &&
           std::binary_search(p_values_.begin(), p_values_.end(), c.p);
  }
  return std::find(pairs_.begin(), pairs_.end(), c) != pairs_.end();
}

DeviceBudget DeviceBudget::make(std::string name, double capacity_mb) {
  if (!(capacity_mb > 0.0)) {
    throw Error(ErrorCode::kInvalidInput,
                "budget '" + name + "' must have capacity_mb > 0");
  }
  return DeviceBudget{std::move(name), capacity_mb};
}

std::optional<DeviceBudget> DeviceBudget::preset(const std::string& name) {
  if (name == "iphone13") return DeviceBudget{"iphone13", 240.0};
  if (name == "pixel4") return DeviceBudget{"pixel4", 150.0};
  return std::nullopt;
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::kDp: return "dp";
    case SolverKind::kFairness: return "fairness";
    case SolverKind::kGreedy: return "greedy";
    case SolverKind::kOracle: return "oracle";
  }
  return "dp";
}

SolverKind parse_solver(const std::string& name) {
  if (name == "dp") return SolverKind::kDp;
  if (name == "fairness") return SolverKind::kFairness;
  if (name == "greedy") return SolverKind::kGreedy;
  if (name == "oracle") return SolverKind::kOracle;
  throw Error(ErrorCode::kInvalidInput, "unknown solver '" + name + "'");
}

AllocationPlan::AllocationPlan(std::vector<PlanEntry> entries, double budget_mb,
                               SolverKind solver)
    : entries_(std::move(entries)), budget_mb_(budget_mb), solver_(solver) {
  std::set<std::string> ids;
  for (const auto& e : entries_) {
    if (!ids.insert(e.object_id).second) {
      throw Error(ErrorCode::kInvalidInput,
                  "plan has two entries for object '" + e.object_id + "'");
    }
    total_size_mb_ += e.predicted_size_mb;
    total_quality_ += e.predicted_quality;
  }
  if (total_size_mb_ > budget_mb_) {
    std::ostringstream msg;
    msg << "plan size " << total_size_mb_ << " MB exceeds budget "
        << budget_mb_ << " MB";
    throw Error(ErrorCode::kInfeasible, msg.str());
  }
}

ConfigSpace SceneObject::space() const {
  return ConfigSpace::product(id, g_values, p_values);
}

ValidationReport validate_scene(const SceneDescriptor& scene) {
  ValidationReport report;
  std::set<std::string> ids;
  for (const auto& object : scene.objects) {
    const std::string where = "object '" + object.id + "': ";
    if (!ids.insert(object.id).second) {
      report.violations.push_back(where + "duplicate object id");
    }
    if (object.g_values.empty() || object.p_values.empty()) {
      report.violations.push_back(where + "empty config space");
      continue;
    }
    for (const auto& problem : {list_problem(object.g_values, "g_values"),
                                list_problem(object.p_values, "p_values")}) {
      if (!problem.empty()) report.violations.push_back(where + problem);
    }
  }
  if (!(scene.budget.capacity_mb > 0.0)) {
    report.violations.push_back("budget capacity_mb must be > 0");
  }
  return report;
}

double clamp_quality(double quality, const std::string& context) {
  if (quality >= 0.0 && quality <= 1.0) return quality;
  std::ostringstream msg;
  msg << context << ": quality " << quality << " clamped to [0, 1]";
  log::warn(msg.str());
  return std::clamp(quality, 0.0, 1.0);
}

}  // namespace nerfplan
