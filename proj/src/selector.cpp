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

#include "nerfplan/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

namespace nerfplan {
namespace {

constexpr double kUnreachable = -std::numeric_limits<double>::infinity();

void require_nonempty(const ItemGroups& groups) {
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].empty()) {
      throw Error(ErrorCode::kInvalidInput,
                  "object " + std::to_string(i) + " has no configurations");
    }
  }
}

// Lightest item, lowest index on ties.
int lightest(const std::vector<QuantizedItem>& items) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(items.size()); ++k) {
    if (items[k].weight_units < items[best].weight_units) best = k;
  }
  return best;
}

std::int64_t sum_min_weights(const ItemGroups& groups) {
  std::int64_t total = 0;
  for (const auto& items : groups) total += items[lightest(items)].weight_units;
  return total;
}

Error infeasible(const std::string& what, std::int64_t need, std::int64_t have) {
  std::ostringstream msg;
  msg << what << ": minimum weight " << need << " units exceeds capacity "
      << have;
  return Error(ErrorCode::kInfeasible, msg.str());
}

}  // namespace

std::int64_t quantize_size(double size_mb, double unit_mb) {
  auto w = static_cast<std::int64_t>(std::ceil(size_mb / unit_mb));
  while (static_cast<double>(w) * unit_mb < size_mb) ++w;
  while (w > 0 && static_cast<double>(w - 1) * unit_mb >= size_mb) --w;
  return w;
}

std::int64_t quantize_budget(double budget_mb, double unit_mb) {
  auto h = static_cast<std::int64_t>(std::floor(budget_mb / unit_mb));
  while (static_cast<double>(h + 1) * unit_mb <= budget_mb) ++h;
  while (h > 0 && static_cast<double>(h) * unit_mb > budget_mb) --h;
  return h;
}

QuantizedInstance quantize(const PlanningProblem& problem) {
  if (!(problem.unit_mb > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "unit_mb must be > 0");
  }
  if (!(problem.budget_mb > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "budget must be > 0");
  }
  QuantizedInstance out;
  out.unit_mb = problem.unit_mb;
  out.capacity = quantize_budget(problem.budget_mb, problem.unit_mb);
  for (std::size_t i = 0; i < problem.objects.size(); ++i) {
    const auto& object = problem.objects[i];
    if (object.candidates.empty()) {
      throw Error(ErrorCode::kInvalidInput,
                  "object '" + object.object_id + "' has no candidates");
    }
    std::vector<QuantizedItem> items;
    items.reserve(object.candidates.size());
    for (const auto& c : object.candidates) {
      if (!(c.size_mb >= 0.0)) {
        throw Error(ErrorCode::kInvalidInput,
                    "object '" + object.object_id + "' has a negative size");
      }
      items.push_back({static_cast<int>(i), c.config,
                       quantize_size(c.size_mb, problem.unit_mb), c.quality,
                       c.size_mb});
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const QuantizedItem& x, const QuantizedItem& y) {
                       return std::tie(x.weight_units, x.config.g, x.config.p) <
                              std::tie(y.weight_units, y.config.g, y.config.p);
                     });
    out.groups.push_back(std::move(items));
  }
  return out;
}

FilterResult feasibility_filter(const ItemGroups& groups, std::int64_t capacity,
                                bool strict) {
  require_nonempty(groups);
  const std::int64_t total_min = sum_min_weights(groups);
  if (total_min > capacity) {
    std::ostringstream msg;
    msg << "sum of minimum weights " << total_min << " exceeds capacity "
        << capacity;
    throw Error(ErrorCode::kGloballyInfeasible, msg.str());
  }
  FilterResult result;
  result.groups.reserve(groups.size());
  for (const auto& items : groups) {
    // Residual room for this object once every other object is at its min.
    const std::int64_t room =
        capacity - (total_min - items[lightest(items)].weight_units);
    std::vector<QuantizedItem> kept;
    for (const auto& item : items) {
      const bool fits =
          strict ? item.weight_units < room : item.weight_units <= room;
      if (fits) kept.push_back(item);
    }
    result.removed.push_back(static_cast<int>(items.size() - kept.size()));
    if (kept.empty()) {
      // Only reachable with strict filtering at an exactly tight budget.
      throw Error(ErrorCode::kGloballyInfeasible,
                  "an object has no configuration strictly below its bound");
    }
    result.groups.push_back(std::move(kept));
  }
  return result;
}

DpState run_dp(const ItemGroups& groups, std::int64_t capacity) {
  require_nonempty(groups);
  if (capacity < 0) {
    throw Error(ErrorCode::kInvalidInput, "capacity must be >= 0");
  }
  const std::size_t width = static_cast<std::size_t>(capacity) + 1;
  DpState state;
  // Stage 0: the empty prefix fits anywhere with value 0.
  std::vector<double> prev(width, 0.0);
  std::vector<double> next(width);
  state.choices.assign(groups.size(), std::vector<int>(width, -1));

  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& items = groups[i];
    auto& choice = state.choices[i];
    for (std::size_t j = 0; j < width; ++j) {
      double best = kUnreachable;
      int best_k = -1;
      for (int k = 0; k < static_cast<int>(items.size()); ++k) {
        const std::int64_t w = items[k].weight_units;
        if (w > static_cast<std::int64_t>(j)) continue;
        const double base = prev[j - static_cast<std::size_t>(w)];
        if (base == kUnreachable) continue;
        const double candidate = base + items[k].value;
        if (candidate > best) {
          best = candidate;
          best_k = k;
        }
      }
      next[j] = best;
      choice[j] = best_k;
    }
    std::swap(prev, next);
  }
  state.q = std::move(prev);
  return state;
}

Selection evaluate_selection(const ItemGroups& groups, std::vector<int> choice) {
  Selection s;
  s.total_value = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto& item = groups[i].at(static_cast<std::size_t>(choice.at(i)));
    s.total_value += item.value;
    s.total_weight += item.weight_units;
  }
  s.choice = std::move(choice);
  return s;
}

Selection solve_dp(const ItemGroups& groups, std::int64_t capacity) {
  const DpState state = run_dp(groups, capacity);
  if (state.q.back() == kUnreachable) {
    throw infeasible("dp", sum_min_weights(groups), capacity);
  }
  std::vector<int> choice(groups.size(), -1);
  std::int64_t j = capacity;
  for (std::size_t i = groups.size(); i-- > 0;) {
    const int k = state.choices[i][static_cast<std::size_t>(j)];
    choice[i] = k;
    j -= groups[i][static_cast<std::size_t>(k)].weight_units;
  }
  Selection s = evaluate_selection(groups, std::move(choice));
  s.total_value = groups.empty() ? 0.0 : state.q.back();
  return s;
}

Selection solve_fairness(const ItemGroups& groups, double budget_mb,
                         double unit_mb) {
  require_nonempty(groups);
  if (groups.empty()) return {};
  const double share = budget_mb / static_cast<double>(groups.size());
  std::vector<int> choice;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    int best = -1;
    for (int k = 0; k < static_cast<int>(groups[i].size()); ++k) {
      const auto& item = groups[i][static_cast<std::size_t>(k)];
      if (static_cast<double>(item.weight_units) * unit_mb > share) continue;
      if (best < 0 || item.value > groups[i][static_cast<std::size_t>(best)].value) {
        best = k;
      }
    }
    if (best < 0) {
      std::ostringstream msg;
      msg << "fairness: object " << i << " has no configuration within its "
          << share << " MB share";
      throw Error(ErrorCode::kInfeasible, msg.str());
    }
    choice.push_back(best);
  }
  return evaluate_selection(groups, std::move(choice));
}

Selection solve_greedy(const ItemGroups& groups, std::int64_t capacity) {
  require_nonempty(groups);
  std::vector<int> choice;
  std::int64_t weight = 0;
  for (const auto& items : groups) {
    choice.push_back(lightest(items));
    weight += items[static_cast<std::size_t>(choice.back())].weight_units;
  }
  if (weight > capacity) throw infeasible("greedy", weight, capacity);

  // Every applied upgrade strictly raises the total value, so this ends.
  while (true) {
    int best_i = -1;
    int best_k = -1;
    double best_ratio = kUnreachable;
    for (int i = 0; i < static_cast<int>(groups.size()); ++i) {
      const auto& items = groups[static_cast<std::size_t>(i)];
      const auto& current = items[static_cast<std::size_t>(choice[i])];
      for (int k = 0; k < static_cast<int>(items.size()); ++k) {
        const auto& item = items[static_cast<std::size_t>(k)];
        const double dv = item.value - current.value;
        const std::int64_t dw = item.weight_units - current.weight_units;
        if (!(dv > 0.0) || weight + dw > capacity) continue;
        const double ratio = dw <= 0 ? std::numeric_limits<double>::infinity()
                                     : dv / static_cast<double>(dw);
        if (ratio > best_ratio) {
          best_ratio = ratio;
          best_i = i;
          best_k = k;
        }
      }
    }
    if (best_i < 0) break;
    const auto& items = groups[static_cast<std::size_t>(best_i)];
    weight += items[static_cast<std::size_t>(best_k)].weight_units -
              items[static_cast<std::size_t>(choice[best_i])].weight_units;
    choice[best_i] = best_k;
  }
  return evaluate_selection(groups, std::move(choice));
}

Selection solve_oracle(const ItemGroups& groups, std::int64_t capacity,
                       std::uint64_t guard) {
  require_nonempty(groups);
  std::uint64_t combos = 1;
  for (const auto& items : groups) {
    if (items.size() > guard / combos) {
      combos = guard + 1;
      break;
    }
    combos *= items.size();
  }
  if (combos > guard) {
    throw Error(ErrorCode::kTooLarge,
                "oracle: search space exceeds " + std::to_string(guard));
  }

  const std::size_t n = groups.size();
  // Odometer with object 0 as the fastest digit, so combinations are visited
  // in ascending order of (index[n-1], ..., index[0]); the first optimum seen
  // is the one solve_dp's backtracking returns.
  std::vector<int> idx(n, 0);
  std::vector<int> best;
  double best_value = kUnreachable;
  while (true) {
    double value = 0.0;
    std::int64_t weight = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& item = groups[i][static_cast<std::size_t>(idx[i])];
      value += item.value;
      weight += item.weight_units;
    }
    if (weight <= capacity && value > best_value) {
      best_value = value;
      best = idx;
    }
    std::size_t d = 0;
    while (d < n && ++idx[d] == static_cast<int>(groups[d].size())) {
      idx[d] = 0;
      ++d;
    }
    if (d == n) break;
  }
  if (best.size() != n || (n > 0 && best_value == kUnreachable)) {
    throw infeasible("oracle", sum_min_weights(groups), capacity);
  }
  return evaluate_selection(groups, std::move(best));
}

AllocationPlan plan_allocation(const PlanningProblem& problem, SolverKind solver,
                               const PlanOptions& options) {
  const QuantizedInstance instance = quantize(problem);
  const FilterResult filtered = feasibility_filter(
      instance.groups, instance.capacity, options.strict_filter);
  Selection selection;
  switch (solver) {
    case SolverKind::kDp:
      selection = solve_dp(filtered.groups, instance.capacity);
      break;
    case SolverKind::kFairness:
      selection = solve_fairness(filtered.groups, problem.budget_mb,
                                 problem.unit_mb);
      break;
    case SolverKind::kGreedy:
      selection = solve_greedy(filtered.groups, instance.capacity);
      break;
    case SolverKind::kOracle:
      selection = solve_oracle(filtered.groups, instance.capacity,
                               options.oracle_guard);
      break;
  }
  std::vector<PlanEntry> entries;
  for (std::size_t i = 0; i < filtered.groups.size(); ++i) {
    const auto& item =
        filtered.groups[i][static_cast<std::size_t>(selection.choice[i])];
    entries.push_back({problem.objects[i].object_id, item.config, item.size_mb,
                       item.value});
  }
  return AllocationPlan(std::move(entries), problem.budget_mb, solver);
}

ObjectCandidates candidates_from_profile(const ProfileModel& model,
                                         const ConfigSpace& space) {
  ObjectCandidates out;
  out.object_id = model.object_id;
  for (const auto& c : space.pairs()) {
    out.candidates.push_back(
        {c, eval_size(model.size, c), eval_quality(model.quality, c)});
  }
  return out;
}

}  // namespace nerfplan
