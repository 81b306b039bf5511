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

#include "nerfplan/simharness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "nerfplan/parallel.hpp"

namespace nerfplan {
namespace {

double cube(double v) { return v * v * v; }

// Draw ranges per complexity class.
struct ClassRanges {
  double m_lo, m_hi;          // size asymptote, MB
  double q_max_lo, q_max_hi;  // quality at the largest config
};

constexpr ClassRanges kLowRanges{8.0, 24.0, 0.90, 0.98};
constexpr ClassRanges kHighRanges{32.0, 64.0, 0.80, 0.92};
constexpr ClassRanges kRandomRanges{8.0, 64.0, 0.80, 0.98};

const ClassRanges& ranges_for(ComplexityProfile profile, int index) {
  switch (profile) {
    case ComplexityProfile::kLow: return kLowRanges;
    case ComplexityProfile::kHigh: return kHighRanges;
    case ComplexityProfile::kMixed:
      return index % 2 == 0 ? kLowRanges : kHighRanges;
    case ComplexityProfile::kRandom: return kRandomRanges;
  }
  return kRandomRanges;
}

double lerp(double lo, double hi, double t) { return lo + (hi - lo) * t; }

}  // namespace

std::string profile_name(ComplexityProfile profile) {
  switch (profile) {
    case ComplexityProfile::kLow: return "low";
    case ComplexityProfile::kHigh: return "high";
    case ComplexityProfile::kMixed: return "mixed";
    case ComplexityProfile::kRandom: return "random";
  }
  return "random";
}

ComplexityProfile parse_profile(const std::string& name) {
  if (name == "low") return ComplexityProfile::kLow;
  if (name == "high") return ComplexityProfile::kHigh;
  if (name == "mixed") return ComplexityProfile::kMixed;
  if (name == "random") return ComplexityProfile::kRandom;
  throw Error(ErrorCode::kInvalidInput, "unknown complexity profile '" + name + "'");
}

double true_size(const SyntheticObjectSpec& spec, ConfigPair c) {
  const double s = raw_size(spec.true_size, c.g, c.p) +
                   spec.cross_term * static_cast<double>(c.g) * c.p;
  return std::max(0.0, s);
}

double true_quality(const SyntheticObjectSpec& spec, ConfigPair c) {
  return std::clamp(raw_quality(spec.true_quality, c.g, c.p), 0.0, 1.0);
}

ConfigSpace default_simulation_space() {
  return ConfigSpace::product("", {16, 48, 80, 112, 144}, {8, 10, 12, 14, 17});
}

std::vector<SyntheticObjectSpec> generate_scene(std::uint64_t seed, int n_objects,
                                                ComplexityProfile profile,
                                                const SceneOptions& options) {
  if (n_objects < 1) {
    throw Error(ErrorCode::kInvalidInput, "n_objects must be >= 1");
  }
  const ConfigSpace base =
      options.space.pairs().empty() ? default_simulation_space() : options.space;
  const double g_min = base.g_min();
  const double g_max = base.g_max();
  const double p_min = base.p_min();
  const double p_max = base.p_max();

  Rng rng(seed);
  std::vector<SyntheticObjectSpec> scene;
  for (int i = 0; i < n_objects; ++i) {
    // Fixed draw order per object: size scale, drop, offsets, quality.
    const double t_m = rng.uniform();
    const double t_drop = rng.uniform();
    const double t_a = rng.uniform();
    const double t_b = rng.uniform();
    const double t_aq = rng.uniform();
    const double t_bq = rng.uniform();
    const double t_q = rng.uniform();

    const ClassRanges& r = ranges_for(profile, i);
    SyntheticObjectSpec spec;
    spec.object_id = "obj" + std::to_string(i);
    spec.space = ConfigSpace::product(spec.object_id, base.g_values(), base.p_values());
    spec.noise_sd_size_mb = options.noise_sd_size_mb;
    spec.noise_sd_quality = options.noise_sd_quality;
    spec.cross_term = options.cross_term;

    // The smallest config sits a fraction `drop` below the asymptote m.
    const double m = lerp(r.m_lo, r.m_hi, t_m);
    const double drop = lerp(0.6, 0.9, t_drop);
    const double a = t_a * g_min;
    const double b = t_b * p_min;
    spec.true_size = {drop * m * cube(g_min + a) * (p_min + b) * (p_min + b), a, b, m};

    const double a_q = t_aq * 4.0 * g_min;
    const double b_q = t_bq * 2.0 * p_min;
    const double q_max = lerp(r.q_max_hi, r.q_max_lo, t_q);
    spec.true_quality = {q_max / (cube(g_max + a_q) * (p_max + b_q) * (p_max + b_q)),
                         a_q, b_q};
    scene.push_back(std::move(spec));
  }
  return scene;
}

SampleObservation measure(const SyntheticObjectSpec& spec, ConfigPair c, Rng& rng) {
  if (!spec.space.contains(c)) {
    throw Error(ErrorCode::kConfigOutOfSpace,
                "config (" + std::to_string(c.g) + ", " + std::to_string(c.p) +
                    ") is outside the space of '" + spec.object_id + "'");
  }
  const double size_noise = rng.normal();
  const double quality_noise = rng.normal();
  SampleObservation s;
  s.config = c;
  s.size_mb = std::max(0.0, true_size(spec, c) + spec.noise_sd_size_mb * size_noise);
  s.quality = std::clamp(true_quality(spec, c) + spec.noise_sd_quality * quality_noise,
                         0.0, 1.0);
  return s;
}

ExperimentResult run_experiment(const std::string& scene_id,
                                const std::string& profile,
                                const std::vector<SyntheticObjectSpec>& scene,
                                const DeviceBudget& budget,
                                const std::set<SolverKind>& solvers,
                                std::uint64_t seed,
                                const ExperimentOptions& options) {
  ExperimentResult result;
  result.scene_id = scene_id;
  result.seed = seed;
  result.profile = profile;
  result.budget = budget;

  Rng rng(seed);
  PlanningProblem problem;
  problem.budget_mb = budget.capacity_mb;
  problem.unit_mb = options.unit_mb;
  std::string fit_failure;
  for (const auto& spec : scene) {
    const SamplingPlan plan = sampling_plan(spec.space, options.step_multiplier);
    std::vector<SampleObservation> samples;
    for (const auto& c : plan.points) samples.push_back(measure(spec, c, rng));
    try {
      const ProfileModel model = fit_profile(spec.space, samples);
      ObjectFitError err{spec.object_id, 0.0, 0.0};
      for (const auto& c : spec.space.pairs()) {
        err.mae_size += std::abs(eval_size(model.size, c) - true_size(spec, c));
        err.mae_quality +=
            std::abs(eval_quality(model.quality, c) - true_quality(spec, c));
      }
      err.mae_size /= static_cast<double>(spec.space.pairs().size());
      err.mae_quality /= static_cast<double>(spec.space.pairs().size());
      result.fit_errors.push_back(err);
      problem.objects.push_back(candidates_from_profile(model, spec.space));
    } catch (const Error& e) {
      if (fit_failure.empty()) fit_failure = std::string(error_code_name(e.code()));
    }
  }

  const SyntheticObjectSpec* by_index = scene.data();
  for (SolverKind kind : solvers) {
    SolverOutcome out;
    out.solver = kind;
    const auto start = std::chrono::steady_clock::now();
    if (!fit_failure.empty()) {
      out.error = fit_failure;
    } else {
      try {
        const AllocationPlan plan = plan_allocation(problem, kind);
        out.feasible = true;
        out.total_fitted_quality = plan.total_quality();
        for (std::size_t i = 0; i < plan.entries().size(); ++i) {
          const ConfigPair c = plan.entries()[i].config;
          out.configs.push_back(c);
          out.total_true_quality += true_quality(by_index[i], c);
          out.total_true_size_mb += true_size(by_index[i], c);
        }
      } catch (const Error& e) {
        out.error = std::string(error_code_name(e.code()));
      }
    }
    out.wall_time_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    result.per_solver.push_back(std::move(out));
  }

  const SolverOutcome* oracle = nullptr;
  for (const auto& o : result.per_solver) {
    if (o.solver == SolverKind::kOracle && o.feasible) oracle = &o;
  }
  if (oracle != nullptr) {
    const double reference = oracle->total_true_quality;
    for (auto& o : result.per_solver) {
      if (o.feasible) o.regret_vs_oracle = reference - o.total_true_quality;
    }
  }
  return result;
}

std::vector<ExperimentResult> run_simulation(const SimulationConfig& config) {
  if (config.n_scenes < 1) {
    throw Error(ErrorCode::kInvalidInput, "n_scenes must be >= 1");
  }
  if (config.budgets.empty() || config.solvers.empty()) {
    throw Error(ErrorCode::kInvalidInput, "need at least one budget and solver");
  }
  const std::size_t n_budgets = config.budgets.size();
  const std::size_t jobs = static_cast<std::size_t>(config.n_scenes) * n_budgets;
  std::vector<ExperimentResult> results(jobs);
  parallel_for(jobs, config.threads, [&](std::size_t job) {
    const std::size_t scene_index = job / n_budgets;
    const DeviceBudget& budget = config.budgets[job % n_budgets];
    char name[16];
    std::snprintf(name, sizeof(name), "s%03zu", scene_index);
    const std::uint64_t seed = derive_seed(config.master_seed, name);
    const auto scene =
        generate_scene(seed, config.n_objects, config.profile, config.scene);
    results[job] =
        run_experiment(std::string(name) + "/" + budget.name,
                       profile_name(config.profile), scene, budget,
                       config.solvers, mix64(seed), config.experiment);
  });
  return results;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::vector<ResultRow> to_rows(const std::vector<ExperimentResult>& results,
                               bool include_timing) {
  std::vector<ResultRow> rows;
  for (const auto& r : results) {
    for (const auto& o : r.per_solver) {
      ResultRow row;
      row.scene_id = r.scene_id;
      row.seed = r.seed;
      row.profile = r.profile;
      row.solver = solver_name(o.solver);
      row.feasible = o.feasible;
      row.total_true_quality = o.total_true_quality;
      row.total_true_size_mb = o.total_true_size_mb;
      row.regret_vs_oracle = o.regret_vs_oracle;
      if (include_timing) row.wall_time_ms = o.wall_time_ms;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string results_csv_header() {
  return "scene_id,seed,profile,solver,feasible,total_true_quality,"
         "total_true_size_mb,regret_vs_oracle,wall_time_ms";
}

namespace {

std::string opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, int line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidInput,
                "results.csv line " + std::to_string(line_no) + ": bad number '" +
                    s + "'");
  }
  return v;
}

std::optional<double> parse_opt(const std::string& s, int line_no) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line_no);
}

}  // namespace

std::string write_results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << results_csv_header() << '\n';
  for (const auto& r : rows) {
    out << r.scene_id << ',' << r.seed << ',' << r.profile << ',' << r.solver << ','
        << (r.feasible ? "true" : "false") << ','
        << format_double(r.total_true_quality) << ','
        << format_double(r.total_true_size_mb) << ',' << opt(r.regret_vs_oracle)
        << ',' << opt(r.wall_time_ms) << '\n';
  }
  return out.str();
}

std::vector<ResultRow> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != results_csv_header()) {
    throw Error(ErrorCode::kInvalidInput, "results.csv: unexpected header");
  }
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) {
      throw Error(ErrorCode::kInvalidInput,
                  "results.csv line " + std::to_string(line_no) +
                      ": expected 9 fields");
    }
    ResultRow r;
    r.scene_id = f[0];
    r.seed = std::stoull(f[1]);
    r.profile = f[2];
    r.solver = f[3];
    if (f[4] != "true" && f[4] != "false") {
      throw Error(ErrorCode::kInvalidInput,
                  "results.csv line " + std::to_string(line_no) +
                      ": feasible must be true or false");
    }
    r.feasible = f[4] == "true";
    r.total_true_quality = parse_double(f[5], line_no);
    r.total_true_size_mb = parse_double(f[6], line_no);
    r.regret_vs_oracle = parse_opt(f[7], line_no);
    r.wall_time_ms = parse_opt(f[8], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) {
    throw Error(ErrorCode::kInvalidInput, "nothing to summarize");
  }
  struct Acc {
    int runs = 0;
    int infeasible = 0;
    int regret_n = 0;
    double regret_sum = 0.0;
    double regret_max = 0.0;
    int time_n = 0;
    double time_sum = 0.0;
  };
  // Solver order follows the canonical dp, fairness, greedy, oracle order.
  auto solver_rank = [](const std::string& s) {
    try {
      return static_cast<int>(parse_solver(s));
    } catch (const Error&) {
      return 99;
    }
  };
  using Key = std::tuple<int, std::string, int, std::string>;
  std::map<Key, Acc> acc;
  auto add = [&](int group_rank, const std::string& group, const ResultRow& r) {
    Acc& a = acc[Key{group_rank, group, solver_rank(r.solver), r.solver}];
    ++a.runs;
    if (!r.feasible) ++a.infeasible;
    if (r.regret_vs_oracle) {
      a.regret_max = a.regret_n == 0 ? *r.regret_vs_oracle
                                     : std::max(a.regret_max, *r.regret_vs_oracle);
      ++a.regret_n;
      a.regret_sum += *r.regret_vs_oracle;
    }
    if (r.wall_time_ms) {
      ++a.time_n;
      a.time_sum += *r.wall_time_ms;
    }
  };
  for (const auto& r : rows) {
    add(0, "all", r);
    add(1, "profile=" + r.profile, r);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, a] : acc) {
    SummaryRow s;
    s.group = std::get<1>(key);
    s.solver = std::get<3>(key);
    s.runs = a.runs;
    s.infeasibility_rate = static_cast<double>(a.infeasible) / a.runs;
    if (a.regret_n > 0) {
      s.mean_regret = a.regret_sum / a.regret_n;
      s.max_regret = a.regret_max;
    }
    if (a.time_n > 0) s.mean_wall_time_ms = a.time_sum / a.time_n;
    out.push_back(std::move(s));
  }
  return out;
}

std::string write_summary_csv(const std::vector<SummaryRow>& summary) {
  std::ostringstream out;
  out << "group,solver,runs,infeasibility_rate,mean_regret,max_regret,"
         "mean_wall_time_ms\n";
  for (const auto& s : summary) {
    out << s.group << ',' << s.solver << ',' << s.runs << ','
        << format_double(s.infeasibility_rate) << ',' << opt(s.mean_regret) << ','
        << opt(s.max_regret) << ',' << opt(s.mean_wall_time_ms) << '\n';
  }
  return out.str();
}

}  // namespace nerfplan
