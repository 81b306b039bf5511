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

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nerfplan/core.hpp"

namespace nerfplan {

// Size surface S(g, p) = m - k / ((g + a)^3 (p + b)^2), in MB.
struct SizeModelParams {
  double k = 0.0;
  double a = 0.0;
  double b = 0.0;
  double m = 0.0;

  friend bool operator==(const SizeModelParams&,
                         const SizeModelParams&) = default;
};

// Quality surface Q(g, p) = k_q (g + a_q)^3 (p + b_q)^2.
struct QualityModelParams {
  double k_q = 0.0;
  double a_q = 0.0;
  double b_q = 0.0;

  friend bool operator==(const QualityModelParams&,
                         const QualityModelParams&) = default;
};

struct FitStats {
  double rmse_size_mb = 0.0;
  double rmse_quality = 0.0;
  int n_samples = 0;

  friend bool operator==(const FitStats&, const FitStats&) = default;
};

struct ProfileModel {
  std::string object_id;
  SizeModelParams size;
  QualityModelParams quality;
  FitStats fit_stats;

  friend bool operator==(const ProfileModel&, const ProfileModel&) = default;
};

struct SamplingPlan {
  std::string object_id;
  std::vector<ConfigPair> points;
};

struct FitValidation {
  double mae_size = 0.0;
  double sd_size = 0.0;
  double mae_quality = 0.0;
  double sd_quality = 0.0;
};

// Both throw kPoleInDomain when g + a <= 0 or p + b <= 0.
// eval_size is clamped below at 0; eval_quality is clamped to [0, 1].
double eval_size(const SizeModelParams& params, ConfigPair c);
double eval_quality(const QualityModelParams& params, ConfigPair c);

// Unclamped surfaces. Used by the fitter so residuals stay smooth.
double raw_size(const SizeModelParams& params, double g, double p);
double raw_quality(const QualityModelParams& params, double g, double p);

// Variable-step sampling: g starts at g_min and advances by
// step_multiplier * g_prev until it passes g_max; each g is paired with the
// min, floor-midpoint and max of the p range. Every planned pair is snapped
// to the nearest admissible pair and duplicates are dropped.
// Throws kEmptySpace for a space with no pairs.
SamplingPlan sampling_plan(const ConfigSpace& space,
                           double step_multiplier = 2.0);

// Nonlinear least-squares fit of both surfaces. Throws kInsufficientSamples,
// kDegenerateSamples or kFitRejected.
// Offsets must keep the surfaces pole-free down to the smallest sampled g
// and p.
ProfileModel fit_profile(const std::string& object_id,
                         std::span<const SampleObservation> samples);
// Same, but pole-freedom is enforced over the whole space as well.
ProfileModel fit_profile(const ConfigSpace& space,
                         std::span<const SampleObservation> samples);

// Pole-free (strictly positive offsets over the space), k >= 0 and m > 0.
bool size_params_admissible(const SizeModelParams& params,
                            const ConfigSpace& space);
bool quality_params_admissible(const QualityModelParams& params,
                               const ConfigSpace& space);

// Mean and population standard deviation of absolute holdout errors.
// Throws kInvalidInput on an empty holdout.
FitValidation validate_fit(const ProfileModel& model,
                           std::span<const SampleObservation> holdout);

void to_json(nlohmann::json& j, const SizeModelParams& s);
void from_json(const nlohmann::json& j, SizeModelParams& s);
void to_json(nlohmann::json& j, const QualityModelParams& q);
void from_json(const nlohmann::json& j, QualityModelParams& q);
void to_json(nlohmann::json& j, const FitStats& f);
void from_json(const nlohmann::json& j, FitStats& f);
void to_json(nlohmann::json& j, const ProfileModel& m);
void from_json(const nlohmann::json& j, ProfileModel& m);
void to_json(nlohmann::json& j, const SamplingPlan& plan);

}  // namespace nerfplan
