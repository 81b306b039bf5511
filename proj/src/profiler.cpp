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

#include "nerfplan/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "nerfplan/json_io.hpp"
#include "nerfplan/levenberg_marquardt.hpp"
#include "nerfplan/log.hpp"

namespace nerfplan {
namespace {

void check_offsets(double g_offset, double p_offset, ConfigPair c) {
  if (!(c.g + g_offset > 0.0) || !(c.p + p_offset > 0.0)) {
    std::ostringstream msg;
    msg << "model pole at (g=" << c.g << ", p=" << c.p << ")";
    throw Error(ErrorCode::kPoleInDomain, msg.str());
  }
}

double cube(double v) { return v * v * v; }

// Index of the closest value; ties go to the smaller value.
int nearest_value(const std::vector<int>& values, double target) {
  int best = values.front();
  double best_dist = std::abs(best - target);
  for (int v : values) {
    const double d = std::abs(v - target);
    if (d < best_dist) {
      best = v;
      best_dist = d;
    }
  }
  return best;
}

ConfigPair snap(const ConfigSpace& space, double g, double p) {
  if (space.is_product()) {
    return {nearest_value(space.g_values(), g),
            nearest_value(space.p_values(), p)};
  }
  ConfigPair best = space.pairs().front();
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& c : space.pairs()) {
    const double d = (c.g - g) * (c.g - g) + (c.p - p) * (c.p - p);
    if (d < best_dist || (d == best_dist && c < best)) {
      best = c;
      best_dist = d;
    }
  }
  return best;
}

struct Domain {
  double g_min;
  double p_min;
};

double rmse(const Eigen::VectorXd& residuals) {
  return std::sqrt(residuals.squaredNorm() / static_cast<double>(residuals.size()));
}

// One LM start for the size surface; params are (k, a, b, m).
struct SizeFit {
  SizeModelParams params;
  double sse = std::numeric_limits<double>::infinity();
};

SizeFit fit_size(std::span<const SampleObservation> samples, Domain domain) {
  const int n = static_cast<int>(samples.size());
  auto residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    if (!(domain.g_min + x[1] > 0.0) || !(domain.p_min + x[2] > 0.0)) {
      return false;
    }
    const SizeModelParams p{x[0], x[1], x[2], x[3]};
    for (int i = 0; i < n; ++i) {
      out[i] = raw_size(p, samples[i].config.g, samples[i].config.p) -
               samples[i].size_mb;
    }
    return true;
  };

  double max_size = 0.0;
  for (const auto& s : samples) max_size = std::max(max_size, s.size_mb);

  SizeFit best;
  // Two families of four starts each over the offset grid. Both take k from
  // the line through the two extreme samples; the first sets m to 1.1x the
  // largest observation, the second to that line's intercept.
  for (int family = 0; family < 2; ++family) {
    for (double a0 : {0.0, domain.g_min / 2.0}) {
      for (double b0 : {0.0, domain.p_min / 2.0}) {
        // Extremes in the transformed coordinate u = 1/((g+a)^3 (p+b)^2).
        int lo = 0;
        int hi = 0;
        std::vector<double> u(n);
        for (int i = 0; i < n; ++i) {
          u[i] = 1.0 / (cube(samples[i].config.g + a0) *
                        (samples[i].config.p + b0) * (samples[i].config.p + b0));
          if (u[i] < u[lo]) lo = i;
          if (u[i] > u[hi]) hi = i;
        }
        double k0 = 0.0;
        if (u[hi] > u[lo]) {
          k0 = (samples[lo].size_mb - samples[hi].size_mb) / (u[hi] - u[lo]);
        }
        k0 = std::max(k0, 0.0);
        const double m0 = family == 0 ? 1.1 * std::max(max_size, 1e-9)
                                      : samples[lo].size_mb + k0 * u[lo];
        Eigen::VectorXd start(4);
        start << k0, a0, b0, m0;
        const LmResult r = levenberg_marquardt(residuals, start, n);
        const SizeModelParams p{r.params[0], r.params[1], r.params[2],
                                r.params[3]};
        const bool admissible = p.k >= 0.0 && p.m > 0.0 &&
                                domain.g_min + p.a > 0.0 &&
                                domain.p_min + p.b > 0.0;
        if (admissible && r.sse < best.sse) best = {p, r.sse};
      }
    }
  }
  return best;
}

struct QualityFit {
  QualityModelParams params;
  double sse = std::numeric_limits<double>::infinity();
};

QualityFit fit_quality(std::span<const SampleObservation> samples,
                       Domain domain) {
  const int n = static_cast<int>(samples.size());
  auto residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    if (!(domain.g_min + x[1] > 0.0) || !(domain.p_min + x[2] > 0.0)) {
      return false;
    }
    const QualityModelParams q{x[0], x[1], x[2]};
    for (int i = 0; i < n; ++i) {
      out[i] = raw_quality(q, samples[i].config.g, samples[i].config.p) -
               samples[i].quality;
    }
    return true;
  };

  QualityFit best;
  // First family: k from the geometric mean of the ratios at the two extreme
  // samples. Second family: k by linear least squares over all samples.
  for (int family = 0; family < 2; ++family) {
    for (double a0 : {0.0, domain.g_min / 2.0}) {
      for (double b0 : {0.0, domain.p_min / 2.0}) {
        std::vector<double> v(n);
        int lo = 0;
        int hi = 0;
        for (int i = 0; i < n; ++i) {
          const double pb = samples[i].config.p + b0;
          v[i] = cube(samples[i].config.g + a0) * pb * pb;
          if (v[i] < v[lo]) lo = i;
          if (v[i] > v[hi]) hi = i;
        }
        double k0 = 0.0;
        if (family == 0) {
          const double r_lo = std::max(samples[lo].quality, 0.0) / v[lo];
          const double r_hi = std::max(samples[hi].quality, 0.0) / v[hi];
          k0 = std::sqrt(r_lo * r_hi);
        } else {
          double num = 0.0;
          double den = 0.0;
          for (int i = 0; i < n; ++i) {
            num += v[i] * samples[i].quality;
            den += v[i] * v[i];
          }
          k0 = den > 0.0 ? std::max(num / den, 0.0) : 0.0;
        }
        Eigen::VectorXd start(3);
        start << k0, a0, b0;
        const LmResult r = levenberg_marquardt(residuals, start, n);
        const QualityModelParams q{r.params[0], r.params[1], r.params[2]};
        const bool admissible = q.k_q >= 0.0 && domain.g_min + q.a_q > 0.0 &&
                                domain.p_min + q.b_q > 0.0;
        if (admissible && r.sse < best.sse) best = {q, r.sse};
      }
    }
  }
  return best;
}

ProfileModel fit_profile_in_domain(const std::string& object_id,
                                   std::span<const SampleObservation> samples,
                                   Domain domain) {
  if (samples.size() < 4) {
    throw Error(ErrorCode::kInsufficientSamples,
                "object '" + object_id + "': need at least 4 samples, got " +
                    std::to_string(samples.size()));
  }
  std::set<int> gs;
  std::set<int> ps;
  for (const auto& s : samples) {
    gs.insert(s.config.g);
    ps.insert(s.config.p);
  }
  if (gs.size() < 2 || ps.size() < 2) {
    throw Error(ErrorCode::kDegenerateSamples,
                "object '" + object_id +
                    "': samples must span at least two g and two p values");
  }

  const SizeFit size = fit_size(samples, domain);
  if (!std::isfinite(size.sse)) {
    throw Error(ErrorCode::kFitRejected,
                "object '" + object_id + "': no admissible size fit");
  }
  const QualityFit quality = fit_quality(samples, domain);
  if (!std::isfinite(quality.sse)) {
    throw Error(ErrorCode::kFitRejected,
                "object '" + object_id + "': no admissible quality fit");
  }

  ProfileModel model;
  model.object_id = object_id;
  model.size = size.params;
  model.quality = quality.params;
  const int n = static_cast<int>(samples.size());
  Eigen::VectorXd rs(n);
  Eigen::VectorXd rq(n);
  for (int i = 0; i < n; ++i) {
    rs[i] = raw_size(model.size, samples[i].config.g, samples[i].config.p) -
            samples[i].size_mb;
    rq[i] = raw_quality(model.quality, samples[i].config.g,
                        samples[i].config.p) -
            samples[i].quality;
  }
  model.fit_stats = {rmse(rs), rmse(rq), n};
  std::ostringstream msg;
  msg << "fit '" << object_id << "': rmse size " << model.fit_stats.rmse_size_mb
      << " MB, quality " << model.fit_stats.rmse_quality;
  log::debug(msg.str());
  return model;
}

}  // namespace

double raw_size(const SizeModelParams& params, double g, double p) {
  const double pb = p + params.b;
  return params.m - params.k / (cube(g + params.a) * pb * pb);
}

double raw_quality(const QualityModelParams& params, double g, double p) {
  const double pb = p + params.b_q;
  return params.k_q * cube(g + params.a_q) * pb * pb;
}

double eval_size(const SizeModelParams& params, ConfigPair c) {
  check_offsets(params.a, params.b, c);
  return std::max(0.0, raw_size(params, c.g, c.p));
}

double eval_quality(const QualityModelParams& params, ConfigPair c) {
  check_offsets(params.a_q, params.b_q, c);
  return std::clamp(raw_quality(params, c.g, c.p), 0.0, 1.0);
}

SamplingPlan sampling_plan(const ConfigSpace& space, double step_multiplier) {
  if (space.pairs().empty()) {
    throw Error(ErrorCode::kEmptySpace,
                "object '" + space.object_id() + "' has an empty config space");
  }
  if (!(step_multiplier > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "step multiplier must be > 0");
  }
  const int p_lo = space.p_min();
  const int p_hi = space.p_max();
  const int p_mid = (p_lo + p_hi) / 2;

  SamplingPlan plan;
  plan.object_id = space.object_id();
  std::set<ConfigPair> seen;
  for (double g = space.g_min(); g <= space.g_max(); g += step_multiplier * g) {
    for (int p : {p_lo, p_mid, p_hi}) {
      const ConfigPair c = snap(space, g, p);
      if (seen.insert(c).second) plan.points.push_back(c);
    }
  }
  return plan;
}

ProfileModel fit_profile(const std::string& object_id,
                         std::span<const SampleObservation> samples) {
  Domain domain{std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
  for (const auto& s : samples) {
    domain.g_min = std::min<double>(domain.g_min, s.config.g);
    domain.p_min = std::min<double>(domain.p_min, s.config.p);
  }
  return fit_profile_in_domain(object_id, samples, domain);
}

ProfileModel fit_profile(const ConfigSpace& space,
                         std::span<const SampleObservation> samples) {
  Domain domain{static_cast<double>(space.g_min()),
                static_cast<double>(space.p_min())};
  for (const auto& s : samples) {
    domain.g_min = std::min<double>(domain.g_min, s.config.g);
    domain.p_min = std::min<double>(domain.p_min, s.config.p);
  }
  return fit_profile_in_domain(space.object_id(), samples, domain);
}

bool size_params_admissible(const SizeModelParams& params,
                            const ConfigSpace& space) {
  return params.k >= 0.0 && params.m > 0.0 && space.g_min() + params.a > 0.0 &&
         space.p_min() + params.b > 0.0;
}

bool quality_params_admissible(const QualityModelParams& params,
                               const ConfigSpace& space) {
  return params.k_q >= 0.0 && space.g_min() + params.a_q > 0.0 &&
         space.p_min() + params.b_q > 0.0;
}

FitValidation validate_fit(const ProfileModel& model,
                           std::span<const SampleObservation> holdout) {
  if (holdout.empty()) {
    throw Error(ErrorCode::kInvalidInput, "validate_fit needs a holdout set");
  }
  const double n = static_cast<double>(holdout.size());
  std::vector<double> es;
  std::vector<double> eq;
  for (const auto& s : holdout) {
    es.push_back(std::abs(eval_size(model.size, s.config) - s.size_mb));
    eq.push_back(std::abs(eval_quality(model.quality, s.config) - s.quality));
  }
  auto mean_sd = [n](const std::vector<double>& v) {
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= n;
    double var = 0.0;
    for (double e : v) var += (e - mean) * (e - mean);
    return std::pair{mean, std::sqrt(var / n)};
  };
  FitValidation out;
  std::tie(out.mae_size, out.sd_size) = mean_sd(es);
  std::tie(out.mae_quality, out.sd_quality) = mean_sd(eq);
  return out;
}

using nlohmann::json;

void to_json(json& j, const SizeModelParams& s) {
  j = json{{"k", s.k}, {"a", s.a}, {"b", s.b}, {"m", s.m}};
}

void from_json(const json& j, SizeModelParams& s) {
  s.k = j.at("k").get<double>();
  s.a = j.at("a").get<double>();
  s.b = j.at("b").get<double>();
  s.m = j.at("m").get<double>();
}

void to_json(json& j, const QualityModelParams& q) {
  j = json{{"k_q", q.k_q}, {"a_q", q.a_q}, {"b_q", q.b_q}};
}

void from_json(const json& j, QualityModelParams& q) {
  q.k_q = j.at("k_q").get<double>();
  q.a_q = j.at("a_q").get<double>();
  q.b_q = j.at("b_q").get<double>();
}

void to_json(json& j, const FitStats& f) {
  j = json{{"rmse_size_mb", f.rmse_size_mb},
           {"rmse_quality", f.rmse_quality},
           {"n_samples", f.n_samples}};
}

void from_json(const json& j, FitStats& f) {
  f.rmse_size_mb = j.at("rmse_size_mb").get<double>();
  f.rmse_quality = j.at("rmse_quality").get<double>();
  f.n_samples = j.at("n_samples").get<int>();
}

void to_json(json& j, const ProfileModel& m) {
  j = json{{"id", m.object_id},
           {"size", m.size},
           {"quality", m.quality},
           {"fit_stats", m.fit_stats}};
}

void from_json(const json& j, ProfileModel& m) {
  m.object_id = j.at("id").get<std::string>();
  m.size = j.at("size").get<SizeModelParams>();
  m.quality = j.at("quality").get<QualityModelParams>();
  m.fit_stats = j.at("fit_stats").get<FitStats>();
}

void to_json(json& j, const SamplingPlan& plan) {
  j = json{{"id", plan.object_id}, {"points", plan.points}};
}

}  // namespace nerfplan
