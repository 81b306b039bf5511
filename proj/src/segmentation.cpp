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

#include "nerfplan/segmentation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <utility>

#include "nerfplan/error.hpp"
#include "nerfplan/parallel.hpp"

namespace nerfplan {
namespace {

// FFTW's planner is not thread-safe; plan execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

FftwBuffer alloc_complex(std::size_t n) {
  return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

class ForwardDft2d {
 public:
  ForwardDft2d(int height, int width, fftw_complex* in, fftw_complex* out) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_2d(height, width, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~ForwardDft2d() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  ForwardDft2d(const ForwardDft2d&) = delete;
  ForwardDft2d& operator=(const ForwardDft2d&) = delete;

  void execute() { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

void check_dims(const RasterImage& image, const ObjectMask& mask) {
  if (mask.width != image.width() || mask.height != image.height() ||
      mask.data.size() != static_cast<std::size_t>(mask.width) * mask.height) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mask for object '" + mask.object_id + "' does not match image '" +
                    mask.image_id + "'");
  }
}

}  // namespace

double detail_frequency(const RasterImage& image, const ObjectMask& mask,
                        double energy_fraction) {
  if (!(energy_fraction > 0.0 && energy_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "energy_fraction must be in (0, 1]");
  }
  check_dims(image, mask);
  const BoundingBox box = mask_bounds(mask);
  const int w = box.width;
  const int h = box.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  double sum = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.covers(box.x0 + x, box.y0 + y)) {
        sum += image.luma(box.x0 + x, box.y0 + y);
        ++count;
      }
    }
  }
  const double mean = sum / static_cast<double>(count);

  FftwBuffer in = alloc_complex(n);
  FftwBuffer out = alloc_complex(n);
  ForwardDft2d dft(h, w, in.get(), out.get());

  double spatial_energy = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      double v = 0.0;
      if (mask.covers(box.x0 + x, box.y0 + y)) {
        v = image.luma(box.x0 + x, box.y0 + y) - mean;
      }
      in[i][0] = v;
      in[i][1] = 0.0;
      spatial_energy += v * v;
    }
  }
  // Rounding residue of the mean subtraction on a flat region.
  if (spatial_energy <= 1e-20 * static_cast<double>(n) * 255.0 * 255.0) {
    return 0.0;
  }
  dft.execute();

  // Energy per squared radius, keyed by the exact integer numerator of
  // (u/W)^2 + (v/H)^2 over the common denominator (W H)^2.
  std::map<std::int64_t, double> energy_by_radius;
  double total = 0.0;
  const std::int64_t ww = static_cast<std::int64_t>(w) * w;
  const std::int64_t hh = static_cast<std::int64_t>(h) * h;
  for (int v = 0; v < h; ++v) {
    const std::int64_t dv = std::min(v, h - v);
    for (int u = 0; u < w; ++u) {
      if (u == 0 && v == 0) continue;
      const std::int64_t du = std::min(u, w - u);
      const std::size_t i = static_cast<std::size_t>(v) * w + u;
      const double e = out[i][0] * out[i][0] + out[i][1] * out[i][1];
      energy_by_radius[du * du * hh + dv * dv * ww] += e;
      total += e;
    }
  }
  if (!(total > 0.0)) return 0.0;

  const double denom = static_cast<double>(w) * static_cast<double>(h);
  const double target = energy_fraction * total * (1.0 - 1e-12);
  double cumulative = 0.0;
  for (const auto& [key, e] : energy_by_radius) {
    cumulative += e;
    if (cumulative >= target) {
      return std::min(std::sqrt(static_cast<double>(key)) / denom, 0.5);
    }
  }
  return 0.5;
}

std::vector<ObjectFrequency> max_frequency_per_object(
    const std::vector<ImageMasks>& images,
    const std::optional<std::vector<std::string>>& known_objects,
    double energy_fraction, unsigned threads) {
  std::set<std::string> known;
  if (known_objects) known.insert(known_objects->begin(), known_objects->end());

  struct Job {
    const ImageMasks* image;
    const ObjectMask* mask;
  };
  std::vector<Job> jobs;
  for (const auto& entry : images) {
    for (const auto& mask : entry.masks) {
      if (known_objects && !known.count(mask.object_id)) {
        throw Error(ErrorCode::kUnknownObject,
                    "mask references unknown object '" + mask.object_id +
                        "' in image '" + entry.image_id + "'");
      }
      jobs.push_back({&entry, &mask});
    }
  }

  std::vector<double> scores(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    scores[i] = detail_frequency(jobs[i].image->image, *jobs[i].mask,
                                 energy_fraction);
  });

  std::map<std::string, ObjectFrequency> best;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const std::string& id = jobs[i].mask->object_id;
    const std::string& image_id = jobs[i].image->image_id;
    auto [it, inserted] = best.try_emplace(id, ObjectFrequency{id, scores[i], image_id});
    if (inserted) continue;
    ObjectFrequency& f = it->second;
    if (scores[i] > f.max_frequency ||
        (scores[i] == f.max_frequency && image_id < f.argmax_image_id)) {
      f.max_frequency = scores[i];
      f.argmax_image_id = image_id;
    }
  }

  std::vector<ObjectFrequency> out;
  if (known_objects) {
    for (const auto& id : *known_objects) {
      auto it = best.find(id);
      if (it == best.end()) {
        throw Error(ErrorCode::kInvalidInput,
                    "object '" + id + "' does not appear in any image");
      }
      out.push_back(it->second);
    }
  } else {
    for (auto& [id, f] : best) out.push_back(f);
  }
  return out;
}

FrequencyReport select_by_threshold(const std::vector<ObjectFrequency>& objects,
                                    ThresholdMode mode) {
  if (objects.empty()) {
    throw Error(ErrorCode::kInvalidInput, "no objects to threshold");
  }
  FrequencyReport report;
  report.per_object = objects;
  report.mode = mode;
  if (mode.kind == ThresholdMode::Kind::kAutoMin) {
    report.threshold = objects.front().max_frequency;
    for (const auto& f : objects) {
      report.threshold = std::min(report.threshold, f.max_frequency);
    }
  } else {
    report.threshold = mode.alpha;
  }
  for (const auto& f : objects) {
    const bool keep = mode.kind == ThresholdMode::Kind::kAutoMin
                          ? f.max_frequency >= report.threshold
                          : f.max_frequency > report.threshold;
    (keep ? report.selected : report.background).push_back(f.object_id);
  }
  return report;
}

Placement fit_to_canvas(int box_w, int box_h, int canvas_w, int canvas_h) {
  Placement p;
  p.scale = std::min(static_cast<double>(canvas_w) / box_w,
                     static_cast<double>(canvas_h) / box_h);
  p.content_width = std::clamp(static_cast<int>(std::lround(box_w * p.scale)), 1,
                               canvas_w);
  p.content_height = std::clamp(static_cast<int>(std::lround(box_h * p.scale)), 1,
                                canvas_h);
  p.offset_x = (canvas_w - p.content_width) / 2;
  p.offset_y = (canvas_h - p.content_height) / 2;
  return p;
}

RasterImage crop_and_scale(const RasterImage& image, const ObjectMask& mask,
                           int canvas_w, int canvas_h) {
  if (canvas_w < 1 || canvas_h < 1) {
    throw Error(ErrorCode::kInvalidInput, "canvas dimensions must be >= 1");
  }
  check_dims(image, mask);
  const BoundingBox box = mask_bounds(mask);
  const int channels = image.channels();

  RasterImage crop(box.width, box.height, channels);
  for (int y = 0; y < box.height; ++y) {
    for (int x = 0; x < box.width; ++x) {
      if (!mask.covers(box.x0 + x, box.y0 + y)) continue;
      for (int c = 0; c < channels; ++c) {
        crop.at(x, y, c) = image.at(box.x0 + x, box.y0 + y, c);
      }
    }
  }

  const Placement place = fit_to_canvas(box.width, box.height, canvas_w, canvas_h);
  const double sx = static_cast<double>(place.content_width) / box.width;
  const double sy = static_cast<double>(place.content_height) / box.height;
  RasterImage canvas(canvas_w, canvas_h, channels);
  for (int oy = 0; oy < place.content_height; ++oy) {
    // Pixel-center mapping back into the crop.
    const double fy = std::clamp((oy + 0.5) / sy - 0.5, 0.0, box.height - 1.0);
    const int y0 = static_cast<int>(std::floor(fy));
    const int y1 = std::min(y0 + 1, box.height - 1);
    const double ty = fy - y0;
    for (int ox = 0; ox < place.content_width; ++ox) {
      const double fx = std::clamp((ox + 0.5) / sx - 0.5, 0.0, box.width - 1.0);
      const int x0 = static_cast<int>(std::floor(fx));
      const int x1 = std::min(x0 + 1, box.width - 1);
      const double tx = fx - x0;
      for (int c = 0; c < channels; ++c) {
        const double top = crop.at(x0, y0, c) * (1.0 - tx) + crop.at(x1, y0, c) * tx;
        const double bottom = crop.at(x0, y1, c) * (1.0 - tx) + crop.at(x1, y1, c) * tx;
        const double v = top * (1.0 - ty) + bottom * ty;
        canvas.at(place.offset_x + ox, place.offset_y + oy, c) =
            static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return canvas;
}

void to_json(nlohmann::json& j, const ObjectFrequency& f) {
  j = nlohmann::json{{"object_id", f.object_id},
                     {"max_frequency", f.max_frequency},
                     {"argmax_image_id", f.argmax_image_id}};
}

void to_json(nlohmann::json& j, const FrequencyReport& report) {
  j = nlohmann::json{
      {"per_object", report.per_object},
      {"threshold", report.threshold},
      {"threshold_mode",
       report.mode.kind == ThresholdMode::Kind::kAutoMin ? "auto_min" : "fixed"},
      {"selected", report.selected},
      {"background", report.background}};
}

}  // namespace nerfplan
