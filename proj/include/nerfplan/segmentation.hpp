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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nerfplan/raster.hpp"

namespace nerfplan {

inline constexpr double kDefaultEnergyFraction = 0.95;

// Spectral detail score of the masked object in cycles/pixel, in [0, 0.5].
// The luma of the mask's bounding box is taken with non-object pixels set to
// zero and the object-pixel mean subtracted from object pixels. The score is
// the smallest radius f of the 2-D DFT (bin (u, v) at radius
// |(u/W, v/H)| with wraparound) whose enclosed energy reaches
// energy_fraction of the total AC energy, capped at 0.5. Constant regions
// score 0.
// Throws kEmptyMask, kDimensionMismatch, or kInvalidInput for an
// energy_fraction outside (0, 1].
double detail_frequency(const RasterImage& image, const ObjectMask& mask,
                        double energy_fraction = kDefaultEnergyFraction);

struct ImageMasks {
  std::string image_id;
  RasterImage image;
  std::vector<ObjectMask> masks;
};

struct ObjectFrequency {
  std::string object_id;
  double max_frequency = 0.0;
  std::string argmax_image_id;

  friend bool operator==(const ObjectFrequency&,
                         const ObjectFrequency&) = default;
};

// Per object, the highest detail_frequency over the images it appears in;
// ties go to the lexicographically smallest image id. Output follows
// `known_objects` when given (every listed object must appear, and masks
// for unlisted objects raise kUnknownObject), otherwise ascending object id.
// Pairs are scored on up to `threads` workers.
std::vector<ObjectFrequency> max_frequency_per_object(
    const std::vector<ImageMasks>& images,
    const std::optional<std::vector<std::string>>& known_objects = std::nullopt,
    double energy_fraction = kDefaultEnergyFraction, unsigned threads = 1);

struct ThresholdMode {
  enum class Kind { kAutoMin, kFixed };
  Kind kind = Kind::kAutoMin;
  double alpha = 0.0;

  static ThresholdMode auto_min() { return {}; }
  static ThresholdMode fixed(double a) { return {Kind::kFixed, a}; }
};

inline constexpr const char* kBackgroundId = "background";

struct FrequencyReport {
  std::vector<ObjectFrequency> per_object;
  double threshold = 0.0;
  ThresholdMode mode;
  // In per_object order.
  std::vector<std::string> selected;
  // Objects folded into the shared kBackgroundId group.
  std::vector<std::string> background;
};

// auto_min: threshold = lowest max frequency, selects f >= threshold.
// fixed: selects f > alpha. Throws kInvalidInput on an empty list.
FrequencyReport select_by_threshold(const std::vector<ObjectFrequency>& objects,
                                    ThresholdMode mode);

// Placement of the scaled object region on the canvas.
struct Placement {
  double scale = 1.0;
  int content_width = 0;
  int content_height = 0;
  int offset_x = 0;
  int offset_y = 0;
};

// Largest aspect-preserving fit of a box_w x box_h region, centered.
Placement fit_to_canvas(int box_w, int box_h, int canvas_w, int canvas_h);

// Crops to the mask's bounding box, blacks out non-object pixels, scales
// bilinearly by fit_to_canvas and centers on a black canvas. Throws
// kEmptyMask, kDimensionMismatch or kInvalidInput for an empty canvas.
RasterImage crop_and_scale(const RasterImage& image, const ObjectMask& mask,
                           int canvas_w, int canvas_h);

void to_json(nlohmann::json& j, const ObjectFrequency& f);
void to_json(nlohmann::json& j, const FrequencyReport& report);

}  // namespace nerfplan
