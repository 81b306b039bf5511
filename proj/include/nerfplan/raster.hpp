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
#include <filesystem>
#include <string>
#include <vector>

namespace nerfplan {

// Row-major 8-bit raster with 1 (gray) or 3 (RGB) interleaved channels.
class RasterImage {
 public:
  RasterImage() = default;
  // Black image. Throws kInvalidInput for zero dimensions or channels other
  // than 1 or 3.
  RasterImage(int width, int height, int channels);
  // Throws kInvalidInput when data.size() != width * height * channels.
  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  std::uint8_t at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  std::uint8_t& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  // ITU-R BT.601 luma (0.299 R + 0.587 G + 0.114 B); identity for gray.
  double luma(int x, int y) const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<std::uint8_t> data_;
};

// Binary object mask: 0 = background, 255 = object.
struct ObjectMask {
  std::string object_id;
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  bool covers(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x] != 0;
  }
  std::size_t pixel_count() const;
};

// Inclusive-exclusive pixel rectangle.
struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Tight box around the object pixels. Throws kEmptyMask.
BoundingBox mask_bounds(const ObjectMask& mask);

// Binary PPM (P6) or PGM (P5) with maxval <= 255; samples below 255 are
// rescaled to 0..255. Throws kIo or kInvalidInput.
RasterImage read_pnm(const std::filesystem::path& path);
// P5 for 1 channel, P6 for 3.
void write_pnm(const std::filesystem::path& path, const RasterImage& image);
std::string encode_pnm(const RasterImage& image);

// P5 mask (maxval 255) whose samples must be exactly 0 or 255.
ObjectMask read_mask(const std::filesystem::path& path, std::string object_id,
                     std::string image_id);

}  // namespace nerfplan
