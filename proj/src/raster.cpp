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

#include "nerfplan/raster.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

#include "nerfplan/error.hpp"

namespace nerfplan {

RasterImage::RasterImage(int width, int height, int channels)
    : RasterImage(width, height, channels,
                  std::vector<std::uint8_t>(
                      static_cast<std::size_t>(std::max(width, 0)) *
                      static_cast<std::size_t>(std::max(height, 0)) *
                      static_cast<std::size_t>(std::max(channels, 0)))) {}

RasterImage::RasterImage(int width, int height, int channels,
                         std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidInput, "raster dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidInput, "raster must have 1 or 3 channels");
  }
  if (data_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw Error(ErrorCode::kInvalidInput, "raster data length mismatch");
  }
}

double RasterImage::luma(int x, int y) const {
  if (channels_ == 1) return at(x, y);
  return 0.299 * at(x, y, 0) + 0.587 * at(x, y, 1) + 0.114 * at(x, y, 2);
}

std::size_t ObjectMask::pixel_count() const {
  return static_cast<std::size_t>(
      std::count_if(data.begin(), data.end(), [](auto v) { return v != 0; }));
}

BoundingBox mask_bounds(const ObjectMask& mask) {
  int x_lo = mask.width;
  int y_lo = mask.height;
  int x_hi = -1;
  int y_hi = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.covers(x, y)) continue;
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (x_hi < 0) {
    throw Error(ErrorCode::kEmptyMask, "mask for object '" + mask.object_id +
                                           "' in image '" + mask.image_id +
                                           "' has no object pixels");
  }
  return {x_lo, y_lo, x_hi - x_lo + 1, y_hi - y_lo + 1};
}

namespace {

struct PnmHeader {
  char kind = 0;  // '5' or '6'
  int width = 0;
  int height = 0;
  int maxval = 0;
};

// Reads the next header integer, skipping whitespace and '#' comments.
int read_header_int(std::istream& in, const std::string& where) {
  int c = in.peek();
  while (c != EOF) {
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else {
      break;
    }
    c = in.peek();
  }
  int value = 0;
  if (!(in >> value)) {
    throw Error(ErrorCode::kInvalidInput, "bad PNM header in " + where);
  }
  return value;
}

PnmHeader read_header(std::istream& in, const std::string& where) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
    throw Error(ErrorCode::kInvalidInput, where + " is not a binary PGM/PPM");
  }
  PnmHeader h;
  h.kind = magic[1];
  h.width = read_header_int(in, where);
  h.height = read_header_int(in, where);
  h.maxval = read_header_int(in, where);
  if (h.width < 1 || h.height < 1 || h.maxval < 1 || h.maxval > 255) {
    throw Error(ErrorCode::kInvalidInput,
                where + ": unsupported dimensions or maxval");
  }
  // Exactly one whitespace byte separates the header from the samples.
  if (!std::isspace(in.get())) {
    throw Error(ErrorCode::kInvalidInput, where + ": malformed header end");
  }
  return h;
}

std::vector<std::uint8_t> read_samples(std::istream& in, std::size_t count,
                                       const std::string& where) {
  std::vector<std::uint8_t> data(count);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw Error(ErrorCode::kInvalidInput, where + ": truncated pixel data");
  }
  return data;
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

RasterImage read_pnm(const std::filesystem::path& path) {
  std::ifstream in = open_binary(path);
  const std::string where = path.string();
  const PnmHeader h = read_header(in, where);
  const int channels = h.kind == '6' ? 3 : 1;
  auto data = read_samples(
      in, static_cast<std::size_t>(h.width) * h.height * channels, where);
  if (h.maxval != 255) {
    for (auto& v : data) {
      v = static_cast<std::uint8_t>((std::min<int>(v, h.maxval) * 255 + h.maxval / 2) /
                                    h.maxval);
    }
  }
  return RasterImage(h.width, h.height, channels, std::move(data));
}

std::string encode_pnm(const RasterImage& image) {
  std::ostringstream out;
  out << (image.channels() == 3 ? "P6" : "P5") << '\n'
      << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data().data()),
            static_cast<std::streamsize>(image.data().size()));
  return out.str();
}

void write_pnm(const std::filesystem::path& path, const RasterImage& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << encode_pnm(image);
  if (!out) throw Error(ErrorCode::kIo, "short write to '" + path.string() + "'");
}

ObjectMask read_mask(const std::filesystem::path& path, std::string object_id,
                     std::string image_id) {
  std::ifstream in = open_binary(path);
  const std::string where = path.string();
  const PnmHeader h = read_header(in, where);
  if (h.kind != '5' || h.maxval != 255) {
    throw Error(ErrorCode::kInvalidInput, where + ": masks must be P5, maxval 255");
  }
  ObjectMask mask;
  mask.object_id = std::move(object_id);
  mask.image_id = std::move(image_id);
  mask.width = h.width;
  mask.height = h.height;
  mask.data = read_samples(in, static_cast<std::size_t>(h.width) * h.height, where);
  for (auto v : mask.data) {
    if (v != 0 && v != 255) {
      throw Error(ErrorCode::kInvalidInput,
                  where + ": mask samples must be 0 or 255");
    }
  }
  return mask;
}

}  // namespace nerfplan
