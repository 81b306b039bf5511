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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <vector>

#include "nerfplan/error.hpp"
#include "nerfplan/rng.hpp"
#include "nerfplan/segmentation.hpp"

namespace nerfplan {
namespace {

ObjectMask full_mask(int w, int h, std::string id = "obj", std::string image = "img") {
  return ObjectMask{std::move(id), std::move(image), w, h,
                    std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 255)};
}

ObjectMask rect_mask(int w, int h, int x0, int y0, int bw, int bh) {
  ObjectMask m = full_mask(w, h);
  std::fill(m.data.begin(), m.data.end(), 0);
  for (int y = y0; y < y0 + bh; ++y) {
    for (int x = x0; x < x0 + bw; ++x) m.data[static_cast<std::size_t>(y) * w + x] = 255;
  }
  return m;
}

// 8-bit horizontal cosine with `cycles` periods across `size` pixels.
RasterImage cosine_image(int size, int cycles, int shift = 0) {
  RasterImage img(size, size, 1);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double phase = 2.0 * std::numbers::pi * cycles * ((x + shift) % size) / size;
      img.at(x, y) = static_cast<std::uint8_t>(std::lround(127.5 + 100.0 * std::cos(phase)));
    }
  }
  return img;
}

// Naive O(N^2) DFT and radial energy accumulation, written independently of
// the library's FFT path.
double naive_detail_frequency(const RasterImage& image, const ObjectMask& mask,
                              double fraction) {
  int x0 = mask.width, y0 = mask.height, x1 = -1, y1 = -1;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.covers(x, y)) {
        x0 = std::min(x0, x); y0 = std::min(y0, y);
        x1 = std::max(x1, x); y1 = std::max(y1, y);
      }
    }
  }
  const int w = x1 - x0 + 1;
  const int h = y1 - y0 + 1;
  std::vector<double> f(static_cast<std::size_t>(w) * h, 0.0);
  double sum = 0.0;
  int count = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.covers(x0 + x, y0 + y)) continue;
      double v = image.at(x0 + x, y0 + y, 0);
      if (image.channels() == 3) {
        v = 0.299 * image.at(x0 + x, y0 + y, 0) + 0.587 * image.at(x0 + x, y0 + y, 1) +
            0.114 * image.at(x0 + x, y0 + y, 2);
      }
      f[static_cast<std::size_t>(y) * w + x] = v;
      sum += v;
      ++count;
    }
  }
  const double mean = sum / count;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.covers(x0 + x, y0 + y)) f[static_cast<std::size_t>(y) * w + x] -= mean;
    }
  }
  struct Bin {
    double radius;
    double energy;
  };
  std::vector<Bin> bins;
  double total = 0.0;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      std::complex<double> acc = 0.0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double angle = -2.0 * std::numbers::pi *
                               (static_cast<double>(u) * x / w + static_cast<double>(v) * y / h);
          acc += f[static_cast<std::size_t>(y) * w + x] * std::polar(1.0, angle);
        }
      }
      const double e = std::norm(acc);
      const double fu = static_cast<double>(std::min(u, w - u)) / w;
      const double fv = static_cast<double>(std::min(v, h - v)) / h;
      bins.push_back({std::hypot(fu, fv), e});
      total += e;
    }
  }
  if (total <= 1e-9) return 0.0;
  std::sort(bins.begin(), bins.end(),
            [](const Bin& a, const Bin& b) { return a.radius < b.radius; });
  double cum = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    cum += bins[i].energy;
    const bool last_of_radius =
        i + 1 == bins.size() || bins[i + 1].radius - bins[i].radius > 1e-12;
    if (last_of_radius && cum >= fraction * total * (1.0 - 1e-9)) {
      return std::min(bins[i].radius, 0.5);
    }
  }
  return std::min(bins.back().radius, 0.5);
}

TEST(DetailFrequencyTest, ConstantImageIsZero) {
  const RasterImage img(64, 64, 1, std::vector<std::uint8_t>(64 * 64, 128));
  EXPECT_EQ(detail_frequency(img, full_mask(64, 64)), 0.0);
}

TEST(DetailFrequencyTest, PureSinusoids) {
  for (int bin : {4, 8, 16}) {
    const double f = detail_frequency(cosine_image(64, bin), full_mask(64, 64));
    EXPECT_NEAR(f, bin / 64.0, 1.0 / 64.0) << bin;
  }
}

TEST(DetailFrequencyTest, CyclicShiftInvariance) {
  const double base = detail_frequency(cosine_image(64, 8), full_mask(64, 64));
  for (int shift : {1, 5, 13, 31}) {
    EXPECT_EQ(detail_frequency(cosine_image(64, 8, shift), full_mask(64, 64)), base);
  }
}

TEST(DetailFrequencyTest, BrightnessOffsetInvariance) {
  Rng rng(5);
  RasterImage img(24, 20, 1);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 24; ++x) img.at(x, y) = static_cast<std::uint8_t>(rng.uniform() * 200);
  }
  RasterImage brighter = img;
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 24; ++x) brighter.at(x, y) = static_cast<std::uint8_t>(img.at(x, y) + 40);
  }
  const ObjectMask mask = rect_mask(24, 20, 3, 2, 15, 11);
  EXPECT_EQ(detail_frequency(img, mask), detail_frequency(brighter, mask));
}

TEST(DetailFrequencyTest, MatchesNaiveDft) {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 3 + static_cast<int>(rng.uniform() * 14);
    const int h = 3 + static_cast<int>(rng.uniform() * 14);
    const int channels = trial % 2 == 0 ? 1 : 3;
    RasterImage img(w, h, channels);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int c = 0; c < channels; ++c) {
          img.at(x, y, c) = static_cast<std::uint8_t>(rng.uniform() * 256);
        }
      }
    }
    ObjectMask mask = full_mask(w, h);
    for (auto& v : mask.data) v = rng.uniform() < 0.7 ? 255 : 0;
    mask.data[0] = 255;
    const double fraction = 0.5 + 0.5 * rng.uniform();
    EXPECT_NEAR(detail_frequency(img, mask, fraction),
                naive_detail_frequency(img, mask, fraction), 1e-12)
        << "trial " << trial;
  }
}

// Cyclic [1 2 1]/4 binomial blur, horizontally then vertically.
RasterImage blur(const RasterImage& in) {
  const int w = in.width(), h = in.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      tmp[static_cast<std::size_t>(y) * w + x] =
          (in.at((x + w - 1) % w, y) + 2.0 * in.at(x, y) + in.at((x + 1) % w, y)) / 4.0;
    }
  }
  RasterImage out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = (tmp[static_cast<std::size_t>((y + h - 1) % h) * w + x] +
                        2.0 * tmp[static_cast<std::size_t>(y) * w + x] +
                        tmp[static_cast<std::size_t>((y + 1) % h) * w + x]) /
                       4.0;
      out.at(x, y) = static_cast<std::uint8_t>(std::lround(v));
    }
  }
  return out;
}

TEST(DetailFrequencyTest, BlurNeverIncreasesScore) {
  Rng rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    RasterImage img(32, 32, 1);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) img.at(x, y) = static_cast<std::uint8_t>(rng.uniform() * 256);
    }
    double previous = detail_frequency(img, full_mask(32, 32));
    for (int pass = 0; pass < 4; ++pass) {
      img = blur(img);
      const double f = detail_frequency(img, full_mask(32, 32));
      EXPECT_LE(f, previous) << "trial " << trial << " pass " << pass;
      previous = f;
    }
  }
}

TEST(DetailFrequencyTest, Errors) {
  RasterImage img(8, 8, 1);
  ObjectMask empty = full_mask(8, 8);
  std::fill(empty.data.begin(), empty.data.end(), 0);
  try {
    detail_frequency(img, empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMask);
  }
  try {
    detail_frequency(img, full_mask(8, 9));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  EXPECT_THROW(detail_frequency(img, full_mask(8, 8), 0.0), Error);
  EXPECT_THROW(detail_frequency(img, full_mask(8, 8), 1.5), Error);
}

ImageMasks image_with(const std::string& id, int cycles, std::vector<std::string> objects) {
  ImageMasks im{id, cosine_image(32, cycles), {}};
  for (auto& o : objects) im.masks.push_back(full_mask(32, 32, o, id));
  return im;
}

TEST(MaxFrequencyTest, MaxAndTieBreak) {
  const std::vector<ImageMasks> images = {
      image_with("img1", 8, {"a", "b"}), image_with("img0", 8, {"b"}),
      image_with("imgA", 2, {"a", "c"})};
  const auto out = max_frequency_per_object(images);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].object_id, "a");
  EXPECT_EQ(out[0].argmax_image_id, "img1");
  EXPECT_EQ(out[1].object_id, "b");
  EXPECT_EQ(out[1].argmax_image_id, "img0");  // tie with img1
  EXPECT_EQ(out[2].object_id, "c");
  EXPECT_EQ(out[2].argmax_image_id, "imgA");
  EXPECT_GT(out[0].max_frequency, out[2].max_frequency);

  // Parallel scoring gives the same answer.
  EXPECT_EQ(max_frequency_per_object(images, std::nullopt, 0.95, 4), out);
}

TEST(MaxFrequencyTest, KnownObjects) {
  const std::vector<ImageMasks> images = {image_with("i", 4, {"a", "b"})};
  const auto ordered =
      max_frequency_per_object(images, std::vector<std::string>{"b", "a"});
  EXPECT_EQ(ordered[0].object_id, "b");
  try {
    max_frequency_per_object(images, std::vector<std::string>{"a"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownObject);
  }
  EXPECT_THROW(max_frequency_per_object(images, std::vector<std::string>{"a", "b", "z"}),
               Error);
}

TEST(SelectByThresholdTest, Examples) {
  const std::vector<ObjectFrequency> objs = {{"x", 0.1, "i"}, {"y", 0.3, "i"}, {"z", 0.2, "i"}};
  const auto autom = select_by_threshold(objs, ThresholdMode::auto_min());
  EXPECT_DOUBLE_EQ(autom.threshold, 0.1);
  EXPECT_EQ(autom.selected, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_TRUE(autom.background.empty());

  const auto fixed = select_by_threshold(objs, ThresholdMode::fixed(0.15));
  EXPECT_EQ(fixed.selected, (std::vector<std::string>{"y", "z"}));
  EXPECT_EQ(fixed.background, (std::vector<std::string>{"x"}));

  const auto none = select_by_threshold({{"only", 0.4, "i"}}, ThresholdMode::fixed(0.99));
  EXPECT_TRUE(none.selected.empty());
  EXPECT_EQ(none.background, (std::vector<std::string>{"only"}));

  const auto equal = select_by_threshold(objs, ThresholdMode::fixed(0.2));
  EXPECT_EQ(equal.selected, (std::vector<std::string>{"y"}));

  EXPECT_THROW(select_by_threshold({}, ThresholdMode::auto_min()), Error);
}

TEST(CropAndScaleTest, UpscalesSmallBox) {
  RasterImage img(100, 100, 1);
  for (int y = 45; y < 55; ++y) {
    for (int x = 45; x < 55; ++x) img.at(x, y) = 200;
  }
  const auto out = crop_and_scale(img, rect_mask(100, 100, 45, 45, 10, 10), 100, 100);
  const auto place = fit_to_canvas(10, 10, 100, 100);
  EXPECT_DOUBLE_EQ(place.scale, 10.0);
  EXPECT_EQ(place.content_width, 100);
  for (auto v : out.data()) EXPECT_EQ(v, 200);
}

TEST(CropAndScaleTest, IdentityWhenBoxIsFullImage) {
  Rng rng(9);
  RasterImage img(17, 11, 3);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 17; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(rng.uniform() * 256);
    }
  }
  ObjectMask mask = full_mask(17, 11);
  mask.data[5 * 17 + 5] = 0;  // bbox still spans the image
  RasterImage expected = img;
  for (int c = 0; c < 3; ++c) expected.at(5, 5, c) = 0;
  EXPECT_EQ(crop_and_scale(img, mask, 17, 11), expected);
}

TEST(CropAndScaleTest, LetterboxBands) {
  RasterImage img(100, 100, 1);
  for (auto y = 0; y < 100; ++y) {
    for (auto x = 0; x < 100; ++x) img.at(x, y) = 90;
  }
  const auto out = crop_and_scale(img, rect_mask(100, 100, 30, 40, 20, 10), 100, 100);
  const auto place = fit_to_canvas(20, 10, 100, 100);
  EXPECT_DOUBLE_EQ(place.scale, 5.0);
  EXPECT_EQ(place.content_width, 100);
  EXPECT_EQ(place.content_height, 50);
  EXPECT_EQ(place.offset_y, 25);
  for (int y = 0; y < 100; ++y) {
    const std::uint8_t want = (y >= 25 && y < 75) ? 90 : 0;
    for (int x = 0; x < 100; ++x) ASSERT_EQ(out.at(x, y), want) << x << "," << y;
  }
}

TEST(CropAndScaleTest, Errors) {
  RasterImage img(4, 4, 1);
  ObjectMask empty = full_mask(4, 4);
  std::fill(empty.data.begin(), empty.data.end(), 0);
  EXPECT_THROW(crop_and_scale(img, empty, 4, 4), Error);
  EXPECT_THROW(crop_and_scale(img, full_mask(4, 4), 0, 4), Error);
}

TEST(RasterTest, PnmRoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "nerfplan_raster_test";
  std::filesystem::create_directories(dir);
  Rng rng(1);
  for (int channels : {1, 3}) {
    RasterImage img(7, 5, channels);
    for (int y = 0; y < 5; ++y) {
      for (int x = 0; x < 7; ++x) {
        for (int c = 0; c < channels; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(rng.uniform() * 256);
      }
    }
    const auto path = dir / (channels == 1 ? "a.pgm" : "a.ppm");
    write_pnm(path, img);
    EXPECT_EQ(read_pnm(path), img);
  }
  RasterImage mask_img(3, 2, 1, {0, 255, 255, 0, 0, 255});
  write_pnm(dir / "m.pgm", mask_img);
  const ObjectMask m = read_mask(dir / "m.pgm", "o", "i");
  EXPECT_EQ(m.pixel_count(), 3u);
  EXPECT_EQ(mask_bounds(m), (BoundingBox{1, 0, 2, 2}));

  RasterImage bad(2, 1, 1, {0, 7});
  write_pnm(dir / "bad.pgm", bad);
  EXPECT_THROW(read_mask(dir / "bad.pgm", "o", "i"), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace nerfplan
