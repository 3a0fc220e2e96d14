// Copyright 2026 The EVCI Augment Authors. All Rights Reserved.
//
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


#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "evci/error.hpp"
#include "evci/image.hpp"
#include "evci/rng.hpp"
#include "synthetic.hpp"

namespace evci {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "evci_imgcore_test";
  fs::create_directories(dir);
  return dir / name;
}

Image one_pixel(double r, double g, double b) {
  Image img(1, 1);
  img.set_pixel(0, 0, {r, g, b});
  return img;
}

TEST(ImageTest, RejectsZeroDimensionsAndOutOfRangeValues) {
  EXPECT_THROW(Image(0, 3), ShapeError);
  EXPECT_THROW(Image(3, 0), ShapeError);
  EXPECT_THROW(Image(1, 1, 1.5), ArgumentError);
  EXPECT_THROW(Image::from_pixels(1, 1, {0.1, 0.2}), ShapeError);
  EXPECT_THROW(Image::from_pixels(1, 1, {0.1, 0.2, -0.1}), ArgumentError);
}

TEST(ImageIoTest, PngLoadsEightBitValuesDividedBy255) {
  const struct {
    int r, g, b;
  } cases[] = {{255, 255, 255}, {0, 0, 0}, {51, 102, 204}};
  for (const auto& c : cases) {
    const Image src = one_pixel(c.r / 255.0, c.g / 255.0, c.b / 255.0);
    const fs::path p = temp_path("px.png");
    save_image(src, p);
    const Image back = load_image(p);
    EXPECT_EQ(back.at(0, 0, 0), c.r / 255.0);
    EXPECT_EQ(back.at(0, 0, 1), c.g / 255.0);
    EXPECT_EQ(back.at(0, 0, 2), c.b / 255.0);
  }
  const Image img = load_image(temp_path("px.png"));
  EXPECT_NEAR(img.at(0, 0, 0), 0.2, 1e-15);
  EXPECT_NEAR(img.at(0, 0, 1), 0.4, 1e-15);
  EXPECT_NEAR(img.at(0, 0, 2), 0.8, 1e-15);
}

TEST(ImageIoTest, PngRoundTripIsExactAfterQuantization) {
  Rng rng(5);
  const Image img = testing::random_image(7, 9, rng);
  const fs::path p = temp_path("rt.png");
  save_image(img, p);
  const Image back = load_image(p);
  for (std::size_t i = 0; i < img.pixels().size(); ++i) {
    EXPECT_EQ(back.pixels()[i], quantize(img.pixels()[i]) / 255.0);
  }
  save_image(back, p);
  EXPECT_EQ(load_image(p), back);
}

TEST(ImageIoTest, JpegRoundTripIsClose) {
  Image img(16, 16, 0.5);
  const fs::path p = temp_path("gray.jpg");
  save_image(img, p);
  const Image back = load_image(p);
  EXPECT_EQ(back.height(), 16u);
  for (double v : back.pixels()) EXPECT_NEAR(v, 0.5, 3.0 / 255.0);
}

TEST(ImageIoTest, Errors) {
  EXPECT_THROW(load_image(temp_path("missing.png")), IoError);
  const fs::path junk = temp_path("junk.png");
  std::ofstream(junk) << "definitely not an image";
  EXPECT_THROW(load_image(junk), FormatError);
  const fs::path junk_jpg = temp_path("junk.jpg");
  std::ofstream(junk_jpg) << "\xff\xd8 broken";
  EXPECT_THROW(load_image(junk_jpg), FormatError);
}

TEST(QuantizeTest, RoundsHalfAwayAndClamps) {
  EXPECT_EQ(quantize(0.0), 0);
  EXPECT_EQ(quantize(1.0), 255);
  EXPECT_EQ(quantize(0.5), 128);
  EXPECT_EQ(quantize(51.0 / 255.0), 51);
}

TEST(LuminanceTest, Examples) {
  for (double v : {0.0, 0.123, 0.5, 1.0}) {
    EXPECT_NEAR(pixel_luminance(v, v, v), v, 1e-15);
  }
  EXPECT_DOUBLE_EQ(pixel_luminance(1, 0, 0), 0.299);
  EXPECT_DOUBLE_EQ(pixel_luminance(0, 0, 1), 0.114);
  const Plane p = luminance(one_pixel(0, 1, 0));
  EXPECT_DOUBLE_EQ(p.at(0, 0), 0.587);
}

TEST(SaturationTest, Examples) {
  EXPECT_EQ(pixel_saturation(0.3, 0.3, 0.3), 0.0);
  EXPECT_EQ(pixel_saturation(0, 0, 0), 0.0);
  EXPECT_EQ(pixel_saturation(1, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(pixel_saturation(0.8, 0.4, 0.4), 0.5);
  EXPECT_DOUBLE_EQ(saturation_map(one_pixel(0.8, 0.4, 0.4)).at(0, 0), 0.5);
}

TEST(ResizeTest, ConstantStaysConstant) {
  Image img(5, 3);
  for (std::size_t y = 0; y < 5; ++y)
    for (std::size_t x = 0; x < 3; ++x) img.set_pixel(y, x, {0.2, 0.6, 0.9});
  const Image r = resize(img, 11, 4);
  EXPECT_EQ(r.width(), 11u);
  EXPECT_EQ(r.height(), 4u);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 11; ++x) {
      EXPECT_NEAR(r.at(y, x, 0), 0.2, 1e-15);
      EXPECT_NEAR(r.at(y, x, 2), 0.9, 1e-15);
    }
}

TEST(ResizeTest, SameSizeIsIdentity) {
  Rng rng(1);
  const Image img = testing::random_image(2, 2, rng);
  EXPECT_EQ(resize(img, 2, 2), img);
  const Image big = testing::random_image(6, 9, rng);
  EXPECT_EQ(resize(big, 9, 6), big);
}

TEST(ResizeTest, OneByTwoToOneByFourMatchesBilinearWeights) {
  Image img(1, 2);
  img.set_pixel(0, 0, {0, 0, 0});
  img.set_pixel(0, 1, {1, 1, 1});
  const Image r = resize(img, 4, 1);
  // Output centers map to source x = (i + 0.5) / 2 - 0.5, clamped to [0, 1].
  const double expected[4] = {0.0, 0.25, 0.75, 1.0};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.at(0, i, 0), expected[i], 1e-15);
}

TEST(ResizeTest, KeepAspectFitsInside) {
  EXPECT_EQ(fit_dimensions(640, 480, 1333, 800), (std::pair<std::size_t, std::size_t>{1067, 800}));
  EXPECT_EQ(fit_dimensions(2000, 500, 1333, 800), (std::pair<std::size_t, std::size_t>{1333, 333}));
  Image img(10, 20, 0.5);
  const Image r = resize(img, 30, 30, true);
  EXPECT_EQ(r.width(), 30u);
  EXPECT_EQ(r.height(), 15u);
  EXPECT_THROW(resize(img, 0, 3), ShapeError);
}

TEST(CropFlipTest, Examples) {
  Rng rng(2);
  const Image img = testing::random_image(4, 5, rng);
  EXPECT_EQ(hflip(hflip(img)), img);
  EXPECT_EQ(crop(img, Rect{0, 0, 5, 4}), img);
  const Image px = crop(img, Rect{3, 2, 1, 1});
  EXPECT_EQ(px.pixel(0, 0), img.pixel(2, 3));
  EXPECT_EQ(hflip(img).pixel(1, 0), img.pixel(1, 4));
  EXPECT_THROW(crop(img, Rect{4, 0, 2, 1}), ShapeError);
  EXPECT_THROW(crop(img, Rect{0, 0, 0, 1}), ShapeError);
}

TEST(DownsampleTest, Examples) {
  Image constant(4, 6, 0.3);
  const Image half = downsample2(constant);
  EXPECT_EQ(half.height(), 2u);
  EXPECT_EQ(half.width(), 3u);
  for (double v : half.pixels()) EXPECT_NEAR(v, 0.3, 1e-15);

  Image block(2, 2);
  block.set_pixel(1, 0, {1, 1, 1});
  block.set_pixel(1, 1, {1, 1, 1});
  EXPECT_DOUBLE_EQ(downsample2(block).at(0, 0, 0), 0.5);

  Rng rng(3);
  const Image img = testing::random_image(6, 8, rng);
  const Image a = downsample2(hflip(img)), b = hflip(downsample2(img));
  ASSERT_EQ(a.width(), b.width());
  for (std::size_t i = 0; i < a.pixels().size(); ++i) {
    EXPECT_NEAR(a.pixels()[i], b.pixels()[i], 1e-15);
  }
}

TEST(DownsampleTest, OddDimensionsReflectPad) {
  // Row [a, b, c] pads to [a, b, c, b] and pools to [(a+b)/2, (c+b)/2].
  Image img(1, 3);
  img.set_pixel(0, 0, {0.0, 0.0, 0.0});
  img.set_pixel(0, 1, {0.4, 0.4, 0.4});
  img.set_pixel(0, 2, {1.0, 1.0, 1.0});
  const Image d = downsample2(img);
  EXPECT_EQ(d.width(), 2u);
  EXPECT_EQ(d.height(), 1u);
  EXPECT_NEAR(d.at(0, 0, 0), 0.2, 1e-15);
  EXPECT_NEAR(d.at(0, 1, 0), 0.7, 1e-15);
}

TEST(ImgcoreProperty, OutputsStayInUnitRange) {
  Rng rng(11);
  for (int t = 0; t < 30; ++t) {
    const Image img = testing::random_image(1 + rng.index(9), 1 + rng.index(9), rng);
    EXPECT_TRUE(resize(img, 1 + rng.index(13), 1 + rng.index(13)).in_range());
    EXPECT_TRUE(downsample2(img).in_range());
    EXPECT_TRUE(hflip(img).in_range());
    for (double v : luminance(img).values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    for (double v : saturation_map(img).values) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

}  // namespace
}  // namespace evci
