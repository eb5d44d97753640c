// Copyright 2026 The FloodDepth Authors.
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

#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "flooddepth/augment.hpp"
#include "flooddepth/rng.hpp"

namespace flooddepth {
namespace {

ImageBuffer Noise(int w, int h, std::uint64_t seed) {
  ImageBuffer img(w, h);
  Rng rng(seed);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

ImageBuffer Solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  ImageBuffer img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.at(x, y)[0] = r;
      img.at(x, y)[1] = g;
      img.at(x, y)[2] = b;
    }
  }
  return img;
}

// Box coordinates on a 1/8 pixel grid are exactly representable, so
// reflection arithmetic is exact.
AnnotatedSample RandomSample(Rng& rng, int w, int h) {
  AnnotatedSample s{Noise(w, h, rng.next_u64()), {}};
  const int n = static_cast<int>(rng.below(5));
  for (int i = 0; i < n; ++i) {
    const double x0 = static_cast<double>(rng.below(static_cast<std::uint64_t>(w - 8) * 8)) / 8.0;
    const double y0 = static_cast<double>(rng.below(static_cast<std::uint64_t>(h - 8) * 8)) / 8.0;
    const double x1 = x0 + 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(w - x0 - 1) * 8)) / 8.0;
    const double y1 = y0 + 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(h - y0 - 1) * 8)) / 8.0;
    s.boxes.push_back(LabeledBox{rng.bernoulli(0.5) ? ObjectClass::kPole : ObjectClass::kStopSign,
                                 BBox{x0, y0, x1, y1}});
  }
  return s;
}

TEST(HflipTest, ReflectsBoxes) {
  const AnnotatedSample s{ImageBuffer(320, 320),
                          {{ObjectClass::kStopSign, BBox{10, 5, 50, 40}},
                           {ObjectClass::kPole, BBox{150, 40, 170, 200}}}};
  const auto out = hflip(s);
  EXPECT_EQ(out.boxes[0].bbox, (BBox{270, 5, 310, 40}));
  EXPECT_EQ(out.boxes[1].bbox, (BBox{150, 40, 170, 200}));
  EXPECT_EQ(out.boxes[1].cls, ObjectClass::kPole);
}

TEST(HflipTest, ReversesPixelColumns) {
  const ImageBuffer img = Noise(7, 3, 1);
  const auto out = hflip(AnnotatedSample{img, {}});
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 7; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_EQ(out.image.at(x, y)[c], img.at(6 - x, y)[c]);
    }
  }
}

TEST(HflipProperties, InvolutionAndAreaPreservation) {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const auto s = RandomSample(rng, 16 + static_cast<int>(rng.below(80)), 16 + static_cast<int>(rng.below(80)));
    const auto once = hflip(s);
    EXPECT_EQ(hflip(once), s);
    ASSERT_EQ(once.boxes.size(), s.boxes.size());
    for (std::size_t b = 0; b < s.boxes.size(); ++b) {
      EXPECT_EQ(once.boxes[b].bbox.area(), s.boxes[b].bbox.area());
      EXPECT_EQ(once.boxes[b].cls, s.boxes[b].cls);
      EXPECT_TRUE(once.boxes[b].bbox.within(s.image.width, s.image.height));
    }
  }
}

TEST(HsvTest, RedRotatesToGreen) {
  const auto out = apply_hsv(Solid(4, 4, 255, 0, 0), HsvParams{120.0, 1.0, 1.0});
  EXPECT_LE(std::abs(out.at(2, 2)[0] - 0), 1);
  EXPECT_LE(std::abs(out.at(2, 2)[1] - 255), 1);
  EXPECT_LE(std::abs(out.at(2, 2)[2] - 0), 1);
}

TEST(HsvTest, NegativeShiftWraps) {
  // Red minus 120 degrees is blue.
  const auto out = apply_hsv(Solid(1, 1, 255, 0, 0), HsvParams{-120.0, 1.0, 1.0});
  EXPECT_EQ(out.at(0, 0)[0], 0);
  EXPECT_EQ(out.at(0, 0)[1], 0);
  EXPECT_EQ(out.at(0, 0)[2], 255);
}

TEST(HsvTest, GrayUnchangedByHueShift) {
  Rng rng(2);
  for (int level = 0; level < 256; level += 15) {
    const auto v = static_cast<std::uint8_t>(level);
    const auto out = apply_hsv(Solid(2, 2, v, v, v), HsvParams{rng.uniform(-18, 18), 1.0, 1.0});
    for (int c = 0; c < 3; ++c) EXPECT_LE(std::abs(out.at(0, 0)[c] - level), 1);
  }
}

TEST(HsvTest, RoundTripWithinOne) {
  for (int r = 0; r < 256; r += 17) {
    for (int g = 0; g < 256; g += 17) {
      for (int b = 0; b < 256; b += 17) {
        const auto rgb = hsv_to_rgb(rgb_to_hsv(static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                                               static_cast<std::uint8_t>(b)));
        EXPECT_LE(std::abs(rgb[0] - r), 1);
        EXPECT_LE(std::abs(rgb[1] - g), 1);
        EXPECT_LE(std::abs(rgb[2] - b), 1);
      }
    }
  }
}

TEST(HsvTest, JitterKeepsDimensionsAndIsSeeded) {
  const ImageBuffer img = Noise(20, 10, 3);
  Rng a(5), b(5);
  const auto out_a = hsv_jitter(img, a);
  const auto out_b = hsv_jitter(img, b);
  EXPECT_EQ(out_a, out_b);
  EXPECT_EQ(out_a.width, 20);
  EXPECT_EQ(out_a.height, 10);
}

TEST(HsvTest, DrawnParamsStayInRanges) {
  Rng rng(8);
  const AugmentConfig cfg;
  for (int i = 0; i < 1000; ++i) {
    const auto p = draw_hsv_params(rng, cfg);
    EXPECT_GE(p.hue_delta_deg, -18.0);
    EXPECT_LE(p.hue_delta_deg, 18.0);
    EXPECT_GE(p.sat_scale, 0.66);
    EXPECT_LE(p.sat_scale, 1.5);
    EXPECT_GE(p.exposure_scale, 0.66);
    EXPECT_LE(p.exposure_scale, 1.5);
  }
}

TEST(ResizeTest, Examples) {
  const AnnotatedSample same{Noise(320, 320, 4), {{ObjectClass::kStopSign, BBox{1, 2, 30, 40}}}};
  EXPECT_EQ(resize_to_network(same), same);

  const AnnotatedSample big{Noise(640, 640, 5), {{ObjectClass::kStopSign, BBox{0, 0, 64, 64}}}};
  EXPECT_EQ(resize_to_network(big).boxes[0].bbox, (BBox{0, 0, 32, 32}));

  const AnnotatedSample wide{Noise(640, 320, 6), {{ObjectClass::kPole, BBox{64, 10, 128, 20}}}};
  const auto out = resize_to_network(wide);
  EXPECT_EQ(out.boxes[0].bbox, (BBox{32, 10, 64, 20}));
  EXPECT_EQ(out.image.width, 320);
  EXPECT_EQ(out.image.height, 320);
}

TEST(ResizeTest, SolidColorStaysSolid) {
  const auto out = resize_to_network(AnnotatedSample{Solid(97, 211, 10, 200, 30), {}});
  for (int y = 0; y < 320; y += 13) {
    for (int x = 0; x < 320; x += 13) {
      EXPECT_EQ(out.image.at(x, y)[0], 10);
      EXPECT_EQ(out.image.at(x, y)[1], 200);
      EXPECT_EQ(out.image.at(x, y)[2], 30);
    }
  }
}

TEST(MosaicTest, CenterSplitFourIdenticalSingleBoxImages) {
  const AnnotatedSample s{Noise(320, 320, 7), {{ObjectClass::kStopSign, BBox{64, 64, 128, 128}}}};
  const std::vector<AnnotatedSample> four(4, s);
  const auto out = mosaic_at(four, 160, 160);
  EXPECT_EQ(out.image.width, 320);
  EXPECT_EQ(out.image.height, 320);
  ASSERT_EQ(out.boxes.size(), 4u);
  // Each quadrant is 160x160, so scale 0.5 and the image anchors at the split.
  EXPECT_EQ(out.boxes[0].bbox, (BBox{32, 32, 64, 64}));
  EXPECT_EQ(out.boxes[1].bbox, (BBox{192, 32, 224, 64}));
  EXPECT_EQ(out.boxes[2].bbox, (BBox{32, 192, 64, 224}));
  EXPECT_EQ(out.boxes[3].bbox, (BBox{192, 192, 224, 224}));
  for (const auto& b : out.boxes) EXPECT_TRUE(b.bbox.within(320, 320));
}

TEST(MosaicTest, BoxOutsideQuadrantIsDropped) {
  // 640x320 in a 160x160 quadrant: scale 0.5, top-left anchored so the image
  // spans x in [-160, 160); its left half is cropped away.
  const AnnotatedSample wide{Noise(640, 320, 8),
                             {{ObjectClass::kStopSign, BBox{0, 10, 100, 60}},
                              {ObjectClass::kPole, BBox{400, 10, 500, 60}}}};
  const AnnotatedSample plain{Noise(320, 320, 9), {}};
  const std::vector<AnnotatedSample> four{wide, plain, plain, plain};
  const auto out = mosaic_at(four, 160, 160);
  ASSERT_EQ(out.boxes.size(), 1u);
  EXPECT_EQ(out.boxes[0].cls, ObjectClass::kPole);
  EXPECT_EQ(out.boxes[0].bbox, (BBox{40, 5, 90, 30}));
}

TEST(MosaicTest, MostlyClippedBoxIsDropped) {
  // Box straddles the crop edge with only 20% of its scaled area kept.
  const AnnotatedSample wide{Noise(640, 320, 10), {{ObjectClass::kStopSign, BBox{240, 10, 340, 60}}}};
  const AnnotatedSample plain{Noise(320, 320, 11), {}};
  const std::vector<AnnotatedSample> four{wide, plain, plain, plain};
  EXPECT_TRUE(mosaic_at(four, 160, 160).boxes.empty());
}

TEST(MosaicTest, RequiresExactlyFourSamples) {
  const AnnotatedSample s{Noise(32, 32, 1), {}};
  Rng rng(1);
  EXPECT_THROW(mosaic(std::vector<AnnotatedSample>(3, s), rng), InvalidArgument);
  EXPECT_THROW(mosaic(std::vector<AnnotatedSample>(5, s), rng), InvalidArgument);
}

TEST(MosaicProperties, BoundsAndCounts) {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    std::vector<AnnotatedSample> four;
    std::size_t total = 0;
    for (int q = 0; q < 4; ++q) {
      four.push_back(RandomSample(rng, 24 + static_cast<int>(rng.below(100)), 24 + static_cast<int>(rng.below(100))));
      total += four.back().boxes.size();
    }
    const auto out = mosaic(four, rng);
    EXPECT_EQ(out.image.width, 320);
    EXPECT_LE(out.boxes.size(), total);
    EXPECT_TRUE(validate(out).empty()) << validate(out);
  }
}

TEST(PipelineTest, FixedSeedIsByteIdentical) {
  Rng gen(31);
  std::vector<AnnotatedSample> four;
  for (int q = 0; q < 4; ++q) four.push_back(RandomSample(gen, 200, 150));
  AugmentConfig cfg;
  for (int seed = 0; seed < 20; ++seed) {
    Rng a(static_cast<std::uint64_t>(seed)), b(static_cast<std::uint64_t>(seed));
    const auto ra = augment_pipeline(four, cfg, a);
    const auto rb = augment_pipeline(four, cfg, b);
    EXPECT_EQ(ra.sample, rb.sample);
    EXPECT_EQ(ra.ops, rb.ops);
    EXPECT_TRUE(validate(ra.sample).empty());
  }
}

TEST(PipelineTest, ZeroProbabilitiesAndIdentityRangesEqualResize) {
  Rng gen(32);
  const auto s = RandomSample(gen, 200, 150);
  AugmentConfig cfg;
  cfg.hflip_prob = 0.0;
  cfg.mosaic_prob = 0.0;
  cfg.hue_delta_min = cfg.hue_delta_max = 0.0;
  cfg.sat_min = cfg.sat_max = 1.0;
  cfg.exposure_min = cfg.exposure_max = 1.0;
  Rng rng(1);
  const auto res = augment_pipeline(std::vector<AnnotatedSample>{s}, cfg, rng);
  EXPECT_EQ(res.sample, resize_to_network(s));
  EXPECT_EQ(res.ops, std::vector<std::string>{"resize"});
}

TEST(PipelineTest, ProbabilityOneAppliesEveryOpInOrder) {
  Rng gen(33);
  std::vector<AnnotatedSample> four;
  for (int q = 0; q < 4; ++q) four.push_back(RandomSample(gen, 100, 100));
  AugmentConfig cfg;
  cfg.hflip_prob = 1.0;
  cfg.mosaic_prob = 1.0;
  Rng rng(2);
  const auto res = augment_pipeline(four, cfg, rng);
  EXPECT_EQ(res.ops, (std::vector<std::string>{"mosaic", "hflip", "hsv_jitter", "resize"}));
}

TEST(PipelineTest, RejectsBadConfig) {
  AugmentConfig cfg;
  cfg.hflip_prob = 1.5;
  Rng rng(0);
  const AnnotatedSample s{Noise(8, 8, 1), {}};
  EXPECT_THROW(augment_pipeline(std::vector<AnnotatedSample>{s}, cfg, rng), ConfigError);
  cfg = AugmentConfig{};
  cfg.sat_min = 2.0;
  EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(PipelineProperties, BoxesInBoundsAndClassesPreserved) {
  Rng gen(34);
  for (int i = 0; i < 60; ++i) {
    std::vector<AnnotatedSample> four;
    for (int q = 0; q < 4; ++q) four.push_back(RandomSample(gen, 40 + static_cast<int>(gen.below(200)), 40 + static_cast<int>(gen.below(200))));
    Rng rng(gen.next_u64());
    const auto res = augment_pipeline(four, AugmentConfig{}, rng);
    EXPECT_TRUE(validate(res.sample).empty());
    EXPECT_EQ(res.sample.image.width, 320);
    EXPECT_EQ(res.sample.image.height, 320);
    if (res.ops.front() != "mosaic") {
      ASSERT_EQ(res.sample.boxes.size(), four[0].boxes.size());
      for (std::size_t b = 0; b < four[0].boxes.size(); ++b) {
        EXPECT_EQ(res.sample.boxes[b].cls, four[0].boxes[b].cls);
      }
    }
  }
}

}  // namespace
}  // namespace flooddepth
