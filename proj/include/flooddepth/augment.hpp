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

// Annotation-aware augmentation: HSV jitter, horizontal flip, four-image
// mosaic and bilinear resize to the network input size. Every op keeps the
// boxes consistent with the pixels it produces. No vertical flip exists.
//
// Hue deltas are degrees on a 360 degree wheel. "Exposure" scales the HSV
// value channel.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flooddepth/bbox.hpp"
#include "flooddepth/error.hpp"
#include "flooddepth/records.hpp"
#include "flooddepth/rng.hpp"

namespace flooddepth {

inline constexpr int kNetworkSize = 320;

/// Row-major interleaved RGB, 8 bits per channel.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  ImageBuffer() = default;
  ImageBuffer(int w, int h) : width(w), height(h), pixels(checked_size(w, h), 0) {}

  std::uint8_t* at(int x, int y) {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }
  const std::uint8_t* at(int x, int y) const {
    return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
  }

  bool is_valid() const {
    return width > 0 && height > 0 &&
           pixels.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  static std::size_t checked_size(int w, int h) {
    if (w <= 0 || h <= 0) throw InvalidArgument("image dimensions must be positive");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  }
};

struct LabeledBox {
  ObjectClass cls = ObjectClass::kStopSign;
  BBox bbox;

  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

struct AnnotatedSample {
  ImageBuffer image;
  std::vector<LabeledBox> boxes;

  friend bool operator==(const AnnotatedSample&, const AnnotatedSample&) = default;
};

struct AugmentConfig {
  double hue_delta_min = -18.0;
  double hue_delta_max = 18.0;
  double sat_min = 0.66;
  double sat_max = 1.5;
  double exposure_min = 0.66;
  double exposure_max = 1.5;
  double hflip_prob = 0.5;
  double mosaic_prob = 0.5;
  std::uint64_t seed = 0;
};

inline void validate(const AugmentConfig& c) {
  auto ordered = [](double lo, double hi) { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; };
  if (!ordered(c.hue_delta_min, c.hue_delta_max)) throw ConfigError("hue range is not ordered");
  if (!ordered(c.sat_min, c.sat_max) || c.sat_min < 0.0) {
    throw ConfigError("saturation range must be ordered and non-negative");
  }
  if (!ordered(c.exposure_min, c.exposure_max) || c.exposure_min < 0.0) {
    throw ConfigError("exposure range must be ordered and non-negative");
  }
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(c.hflip_prob) || !prob(c.mosaic_prob)) throw ConfigError("probabilities must be in [0,1]");
}

inline std::string validate(const AnnotatedSample& s) {
  if (!s.image.is_valid()) return "invalid image buffer";
  for (const auto& b : s.boxes) {
    if (!b.bbox.is_valid(b.cls == ObjectClass::kPole)) return "degenerate box " + to_string(b.bbox);
    if (!b.bbox.within(s.image.width, s.image.height)) {
      return "box " + to_string(b.bbox) + " outside image";
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Color

struct Hsv {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;  // [0, 1]
  double v = 0.0;  // [0, 1]
};

inline Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const double r = r8 / 255.0;
  const double g = g8 / 255.0;
  const double b = b8 / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? delta / mx : 0.0;
  if (delta > 0.0) {
    double h;
    if (mx == r) {
      h = (g - b) / delta;
    } else if (mx == g) {
      h = 2.0 + (b - r) / delta;
    } else {
      h = 4.0 + (r - g) / delta;
    }
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    out.h = h;
  }
  return out;
}

inline std::array<std::uint8_t, 3> hsv_to_rgb(const Hsv& hsv) {
  const double s = std::clamp(hsv.s, 0.0, 1.0);
  const double v = std::clamp(hsv.v, 0.0, 1.0);
  double h = std::fmod(hsv.h, 360.0);
  if (h < 0.0) h += 360.0;
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0.0, g = 0.0, b = 0.0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  auto to8 = [](double u) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(u * 255.0), 0L, 255L));
  };
  return {to8(r + m), to8(g + m), to8(b + m)};
}

struct HsvParams {
  double hue_delta_deg = 0.0;
  double sat_scale = 1.0;
  double exposure_scale = 1.0;

  bool is_identity() const {
    return hue_delta_deg == 0.0 && sat_scale == 1.0 && exposure_scale == 1.0;
  }
};

inline HsvParams draw_hsv_params(Rng& rng, const AugmentConfig& config) {
  HsvParams p;
  p.hue_delta_deg = rng.uniform(config.hue_delta_min, config.hue_delta_max);
  p.sat_scale = rng.uniform(config.sat_min, config.sat_max);
  p.exposure_scale = rng.uniform(config.exposure_min, config.exposure_max);
  return p;
}

/// Shifts hue (wrapping mod 360) and scales saturation and value, clamping
/// both to [0, 1]. Identity parameters return the image untouched.
inline ImageBuffer apply_hsv(const ImageBuffer& image, const HsvParams& params) {
  if (params.is_identity()) return image;
  ImageBuffer out = image;
  for (std::size_t i = 0; i + 2 < out.pixels.size(); i += 3) {
    Hsv hsv = rgb_to_hsv(out.pixels[i], out.pixels[i + 1], out.pixels[i + 2]);
    hsv.h = std::fmod(hsv.h + params.hue_delta_deg, 360.0);
    if (hsv.h < 0.0) hsv.h += 360.0;
    hsv.s = std::clamp(hsv.s * params.sat_scale, 0.0, 1.0);
    hsv.v = std::clamp(hsv.v * params.exposure_scale, 0.0, 1.0);
    const auto rgb = hsv_to_rgb(hsv);
    std::copy(rgb.begin(), rgb.end(), out.pixels.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return out;
}

/// Per-image HSV jitter with parameters drawn uniformly from the config.
inline ImageBuffer hsv_jitter(const ImageBuffer& image, Rng& rng, const AugmentConfig& config = {}) {
  return apply_hsv(image, draw_hsv_params(rng, config));
}

// ---------------------------------------------------------------------------
// Geometry

inline AnnotatedSample hflip(const AnnotatedSample& sample) {
  AnnotatedSample out;
  const int w = sample.image.width;
  const int h = sample.image.height;
  out.image = ImageBuffer(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::copy_n(sample.image.at(w - 1 - x, y), 3, out.image.at(x, y));
    }
  }
  out.boxes.reserve(sample.boxes.size());
  const double wd = w;
  for (const auto& b : sample.boxes) {
    out.boxes.push_back(
        LabeledBox{b.cls, BBox{wd - b.bbox.x_max, b.bbox.y_min, wd - b.bbox.x_min, b.bbox.y_max}});
  }
  return out;
}

namespace detail {

// Bilinear sample at continuous source coordinate (u, v) in pixel-center
// convention; coordinates are clamped to the image edge.
inline void sample_bilinear(const ImageBuffer& src, double u, double v, std::uint8_t* dst) {
  u = std::clamp(u, 0.0, static_cast<double>(src.width - 1));
  v = std::clamp(v, 0.0, static_cast<double>(src.height - 1));
  const int x0 = static_cast<int>(std::floor(u));
  const int y0 = static_cast<int>(std::floor(v));
  const int x1 = std::min(x0 + 1, src.width - 1);
  const int y1 = std::min(y0 + 1, src.height - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const std::uint8_t* p00 = src.at(x0, y0);
  const std::uint8_t* p10 = src.at(x1, y0);
  const std::uint8_t* p01 = src.at(x0, y1);
  const std::uint8_t* p11 = src.at(x1, y1);
  for (int c = 0; c < 3; ++c) {
    const double top = p00[c] + (p10[c] - p00[c]) * fx;
    const double bottom = p01[c] + (p11[c] - p01[c]) * fx;
    const double value = top + (bottom - top) * fy;
    dst[c] = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
  }
}

// Renders `src`, scaled by (sx, sy) and with its origin placed at
// (origin_x, origin_y), into the canvas rectangle [x0, x1) x [y0, y1).
inline void draw_scaled(const ImageBuffer& src, double sx, double sy, double origin_x,
                        double origin_y, ImageBuffer& canvas, int x0, int y0, int x1, int y1) {
  for (int y = y0; y < y1; ++y) {
    const double v = (y + 0.5 - origin_y) / sy - 0.5;
    for (int x = x0; x < x1; ++x) {
      const double u = (x + 0.5 - origin_x) / sx - 0.5;
      sample_bilinear(src, u, v, canvas.at(x, y));
    }
  }
}

}  // namespace detail

/// Bilinear resample to target size with boxes scaled per axis.
inline AnnotatedSample resize_to_network(const AnnotatedSample& sample,
                                         int target_width = kNetworkSize,
                                         int target_height = kNetworkSize) {
  if (!sample.image.is_valid()) throw InvalidArgument("resize: invalid image");
  const double sx = static_cast<double>(target_width) / sample.image.width;
  const double sy = static_cast<double>(target_height) / sample.image.height;
  AnnotatedSample out;
  if (sample.image.width == target_width && sample.image.height == target_height) {
    out.image = sample.image;
  } else {
    out.image = ImageBuffer(target_width, target_height);
    detail::draw_scaled(sample.image, sx, sy, 0.0, 0.0, out.image, 0, 0, target_width,
                        target_height);
  }
  out.boxes.reserve(sample.boxes.size());
  for (const auto& b : sample.boxes) {
    BBox s = b.bbox.scaled(sx, sy);
    s = clip(s, 0.0, 0.0, target_width, target_height);
    out.boxes.push_back(LabeledBox{b.cls, s});
  }
  return out;
}

/// Boxes whose clipped area falls below this fraction of their scaled area
/// are dropped from a mosaic.
inline constexpr double kMosaicMinKeptFraction = 0.25;
inline constexpr double kMosaicSplitLo = 0.3;
inline constexpr double kMosaicSplitHi = 0.7;

/// Four-image mosaic on a kNetworkSize square canvas split at integer point
/// (split_x, split_y). Samples fill quadrants top-left, top-right,
/// bottom-left, bottom-right in that order. Each is scaled uniformly just
/// enough to cover its quadrant, anchored with the corner nearest the split
/// point at the split point, and cropped to the quadrant.
inline AnnotatedSample mosaic_at(std::span<const AnnotatedSample> samples, int split_x,
                                 int split_y) {
  if (samples.size() != 4) {
    throw InvalidArgument("mosaic needs exactly 4 samples, got " + std::to_string(samples.size()));
  }
  constexpr int kSize = kNetworkSize;
  if (split_x <= 0 || split_x >= kSize || split_y <= 0 || split_y >= kSize) {
    throw InvalidArgument("mosaic split point outside canvas");
  }
  AnnotatedSample out;
  out.image = ImageBuffer(kSize, kSize);
  const double cx = split_x;
  const double cy = split_y;

  for (int q = 0; q < 4; ++q) {
    const AnnotatedSample& s = samples[static_cast<std::size_t>(q)];
    if (const auto err = validate(s); !err.empty()) throw InvalidArgument("mosaic input: " + err);
    const bool right = q == 1 || q == 3;
    const bool bottom = q >= 2;
    const int qx0 = right ? split_x : 0;
    const int qx1 = right ? kSize : split_x;
    const int qy0 = bottom ? split_y : 0;
    const int qy1 = bottom ? kSize : split_y;
    const double qw = qx1 - qx0;
    const double qh = qy1 - qy0;
    const double w = s.image.width;
    const double h = s.image.height;
    const double scale = std::max(qw / w, qh / h);
    const double ox = right ? cx : cx - scale * w;
    const double oy = bottom ? cy : cy - scale * h;

    detail::draw_scaled(s.image, scale, scale, ox, oy, out.image, qx0, qy0, qx1, qy1);

    for (const auto& b : s.boxes) {
      const BBox placed{ox + scale * b.bbox.x_min, oy + scale * b.bbox.y_min,
                        ox + scale * b.bbox.x_max, oy + scale * b.bbox.y_max};
      const BBox clipped = clip(placed, qx0, qy0, qx1, qy1);
      if (!clipped.is_valid(b.cls == ObjectClass::kPole)) continue;
      if (placed.area() > 0.0 && clipped.area() < kMosaicMinKeptFraction * placed.area()) continue;
      if (placed.area() == 0.0 && clipped.width() < kMosaicMinKeptFraction * placed.width()) {
        continue;
      }
      out.boxes.push_back(LabeledBox{b.cls, clipped});
    }
  }
  return out;
}

/// Mosaic with the split point drawn uniformly from the integer pixels in
/// [0.3, 0.7] of the canvas on each axis.
inline AnnotatedSample mosaic(std::span<const AnnotatedSample> samples, Rng& rng) {
  if (samples.size() != 4) {
    throw InvalidArgument("mosaic needs exactly 4 samples, got " + std::to_string(samples.size()));
  }
  const int lo = static_cast<int>(std::ceil(kMosaicSplitLo * kNetworkSize));
  const int hi = static_cast<int>(std::floor(kMosaicSplitHi * kNetworkSize));
  const int sx = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  const int sy = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  return mosaic_at(samples, sx, sy);
}

struct AugmentResult {
  AnnotatedSample sample;
  /// Names of the ops applied, in order.
  std::vector<std::string> ops;
};

/// mosaic (probability mosaic_prob, needs 4 samples) -> hflip (hflip_prob)
/// -> HSV jitter -> resize to network size. The same random draws are made
/// in the same order whatever the branch outcomes, so the result is a pure
/// function of (samples, config, rng state).
inline AugmentResult augment_pipeline(std::span<const AnnotatedSample> samples,
                                      const AugmentConfig& config, Rng& rng) {
  validate(config);
  if (samples.empty()) throw InvalidArgument("augment_pipeline: no samples");
  const bool do_mosaic = rng.bernoulli(config.mosaic_prob) && samples.size() >= 4;
  const bool do_flip = rng.bernoulli(config.hflip_prob);
  const HsvParams hsv = draw_hsv_params(rng, config);
  Rng mosaic_rng(rng.next_u64());

  AugmentResult result;
  if (do_mosaic) {
    result.sample = mosaic(samples.first(4), mosaic_rng);
    result.ops.emplace_back("mosaic");
  } else {
    if (const auto err = validate(samples.front()); !err.empty()) {
      throw InvalidArgument("augment input: " + err);
    }
    result.sample = samples.front();
  }
  if (do_flip) {
    result.sample = hflip(result.sample);
    result.ops.emplace_back("hflip");
  }
  if (!hsv.is_identity()) {
    result.sample.image = apply_hsv(result.sample.image, hsv);
    result.ops.emplace_back("hsv_jitter");
  }
  result.sample = resize_to_network(result.sample);
  result.ops.emplace_back("resize");
  return result;
}

}  // namespace flooddepth
