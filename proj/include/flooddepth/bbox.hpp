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

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "flooddepth/error.hpp"

namespace flooddepth {

/// Axis-aligned rectangle in continuous pixel coordinates.
///
/// Image frame: x grows to the right, y grows downward. A well-formed box has
/// x_min < x_max and y_min < y_max. Pole boxes are allowed a zero height when
/// the pole is fully submerged (see `is_valid(allow_zero_height)`).
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  /// Box covering integer pixel indices [i0, i1] x [j0, j1]; pixel i spans
  /// the half-open interval [i, i+1).
  static BBox from_pixel_indices(int i0, int j0, int i1, int j1) {
    return BBox{static_cast<double>(i0), static_cast<double>(j0), static_cast<double>(i1) + 1.0,
                static_cast<double>(j1) + 1.0};
  }

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double x_center() const { return 0.5 * (x_min + x_max); }
  double y_center() const { return 0.5 * (y_min + y_max); }

  bool is_finite() const {
    return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
           std::isfinite(y_max);
  }

  bool is_valid(bool allow_zero_height = false) const {
    if (!is_finite() || !(x_min < x_max)) return false;
    return allow_zero_height ? y_min <= y_max : y_min < y_max;
  }

  bool within(double image_width, double image_height) const {
    return x_min >= 0.0 && y_min >= 0.0 && x_max <= image_width && y_max <= image_height;
  }

  BBox translated(double dx, double dy) const {
    return BBox{x_min + dx, y_min + dy, x_max + dx, y_max + dy};
  }

  BBox scaled(double sx, double sy) const {
    return BBox{x_min * sx, y_min * sy, x_max * sx, y_max * sy};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Lexicographic order on (x_min, y_min, x_max, y_max); used as the final
/// tie-break wherever a total order over boxes is needed.
inline bool lex_less(const BBox& a, const BBox& b) {
  return std::tie(a.x_min, a.y_min, a.x_max, a.y_max) <
         std::tie(b.x_min, b.y_min, b.x_max, b.y_max);
}

/// Intersection rectangle; width/height are clamped at zero when disjoint.
inline double intersection_area(const BBox& a, const BBox& b) {
  const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

inline BBox clip(const BBox& box, double x0, double y0, double x1, double y1) {
  return BBox{std::clamp(box.x_min, x0, x1), std::clamp(box.y_min, y0, y1),
              std::clamp(box.x_max, x0, x1), std::clamp(box.y_max, y0, y1)};
}

inline std::string to_string(const BBox& b) {
  return "[" + std::to_string(b.x_min) + ", " + std::to_string(b.y_min) + ", " +
         std::to_string(b.x_max) + ", " + std::to_string(b.y_max) + "]";
}

}  // namespace flooddepth
