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

// Size-reference calibration: a stop sign of known physical height gives a
// pixels-per-inch ratio that converts the co-planar pole length to inches.
// Flood depth is the loss of visible pole between a pre-flood and a
// post-flood photo of the same sign.
//
// Pole annotation contract: the pole box spans from the sign's lower edge
// down to the first occlusion (ground in a dry photo, the waterline in a
// flooded one). No perspective or tilt correction is applied.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "flooddepth/bbox.hpp"
#include "flooddepth/error.hpp"
#include "flooddepth/geo.hpp"

namespace flooddepth {

inline constexpr double kResidentialSignHeightIn = 30.0;
inline constexpr double kMultiLaneSignHeightIn = 36.0;

struct SignSpec {
  double physical_height_in = kResidentialSignHeightIn;
};

struct SignObservation {
  std::string photo_id;
  BBox sign_bbox;
  BBox pole_bbox;
  double ppi = 0.0;             // pixels per inch
  double pole_length_in = 0.0;  // visible pole
  double sign_confidence = 1.0;
  double pole_confidence = 1.0;
  bool multi_sign_scene = false;

  friend bool operator==(const SignObservation&, const SignObservation&) = default;
};

enum class DepthFlag : std::uint8_t {
  kNegativeRaw = 1u << 0,
  kLowConfidence = 1u << 1,
  kMultiSignScene = 1u << 2,
};

/// Small set of DepthFlag values.
class DepthFlags {
 public:
  constexpr DepthFlags() = default;

  void set(DepthFlag f) { bits_ |= static_cast<std::uint8_t>(f); }
  bool has(DepthFlag f) const { return (bits_ & static_cast<std::uint8_t>(f)) != 0; }
  bool empty() const { return bits_ == 0; }
  std::uint8_t bits() const { return bits_; }

  /// Canonical names in a fixed order.
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    if (has(DepthFlag::kNegativeRaw)) out.emplace_back("NEGATIVE_RAW");
    if (has(DepthFlag::kLowConfidence)) out.emplace_back("LOW_CONFIDENCE");
    if (has(DepthFlag::kMultiSignScene)) out.emplace_back("MULTI_SIGN_SCENE");
    return out;
  }

  /// Returns false for unknown names.
  bool set_by_name(const std::string& name) {
    if (name == "NEGATIVE_RAW") {
      set(DepthFlag::kNegativeRaw);
    } else if (name == "LOW_CONFIDENCE") {
      set(DepthFlag::kLowConfidence);
    } else if (name == "MULTI_SIGN_SCENE") {
      set(DepthFlag::kMultiSignScene);
    } else {
      return false;
    }
    return true;
  }

  friend bool operator==(const DepthFlags&, const DepthFlags&) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct DepthEstimate {
  LatLon location;
  std::string pre_photo_id;
  std::string post_photo_id;
  double pre_pole_in = 0.0;
  double post_pole_in = 0.0;
  double depth_raw_in = 0.0;  // pre - post; negative under detection noise
  double depth_in = 0.0;      // max(0, depth_raw_in)
  DepthFlags flags;

  friend bool operator==(const DepthEstimate&, const DepthEstimate&) = default;
};

/// Pixels per inch from the sign's pixel height.
inline double ppi_ratio(const BBox& sign_bbox, const SignSpec& spec = {}) {
  if (!(spec.physical_height_in > 0.0) || !std::isfinite(spec.physical_height_in)) {
    throw GeometryError("sign physical height must be positive");
  }
  if (!sign_bbox.is_valid()) {
    throw GeometryError("degenerate sign bbox " + to_string(sign_bbox));
  }
  return sign_bbox.height() / spec.physical_height_in;
}

/// Visible pole length in inches. A zero-height pole box yields 0.
inline double pole_length_inches(const BBox& pole_bbox, double ppi) {
  if (!(ppi > 0.0) || !std::isfinite(ppi)) {
    throw GeometryError("pixels-per-inch ratio must be positive, got " + std::to_string(ppi));
  }
  if (!pole_bbox.is_finite() || pole_bbox.height() < 0.0) {
    throw GeometryError("degenerate pole bbox " + to_string(pole_bbox));
  }
  return pole_bbox.height() / ppi;
}

/// Builds a calibrated observation from an already-selected sign/pole pair.
inline SignObservation observe(std::string photo_id, const BBox& sign_bbox, const BBox& pole_bbox,
                               const SignSpec& spec = {}) {
  SignObservation obs;
  obs.photo_id = std::move(photo_id);
  obs.sign_bbox = sign_bbox;
  obs.pole_bbox = pole_bbox;
  obs.ppi = ppi_ratio(sign_bbox, spec);
  obs.pole_length_in = pole_length_inches(pole_bbox, obs.ppi);
  return obs;
}

/// Flood depth from the visible pole lost between the two photos.
///
/// Negative raw depth (post pole longer than pre) is clamped to zero and
/// flagged. LOW_CONFIDENCE is set when any selected detection in either
/// photo scored below `low_confidence`; MULTI_SIGN_SCENE when either photo
/// needed multi-sign disambiguation.
inline DepthEstimate estimate_depth(const SignObservation& pre, const SignObservation& post,
                                    const LatLon& location, double low_confidence = 0.5) {
  if (!(pre.pole_length_in >= 0.0) || !(post.pole_length_in >= 0.0)) {
    throw GeometryError("pole lengths must be non-negative");
  }
  DepthEstimate est;
  est.location = location;
  est.pre_photo_id = pre.photo_id;
  est.post_photo_id = post.photo_id;
  est.pre_pole_in = pre.pole_length_in;
  est.post_pole_in = post.pole_length_in;
  est.depth_raw_in = pre.pole_length_in - post.pole_length_in;
  est.depth_in = std::max(0.0, est.depth_raw_in);
  if (est.depth_raw_in < 0.0) est.flags.set(DepthFlag::kNegativeRaw);
  const double min_conf = std::min(
      {pre.sign_confidence, pre.pole_confidence, post.sign_confidence, post.pole_confidence});
  if (min_conf < low_confidence) est.flags.set(DepthFlag::kLowConfidence);
  if (pre.multi_sign_scene || post.multi_sign_scene) est.flags.set(DepthFlag::kMultiSignScene);
  return est;
}

}  // namespace flooddepth
