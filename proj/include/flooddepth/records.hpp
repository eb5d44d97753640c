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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flooddepth/bbox.hpp"
#include "flooddepth/error.hpp"
#include "flooddepth/geo.hpp"

namespace flooddepth {

enum class ObjectClass { kStopSign, kPole };

enum class Phase { kPreFlood, kPostFlood };

inline std::string_view to_string(ObjectClass c) {
  return c == ObjectClass::kStopSign ? "stop_sign" : "pole";
}

inline std::string_view to_string(Phase p) { return p == Phase::kPreFlood ? "pre" : "post"; }

inline std::optional<ObjectClass> parse_object_class(std::string_view s) {
  if (s == "stop_sign") return ObjectClass::kStopSign;
  if (s == "pole") return ObjectClass::kPole;
  return std::nullopt;
}

inline std::optional<Phase> parse_phase(std::string_view s) {
  if (s == "pre") return Phase::kPreFlood;
  if (s == "post") return Phase::kPostFlood;
  return std::nullopt;
}

/// One detector output (or one ground-truth annotation, confidence 1).
struct Detection {
  ObjectClass cls = ObjectClass::kStopSign;
  BBox bbox;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// One geotagged photo and everything detected in it.
struct PhotoRecord {
  std::string photo_id;
  LatLon location;
  Phase phase = Phase::kPreFlood;
  int image_width = 0;
  int image_height = 0;
  std::vector<Detection> detections;
  std::optional<std::string> captured_at;

  friend bool operator==(const PhotoRecord&, const PhotoRecord&) = default;
};

/// Checks the record invariants; returns an empty string when valid,
/// otherwise a description of the first violation.
///
/// Pole boxes may have zero height (pole fully submerged up to the sign's
/// lower edge); sign boxes must have positive extent on both axes.
inline std::string validate(const PhotoRecord& photo) {
  if (photo.photo_id.empty()) return "empty photo_id";
  if (!is_valid(photo.location)) return "coordinates out of range";
  if (photo.image_width <= 0 || photo.image_height <= 0) return "non-positive image size";
  for (std::size_t i = 0; i < photo.detections.size(); ++i) {
    const Detection& d = photo.detections[i];
    const std::string where = "detection " + std::to_string(i) + ": ";
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) return where + "confidence outside [0,1]";
    if (!d.bbox.is_valid(d.cls == ObjectClass::kPole)) {
      return where + "degenerate bbox " + to_string(d.bbox);
    }
    if (!d.bbox.within(photo.image_width, photo.image_height)) {
      return where + "bbox " + to_string(d.bbox) + " outside image bounds";
    }
  }
  return {};
}

}  // namespace flooddepth
