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

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "flooddepth/error.hpp"
#include "flooddepth/geometry.hpp"
#include "flooddepth/records.hpp"

namespace flooddepth {

inline constexpr double kDefaultMinConfidence = 0.25;

namespace detail {

// True if `a` should be preferred over `b` as the target sign: larger area,
// then higher confidence, then smaller x_min, then the remaining box edges.
inline bool better_sign(const Detection& a, const Detection& b) {
  const double area_a = a.bbox.area();
  const double area_b = b.bbox.area();
  if (area_a != area_b) return area_a > area_b;
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return lex_less(a.bbox, b.bbox);
}

// Closest x-center, then taller, then smaller x_min, then remaining edges.
inline bool better_pole(const Detection& a, const Detection& b, double sign_xc) {
  const double da = std::abs(a.bbox.x_center() - sign_xc);
  const double db = std::abs(b.bbox.x_center() - sign_xc);
  if (da != db) return da < db;
  if (a.bbox.height() != b.bbox.height()) return a.bbox.height() > b.bbox.height();
  if (a.bbox.x_min != b.bbox.x_min) return a.bbox.x_min < b.bbox.x_min;
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return lex_less(a.bbox, b.bbox);
}

}  // namespace detail

/// The largest stop sign is taken as the one nearest the camera, which is
/// the sign the photo's single geotag refers to.
inline Detection select_primary_sign(std::span<const Detection> detections) {
  const Detection* best = nullptr;
  for (const Detection& d : detections) {
    if (d.cls != ObjectClass::kStopSign) continue;
    if (best == nullptr || detail::better_sign(d, *best)) best = &d;
  }
  if (best == nullptr) throw NoSignError("no stop-sign detection");
  return *best;
}

/// Pole whose x-center is closest to the sign's x-center.
inline Detection match_pole(const Detection& sign, std::span<const Detection> detections) {
  const double sign_xc = sign.bbox.x_center();
  const Detection* best = nullptr;
  for (const Detection& d : detections) {
    if (d.cls != ObjectClass::kPole) continue;
    if (best == nullptr || detail::better_pole(d, *best, sign_xc)) best = &d;
  }
  if (best == nullptr) throw NoPoleError("no pole detection");
  return *best;
}

struct SelectionResult {
  SignObservation observation;
  std::vector<std::string> warnings;
};

/// Filters by confidence, applies the sign and pole selection rules and
/// calibrates the pole length against the selected sign.
inline SelectionResult build_observation(const PhotoRecord& photo, const SignSpec& spec = {},
                                         double min_confidence = kDefaultMinConfidence) {
  std::vector<Detection> kept;
  kept.reserve(photo.detections.size());
  std::size_t sign_count = 0;
  for (const Detection& d : photo.detections) {
    if (d.confidence < min_confidence) continue;
    kept.push_back(d);
    if (d.cls == ObjectClass::kStopSign) ++sign_count;
  }
  if (sign_count == 0) {
    throw NoSignError("photo " + photo.photo_id + ": no stop sign at confidence >= " +
                      std::to_string(min_confidence));
  }

  const Detection sign = select_primary_sign(kept);
  Detection pole;
  try {
    pole = match_pole(sign, kept);
  } catch (const NoPoleError&) {
    throw NoPoleError("photo " + photo.photo_id + ": no pole at confidence >= " +
                      std::to_string(min_confidence));
  }

  SelectionResult result;
  // A pole cannot hang above its sign; this is diagnostic only.
  if (pole.bbox.y_max <= sign.bbox.y_min && pole.bbox.height() > 0.0) {
    result.warnings.push_back("photo " + photo.photo_id +
                              ": selected pole lies entirely above the sign (reflection?)");
  }
  result.observation = observe(photo.photo_id, sign.bbox, pole.bbox, spec);
  result.observation.sign_confidence = sign.confidence;
  result.observation.pole_confidence = pole.confidence;
  result.observation.multi_sign_scene = sign_count > 1;
  return result;
}

}  // namespace flooddepth
