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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flooddepth/geometry.hpp"
#include "flooddepth/metrics.hpp"

namespace flooddepth {

/// One mapped flood-depth point.
struct MapFeature {
  DepthEstimate estimate;
  double pairing_distance_m = 0.0;
  bool pairing_ambiguous = false;

  const std::string& id() const { return estimate.post_photo_id; }

  friend bool operator==(const MapFeature&, const MapFeature&) = default;
};

/// One feature per successfully paired post-flood photo, sorted by id.
struct FloodMap {
  std::vector<MapFeature> features;

  friend bool operator==(const FloodMap&, const FloodMap&) = default;
};

struct PhotoFailure {
  std::string photo_id;
  std::string reason;

  friend bool operator==(const PhotoFailure&, const PhotoFailure&) = default;
};

/// Result of an estimation run. features + unmapped == post photos.
struct EstimateRun {
  FloodMap map;
  /// Post-flood photos that produced no feature.
  std::vector<PhotoFailure> unmapped;
  /// Pre-flood photos that could not become baselines.
  std::vector<PhotoFailure> baseline_failures;
  std::vector<std::string> warnings;

  friend bool operator==(const EstimateRun&, const EstimateRun&) = default;
};

struct DepthRow {
  std::string id;
  std::string location;
  double detected_in = 0.0;
  double truth_in = 0.0;
  double delta_in = 0.0;
};

/// Aggregate evaluation metrics. Metrics whose inputs were missing are left
/// unset and a warning is recorded instead.
struct EvalReport {
  std::map<std::string, double> ap;  // keyed by class name
  std::optional<double> mean_ap;
  std::optional<double> mean_matched_iou;
  std::optional<double> mae_pole_pre;
  std::optional<double> mae_pole_post;
  std::optional<double> mae_pole_all;
  std::optional<double> mae_depth_table;
  std::optional<double> mae_depth_polesum;
  std::optional<std::int64_t> optimal_iteration;
  std::vector<DepthRow> depth_rows;
  std::vector<std::string> warnings;
};

}  // namespace flooddepth
