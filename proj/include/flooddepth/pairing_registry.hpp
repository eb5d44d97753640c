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
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flooddepth/error.hpp"
#include "flooddepth/geo.hpp"
#include "flooddepth/geometry.hpp"
#include "flooddepth/records.hpp"

namespace flooddepth {

inline constexpr double kDefaultPairingRadiusM = 25.0;
/// Baselines closer than this are taken to show the same physical sign.
inline constexpr double kDedupRadiusM = 1.0;

struct BaselineEntry {
  LatLon location;
  SignObservation observation;
  std::string source_photo_id;

  friend bool operator==(const BaselineEntry&, const BaselineEntry&) = default;
};

struct PairResult {
  BaselineEntry entry;
  double distance_m = 0.0;
  /// Second-nearest baseline lies within twice the nearest distance.
  bool ambiguous = false;
};

/// Pre-flood baselines keyed by location.
///
/// Built by a single writer through register_baseline(); freeze() then makes
/// it read-only, after which pair() is a pure function safe for concurrent
/// callers. The lookup is a linear scan.
class Registry {
 public:
  explicit Registry(double pairing_radius_m = kDefaultPairingRadiusM)
      : pairing_radius_m_(pairing_radius_m) {
    if (!(pairing_radius_m > 0.0) || !std::isfinite(pairing_radius_m)) {
      throw ConfigError("pairing radius must be positive");
    }
  }

  double pairing_radius_m() const { return pairing_radius_m_; }
  const std::vector<BaselineEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool frozen() const { return frozen_; }
  void freeze() { frozen_ = true; }

  /// Adds a baseline. Entries within kDedupRadiusM of the new one collapse to
  /// the one with the largest sign box (ties: smallest photo id).
  void register_baseline(const PhotoRecord& photo, const SignObservation& obs) {
    if (photo.phase != Phase::kPreFlood) {
      throw PhaseError("photo " + photo.photo_id + " is not a pre-flood photo");
    }
    add(BaselineEntry{photo.location, obs, photo.photo_id});
  }

  /// Inserts an entry directly (used when loading a serialized registry).
  void add(BaselineEntry entry) {
    if (frozen_) throw InvalidArgument("registry is frozen");
    check_coordinates(entry.location);
    if (!(entry.observation.pole_length_in > 0.0)) {
      throw InvalidArgument("baseline " + entry.source_photo_id +
                            " has no visible pole and cannot serve as a reference");
    }
    std::vector<BaselineEntry> kept;
    kept.reserve(entries_.size() + 1);
    for (BaselineEntry& e : entries_) {
      if (haversine_m(e.location, entry.location) < kDedupRadiusM) {
        if (preferred(e, entry)) entry = std::move(e);
      } else {
        kept.push_back(std::move(e));
      }
    }
    kept.push_back(std::move(entry));
    entries_ = std::move(kept);
  }

  /// Nearest baseline within the pairing radius (ties: smallest photo id).
  PairResult pair(const PhotoRecord& post_photo) const {
    if (post_photo.phase != Phase::kPostFlood) {
      throw PhaseError("photo " + post_photo.photo_id + " is not a post-flood photo");
    }
    return pair_location(post_photo.location, post_photo.photo_id);
  }

  PairResult pair_location(const LatLon& where, const std::string& label = {}) const {
    const BaselineEntry* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    double second_d = std::numeric_limits<double>::infinity();
    for (const BaselineEntry& e : entries_) {
      const double d = haversine_m(e.location, where);
      if (best == nullptr || d < best_d ||
          (d == best_d && e.source_photo_id < best->source_photo_id)) {
        second_d = best_d;
        best_d = d;
        best = &e;
      } else if (d < second_d) {
        second_d = d;
      }
    }
    if (best == nullptr || best_d > pairing_radius_m_) {
      throw NoBaselineError("no baseline within " + std::to_string(pairing_radius_m_) +
                            " m of " + (label.empty() ? std::string("location") : label));
    }
    return PairResult{*best, best_d, second_d <= 2.0 * best_d};
  }

 private:
  static bool preferred(const BaselineEntry& a, const BaselineEntry& b) {
    const double area_a = a.observation.sign_bbox.area();
    const double area_b = b.observation.sign_bbox.area();
    if (area_a != area_b) return area_a > area_b;
    return a.source_photo_id < b.source_photo_id;
  }

  double pairing_radius_m_;
  std::vector<BaselineEntry> entries_;
  bool frozen_ = false;
};

}  // namespace flooddepth
