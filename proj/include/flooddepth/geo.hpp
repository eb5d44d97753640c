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
#include <numbers>
#include <string>

#include "flooddepth/error.hpp"

namespace flooddepth {

inline constexpr double kEarthRadiusM = 6371000.0;

/// WGS84 position in degrees.
struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const LatLon&, const LatLon&) = default;
};

inline bool is_valid(const LatLon& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

inline void check_coordinates(const LatLon& p) {
  if (!is_valid(p)) {
    throw CoordError("coordinates out of range: lat=" + std::to_string(p.lat) +
                     " lon=" + std::to_string(p.lon));
  }
}

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
/// Symmetric in its arguments bit-for-bit.
inline double haversine_m(const LatLon& a, const LatLon& b) {
  check_coordinates(a);
  check_coordinates(b);
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * kDeg;
  const double dlon = (b.lon - a.lon) * kDeg;
  const double s_lat = std::sin(0.5 * dlat);
  const double s_lon = std::sin(0.5 * dlon);
  // cos(a)*cos(b) is commutative in IEEE arithmetic and sin^2 is even, so
  // swapping a and b reproduces the same bits.
  const double h = s_lat * s_lat + std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * s_lon * s_lon;
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

}  // namespace flooddepth
