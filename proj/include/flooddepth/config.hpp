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

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>

#include "flooddepth/augment.hpp"
#include "flooddepth/error.hpp"
#include "flooddepth/geometry.hpp"
#include "flooddepth/metrics.hpp"
#include "flooddepth/pairing_registry.hpp"
#include "flooddepth/scene_selection.hpp"

namespace flooddepth {

struct PipelineConfig {
  double sign_height_in = kResidentialSignHeightIn;
  double min_confidence = kDefaultMinConfidence;
  /// Selected detections scoring below this mark the estimate LOW_CONFIDENCE.
  double low_confidence = 0.5;
  double pairing_radius_m = kDefaultPairingRadiusM;
  double iou_threshold = kDefaultIouThreshold;
  int k_folds = kDefaultFolds;
  std::uint64_t seed = 0;
  AugmentConfig augment;

  SignSpec sign_spec() const { return SignSpec{sign_height_in}; }
};

inline void validate(const PipelineConfig& c) {
  if (!(c.sign_height_in > 0.0) || !std::isfinite(c.sign_height_in)) {
    throw ConfigError("sign_height_in must be positive");
  }
  if (!(c.min_confidence >= 0.0 && c.min_confidence <= 1.0)) {
    throw ConfigError("min_confidence must be in [0,1]");
  }
  if (!(c.low_confidence >= 0.0 && c.low_confidence <= 1.0)) {
    throw ConfigError("low_confidence must be in [0,1]");
  }
  if (!(c.pairing_radius_m > 0.0) || !std::isfinite(c.pairing_radius_m)) {
    throw ConfigError("pairing_radius_m must be positive");
  }
  if (!(c.iou_threshold > 0.0 && c.iou_threshold <= 1.0)) {
    throw ConfigError("iou_threshold must be in (0,1]");
  }
  if (c.k_folds < 2) throw ConfigError("k_folds must be at least 2");
  validate(c.augment);
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno != 0 || !std::isfinite(d)) {
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  }
  return d;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
  }
  return out;
}

}  // namespace detail

/// Applies one key/value setting. Unknown keys are a ConfigError.
inline void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value) {
  using detail::parse_double;
  if (key == "sign_height_in") {
    c.sign_height_in = parse_double(key, value);
  } else if (key == "min_confidence") {
    c.min_confidence = parse_double(key, value);
  } else if (key == "low_confidence") {
    c.low_confidence = parse_double(key, value);
  } else if (key == "pairing_radius_m") {
    c.pairing_radius_m = parse_double(key, value);
  } else if (key == "iou_threshold") {
    c.iou_threshold = parse_double(key, value);
  } else if (key == "k_folds") {
    c.k_folds = detail::parse_int<int>(key, value);
  } else if (key == "seed") {
    c.seed = detail::parse_int<std::uint64_t>(key, value);
  } else if (key == "augment.hue_delta_min") {
    c.augment.hue_delta_min = parse_double(key, value);
  } else if (key == "augment.hue_delta_max") {
    c.augment.hue_delta_max = parse_double(key, value);
  } else if (key == "augment.sat_min") {
    c.augment.sat_min = parse_double(key, value);
  } else if (key == "augment.sat_max") {
    c.augment.sat_max = parse_double(key, value);
  } else if (key == "augment.exposure_min") {
    c.augment.exposure_min = parse_double(key, value);
  } else if (key == "augment.exposure_max") {
    c.augment.exposure_max = parse_double(key, value);
  } else if (key == "augment.hflip_prob") {
    c.augment.hflip_prob = parse_double(key, value);
  } else if (key == "augment.mosaic_prob") {
    c.augment.mosaic_prob = parse_double(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

/// Reads flat `key = value` lines; '#' starts a comment. Later keys win.
inline void read_config(std::istream& in, PipelineConfig& c, const std::string& source = "config") {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      apply_setting(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

/// Applies a config file on top of `c`. Validation is left to the caller so
/// that command-line overrides can be layered on first.
inline void load_config(const std::string& path, PipelineConfig& c) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  read_config(in, c, path);
}

}  // namespace flooddepth
