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

// Ground-truth scene generator. A fronto-parallel sign on a pole is
// projected through a pinhole camera and emitted as exact detection boxes;
// no pixels are rendered. Used as the independent oracle for the geometry
// and the end-to-end pipeline.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "flooddepth/bbox.hpp"
#include "flooddepth/error.hpp"
#include "flooddepth/geo.hpp"
#include "flooddepth/records.hpp"
#include "flooddepth/rng.hpp"

namespace flooddepth::synth {

struct CameraSpec {
  double focal_px = 800.0;
  double distance_in = 400.0;
  int image_width = 1920;
  int image_height = 1080;
  /// Horizontal offset of the pole from the optical axis (positive right).
  double lateral_offset_in = 0.0;
};

/// Additional sign (same geometry and water level) elsewhere in the frame.
struct ExtraSign {
  double distance_in = 0.0;
  double lateral_offset_in = 0.0;
};

struct SceneSpec {
  std::string photo_id = "scene";
  LatLon location;
  Phase phase = Phase::kPreFlood;
  double sign_height_in = 30.0;
  /// Height of the pole above ground, including the part behind the sign.
  double pole_total_in = 114.0;
  double sign_bottom_height_in = 84.0;
  double water_level_in = 0.0;
  double pole_width_in = 2.0;
  CameraSpec camera;
  /// Round box edges to integer pixels.
  bool quantize = false;
  std::vector<ExtraSign> extra_signs;
};

struct SceneTruth {
  double visible_pole_in = 0.0;
  double water_level_in = 0.0;
  /// Exact (unquantized) projections of the primary sign and its pole.
  BBox sign_bbox;
  BBox pole_bbox;

  /// Depth relative to a dry baseline of the same sign.
  double true_depth_vs(const SceneTruth& pre) const { return pre.visible_pole_in - visible_pole_in; }
};

inline void validate(const SceneSpec& s) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(s.sign_height_in)) throw InvalidArgument("scene: sign height must be positive");
  if (!(s.sign_bottom_height_in >= 0.0)) throw InvalidArgument("scene: negative sign bottom");
  if (!(s.pole_total_in >= s.sign_bottom_height_in)) {
    throw InvalidArgument("scene: pole shorter than sign bottom height");
  }
  if (!(s.water_level_in >= 0.0) ||
      !(s.water_level_in < s.sign_bottom_height_in + s.sign_height_in)) {
    throw InvalidArgument("scene: water level must be in [0, sign top)");
  }
  if (!positive(s.pole_width_in)) throw InvalidArgument("scene: pole width must be positive");
  if (!positive(s.camera.focal_px)) throw InvalidArgument("scene: focal length must be positive");
  if (!positive(s.camera.distance_in)) throw InvalidArgument("scene: distance must be positive");
  if (s.camera.image_width <= 0 || s.camera.image_height <= 0) {
    throw InvalidArgument("scene: image size must be positive");
  }
  for (const auto& e : s.extra_signs) {
    if (!positive(e.distance_in)) throw InvalidArgument("scene: extra sign distance must be positive");
  }
  if (s.photo_id.empty()) throw InvalidArgument("scene: empty photo id");
  check_coordinates(s.location);
}

namespace detail {

struct Projected {
  BBox sign;
  BBox pole;
};

// The optical axis sits halfway up the sign top so the whole assembly is
// vertically centred in the frame.
inline Projected project(const SceneSpec& s, double distance_in, double lateral_in) {
  const double f = s.camera.focal_px;
  const double cx = 0.5 * s.camera.image_width;
  const double cy = 0.5 * s.camera.image_height;
  const double axis_height = 0.5 * (s.sign_bottom_height_in + s.sign_height_in);
  auto px_x = [&](double x_in) { return cx + f * x_in / distance_in; };
  auto px_y = [&](double y_in) { return cy - f * (y_in - axis_height) / distance_in; };

  const double sign_top = s.sign_bottom_height_in + s.sign_height_in;
  const double half_sign = 0.5 * s.sign_height_in;  // octagon: width == height
  const double half_pole = 0.5 * s.pole_width_in;
  const double pole_bottom = std::min(s.water_level_in, s.sign_bottom_height_in);

  Projected p;
  p.sign = BBox{px_x(lateral_in - half_sign), px_y(sign_top), px_x(lateral_in + half_sign),
                px_y(s.sign_bottom_height_in)};
  // Shares the sign's lower edge exactly; zero height when submerged to it.
  p.pole = BBox{px_x(lateral_in - half_pole), p.sign.y_max, px_x(lateral_in + half_pole),
                px_y(pole_bottom)};
  return p;
}

inline BBox quantized(const BBox& b) {
  BBox q{std::round(b.x_min), std::round(b.y_min), std::round(b.x_max), std::round(b.y_max)};
  if (q.x_max <= q.x_min) q.x_max = q.x_min + 1.0;
  return q;
}

}  // namespace detail

struct RenderedScene {
  PhotoRecord photo;
  SceneTruth truth;
};

/// Projects the scene. Pixel height of a vertical span L at distance d is
/// focal_px * L / d. Detections have confidence 1: the primary sign and its
/// pole first, then any extra signs with their poles.
inline RenderedScene render_scene(const SceneSpec& spec) {
  validate(spec);
  RenderedScene out;
  out.photo.photo_id = spec.photo_id;
  out.photo.location = spec.location;
  out.photo.phase = spec.phase;
  out.photo.image_width = spec.camera.image_width;
  out.photo.image_height = spec.camera.image_height;

  const auto primary =
      detail::project(spec, spec.camera.distance_in, spec.camera.lateral_offset_in);
  out.truth.visible_pole_in = std::max(0.0, spec.sign_bottom_height_in - spec.water_level_in);
  out.truth.water_level_in = spec.water_level_in;
  out.truth.sign_bbox = primary.sign;
  out.truth.pole_bbox = primary.pole;

  auto emit = [&](const detail::Projected& p) {
    const BBox sign = spec.quantize ? detail::quantized(p.sign) : p.sign;
    const BBox pole = spec.quantize ? detail::quantized(p.pole) : p.pole;
    for (const BBox& b : {sign, pole}) {
      if (!b.within(spec.camera.image_width, spec.camera.image_height)) {
        throw InvalidArgument("scene " + spec.photo_id + ": projection " + to_string(b) +
                              " falls outside the image");
      }
    }
    out.photo.detections.push_back(Detection{ObjectClass::kStopSign, sign, 1.0});
    out.photo.detections.push_back(Detection{ObjectClass::kPole, pole, 1.0});
  };
  emit(primary);
  for (const auto& extra : spec.extra_signs) {
    emit(detail::project(spec, extra.distance_in, extra.lateral_offset_in));
  }
  return out;
}

struct ScenePair {
  RenderedScene pre;
  RenderedScene post;
  double true_depth_in = 0.0;
};

/// Dry baseline plus flooded photo of the same sign. The post photo takes
/// the pre photo's location; the true depth is the post water level.
inline ScenePair generate_pair(const SceneSpec& pre_spec, SceneSpec post_spec) {
  if (pre_spec.water_level_in != 0.0) throw InvalidArgument("generate_pair: baseline must be dry");
  if (pre_spec.sign_height_in != post_spec.sign_height_in ||
      pre_spec.sign_bottom_height_in != post_spec.sign_bottom_height_in ||
      pre_spec.pole_total_in != post_spec.pole_total_in ||
      pre_spec.pole_width_in != post_spec.pole_width_in) {
    throw InvalidArgument("generate_pair: pre and post scenes describe different signs");
  }
  if (pre_spec.photo_id == post_spec.photo_id) {
    throw InvalidArgument("generate_pair: pre and post share photo id " + pre_spec.photo_id);
  }
  SceneSpec pre = pre_spec;
  pre.phase = Phase::kPreFlood;
  post_spec.phase = Phase::kPostFlood;
  post_spec.location = pre.location;
  ScenePair out;
  out.pre = render_scene(pre);
  out.post = render_scene(post_spec);
  out.true_depth_in = post_spec.water_level_in;
  return out;
}

/// Moves every box edge by an independent uniform offset in
/// [-jitter_px, jitter_px], then clamps to the image. Edges that cross are
/// reordered; a sign box that collapses keeps a minimum extent of 1e-6 px.
inline void apply_jitter(PhotoRecord& photo, double jitter_px, Rng& rng) {
  if (!(jitter_px >= 0.0)) throw InvalidArgument("jitter must be non-negative");
  if (jitter_px == 0.0) return;
  const double w = photo.image_width;
  const double h = photo.image_height;
  for (Detection& d : photo.detections) {
    BBox b = d.bbox;
    b.x_min = std::clamp(b.x_min + rng.uniform(-jitter_px, jitter_px), 0.0, w);
    b.y_min = std::clamp(b.y_min + rng.uniform(-jitter_px, jitter_px), 0.0, h);
    b.x_max = std::clamp(b.x_max + rng.uniform(-jitter_px, jitter_px), 0.0, w);
    b.y_max = std::clamp(b.y_max + rng.uniform(-jitter_px, jitter_px), 0.0, h);
    if (b.x_min > b.x_max) std::swap(b.x_min, b.x_max);
    if (b.y_min > b.y_max) std::swap(b.y_min, b.y_max);
    constexpr double kMinExtent = 1e-6;
    if (b.x_max - b.x_min < kMinExtent) {
      if (b.x_max + kMinExtent <= w) {
        b.x_max = b.x_min + kMinExtent;
      } else {
        b.x_min = b.x_max - kMinExtent;
      }
    }
    if (d.cls == ObjectClass::kStopSign && b.y_max - b.y_min < kMinExtent) {
      if (b.y_max + kMinExtent <= h) {
        b.y_max = b.y_min + kMinExtent;
      } else {
        b.y_min = b.y_max - kMinExtent;
      }
    }
    d.bbox = b;
  }
}

/// One entry of the built-in demo fixture.
struct FixtureSite {
  std::string id;
  std::string place;
  LatLon location;
  double water_level_in;
};

/// Eleven flooded stop signs across five towns in southern British Columbia
/// and north-western Washington. Sites sharing a town are several hundred
/// meters apart so they never pair with each other.
inline std::vector<FixtureSite> eleven_sign_sites() {
  return {
      {"01", "CAN/Abbotsford", {49.050400, -122.304500}, 27.162},
      {"02", "CAN/Merritt", {50.111300, -120.786200}, 9.759},
      {"03", "CAN/Merritt", {50.116300, -120.791200}, 13.436},
      {"04", "CAN/Abbotsford", {49.055400, -122.309500}, 20.157},
      {"05", "CAN/Princeton", {49.459000, -120.506200}, 6.844},
      {"06", "CAN/Princeton", {49.464000, -120.511200}, 15.780},
      {"07", "CAN/Abbotsford", {49.060400, -122.314500}, 3.968},
      {"08", "CAN/Abbotsford", {49.045400, -122.299500}, 6.679},
      {"09", "USA/Ferndale", {48.846500, -122.591000}, 41.342},
      {"10", "USA/Ferndale", {48.851500, -122.596000}, 10.923},
      {"11", "USA/Bellingham", {48.751900, -122.478700}, 8.038},
  };
}

/// Renders the eleven-site fixture with varied camera distances and offsets.
/// Pre photo ids are "pre-<id>", post photo ids "post-<id>".
inline std::vector<ScenePair> eleven_sign_fixture(bool quantize = false) {
  std::vector<ScenePair> out;
  const auto sites = eleven_sign_sites();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& site = sites[i];
    SceneSpec pre;
    pre.photo_id = "pre-" + site.id;
    pre.location = site.location;
    pre.quantize = quantize;
    pre.camera.distance_in = 300.0 + 40.0 * static_cast<double>(i);
    pre.camera.lateral_offset_in = -60.0 + 12.0 * static_cast<double>(i);
    SceneSpec post = pre;
    post.photo_id = "post-" + site.id;
    post.water_level_in = site.water_level_in;
    post.camera.distance_in = 700.0 - 25.0 * static_cast<double>(i);
    post.camera.lateral_offset_in = 50.0 - 9.0 * static_cast<double>(i);
    out.push_back(generate_pair(pre, post));
  }
  return out;
}

}  // namespace flooddepth::synth
