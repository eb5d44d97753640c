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

// File formats:
//
//   photo JSONL     one PhotoRecord per line:
//                   {"photo_id": str, "lat": num, "lon": num, "phase": "pre"|"post",
//                    "width": int, "height": int, "captured_at": str (optional),
//                    "detections": [{"class": "stop_sign"|"pole", "confidence": num,
//                                    "bbox": [x_min, y_min, x_max, y_max]}]}
//   Darknet txt     "class_id cx cy w h" per line, normalized to [0,1];
//                   class 0 = stop sign, 1 = pole
//   GeoJSON         FeatureCollection of Points, compact, fixed precision
//   registry JSON   {"pairing_radius_m": num, "entries": [...]}
//   measurements    {"depth_records": [...], "pole_records": [...],
//                    "map_curves": [[[iteration, mAP], ...], ...]}, all optional

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "flooddepth/augment.hpp"
#include "flooddepth/error.hpp"
#include "flooddepth/metrics.hpp"
#include "flooddepth/pairing_registry.hpp"
#include "flooddepth/records.hpp"
#include "flooddepth/report.hpp"
#include "flooddepth/synthetic.hpp"

namespace flooddepth::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Helpers

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Fixed-point formatting; never emits "-0.000".
inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

inline Json bbox_to_json(const BBox& b) { return Json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

inline BBox bbox_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("bbox must be an array of 4 numbers");
  for (const auto& v : j) {
    if (!v.is_number()) throw std::invalid_argument("bbox must be an array of 4 numbers");
  }
  return BBox{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

namespace detail {

inline const Json& require(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument(std::string("missing field '") + key + "'");
  return *it;
}

inline double require_number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) throw std::invalid_argument(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline std::string require_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline int require_int(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number_integer()) {
    throw std::invalid_argument(std::string("field '") + key + "' must be an integer");
  }
  return v.get<int>();
}

inline Phase require_phase(const Json& j) {
  const auto phase = parse_phase(require_string(j, "phase"));
  if (!phase) throw std::invalid_argument("phase must be \"pre\" or \"post\"");
  return *phase;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Photo records

inline Json photo_to_json(const PhotoRecord& p) {
  Json j;
  j["photo_id"] = p.photo_id;
  j["lat"] = p.location.lat;
  j["lon"] = p.location.lon;
  j["phase"] = std::string(to_string(p.phase));
  j["width"] = p.image_width;
  j["height"] = p.image_height;
  if (p.captured_at) j["captured_at"] = *p.captured_at;
  Json dets = Json::array();
  for (const auto& d : p.detections) {
    Json dj;
    dj["class"] = std::string(to_string(d.cls));
    dj["confidence"] = d.confidence;
    dj["bbox"] = bbox_to_json(d.bbox);
    dets.push_back(std::move(dj));
  }
  j["detections"] = std::move(dets);
  return j;
}

/// Parses and validates one record; throws std::invalid_argument.
inline PhotoRecord photo_from_json(const Json& j) {
  using namespace detail;
  if (!j.is_object()) throw std::invalid_argument("record must be a JSON object");
  PhotoRecord p;
  p.photo_id = require_string(j, "photo_id");
  p.location = LatLon{require_number(j, "lat"), require_number(j, "lon")};
  p.phase = require_phase(j);
  p.image_width = require_int(j, "width");
  p.image_height = require_int(j, "height");
  if (const auto it = j.find("captured_at"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw std::invalid_argument("captured_at must be a string");
    p.captured_at = it->get<std::string>();
  }
  const Json& dets = require(j, "detections");
  if (!dets.is_array()) throw std::invalid_argument("detections must be an array");
  for (const auto& dj : dets) {
    if (!dj.is_object()) throw std::invalid_argument("detection must be an object");
    Detection d;
    const std::string cls = require_string(dj, "class");
    const auto parsed = parse_object_class(cls);
    if (!parsed) throw std::invalid_argument("unknown class '" + cls + "'");
    d.cls = *parsed;
    d.confidence = dj.contains("confidence") ? require_number(dj, "confidence") : 1.0;
    d.bbox = bbox_from_json(require(dj, "bbox"));
    p.detections.push_back(d);
  }
  if (const std::string err = validate(p); !err.empty()) throw std::invalid_argument(err);
  return p;
}

/// Reads photo JSONL. Blank lines are skipped. Every failure is a
/// ParseError carrying the 1-based line number.
inline std::vector<PhotoRecord> read_photos(std::istream& in, const std::string& source = "<input>") {
  std::vector<PhotoRecord> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    PhotoRecord p;
    try {
      p = photo_from_json(Json::parse(line));
    } catch (const Json::exception& e) {
      throw ParseError(source, lineno, std::string("malformed JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, lineno, e.what());
    }
    if (!seen.insert(p.photo_id).second) {
      throw ParseError(source, lineno, "duplicate photo_id '" + p.photo_id + "'");
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<PhotoRecord> load_photos(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_photos(in, path);
}

inline std::string format_photos(std::span<const PhotoRecord> photos) {
  std::string out;
  for (const auto& p : photos) {
    out += photo_to_json(p).dump();
    out += '\n';
  }
  return out;
}

inline void save_photos(const std::string& path, std::span<const PhotoRecord> photos) {
  write_file(path, format_photos(photos));
}

// ---------------------------------------------------------------------------
// Darknet annotations

inline constexpr int kDarknetStopSign = 0;
inline constexpr int kDarknetPole = 1;

/// Normalized center format to pixel corners. Boxes are clipped to the
/// image, as the training tooling does.
inline std::vector<LabeledBox> read_darknet(std::istream& in, int image_w, int image_h,
                                            const std::string& source = "<input>") {
  if (image_w <= 0 || image_h <= 0) throw InvalidArgument("darknet: image size must be positive");
  std::vector<LabeledBox> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    int cls_id = -1;
    double v[4];
    if (!(fields >> cls_id >> v[0] >> v[1] >> v[2] >> v[3])) {
      throw ParseError(source, lineno, "expected 'class_id cx cy w h'");
    }
    std::string rest;
    if (fields >> rest) throw ParseError(source, lineno, "trailing fields");
    if (cls_id != kDarknetStopSign && cls_id != kDarknetPole) {
      throw ParseError(source, lineno, "unknown class id " + std::to_string(cls_id));
    }
    for (double x : v) {
      if (!(x >= 0.0 && x <= 1.0)) throw ParseError(source, lineno, "value outside [0,1]");
    }
    const ObjectClass cls = cls_id == kDarknetStopSign ? ObjectClass::kStopSign : ObjectClass::kPole;
    BBox b{(v[0] - 0.5 * v[2]) * image_w, (v[1] - 0.5 * v[3]) * image_h,
           (v[0] + 0.5 * v[2]) * image_w, (v[1] + 0.5 * v[3]) * image_h};
    b = clip(b, 0.0, 0.0, image_w, image_h);
    if (!b.is_valid(cls == ObjectClass::kPole)) {
      throw ParseError(source, lineno, "degenerate box " + to_string(b));
    }
    out.push_back(LabeledBox{cls, b});
  }
  return out;
}

inline std::vector<LabeledBox> load_darknet_annotations(const std::string& path, int image_w,
                                                        int image_h) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_darknet(in, image_w, image_h, path);
}

inline std::string format_darknet(std::span<const LabeledBox> boxes, int image_w, int image_h) {
  std::string out;
  for (const auto& b : boxes) {
    const double w = static_cast<double>(image_w);
    const double h = static_cast<double>(image_h);
    out += std::to_string(b.cls == ObjectClass::kStopSign ? kDarknetStopSign : kDarknetPole);
    out += ' ' + format_double(b.bbox.x_center() / w);
    out += ' ' + format_double(b.bbox.y_center() / h);
    out += ' ' + format_double(b.bbox.width() / w);
    out += ' ' + format_double(b.bbox.height() / h);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// GeoJSON

inline constexpr double kInchesPerFoot = 12.0;
inline constexpr double kMetersPerInch = 0.0254;

/// RFC 7946 FeatureCollection. Coordinates carry 6 decimals, lengths 3.
/// Features are sorted by id so the bytes depend only on the content.
inline std::string to_geojson(const FloodMap& map) {
  std::vector<const MapFeature*> sorted;
  for (const auto& f : map.features) sorted.push_back(&f);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MapFeature* a, const MapFeature* b) { return a->id() < b->id(); });

  std::string out = R"({"type":"FeatureCollection","features":[)";
  bool first = true;
  for (const MapFeature* f : sorted) {
    const DepthEstimate& e = f->estimate;
    if (!first) out += ',';
    first = false;
    out += R"({"type":"Feature","geometry":{"type":"Point","coordinates":[)";
    out += format_fixed(e.location.lon, 6) + ',' + format_fixed(e.location.lat, 6);
    out += R"(]},"properties":{"id":)" + Json(f->id()).dump();
    out += ",\"depth_in\":" + format_fixed(e.depth_in, 3);
    out += ",\"depth_raw_in\":" + format_fixed(e.depth_raw_in, 3);
    out += ",\"depth_ft\":" + format_fixed(e.depth_in / kInchesPerFoot, 3);
    out += ",\"depth_m\":" + format_fixed(e.depth_in * kMetersPerInch, 3);
    out += ",\"pre_photo_id\":" + Json(e.pre_photo_id).dump();
    out += ",\"post_photo_id\":" + Json(e.post_photo_id).dump();
    out += ",\"flags\":" + Json(e.flags.names()).dump();
    out += ",\"pairing_distance_m\":" + format_fixed(f->pairing_distance_m, 3);
    out += std::string(",\"pairing_ambiguous\":") + (f->pairing_ambiguous ? "true" : "false");
    out += "}}";
  }
  out += "]}";
  return out;
}

inline void emit_geojson(const FloodMap& map, const std::string& path) {
  write_file(path, to_geojson(map));
}

// ---------------------------------------------------------------------------
// Estimation run (full precision; input to the `map` command)

inline Json observation_to_json(const SignObservation& o) {
  Json j;
  j["photo_id"] = o.photo_id;
  j["sign_bbox"] = bbox_to_json(o.sign_bbox);
  j["pole_bbox"] = bbox_to_json(o.pole_bbox);
  j["ppi"] = o.ppi;
  j["pole_length_in"] = o.pole_length_in;
  j["sign_confidence"] = o.sign_confidence;
  j["pole_confidence"] = o.pole_confidence;
  j["multi_sign_scene"] = o.multi_sign_scene;
  return j;
}

inline SignObservation observation_from_json(const Json& j) {
  using namespace detail;
  SignObservation o;
  o.photo_id = require_string(j, "photo_id");
  o.sign_bbox = bbox_from_json(require(j, "sign_bbox"));
  o.pole_bbox = bbox_from_json(require(j, "pole_bbox"));
  o.ppi = require_number(j, "ppi");
  o.pole_length_in = require_number(j, "pole_length_in");
  o.sign_confidence = require_number(j, "sign_confidence");
  o.pole_confidence = require_number(j, "pole_confidence");
  o.multi_sign_scene = require(j, "multi_sign_scene").get<bool>();
  return o;
}

inline Json failures_to_json(const std::vector<PhotoFailure>& failures) {
  Json arr = Json::array();
  for (const auto& f : failures) arr.push_back(Json{{"photo_id", f.photo_id}, {"reason", f.reason}});
  return arr;
}

inline std::vector<PhotoFailure> failures_from_json(const Json& arr) {
  std::vector<PhotoFailure> out;
  for (const auto& f : arr) {
    out.push_back(PhotoFailure{detail::require_string(f, "photo_id"),
                               detail::require_string(f, "reason")});
  }
  return out;
}

inline Json estimate_run_to_json(const EstimateRun& run) {
  Json features = Json::array();
  for (const auto& f : run.map.features) {
    const DepthEstimate& e = f.estimate;
    Json j;
    j["id"] = f.id();
    j["lat"] = e.location.lat;
    j["lon"] = e.location.lon;
    j["pre_photo_id"] = e.pre_photo_id;
    j["post_photo_id"] = e.post_photo_id;
    j["pre_pole_in"] = e.pre_pole_in;
    j["post_pole_in"] = e.post_pole_in;
    j["depth_raw_in"] = e.depth_raw_in;
    j["depth_in"] = e.depth_in;
    j["flags"] = e.flags.names();
    j["pairing_distance_m"] = f.pairing_distance_m;
    j["pairing_ambiguous"] = f.pairing_ambiguous;
    features.push_back(std::move(j));
  }
  Json out;
  out["features"] = std::move(features);
  out["unmapped"] = failures_to_json(run.unmapped);
  out["baseline_failures"] = failures_to_json(run.baseline_failures);
  out["warnings"] = run.warnings;
  return out;
}

inline EstimateRun estimate_run_from_json(const Json& j) {
  using namespace detail;
  EstimateRun run;
  for (const auto& fj : require(j, "features")) {
    MapFeature f;
    DepthEstimate& e = f.estimate;
    e.location = LatLon{require_number(fj, "lat"), require_number(fj, "lon")};
    check_coordinates(e.location);
    e.pre_photo_id = require_string(fj, "pre_photo_id");
    e.post_photo_id = require_string(fj, "post_photo_id");
    e.pre_pole_in = require_number(fj, "pre_pole_in");
    e.post_pole_in = require_number(fj, "post_pole_in");
    e.depth_raw_in = require_number(fj, "depth_raw_in");
    e.depth_in = require_number(fj, "depth_in");
    for (const auto& name : require(fj, "flags")) {
      if (!e.flags.set_by_name(name.get<std::string>())) {
        throw std::invalid_argument("unknown flag " + name.dump());
      }
    }
    f.pairing_distance_m = require_number(fj, "pairing_distance_m");
    f.pairing_ambiguous = require(fj, "pairing_ambiguous").get<bool>();
    run.map.features.push_back(std::move(f));
  }
  if (j.contains("unmapped")) run.unmapped = failures_from_json(j["unmapped"]);
  if (j.contains("baseline_failures")) run.baseline_failures = failures_from_json(j["baseline_failures"]);
  if (j.contains("warnings")) run.warnings = j["warnings"].get<std::vector<std::string>>();
  return run;
}

inline EstimateRun load_estimate_run(const std::string& path) {
  try {
    return estimate_run_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw ParseError(path, 0, e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, 0, e.what());
  }
}

// ---------------------------------------------------------------------------
// Registry

inline Json registry_to_json(const Registry& reg) {
  Json entries = Json::array();
  for (const auto& e : reg.entries()) {
    Json j;
    j["source_photo_id"] = e.source_photo_id;
    j["lat"] = e.location.lat;
    j["lon"] = e.location.lon;
    j["observation"] = observation_to_json(e.observation);
    entries.push_back(std::move(j));
  }
  Json out;
  out["pairing_radius_m"] = reg.pairing_radius_m();
  out["entries"] = std::move(entries);
  return out;
}

inline Registry registry_from_json(const Json& j) {
  using namespace detail;
  Registry reg(require_number(j, "pairing_radius_m"));
  for (const auto& ej : require(j, "entries")) {
    reg.add(BaselineEntry{LatLon{require_number(ej, "lat"), require_number(ej, "lon")},
                          observation_from_json(require(ej, "observation")),
                          require_string(ej, "source_photo_id")});
  }
  return reg;
}

inline void save_registry(const Registry& reg, const std::string& path) {
  write_file(path, registry_to_json(reg).dump(2) + "\n");
}

inline Registry load_registry(const std::string& path) {
  try {
    return registry_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw ParseError(path, 0, e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, 0, e.what());
  }
}

// ---------------------------------------------------------------------------
// Measurements (depth and pole-length records, validation curves)

struct Measurements {
  std::vector<DepthRecord> depth_records;
  std::vector<PoleLengthRecord> pole_records;
  std::vector<MapCurve> map_curves;
};

inline Measurements measurements_from_json(const Json& j) {
  using namespace detail;
  Measurements m;
  if (const auto it = j.find("depth_records"); it != j.end()) {
    for (const auto& r : *it) {
      DepthRecord d;
      d.id = require_string(r, "id");
      d.location = r.contains("location") ? require_string(r, "location") : std::string{};
      d.detected_depth_in = require_number(r, "detected_depth_in");
      d.ground_truth_depth_in = require_number(r, "ground_truth_depth_in");
      if (!(d.ground_truth_depth_in >= 0.0)) {
        throw std::invalid_argument("depth record " + d.id + ": negative ground truth");
      }
      m.depth_records.push_back(std::move(d));
    }
  }
  if (const auto it = j.find("pole_records"); it != j.end()) {
    for (const auto& r : *it) {
      PoleLengthRecord p;
      p.photo_id = require_string(r, "photo_id");
      p.sign_id = r.contains("sign_id") ? require_string(r, "sign_id") : p.photo_id;
      p.phase = require_phase(r);
      p.detected_in = require_number(r, "detected_in");
      p.truth_in = require_number(r, "truth_in");
      if (!(p.detected_in >= 0.0) || !(p.truth_in >= 0.0)) {
        throw std::invalid_argument("pole record " + p.photo_id + ": negative length");
      }
      m.pole_records.push_back(std::move(p));
    }
  }
  if (const auto it = j.find("map_curves"); it != j.end()) {
    for (const auto& curve : *it) {
      MapCurve c;
      for (const auto& point : curve) {
        if (!point.is_array() || point.size() != 2) {
          throw std::invalid_argument("map curve points must be [iteration, mAP]");
        }
        c.emplace_back(point[0].get<std::int64_t>(), point[1].get<double>());
      }
      m.map_curves.push_back(std::move(c));
    }
  }
  return m;
}

inline Measurements load_measurements(const std::string& path) {
  try {
    return measurements_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    throw ParseError(path, 0, e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, 0, e.what());
  }
}

// ---------------------------------------------------------------------------
// Evaluation report

inline Json eval_report_to_json(const EvalReport& r) {
  Json j;
  auto put = [&](const char* key, const auto& opt) {
    if (opt) {
      j[key] = *opt;
    } else {
      j[key] = nullptr;
    }
  };
  Json ap = Json::object();
  for (const auto& [cls, v] : r.ap) ap[cls] = v;
  j["ap"] = std::move(ap);
  put("map", r.mean_ap);
  put("mean_matched_iou", r.mean_matched_iou);
  put("mae_pole_pre", r.mae_pole_pre);
  put("mae_pole_post", r.mae_pole_post);
  put("mae_pole_all", r.mae_pole_all);
  put("mae_depth_table", r.mae_depth_table);
  put("mae_depth_polesum", r.mae_depth_polesum);
  put("optimal_iteration", r.optimal_iteration);
  Json rows = Json::array();
  for (const auto& row : r.depth_rows) {
    rows.push_back(Json{{"id", row.id},
                        {"location", row.location},
                        {"detected_in", row.detected_in},
                        {"truth_in", row.truth_in},
                        {"delta_in", row.delta_in}});
  }
  j["depth_rows"] = std::move(rows);
  j["warnings"] = r.warnings;
  return j;
}

// ---------------------------------------------------------------------------
// Synthetic truth sidecar

inline Json scene_pairs_truth_to_json(std::span<const synth::ScenePair> pairs) {
  Json arr = Json::array();
  for (const auto& p : pairs) {
    Json j;
    j["pre_photo_id"] = p.pre.photo.photo_id;
    j["post_photo_id"] = p.post.photo.photo_id;
    j["lat"] = p.pre.photo.location.lat;
    j["lon"] = p.pre.photo.location.lon;
    j["true_depth_in"] = p.true_depth_in;
    j["pre_visible_pole_in"] = p.pre.truth.visible_pole_in;
    j["post_visible_pole_in"] = p.post.truth.visible_pole_in;
    j["pre_sign_bbox"] = bbox_to_json(p.pre.truth.sign_bbox);
    j["pre_pole_bbox"] = bbox_to_json(p.pre.truth.pole_bbox);
    j["post_sign_bbox"] = bbox_to_json(p.post.truth.sign_bbox);
    j["post_pole_bbox"] = bbox_to_json(p.post.truth.pole_bbox);
    arr.push_back(std::move(j));
  }
  return Json{{"pairs", std::move(arr)}};
}

}  // namespace flooddepth::io
