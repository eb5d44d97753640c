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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "flooddepth/config.hpp"
#include "flooddepth/error.hpp"
#include "flooddepth/geometry.hpp"
#include "flooddepth/metrics.hpp"
#include "flooddepth/pairing_registry.hpp"
#include "flooddepth/records.hpp"
#include "flooddepth/report.hpp"
#include "flooddepth/scene_selection.hpp"

namespace flooddepth {

namespace detail {

inline std::vector<const PhotoRecord*> sorted_by_id(std::span<const PhotoRecord> photos) {
  std::vector<const PhotoRecord*> out;
  out.reserve(photos.size());
  for (const auto& p : photos) out.push_back(&p);
  std::stable_sort(out.begin(), out.end(), [](const PhotoRecord* a, const PhotoRecord* b) {
    return a->photo_id < b->photo_id;
  });
  return out;
}

}  // namespace detail

/// Builds the baseline registry from the pre-flood photos (and freezes it).
/// Photos that cannot serve as baselines are appended to `failures`.
inline Registry build_registry(std::span<const PhotoRecord> pre_photos, const PipelineConfig& config,
                               std::vector<PhotoFailure>& failures,
                               std::vector<std::string>& warnings) {
  Registry registry(config.pairing_radius_m);
  for (const PhotoRecord* photo : detail::sorted_by_id(pre_photos)) {
    try {
      auto sel = build_observation(*photo, config.sign_spec(), config.min_confidence);
      warnings.insert(warnings.end(), sel.warnings.begin(), sel.warnings.end());
      registry.register_baseline(*photo, sel.observation);
    } catch (const Error& e) {
      failures.push_back(PhotoFailure{photo->photo_id, e.what()});
    }
  }
  registry.freeze();
  return registry;
}

/// Baselines from pre photos, observations from post photos, pairing,
/// depth. Per-photo failures are reported, never fatal. A feature sits at
/// its baseline's location; features are sorted by post photo id.
inline EstimateRun run_estimate(std::span<const PhotoRecord> pre_photos,
                                std::span<const PhotoRecord> post_photos,
                                const PipelineConfig& config) {
  validate(config);
  EstimateRun run;
  const Registry registry = build_registry(pre_photos, config, run.baseline_failures, run.warnings);

  for (const PhotoRecord* photo : detail::sorted_by_id(post_photos)) {
    try {
      auto sel = build_observation(*photo, config.sign_spec(), config.min_confidence);
      const PairResult paired = registry.pair(*photo);
      run.warnings.insert(run.warnings.end(), sel.warnings.begin(), sel.warnings.end());
      MapFeature feature;
      feature.estimate = estimate_depth(paired.entry.observation, sel.observation,
                                        paired.entry.location, config.low_confidence);
      feature.pairing_distance_m = paired.distance_m;
      feature.pairing_ambiguous = paired.ambiguous;
      if (paired.ambiguous) {
        run.warnings.push_back("photo " + photo->photo_id +
                               ": second-nearest baseline within twice the pairing distance");
      }
      run.map.features.push_back(std::move(feature));
    } catch (const Error& e) {
      run.unmapped.push_back(PhotoFailure{photo->photo_id, e.what()});
    }
  }
  return run;
}

/// Per-class AP, mAP, mean matched IoU, pole-length MAE per phase, both
/// depth MAE variants and the cross-validated optimal iteration. Any metric
/// whose input is absent is left unset with a warning.
inline EvalReport run_evaluate(std::span<const PhotoRecord> detections,
                               std::span<const PhotoRecord> truths,
                               std::span<const DepthRecord> depth_records,
                               std::span<const PoleLengthRecord> pole_records,
                               std::span<const MapCurve> map_curves, const PipelineConfig& config) {
  validate(config);
  EvalReport report;

  if (detections.empty() || truths.empty()) {
    report.warnings.emplace_back("no detections or ground truth; AP, mAP and IoU omitted");
  } else {
    std::vector<double> matched;
    for (ObjectClass cls : {ObjectClass::kStopSign, ObjectClass::kPole}) {
      std::vector<ScoredDetection> dets;
      std::vector<GroundTruthBox> gts;
      for (const auto& p : detections) {
        for (const auto& d : p.detections) {
          if (d.cls == cls) dets.push_back(ScoredDetection{p.photo_id, d});
        }
      }
      for (const auto& p : truths) {
        for (const auto& d : p.detections) {
          if (d.cls == cls) gts.push_back(GroundTruthBox{p.photo_id, cls, d.bbox});
        }
      }
      const std::string name(to_string(cls));
      if (dets.empty() && gts.empty()) {
        report.warnings.push_back("class " + name + " absent from detections and ground truth");
        continue;
      }
      const ClassEvaluation ev = evaluate_class(dets, gts, config.iou_threshold);
      for (const auto& w : ev.warnings) report.warnings.push_back("class " + name + ": " + w);
      report.ap[name] = ev.ap;
      matched.insert(matched.end(), ev.matched_ious.begin(), ev.matched_ious.end());
    }
    if (!report.ap.empty()) report.mean_ap = mean_ap(report.ap);
    if (matched.empty()) {
      report.warnings.emplace_back("no matched detections; mean IoU omitted");
    } else {
      double sum = 0.0;
      for (double v : matched) sum += v;
      report.mean_matched_iou = sum / static_cast<double>(matched.size());
    }
  }

  if (pole_records.empty()) {
    report.warnings.emplace_back("no pole-length records; MAE_P and pole-sum MAE_D omitted");
  } else {
    report.mae_pole_pre = mae_pole(pole_records, Phase::kPreFlood);
    report.mae_pole_post = mae_pole(pole_records, Phase::kPostFlood);
    report.mae_pole_all = mae_pole(pole_records);
    const auto pairs = pair_pole_records(pole_records);
    if (pairs.empty()) {
      report.warnings.emplace_back("no pre/post pole pairs; pole-sum MAE_D omitted");
    } else {
      report.mae_depth_polesum = mae_depth_polesum(pairs);
    }
  }

  if (depth_records.empty()) {
    report.warnings.emplace_back("no depth records; table MAE_D omitted");
  } else {
    report.mae_depth_table = mae_depth_table(depth_records);
    for (const auto& r : depth_records) {
      report.depth_rows.push_back(
          DepthRow{r.id, r.location, r.detected_depth_in, r.ground_truth_depth_in, r.delta()});
    }
  }

  if (!map_curves.empty()) report.optimal_iteration = aggregate_optimal_iteration(map_curves);
  return report;
}

}  // namespace flooddepth
