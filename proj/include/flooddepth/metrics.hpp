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

// Detection and measurement metrics: IoU, per-class AP, mAP, pole-length and
// flood-depth MAE, k-fold bookkeeping.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "flooddepth/bbox.hpp"
#include "flooddepth/error.hpp"
#include "flooddepth/records.hpp"
#include "flooddepth/rng.hpp"

namespace flooddepth {

inline constexpr double kDefaultIouThreshold = 0.5;
inline constexpr int kDefaultFolds = 5;

/// Intersection over union; 0 for disjoint boxes.
inline double iou(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Average precision

struct ScoredDetection {
  std::string photo_id;
  Detection detection;
};

struct GroundTruthBox {
  std::string photo_id;
  ObjectClass cls = ObjectClass::kStopSign;
  BBox bbox;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct ClassEvaluation {
  double ap = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t num_truths = 0;
  /// IoU of every true-positive match, in ranking order.
  std::vector<double> matched_ious;
  /// One point per distinct confidence level, in descending confidence.
  std::vector<PrPoint> curve;
  std::vector<std::string> warnings;
};

namespace detail {

inline bool rank_before(const ScoredDetection& a, const ScoredDetection& b) {
  if (a.detection.confidence != b.detection.confidence) {
    return a.detection.confidence > b.detection.confidence;
  }
  if (a.photo_id != b.photo_id) return a.photo_id < b.photo_id;
  return lex_less(a.detection.bbox, b.detection.bbox);
}

inline void check_single_class(std::span<const ScoredDetection> dets,
                               std::span<const GroundTruthBox> truths) {
  std::optional<ObjectClass> cls;
  auto check = [&](ObjectClass c) {
    if (cls && *cls != c) throw InvalidArgument("average_precision: mixed classes in input");
    cls = c;
  };
  for (const auto& d : dets) check(d.detection.cls);
  for (const auto& t : truths) check(t.cls);
}

}  // namespace detail

/// Ranks detections by descending confidence and greedily matches each to
/// the highest-IoU still-unmatched truth in the same photo; the match is a
/// true positive iff IoU >= iou_threshold. AP is the area under the
/// monotonized (all-point interpolated) precision-recall curve.
///
/// Detections with equal confidence enter the curve together, so AP depends
/// only on the confidence ordering and not on input order.
inline ClassEvaluation evaluate_class(std::span<const ScoredDetection> dets,
                                      std::span<const GroundTruthBox> truths,
                                      double iou_threshold = kDefaultIouThreshold) {
  detail::check_single_class(dets, truths);
  ClassEvaluation out;
  out.num_truths = truths.size();
  if (dets.empty()) return out;
  if (truths.empty()) {
    out.false_positives = dets.size();
    out.warnings.emplace_back("no ground-truth boxes; AP is 0");
    return out;
  }

  std::map<std::string, std::vector<std::size_t>> truths_by_photo;
  for (std::size_t i = 0; i < truths.size(); ++i) truths_by_photo[truths[i].photo_id].push_back(i);
  for (auto& [photo, idx] : truths_by_photo) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return lex_less(truths[a].bbox, truths[b].bbox);
    });
  }

  std::vector<ScoredDetection> ranked(dets.begin(), dets.end());
  std::sort(ranked.begin(), ranked.end(), detail::rank_before);

  std::vector<bool> matched(truths.size(), false);
  const double n_truth = static_cast<double>(truths.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const ScoredDetection& d = ranked[i];
    double best_iou = -1.0;
    std::size_t best = 0;
    if (auto it = truths_by_photo.find(d.photo_id); it != truths_by_photo.end()) {
      for (std::size_t t : it->second) {
        if (matched[t]) continue;
        const double v = iou(d.detection.bbox, truths[t].bbox);
        if (v > best_iou) {
          best_iou = v;
          best = t;
        }
      }
    }
    if (best_iou >= iou_threshold) {
      matched[best] = true;
      ++out.true_positives;
      out.matched_ious.push_back(best_iou);
    } else {
      ++out.false_positives;
    }
    const bool group_end = i + 1 == ranked.size() ||
                           ranked[i + 1].detection.confidence != d.detection.confidence;
    if (group_end) {
      const double tp = static_cast<double>(out.true_positives);
      out.curve.push_back(PrPoint{tp / n_truth, tp / static_cast<double>(i + 1)});
    }
  }

  // Monotonize precision from the right, then integrate over recall steps.
  double running = 0.0;
  std::vector<double> envelope(out.curve.size());
  for (std::size_t i = out.curve.size(); i-- > 0;) {
    running = std::max(running, out.curve[i].precision);
    envelope[i] = running;
  }
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < out.curve.size(); ++i) {
    out.ap += (out.curve[i].recall - prev_recall) * envelope[i];
    prev_recall = out.curve[i].recall;
  }
  return out;
}

inline double average_precision(std::span<const ScoredDetection> dets,
                                std::span<const GroundTruthBox> truths,
                                double iou_threshold = kDefaultIouThreshold) {
  return evaluate_class(dets, truths, iou_threshold).ap;
}

/// Arithmetic mean of the per-class APs.
template <typename Key>
double mean_ap(const std::map<Key, double>& per_class_aps) {
  if (per_class_aps.empty()) throw InvalidArgument("mean_ap: no classes");
  double sum = 0.0;
  for (const auto& [cls, ap] : per_class_aps) sum += ap;
  return sum / static_cast<double>(per_class_aps.size());
}

// ---------------------------------------------------------------------------
// Pole-length and depth errors

struct PoleLengthRecord {
  std::string photo_id;
  /// Identifies the physical sign; pairs a pre and a post record.
  std::string sign_id;
  double detected_in = 0.0;
  double truth_in = 0.0;
  Phase phase = Phase::kPreFlood;

  friend bool operator==(const PoleLengthRecord&, const PoleLengthRecord&) = default;
};

struct DepthRecord {
  std::string id;
  std::string location;
  double detected_depth_in = 0.0;
  double ground_truth_depth_in = 0.0;

  double delta() const { return detected_depth_in - ground_truth_depth_in; }

  friend bool operator==(const DepthRecord&, const DepthRecord&) = default;
};

struct PolePair {
  PoleLengthRecord pre;
  PoleLengthRecord post;
};

/// Mean of |detected - truth| pole length over all records.
inline double mae_pole(std::span<const PoleLengthRecord> records) {
  if (records.empty()) throw InvalidArgument("mae_pole: no records");
  double sum = 0.0;
  for (const auto& r : records) sum += std::abs(r.detected_in - r.truth_in);
  return sum / static_cast<double>(records.size());
}

/// mae_pole restricted to one phase; nullopt when that phase has no records.
inline std::optional<double> mae_pole(std::span<const PoleLengthRecord> records, Phase phase) {
  std::vector<PoleLengthRecord> subset;
  for (const auto& r : records) {
    if (r.phase == phase) subset.push_back(r);
  }
  if (subset.empty()) return std::nullopt;
  return mae_pole(subset);
}

/// Mean |detected depth - ground-truth depth| (the per-row table variant).
inline double mae_depth_table(std::span<const DepthRecord> records) {
  if (records.empty()) throw InvalidArgument("mae_depth_table: no records");
  double sum = 0.0;
  for (const auto& r : records) sum += std::abs(r.delta());
  return sum / static_cast<double>(records.size());
}

/// Mean over sign pairs of the summed pre and post pole-length errors.
inline double mae_depth_polesum(std::span<const PolePair> pairs) {
  if (pairs.empty()) throw InvalidArgument("mae_depth_polesum: no pairs");
  double sum = 0.0;
  for (const auto& p : pairs) {
    if (p.pre.sign_id != p.post.sign_id) {
      throw InvalidArgument("mae_depth_polesum: pair mixes signs " + p.pre.sign_id + " and " +
                            p.post.sign_id);
    }
    sum += std::abs(p.pre.detected_in - p.pre.truth_in) +
           std::abs(p.post.detected_in - p.post.truth_in);
  }
  return sum / static_cast<double>(pairs.size());
}

/// Groups records by sign_id into (pre, post) pairs, ordered by sign_id.
/// Signs lacking either phase are skipped; a sign with two records of the
/// same phase is an error.
inline std::vector<PolePair> pair_pole_records(std::span<const PoleLengthRecord> records) {
  std::map<std::string, std::pair<std::optional<PoleLengthRecord>, std::optional<PoleLengthRecord>>>
      by_sign;
  for (const auto& r : records) {
    auto& slot = r.phase == Phase::kPreFlood ? by_sign[r.sign_id].first : by_sign[r.sign_id].second;
    if (slot) {
      throw InvalidArgument("sign " + r.sign_id + " has more than one " +
                            std::string(to_string(r.phase)) + " record");
    }
    slot = r;
  }
  std::vector<PolePair> out;
  for (auto& [id, slots] : by_sign) {
    if (slots.first && slots.second) out.push_back(PolePair{*slots.first, *slots.second});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cross-validation

struct FoldSplit {
  int fold_index = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
};

/// Shuffles `ids` with `seed` and cuts the shuffled order into k contiguous
/// validation blocks; the first |ids| mod k blocks get one extra item.
inline std::vector<FoldSplit> kfold_split(std::span<const std::string> ids, int k = kDefaultFolds,
                                          std::uint64_t seed = 0) {
  if (k < 2) throw InvalidArgument("kfold_split: k must be at least 2");
  if (ids.size() < static_cast<std::size_t>(k)) {
    throw InvalidArgument("kfold_split: " + std::to_string(ids.size()) + " ids for " +
                          std::to_string(k) + " folds");
  }
  std::vector<std::string> order(ids.begin(), ids.end());
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(order));

  const std::size_t n = order.size();
  const std::size_t base = n / static_cast<std::size_t>(k);
  const std::size_t extra = n % static_cast<std::size_t>(k);
  std::vector<FoldSplit> folds;
  std::size_t begin = 0;
  for (int f = 0; f < k; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    FoldSplit fold;
    fold.fold_index = f;
    for (std::size_t i = 0; i < n; ++i) {
      (i >= begin && i < begin + size ? fold.val_ids : fold.train_ids).push_back(order[i]);
    }
    begin += size;
    folds.push_back(std::move(fold));
  }
  return folds;
}

/// One validation curve: (iteration, mAP) samples.
using MapCurve = std::vector<std::pair<std::int64_t, double>>;

/// Iteration with the highest mAP on one curve; ties go to the earliest.
inline std::int64_t optimal_iteration(const MapCurve& curve) {
  if (curve.empty()) throw InvalidArgument("optimal_iteration: empty curve");
  auto best = curve.front();
  for (const auto& point : curve) {
    if (point.second > best.second || (point.second == best.second && point.first < best.first)) {
      best = point;
    }
  }
  return best.first;
}

/// Mean of the per-fold optimal iterations, rounded to nearest.
inline std::int64_t aggregate_optimal_iteration(std::span<const MapCurve> per_fold) {
  if (per_fold.empty()) throw InvalidArgument("aggregate_optimal_iteration: no folds");
  double sum = 0.0;
  for (const auto& curve : per_fold) sum += static_cast<double>(optimal_iteration(curve));
  return std::llround(sum / static_cast<double>(per_fold.size()));
}

}  // namespace flooddepth
