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

// Acceptance suite: one [PASS]/[FAIL] line per criterion; exit status is
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "flooddepth/flooddepth.hpp"
#include "oracles/ap_bruteforce.hpp"
#include "oracles/pinhole.hpp"

namespace {

using namespace flooddepth;
namespace fs = std::filesystem;

const std::string kFixtures = FLOODDEPTH_FIXTURE_DIR;
const std::string kCli = FLOODDEPTH_CLI_PATH;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double recovered_depth(const synth::ScenePair& pair) {
  const auto pre = build_observation(pair.pre.photo).observation;
  const auto post = build_observation(pair.post.photo).observation;
  return estimate_depth(pre, post, pair.pre.photo.location).depth_in;
}

// ---------------------------------------------------------------------------

Outcome ac1_table_reproduction() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto j = io::Json::parse(io::read_file(kFixtures + "/depth_table.json"));
  const auto m = io::measurements_from_json(j);
  o.require(m.depth_records.size() == 11, "expected 11 rows");
  double worst = 0.0;
  for (std::size_t i = 0; i < m.depth_records.size(); ++i) {
    const double reported = j["depth_records"][i]["reported_delta_in"].get<double>();
    const double diff = std::abs(m.depth_records[i].delta() - reported);
    worst = std::max(worst, diff);
    // Inclusive: the table's rounded entries sit exactly on the 0.001 edge.
    o.require(diff <= 0.001 + 1e-9, "row " + m.depth_records[i].id + " delta off by " + fmt("%.6f", diff));
  }
  const double mae = mae_depth_table(m.depth_records);
  o.require(std::abs(mae - 6.978) <= 0.001, "MAE " + fmt("%.6f", mae));
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 1.0, "runtime " + fmt("%.3f s", elapsed));
  if (o.pass) {
    o.detail = "MAE_D " + fmt("%.5f", mae) + " in, worst row deviation " + fmt("%.6f", worst) + ", " +
               fmt("%.4f s", elapsed);
  }
  return o;
}

Outcome ac2_map_aggregation() {
  Outcome o;
  const double v = mean_ap(std::map<std::string, double>{{"stop_sign", 0.9737}, {"pole", 0.9670}});
  o.require(std::abs(v - 0.9704) <= 0.0001, "mAP " + fmt("%.6f", v));
  if (o.pass) o.detail = "mean(0.9737, 0.9670) = " + fmt("%.5f", v);
  return o;
}

Outcome ac3_oracle_round_trip() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(3003);
  auto random_pair = [&](bool quantize) {
    synth::SceneSpec pre;
    pre.photo_id = "pre";
    pre.sign_bottom_height_in = rng.uniform(48, 96);
    pre.pole_total_in = pre.sign_bottom_height_in + 30.0;
    pre.camera.focal_px = rng.uniform(400, 1500);
    pre.camera.distance_in = rng.uniform(150, 900);
    pre.camera.lateral_offset_in = rng.uniform(-50, 50);
    pre.camera.image_width = 4000;
    pre.camera.image_height = 4000;
    pre.quantize = quantize;
    synth::SceneSpec post = pre;
    post.photo_id = "post";
    post.water_level_in = rng.uniform(0, pre.sign_bottom_height_in);
    post.camera.distance_in = rng.uniform(150, 900);
    return synth::generate_pair(pre, post);
  };

  double worst_rel = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto pair = random_pair(false);
    const double err = std::abs(recovered_depth(pair) - pair.true_depth_in);
    const double rel = err / std::max(1.0, pair.true_depth_in);
    worst_rel = std::max(worst_rel, rel);
    o.require(rel <= 1e-9, "continuous scene " + std::to_string(i) + " relative error " + fmt("%.3g", rel));
  }

  const double H = 30.0;
  double worst_ratio = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto pair = random_pair(true);
    auto bound = [&](const synth::SceneTruth& t) {
      const double S = t.sign_bbox.height();
      const double P = t.pole_bbox.height();
      return 2.0 * H / S + 2.0 * (P / S) * (H / S);
    };
    const double limit = bound(pair.pre.truth) + bound(pair.post.truth);
    const double err = std::abs(recovered_depth(pair) - pair.true_depth_in);
    worst_ratio = std::max(worst_ratio, err / limit);
    o.require(err <= limit + 1e-9, "quantized scene " + std::to_string(i) + " exceeds bound");
  }

  synth::SceneSpec s;
  s.camera.focal_px = 400;
  s.camera.image_width = 4000;
  s.camera.image_height = 4000;
  for (double d = 100; d <= 10000; d += 50) {
    s.camera.distance_in = d;
    const auto obs = build_observation(synth::render_scene(s).photo).observation;
    o.require(std::abs(obs.pole_length_in - 84.0) <= 1e-9 * 84.0, "distance " + fmt("%.0f", d));
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 10.0, "runtime " + fmt("%.3f s", elapsed));
  if (o.pass) {
    o.detail = "worst relative error " + fmt("%.2e", worst_rel) + ", worst quantized error/bound " +
               fmt("%.3f", worst_ratio) + ", " + fmt("%.3f s", elapsed);
  }
  return o;
}

Outcome ac4_ap_oracle() {
  Outcome o;
  Rng rng(4004);
  const char* photos[] = {"a", "b"};
  auto box = [&] {
    const double x = static_cast<double>(rng.below(6)) * 2, y = static_cast<double>(rng.below(6)) * 2;
    return BBox{x, y, x + 2.0 * static_cast<double>(1 + rng.below(4)), y + 2.0 * static_cast<double>(1 + rng.below(4))};
  };
  for (int i = 0; i < 500; ++i) {
    std::vector<ScoredDetection> dets;
    std::vector<GroundTruthBox> truths;
    const auto nt = rng.below(5), nd = rng.below(7);
    for (std::uint64_t t = 0; t < nt; ++t) truths.push_back(GroundTruthBox{photos[rng.below(2)], ObjectClass::kPole, box()});
    for (std::uint64_t d = 0; d < nd; ++d) {
      dets.push_back(ScoredDetection{photos[rng.below(2)],
                                     Detection{ObjectClass::kPole, box(), 0.1 * static_cast<double>(1 + rng.below(6))}});
    }
    const double fast = average_precision(dets, truths);
    const double slow = oracle::brute_force_ap(dets, truths);
    o.require(fast == slow, "instance " + std::to_string(i) + ": " + fmt("%.17g", fast) + " vs " + fmt("%.17g", slow));
  }
  if (o.pass) o.detail = "500/500 instances equal bit-for-bit";
  return o;
}

Outcome ac5_selection_permutations() {
  Outcome o;
  synth::SceneSpec spec;
  spec.camera.distance_in = 5.0 * 39.37;
  spec.camera.lateral_offset_in = -40;
  spec.extra_signs.push_back(synth::ExtraSign{20.0 * 39.37, 120});
  const auto scene = synth::render_scene(spec);
  const auto& dets = scene.photo.detections;
  o.require(dets.size() == 4, "expected 4 detections");
  std::array<int, 4> order{0, 1, 2, 3};
  int count = 0;
  do {
    PhotoRecord p = scene.photo;
    p.detections.clear();
    for (int k : order) p.detections.push_back(dets[static_cast<std::size_t>(k)]);
    const auto obs = build_observation(p).observation;
    o.require(obs.sign_bbox == scene.truth.sign_bbox, "permutation " + std::to_string(count) + " picked wrong sign");
    o.require(obs.pole_bbox == scene.truth.pole_bbox, "permutation " + std::to_string(count) + " picked wrong pole");
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  o.require(count == 24, "permutation count");
  if (o.pass) o.detail = "24/24 permutations select the near sign and its pole";
  return o;
}

Outcome ac6_kfold() {
  Outcome o;
  Rng rng(6006);
  int datasets = 0;
  for (int n = 10; n <= 200; n += 5) {
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("id" + std::to_string(rng.next_u64() % 1000000) + "_" + std::to_string(i));
    const std::uint64_t seed = rng.next_u64();
    const auto folds = kfold_split(ids, 5, seed);
    const auto again = kfold_split(ids, 5, seed);
    std::multiset<std::string> seen;
    std::size_t lo = SIZE_MAX, hi = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      seen.insert(folds[f].val_ids.begin(), folds[f].val_ids.end());
      lo = std::min(lo, folds[f].val_ids.size());
      hi = std::max(hi, folds[f].val_ids.size());
      o.require(folds[f].val_ids == again[f].val_ids && folds[f].train_ids == again[f].train_ids,
                "seed not reproducible at n=" + std::to_string(n));
    }
    o.require(folds.size() == 5, "fold count");
    o.require(seen == std::multiset<std::string>(ids.begin(), ids.end()), "not a partition at n=" + std::to_string(n));
    o.require(hi - lo <= 1, "fold sizes differ by more than 1 at n=" + std::to_string(n));
    ++datasets;
  }
  if (o.pass) o.detail = std::to_string(datasets) + " datasets of size 10..200";
  return o;
}

Outcome ac7_augmentation() {
  Outcome o;
  Rng rng(7007);
  auto noise = [&](int w, int h) {
    ImageBuffer img(w, h);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
    return img;
  };
  for (int i = 0; i < 100; ++i) {
    const int w = 16 + static_cast<int>(rng.below(200));
    AnnotatedSample s{noise(w, 40), {}};
    const double x0 = static_cast<double>(rng.below(static_cast<std::uint64_t>(w - 4) * 8)) / 8.0;
    s.boxes.push_back(LabeledBox{ObjectClass::kStopSign, BBox{x0, 2, x0 + 2.5, 30}});
    o.require(hflip(hflip(s)) == s, "hflip not an involution");
  }

  ImageBuffer red(4, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) red.at(x, y)[0] = 255;
  }
  const auto green = apply_hsv(red, HsvParams{120.0, 1.0, 1.0});
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      const auto* p = green.at(x, y);
      o.require(std::abs(p[0] - 0) <= 1 && std::abs(p[1] - 255) <= 1 && std::abs(p[2] - 0) <= 1,
                "red +120 deg is not green");
    }
  }

  const AnnotatedSample single{noise(320, 320), {{ObjectClass::kStopSign, BBox{64, 64, 128, 128}}}};
  const std::vector<AnnotatedSample> four(4, single);
  const auto mos = mosaic_at(four, 160, 160);
  o.require(mos.boxes.size() == 4, "mosaic box count " + std::to_string(mos.boxes.size()));
  std::set<int> quadrants;
  for (const auto& b : mos.boxes) {
    o.require(b.bbox.within(320, 320), "mosaic box out of bounds");
    quadrants.insert((b.bbox.x_center() >= 160 ? 1 : 0) + (b.bbox.y_center() >= 160 ? 2 : 0));
  }
  o.require(quadrants.size() == 4, "mosaic boxes not one per quadrant");

  std::vector<AnnotatedSample> inputs;
  for (int q = 0; q < 4; ++q) inputs.push_back(AnnotatedSample{noise(150 + 10 * q, 120), {{ObjectClass::kPole, BBox{10, 10, 20, 100}}}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed);
    const auto ra = augment_pipeline(inputs, AugmentConfig{}, a);
    const auto rb = augment_pipeline(inputs, AugmentConfig{}, b);
    o.require(ra.sample == rb.sample && ra.ops == rb.ops, "pipeline not reproducible for seed " + std::to_string(seed));
  }
  if (o.pass) o.detail = "involution, hue rotation, 4-quadrant mosaic, 20 seeded pipeline runs";
  return o;
}

Outcome ac8_metric_fixtures() {
  Outcome o;
  const auto poles = io::load_measurements(kFixtures + "/pole_lengths.json");
  const auto pre = mae_pole(poles.pole_records, Phase::kPreFlood);
  const auto post = mae_pole(poles.pole_records, Phase::kPostFlood);
  o.require(pre && std::abs(*pre - 3.916) <= 1e-9, "MAE_P pre");
  o.require(post && std::abs(*post - 6.769) <= 1e-9, "MAE_P post");
  const auto dets = io::load_photos(kFixtures + "/iou_detections.jsonl");
  const auto truths = io::load_photos(kFixtures + "/iou_truths.jsonl");
  const auto report = run_evaluate(dets, truths, {}, {}, {}, PipelineConfig{});
  o.require(report.mean_matched_iou && std::abs(*report.mean_matched_iou - 0.8226) <= 1e-4, "mean matched IoU");
  if (o.pass) {
    o.detail = "MAE_P pre " + fmt("%.3f", *pre) + ", post " + fmt("%.3f", *post) + ", mean IoU " +
               fmt("%.4f", *report.mean_matched_iou);
  }
  return o;
}

int run_cli(const std::string& args) {
  const int status = std::system((kCli + " " + args + " 2>/dev/null").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome ac9_end_to_end() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "flooddepth_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string pre = (dir / "pre.jsonl").string();
  const std::string post = (dir / "post.jsonl").string();
  o.require(run_cli("synth --out-pre " + pre + " --out-post " + post) == 0, "synth failed");
  const std::string est = "estimate --pre " + pre + " --post " + post + " --out ";
  o.require(run_cli(est + (dir / "a.geojson").string()) == 0, "first estimate failed");
  o.require(run_cli(est + (dir / "b.geojson").string()) == 0, "second estimate failed");
  if (o.pass) {
    const std::string a = io::read_file((dir / "a.geojson").string());
    const std::string b = io::read_file((dir / "b.geojson").string());
    o.require(a == b, "outputs differ");
    const auto j = io::Json::parse(a);
    o.require(j["features"].size() == 11, "feature count " + std::to_string(j["features"].size()));
    if (o.pass) o.detail = "11 features, " + std::to_string(a.size()) + " identical bytes";
  }
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 depth table reproduction", ac1_table_reproduction},
      {"AC2 mAP aggregation", ac2_map_aggregation},
      {"AC3 oracle round-trip", ac3_oracle_round_trip},
      {"AC4 AP oracle equivalence", ac4_ap_oracle},
      {"AC5 selection determinism", ac5_selection_permutations},
      {"AC6 k-fold properties", ac6_kfold},
      {"AC7 augmentation contracts", ac7_augmentation},
      {"AC8 metric fixtures", ac8_metric_fixtures},
      {"AC9 end-to-end determinism", ac9_end_to_end},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
