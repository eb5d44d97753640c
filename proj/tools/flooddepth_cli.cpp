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

// flooddepth: estimate, evaluate, split, augment, synth and map.
//
// Exit codes: 0 success, 1 I/O or data error, 2 configuration or usage error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flooddepth/flooddepth.hpp"
#include "png_io.hpp"

namespace fs = std::filesystem;
using namespace flooddepth;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitConfig = 2;

struct GlobalOptions {
  std::string config_path;
  std::optional<double> sign_height_in;
  std::optional<double> min_confidence;
  std::optional<double> low_confidence;
  std::optional<double> pairing_radius_m;
  std::optional<double> iou_threshold;
  std::optional<int> k_folds;
  std::optional<std::uint64_t> seed;
};

PipelineConfig resolve_config(const GlobalOptions& g) {
  PipelineConfig c;
  if (!g.config_path.empty()) load_config(g.config_path, c);
  if (g.sign_height_in) c.sign_height_in = *g.sign_height_in;
  if (g.min_confidence) c.min_confidence = *g.min_confidence;
  if (g.low_confidence) c.low_confidence = *g.low_confidence;
  if (g.pairing_radius_m) c.pairing_radius_m = *g.pairing_radius_m;
  if (g.iou_threshold) c.iou_threshold = *g.iou_threshold;
  if (g.k_folds) c.k_folds = *g.k_folds;
  if (g.seed) c.seed = *g.seed;
  validate(c);
  return c;
}

// "-" or empty writes to stdout.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    io::write_file(path, text);
  }
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string pre;
  std::string post;
  std::string out;
  std::string report;
};

int cmd_estimate(const EstimateArgs& a, const PipelineConfig& c) {
  const auto pre = io::load_photos(a.pre);
  const auto post = io::load_photos(a.post);
  const EstimateRun run = run_estimate(pre, post, c);
  emit(a.out, io::to_geojson(run.map));
  if (!a.report.empty()) io::write_file(a.report, io::estimate_run_to_json(run).dump(2) + "\n");
  for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& f : run.baseline_failures) {
    std::cerr << "baseline " << f.photo_id << " skipped: " << f.reason << "\n";
  }
  for (const auto& f : run.unmapped) std::cerr << "photo " << f.photo_id << " unmapped: " << f.reason << "\n";
  std::cerr << run.map.features.size() << " mapped, " << run.unmapped.size() << " unmapped\n";
  return kExitOk;
}

struct MapArgs {
  std::string run;
  std::string out;
};

int cmd_map(const MapArgs& a) {
  emit(a.out, io::to_geojson(io::load_estimate_run(a.run).map));
  return kExitOk;
}

struct EvaluateArgs {
  std::string detections;
  std::string truths;
  std::vector<std::string> measurements;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a, const PipelineConfig& c) {
  std::vector<PhotoRecord> dets, truths;
  if (!a.detections.empty()) dets = io::load_photos(a.detections);
  if (!a.truths.empty()) truths = io::load_photos(a.truths);
  io::Measurements all;
  for (const auto& path : a.measurements) {
    auto m = io::load_measurements(path);
    all.depth_records.insert(all.depth_records.end(), m.depth_records.begin(), m.depth_records.end());
    all.pole_records.insert(all.pole_records.end(), m.pole_records.begin(), m.pole_records.end());
    all.map_curves.insert(all.map_curves.end(), m.map_curves.begin(), m.map_curves.end());
  }
  const EvalReport report =
      run_evaluate(dets, truths, all.depth_records, all.pole_records, all.map_curves, c);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  emit(a.out, io::eval_report_to_json(report).dump(2) + "\n");
  return kExitOk;
}

struct SplitArgs {
  std::string ids;
  std::string photos;
  std::string out;
};

int cmd_split(const SplitArgs& a, const PipelineConfig& c) {
  std::vector<std::string> ids;
  if (!a.photos.empty()) {
    for (const auto& p : io::load_photos(a.photos)) ids.push_back(p.photo_id);
  } else {
    std::istringstream in(io::read_file(a.ids));
    std::string line;
    while (std::getline(in, line)) {
      line = detail::trim(line);
      if (!line.empty()) ids.push_back(line);
    }
  }
  const auto folds = kfold_split(ids, c.k_folds, c.seed);
  io::Json out;
  out["k"] = c.k_folds;
  out["seed"] = c.seed;
  io::Json arr = io::Json::array();
  for (const auto& f : folds) {
    arr.push_back(io::Json{{"fold", f.fold_index}, {"train", f.train_ids}, {"val", f.val_ids}});
  }
  out["folds"] = std::move(arr);
  emit(a.out, out.dump(2) + "\n");
  return kExitOk;
}

struct AugmentArgs {
  std::string input_dir;
  std::string output_dir;
  std::optional<double> hflip_prob;
  std::optional<double> mosaic_prob;
};

int cmd_augment(const AugmentArgs& a, PipelineConfig c) {
  if (a.hflip_prob) c.augment.hflip_prob = *a.hflip_prob;
  if (a.mosaic_prob) c.augment.mosaic_prob = *a.mosaic_prob;
  validate(c.augment);

  std::vector<fs::path> images;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(a.input_dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png") images.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + a.input_dir + ": " + ec.message());
  std::sort(images.begin(), images.end());
  if (images.empty()) throw IoError("no .png images in " + a.input_dir);

  std::vector<AnnotatedSample> samples;
  for (const auto& path : images) {
    AnnotatedSample s;
    s.image = tools::read_png(path.string());
    fs::path labels = path;
    labels.replace_extension(".txt");
    if (fs::exists(labels)) {
      s.boxes = io::load_darknet_annotations(labels.string(), s.image.width, s.image.height);
    }
    samples.push_back(std::move(s));
  }

  fs::create_directories(a.output_dir, ec);
  if (ec) throw IoError("cannot create " + a.output_dir + ": " + ec.message());
  std::string log;
  const std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Sample i leads its group; the mosaic partners follow cyclically.
    std::vector<AnnotatedSample> group;
    for (std::size_t k = 0; k < std::min<std::size_t>(4, n); ++k) group.push_back(samples[(i + k) % n]);
    Rng rng(mix_seed(c.augment.seed ^ c.seed, i));
    const AugmentResult res = augment_pipeline(group, c.augment, rng);
    const fs::path stem = fs::path(a.output_dir) / images[i].stem();
    tools::write_png(stem.string() + ".png", res.sample.image);
    io::write_file(stem.string() + ".txt",
                   io::format_darknet(res.sample.boxes, res.sample.image.width, res.sample.image.height));
    log += io::Json{{"source", images[i].filename().string()}, {"ops", res.ops}}.dump() + "\n";
  }
  io::write_file((fs::path(a.output_dir) / "augment_log.jsonl").string(), log);
  std::cerr << n << " samples augmented\n";
  return kExitOk;
}

struct SynthArgs {
  std::string preset = "eleven";
  int count = 20;
  double jitter_px = 1.0;
  bool quantize = false;
  std::string out_pre;
  std::string out_post;
  std::string truth;
};

std::vector<synth::ScenePair> random_pairs(int count, std::uint64_t seed, bool quantize) {
  std::vector<synth::ScenePair> out;
  Rng rng(mix_seed(seed, 0x5eed));
  char id[32];
  for (int i = 0; i < count; ++i) {
    synth::SceneSpec pre;
    std::snprintf(id, sizeof(id), "%04d", i);
    pre.photo_id = std::string("pre-") + id;
    // About 1.1 km between consecutive sites.
    pre.location = LatLon{49.0 + 0.01 * i, -122.3};
    pre.quantize = quantize;
    pre.camera.distance_in = rng.uniform(250, 700);
    pre.camera.lateral_offset_in = rng.uniform(-60, 60);
    synth::SceneSpec post = pre;
    post.photo_id = std::string("post-") + id;
    post.water_level_in = rng.uniform(0, 60);
    post.camera.distance_in = rng.uniform(250, 700);
    post.camera.lateral_offset_in = rng.uniform(-60, 60);
    out.push_back(synth::generate_pair(pre, post));
  }
  return out;
}

int cmd_synth(const SynthArgs& a, const PipelineConfig& c) {
  const auto pairs =
      a.preset == "eleven" ? synth::eleven_sign_fixture(a.quantize) : random_pairs(a.count, c.seed, a.quantize);
  std::vector<PhotoRecord> pre, post;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    PhotoRecord p = pairs[i].pre.photo;
    PhotoRecord q = pairs[i].post.photo;
    Rng rp(mix_seed(c.seed, 2 * i));
    Rng rq(mix_seed(c.seed, 2 * i + 1));
    synth::apply_jitter(p, a.jitter_px, rp);
    synth::apply_jitter(q, a.jitter_px, rq);
    pre.push_back(std::move(p));
    post.push_back(std::move(q));
  }
  io::save_photos(a.out_pre, pre);
  io::save_photos(a.out_post, post);
  if (!a.truth.empty()) io::write_file(a.truth, io::scene_pairs_truth_to_json(pairs).dump(2) + "\n");
  std::cerr << pairs.size() << " scene pairs written\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flood depth from stop-sign pole lengths in paired photos"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key = value configuration file; flags override it");
  app.add_option("--sign-height-in", g.sign_height_in, "Physical stop sign height in inches");
  app.add_option("--min-confidence", g.min_confidence, "Ignore detections scoring below this");
  app.add_option("--low-confidence", g.low_confidence, "Flag estimates with selections below this");
  app.add_option("--pairing-radius-m", g.pairing_radius_m, "Maximum pre/post pairing distance");
  app.add_option("--iou-threshold", g.iou_threshold, "IoU needed for a true positive");
  app.add_option("--k-folds", g.k_folds, "Number of cross-validation folds");
  app.add_option("--seed", g.seed, "Random seed");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Pair photos and write a GeoJSON flood map");
  estimate->add_option("--pre", est.pre, "Pre-flood photo records (JSONL)")->required();
  estimate->add_option("--post", est.post, "Post-flood photo records (JSONL)")->required();
  estimate->add_option("--out", est.out, "GeoJSON output path (default stdout)");
  estimate->add_option("--report", est.report, "Full-precision run report (JSON)");

  MapArgs map_args;
  auto* map = app.add_subcommand("map", "Render a run report as GeoJSON");
  map->add_option("--report", map_args.run, "Run report written by estimate")->required();
  map->add_option("--out", map_args.out, "GeoJSON output path (default stdout)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Detection and depth metrics");
  evaluate->add_option("--detections", ev.detections, "Detected boxes as photo records (JSONL)");
  evaluate->add_option("--truths", ev.truths, "Ground-truth boxes as photo records (JSONL)");
  evaluate->add_option("--measurements", ev.measurements,
                       "JSON with depth_records, pole_records and/or map_curves (repeatable)");
  evaluate->add_option("--out", ev.out, "Report path (default stdout)");

  SplitArgs sp;
  auto* split = app.add_subcommand("split", "Deterministic k-fold split");
  auto* ids_opt = split->add_option("--ids", sp.ids, "Text file with one id per line");
  auto* photos_opt = split->add_option("--photos", sp.photos, "Photo records (JSONL)");
  ids_opt->excludes(photos_opt);
  split->add_option("--out", sp.out, "Output path (default stdout)");
  split->callback([&] {
    if (sp.ids.empty() && sp.photos.empty()) throw CLI::RequiredError("--ids or --photos");
  });

  AugmentArgs aug;
  auto* augment = app.add_subcommand("augment", "Augment PNG images with Darknet labels");
  augment->add_option("--input", aug.input_dir, "Directory of NAME.png with NAME.txt labels")->required();
  augment->add_option("--output", aug.output_dir, "Output directory")->required();
  augment->add_option("--hflip-prob", aug.hflip_prob, "Horizontal flip probability");
  augment->add_option("--mosaic-prob", aug.mosaic_prob, "Mosaic probability");

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic pre/post photo records");
  synth_cmd->add_option("--preset", sy.preset, "eleven (built-in sites) or random")
      ->check(CLI::IsMember({"eleven", "random"}));
  synth_cmd->add_option("--count", sy.count, "Scene pairs for the random preset")->check(CLI::Range(1, 100000));
  synth_cmd->add_option("--jitter-px", sy.jitter_px, "Uniform box-edge jitter in pixels")
      ->check(CLI::NonNegativeNumber);
  synth_cmd->add_flag("--quantize", sy.quantize, "Round box edges to whole pixels");
  synth_cmd->add_option("--out-pre", sy.out_pre, "Pre-flood records output (JSONL)")->required();
  synth_cmd->add_option("--out-post", sy.out_post, "Post-flood records output (JSONL)")->required();
  synth_cmd->add_option("--truth", sy.truth, "Ground-truth sidecar (JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const PipelineConfig config = resolve_config(g);
    if (estimate->parsed()) return cmd_estimate(est, config);
    if (map->parsed()) return cmd_map(map_args);
    if (evaluate->parsed()) return cmd_evaluate(ev, config);
    if (split->parsed()) return cmd_split(sp, config);
    if (augment->parsed()) return cmd_augment(aug, config);
    if (synth_cmd->parsed()) return cmd_synth(sy, config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
