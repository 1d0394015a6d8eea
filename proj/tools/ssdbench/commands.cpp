#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "ssdbench/aggregate.hpp"
#include "ssdbench/baselines.hpp"
#include "ssdbench/calibrate.hpp"
#include "ssdbench/dataset.hpp"
#include "ssdbench/errors.hpp"
#include "ssdbench/groundtruth.hpp"
#include "ssdbench/io.hpp"
#include "ssdbench/metrics.hpp"
#include "ssdbench/report.hpp"
#include "ssdbench/synth.hpp"

namespace ssdbench::cli {

using nlohmann::ordered_json;

namespace {

constexpr const char* kGeneratedBy = "ssdbench " SSDBENCH_VERSION;

/// Runs fn(0..n-1) on `jobs` threads. Items are independent; the first
/// failure in index order is rethrown after every worker has finished.
void run_pool(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

using Key = std::pair<std::string, std::string>;  // (scene_id, label)

fs::path dist_path(const fs::path& root, const std::string& scene_id, const std::string& label) {
  return root / scene_id / (io::label_filename(label) + ".json");
}

/// Distributions stored as <root>/<scene_id>/<label>.json.
std::map<Key, SpatialDistribution> load_tree(const fs::path& root) {
  if (!fs::is_directory(root)) throw IoError("not a directory: " + root.string());
  std::map<Key, SpatialDistribution> out;
  for (const auto& scene : fs::directory_iterator(root)) {
    if (!scene.is_directory()) continue;
    const std::string scene_id = scene.path().filename().string();
    for (const auto& f : fs::directory_iterator(scene.path())) {
      if (!f.is_regular_file() || f.path().extension() != ".json") continue;
      auto d = io::read_distribution(f.path());
      Key key{scene_id, d.label};
      if (!out.emplace(key, std::move(d)).second) {
        throw InvalidInput("duplicate distribution for " + scene_id + "/" + key.second + " in " + root.string());
      }
    }
  }
  return out;
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void require_task(Task task, std::initializer_list<Task> allowed, const std::string& what) {
  if (std::find(allowed.begin(), allowed.end(), task) == allowed.end()) {
    throw InvalidInput(what + " does not support the " + std::string(to_string(task)) + " task");
  }
}

/// The 2.5D oracle: the input frame's 2D ground truth unprojected with its
/// depth (rendered from the reconstruction when the frame has none). Without
/// 2D evidence the lift has nothing to place and the oracle is uniform.
SpatialDistribution oracle_25d(const LoadedScene& scene, const ConfidenceCloud& recon, const std::string& label,
                               const Settings& s) {
  const auto& input = scene.input_frame();
  const auto& domain = s.voxels_25d;
  const auto raw = gt_2d_raw(input, label, s.image, s.thresholds.tau_conf);
  if (!raw) return uniform_baseline(domain, label, Task::k25D);
  const DepthMap depth = input.depth ? *input.depth : render_depth(recon, input.camera);
  const bool any = std::any_of(raw->raw.begin(), raw->raw.end(), [](double v) { return v > 0.0; });
  if (!any) return uniform_baseline(domain, label, Task::k25D);
  try {
    return lift_2d_to_25d(*raw, &depth, input.camera, domain, s.max_depth);
  } catch (const InvalidInput&) {
    return uniform_baseline(domain, label, Task::k25D);
  }
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  double lo = 0, hi = 0, step = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3) {
    throw InvalidInput("expected lo:hi:step, got '" + text + "'");
  }
  return linspace_step(lo, hi, step);
}

int build_gt(const BuildGtArgs& args, const Settings& s) {
  std::vector<LoadedScene> scenes;
  std::vector<ConfidenceCloud> recons;
  std::set<std::string> ids;
  for (const auto& m : args.manifests) {
    scenes.push_back(load_scene(load_manifest(m)));
    const auto& scene = scenes.back();
    if (!ids.insert(scene.manifest.scene_id).second) {
      throw InvalidInput("scene " + scene.manifest.scene_id + " appears in more than one manifest");
    }
    if (args.task == Task::k2D) {
      recons.emplace_back();
    } else {
      recons.push_back(preprocess_reconstruction(scene.reconstruction, scene.input_frame().camera,
                                                 s.outlier_neighbors, s.outlier_sigma, s.max_depth));
    }
  }

  std::vector<std::pair<std::size_t, std::string>> items;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    for (const auto& label : sorted_unique(scenes[i].manifest.objects)) items.emplace_back(i, label);
  }
  std::vector<char> present(items.size(), 0);

  run_pool(items.size(), s.jobs, [&](std::size_t n) {
    const auto& [i, label] = items[n];
    const auto& scene = scenes[i];
    const auto& input = scene.input_frame();
    const double tau = s.thresholds.tau_conf;
    std::optional<SpatialDistribution> gt;
    switch (args.task) {
      case Task::k2D:
        gt = gt_2d(input, label, s.image, tau);
        break;
      case Task::k3D:
        gt = gt_3d(scene.frames, recons[i], label, input.camera, s.voxels_3d, tau);
        break;
      case Task::k25D:
        gt = gt_25d(scene.frames, recons[i], label, input.camera, s.voxels_25d, tau, s.max_depth);
        break;
    }
    if (!gt) return;
    present[n] = 1;
    const auto& id = scene.manifest.scene_id;
    io::write_text(dist_path(args.out, id, label), io::format_distribution(*gt));
    if (args.task == Task::k25D) {
      io::write_text(dist_path(args.out / id / "oracle", "", label),
                     io::format_distribution(oracle_25d(scene, recons[i], label, s)));
    }
  });

  ordered_json excluded = ordered_json::array();
  for (std::size_t n = 0; n < items.size(); ++n) {
    if (present[n]) continue;
    excluded.push_back({{"scene_id", scenes[items[n].first].manifest.scene_id}, {"label", items[n].second}});
  }
  io::write_text(args.out / "exclusions.json", excluded.dump(2) + "\n");
  return 0;
}

int aggregate(const AggregateArgs& args, const Settings& s) {
  static const std::set<std::string> pipelines = {"dfm3d", "sdxl2d", "vlm"};
  if (!pipelines.count(args.pipeline)) throw InvalidInput("unknown pipeline '" + args.pipeline + "'");
  if (args.pipeline == "dfm3d") require_task(args.task, {Task::k3D, Task::k25D}, "pipeline dfm3d");
  if (args.pipeline == "sdxl2d") require_task(args.task, {Task::k2D, Task::k25D}, "pipeline sdxl2d");
  if (args.pipeline == "vlm") require_task(args.task, {Task::k2D}, "pipeline vlm");

  const auto scenes = scan_samples(args.samples);
  if (scenes.empty()) throw InvalidInput("no scenes under " + (args.samples / "scene").string());

  struct Loaded {
    const SampleScene* scene = nullptr;
    std::vector<ConfidenceCloud> clouds;
    ImageSamples images;
    std::map<std::string, RegionCounts> votes;
    std::optional<CameraModel> camera;
  };
  std::vector<Loaded> loaded;
  std::vector<std::pair<std::size_t, std::string>> items;

  for (const auto& sc : scenes) {
    Loaded l;
    l.scene = &sc;
    std::vector<std::string> found;
    if (args.pipeline == "dfm3d") {
      l.clouds = load_cloud_samples(sc);
      if (l.clouds.empty()) throw InvalidInput("scene " + sc.scene_id + " has no cloud samples");
      for (const auto& c : l.clouds) {
        for (const auto& p : c.points) {
          if (!p.label.empty()) found.push_back(p.label);
        }
      }
    } else if (args.pipeline == "sdxl2d") {
      l.images = load_image_samples(sc);
      if (l.images.detections.empty()) throw InvalidInput("scene " + sc.scene_id + " has no detection samples");
      for (const auto& dets : l.images.detections) {
        for (const auto& d : dets) found.push_back(d.label);
      }
    } else {
      l.votes = load_vlm_counts(sc);
      if (l.votes.empty()) throw InvalidInput("scene " + sc.scene_id + " has no VLM counts");
      for (const auto& [label, c] : l.votes) found.push_back(label);
    }
    if (args.task == Task::k25D) {
      if (!sc.camera) throw InvalidInput("scene " + sc.scene_id + " needs camera.json for the 2.5d task");
      l.camera = io::read_camera(*sc.camera);
    }
    const auto labels = sorted_unique(args.labels.empty() ? found : args.labels);
    for (const auto& label : labels) {
      if (args.pipeline == "vlm" && !l.votes.count(label)) {
        throw InvalidInput("scene " + sc.scene_id + " has no VLM counts for '" + label + "'");
      }
      items.emplace_back(loaded.size(), label);
    }
    loaded.push_back(std::move(l));
  }

  run_pool(items.size(), s.jobs, [&](std::size_t n) {
    const auto& [i, label] = items[n];
    const auto& l = loaded[i];
    std::optional<SpatialDistribution> d;
    if (args.pipeline == "dfm3d") {
      if (args.task == Task::k3D) {
        d = aggregate_3d(l.clouds, s.voxels_3d, label);
      } else {
        d = aggregate_25d(l.clouds, *l.camera, s.voxels_25d, label, s.max_depth);
      }
    } else if (args.pipeline == "sdxl2d") {
      const auto maps = sample_maps_from_detections(l.images.detections, label, s.image, s.thresholds.tau_conf);
      if (args.task == Task::k2D) {
        d = aggregate_2d(maps, s.image, label);
      } else {
        if (l.images.depths.size() != maps.size()) {
          throw InvalidInput("scene " + l.scene->scene_id + ": every sample needs pose1.depth.bin for 2.5d");
        }
        const bool any = std::any_of(maps.begin(), maps.end(), [](const std::vector<double>& m) {
          return std::any_of(m.begin(), m.end(), [](double v) { return v > 0.0; });
        });
        if (!any) {
          d = uniform_baseline(s.voxels_25d, label, Task::k25D);
        } else {
          std::vector<LiftSample> lift;
          for (std::size_t k = 0; k < maps.size(); ++k) lift.push_back({&maps[k], &l.images.depths[k]});
          d = lift_samples_to_25d(lift, *l.camera, s.voxels_25d, label, s.max_depth);
        }
      }
    } else {
      d = vlm_region_distribution(l.votes.at(label), s.image, label);
    }
    io::write_text(dist_path(args.out, l.scene->scene_id, label), io::format_distribution(*d));
  });
  return 0;
}

int evaluate(const EvaluateArgs& args, const Settings& s) {
  if (args.pred.has_value() == args.predictor.has_value()) {
    throw InvalidInput("give exactly one of --pred and --predictor");
  }
  if (args.predictor && *args.predictor != "uniform" && *args.predictor != "oracle") {
    throw InvalidInput("unknown predictor '" + *args.predictor + "'");
  }
  const auto gt = load_tree(args.gt);
  if (gt.empty()) throw InvalidInput("no ground-truth distributions under " + args.gt.string());
  for (const auto& [key, g] : gt) {
    if (g.kind != args.task) {
      throw InvalidInput("ground truth " + key.first + "/" + key.second + " is " + std::string(to_string(g.kind)) +
                         ", expected " + std::string(to_string(args.task)));
    }
  }

  std::map<Key, SpatialDistribution> pred;
  if (args.pred) {
    pred = load_tree(*args.pred);
  } else if (*args.predictor == "oracle" && args.task == Task::k25D) {
    for (const auto& [key, g] : gt) {
      const auto p = dist_path(args.gt / key.first / "oracle", "", key.second);
      if (fs::exists(p)) pred.emplace(key, io::read_distribution(p));
    }
  } else {
    for (const auto& [key, g] : gt) {
      pred.emplace(key, *args.predictor == "oracle" ? oracle(g) : uniform_baseline(g.domain, g.label, g.kind));
    }
  }

  std::vector<Key> missing;
  for (const auto& [key, g] : gt) {
    if (!pred.count(key)) missing.push_back(key);
  }
  if (!missing.empty()) {
    std::cerr << "ssdbench: " << missing.size() << " ground-truth pair(s) have no prediction:\n";
    for (const auto& [scene, label] : missing) std::cerr << "  " << scene << "/" << label << "\n";
    return 1;
  }

  std::vector<Key> keys;
  for (const auto& [key, g] : gt) keys.push_back(key);
  std::vector<PairRecord> records(keys.size());
  run_pool(keys.size(), s.jobs, [&](std::size_t n) {
    const auto& g = gt.at(keys[n]);
    const auto& d = pred.at(keys[n]);
    if (d.kind != args.task) {
      throw InvalidInput("prediction " + keys[n].first + "/" + keys[n].second + " is " +
                         std::string(to_string(d.kind)) + ", expected " + std::string(to_string(args.task)));
    }
    records[n] = PairRecord{keys[n].first, keys[n].second, evaluate_pair(g, d, s.thresholds)};
  });

  std::string method = args.method;
  if (method.empty()) method = args.predictor ? *args.predictor : args.pred->filename().string();
  const auto report = aggregate_report(std::move(records), method, args.task);
  io::write_text(args.out / "pairs.json", pairs_to_json(report));
  io::write_text(args.out / "report.json", report_to_json(report, kGeneratedBy));
  io::write_text(args.out / "report.csv", reports_to_csv(std::span(&report, 1)));
  return 0;
}

int calibrate_retention(const RetentionArgs& args, const Settings&) {
  std::vector<SpatialDistribution> corpus;
  for (const auto& in : args.inputs) {
    if (fs::is_directory(in)) {
      for (auto& [key, d] : load_tree(in)) corpus.push_back(std::move(d));
    } else {
      corpus.push_back(io::read_distribution(in));
    }
  }
  const auto lambdas = parse_range(args.lambdas);
  const auto curve = retention_curve(corpus, lambdas);

  std::string csv = "lambda,retention\n";
  char line[64];
  for (const auto& p : curve.points) {
    std::snprintf(line, sizeof line, "%.6g,%.6f\n", p.lambda, p.retention);
    csv += line;
  }
  io::write_text(args.out / "retention.csv", csv);

  ordered_json j;
  j["grids"] = corpus.size();
  try {
    j["lambda"] = knee(curve);
  } catch (const NoKnee& e) {
    j["lambda"] = nullptr;
    io::write_text(args.out / "knee.json", j.dump(2) + "\n");
    throw;
  }
  io::write_text(args.out / "knee.json", j.dump(2) + "\n");
  return 0;
}

int calibrate_conf(const ConfArgs& args, const Settings&) {
  std::vector<PosedFrame> frames;
  for (const auto& m : args.manifests) {
    auto scene = load_scene(load_manifest(m));
    for (auto& f : scene.frames) frames.push_back(std::move(f));
  }
  if (frames.empty()) throw InvalidInput("no frames to calibrate on");
  const auto thresholds = parse_range(args.thresholds);
  std::string csv = "threshold,mean,std\n";
  char line[96];
  for (const auto& r : bbox_rate_curve(frames, thresholds)) {
    std::snprintf(line, sizeof line, "%.6g,%.6f,%.6f\n", r.threshold, r.mean, r.stddev);
    csv += line;
  }
  io::write_text(args.out / "bbox_rate.csv", csv);
  return 0;
}

int synth(const SynthArgs& args, const Settings& s) {
  const auto spec = io::read_scene_spec(args.spec);
  const auto scene = make_scene(spec, s.seed);
  const auto cam = synthetic_camera(s.image);
  SimulatedSampler sampler;
  sampler.scene = &scene;
  sampler.detection_noise = args.noise;
  sampler.miss_rate = args.miss_rate;
  sampler.seed = s.seed;
  sampler.validate();
  if (args.samples == 0) throw InvalidInput("--samples must be at least 1");

  std::vector<SyntheticSample> samples(args.samples);
  run_pool(samples.size(), s.jobs, [&](std::size_t n) { samples[n] = draw_sample(sampler, cam, n); });
  write_synthetic_samples(args.out / "samples", spec.scene_id, cam, samples);
  for (const auto& label : scene.labels()) {
    io::write_text(dist_path(args.out / "gt", spec.scene_id, label),
                   io::format_distribution(scene.analytic_ssd(label)));
  }
  io::write_text(args.out / "spec.json", io::format_scene_spec(spec));
  return 0;
}

}  // namespace ssdbench::cli
