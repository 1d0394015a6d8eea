// Acceptance suite. Usage: acceptance <ssdbench-binary> <toy-data-dir> [criterion]
// Prints one PASS/FAIL line per criterion; exits non-zero when any fails.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ssdbench/baselines.hpp"
#include "ssdbench/calibrate.hpp"
#include "ssdbench/dataset.hpp"
#include "ssdbench/io.hpp"
#include "ssdbench/report.hpp"
#include "ssdbench/synth.hpp"

using namespace ssdbench;
namespace fs = std::filesystem;

namespace {

constexpr double kBaselineTol = 1e-9;
constexpr double kMetricTol = 1e-12;
constexpr double kGibbsTol = 1e-9;
constexpr double kGeometryTol = 1e-9;
constexpr double kTvLimit = 0.05;
constexpr double kDeltaLimit = 0.1;
constexpr double kKneeTol = 0.05 + 1e-9;

fs::path g_cli;
fs::path g_toy;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (detail.tellp() > 0) detail << "; ";
      pass = false;
      detail << what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void timed(Outcome& out, double limit, const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  const double t = seconds_since(t0);
  out.require(t < limit, "runtime " + std::to_string(t) + " s >= " + std::to_string(limit) + " s");
  if (out.pass) out.detail << "runtime " << t << " s";
}

SpatialDistribution peaked(std::mt19937_64& rng, const Domain& domain, Task kind) {
  const std::size_t n = domain_size(domain);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ConfidenceGrid grid{domain, std::vector<double>(n, 0.0), "obj", kind};
  for (int hot = 0; hot < 12; ++hot) grid.raw[static_cast<std::size_t>(u(rng) * n) % n] = 0.5 + 0.5 * u(rng);
  for (auto& r : grid.raw) {
    if (r == 0.0 && u(rng) < 0.1) r = 0.3 * u(rng);
  }
  return softmax_normalize(grid);
}

std::vector<Domain> table_domains() { return {ImageDomain{}, VoxelDomain::centered()}; }

Outcome criterion1() {
  Outcome out;
  std::mt19937_64 rng(101);
  timed(out, 1.0, [&] {
    for (const auto& domain : table_domains()) {
      const Task kind = std::holds_alternative<ImageDomain>(domain) ? Task::k2D : Task::k3D;
      std::vector<PairMetrics> pairs;
      for (int i = 0; i < 3; ++i) {
        const auto g = peaked(rng, domain, kind);
        const auto m = evaluate_pair(g, uniform_baseline(domain, "obj", kind), Thresholds{});
        out.require(m.y, "ground truth thresholds to empty");
        out.require(std::abs(m.h - 1.0) <= kBaselineTol, "H = " + std::to_string(m.h));
        out.require(std::abs(m.h_cross - 1.0) <= kBaselineTol, "H_cross = " + std::to_string(m.h_cross));
        out.require(m.delta && std::isinf(*m.delta), "Delta is finite");
        pairs.push_back(m);
      }
      out.require(std::abs(fnr(pairs) - 1.0) <= kBaselineTol, "FNR != 1");
    }
  });
  return out;
}

Outcome criterion2() {
  Outcome out;
  std::mt19937_64 rng(202);
  timed(out, 1.0, [&] {
    for (const auto& domain : table_domains()) {
      const Task kind = std::holds_alternative<ImageDomain>(domain) ? Task::k2D : Task::k3D;
      std::vector<PairMetrics> pairs;
      for (int i = 0; i < 3; ++i) {
        const auto g = peaked(rng, domain, kind);
        const auto m = evaluate_pair(g, ssdbench::oracle(g), Thresholds{});
        out.require(m.delta && *m.delta == 0.0, "Delta != 0");
        out.require(m.h_cross == m.h, "H_cross != H bitwise");
        if (kind == Task::k2D) out.require(m.region_accuracy && *m.region_accuracy == 1.0, "A != 1");
        pairs.push_back(m);
      }
      out.require(fnr(pairs) == 0.0, "FNR != 0");
    }
  });
  return out;
}

Outcome criterion3() {
  Outcome out;
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> side2(2, 32), side3(2, 8);
  std::uniform_real_distribution<double> lam(0.5, 3.0);
  const std::vector<int> kernels(kDefaultKernelSizes.begin(), kDefaultKernelSizes.end());
  double worst = 0.0;
  timed(out, 30.0, [&] {
    for (int trial = 0; trial < 500; ++trial) {
      SpatialDistribution g, d;
      if (trial % 2 == 0) {
        const int h = side2(rng), w = side2(rng);
        g = oracle::image_distribution(oracle::random_distribution(rng, h * w, trial % 4 == 0), h, w);
        d = oracle::image_distribution(oracle::random_distribution(rng, h * w, trial % 3 == 0), h, w);
      } else {
        const std::array<int, 3> r{side3(rng), side3(rng), side3(rng)};
        g = oracle::voxel_distribution(oracle::random_distribution(rng, r[0] * r[1] * r[2], trial % 4 == 1), r);
        d = oracle::voxel_distribution(oracle::random_distribution(rng, r[0] * r[1] * r[2], trial % 3 == 1), r);
      }
      const double e = std::abs(entropy(g) - oracle::entropy(g.values));
      const double x = std::abs(cross_entropy(g, d) - oracle::cross_entropy(g.values, d.values));
      worst = std::max({worst, e, x});

      const Thresholds thr{lam(rng), 0.1};
      const double tau = thr.tau(g.size());
      const auto pg = find_peaks(g, thr);
      const auto pd = find_peaks(d, thr);
      const auto og = oracle::peaks(g.values, g.shape(), tau, kernels);
      const auto od = oracle::peaks(d.values, d.shape(), tau, kernels);
      if (pg.cells != og || pd.cells != od) out.require(false, "peak mismatch in trial " + std::to_string(trial));
      if (!og.empty()) {
        const double got = nn_distance(pg, pd);
        const double want = oracle::nn_distance(og, od, g.shape());
        if (!(got == want || (std::isinf(got) && std::isinf(want)))) {
          out.require(false, "distance mismatch in trial " + std::to_string(trial));
        }
      }
    }
  });
  out.require(worst <= kMetricTol, "entropy error " + std::to_string(worst));
  return out;
}

Outcome criterion4() {
  Outcome out;
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> size(2, 400);
  timed(out, 10.0, [&] {
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = size(rng);
      const auto g = oracle::image_distribution(oracle::random_distribution(rng, n, trial % 2 == 0), 1, n);
      const bool same = trial % 5 == 0;
      const auto d = same ? g : oracle::image_distribution(oracle::random_distribution(rng, n), 1, n);
      const double gap = cross_entropy(g, d) - entropy(g);
      out.require(gap >= -kGibbsTol, "H_cross < H in trial " + std::to_string(trial));
      if (same) {
        out.require(std::abs(gap) <= kGibbsTol, "no equality at d = g in trial " + std::to_string(trial));
      } else {
        out.require(gap > kGibbsTol, "equality at d != g in trial " + std::to_string(trial));
      }
    }
  });
  return out;
}

Outcome criterion5() {
  Outcome out;
  std::mt19937_64 rng(505);
  double worst = 0.0;
  timed(out, 10.0, [&] {
    const auto cam = oracle::camera(500, 480, 320, 180, 640, 360, oracle::random_pose(rng));
    std::uniform_real_distribution<double> u(0.0, 640.0), v(0.0, 360.0), depth(0.05, 50.0);
    for (int i = 0; i < 10000; ++i) {
      const Vec2 px(u(rng), v(rng));
      const double z = depth(rng);
      const Vec3 world = back_project_to_world(px, z, cam);
      const auto proj = project(world, cam);
      if (!proj) {
        out.require(false, "back-projected point left the view");
        break;
      }
      const Vec3 again = back_project_to_world(proj->pixel, proj->depth, cam);
      worst = std::max({worst, (again - world).norm(), std::abs(proj->depth - z)});
    }

    std::uniform_real_distribution<double> xy(-3.0, 3.0), zz(-1.0, 12.0);
    for (int trial = 0; trial < 200; ++trial) {
      const auto c2 = oracle::camera(60, 60, 32, 24, 64, 48, trial % 2 ? oracle::random_pose(rng) : RigidTransform{});
      ConfidenceCloud cloud;
      for (int i = 0; i < 300; ++i) cloud.points.push_back({Vec3(xy(rng), xy(rng), zz(rng)), 0.5, std::to_string(i)});
      const auto got = z_cull(cloud, c2);
      const auto want = oracle::z_cull_indices(cloud, c2);
      bool same = got.size() == want.size();
      for (std::size_t i = 0; same && i < want.size(); ++i) same = got.points[i].label == std::to_string(want[i]);
      if (!same) out.require(false, "z_cull differs from the depth buffer in trial " + std::to_string(trial));
    }
  });
  out.require(worst <= kGeometryTol, "round-trip error " + std::to_string(worst));
  return out;
}

Outcome criterion6() {
  Outcome out;
  std::mt19937_64 rng(606);
  timed(out, 10.0, [&] {
    const auto dom = VoxelDomain::centered({8, 8, 8}, 0.5);
    std::uniform_real_distribution<double> pos(-2.5, 2.5), conf(0.0, 1.0);
    const std::vector<std::string> labels{"a", "b"};
    for (int trial = 0; trial < 200; ++trial) {
      ConfidenceCloud world;
      for (int i = 0; i < 400; ++i) {
        // Coarse confidences make voxels with repeated values common.
        const double c = conf(rng) < 0.2 ? 0.0 : std::round(conf(rng) * 8.0) / 8.0;
        world.points.push_back({Vec3(pos(rng), pos(rng), pos(rng)), c, labels[i % 2]});
      }
      const auto cam = oracle::camera(10, 10, 5, 5, 10, 10, oracle::random_pose(rng));
      const auto in_cam = transform_cloud(world, cam.pose);

      const auto gt = gt_3d_raw_from_cloud(world, cam, dom, "a");
      const auto want = oracle::voxel_mean(in_cam, dom, "a");
      const bool any = std::any_of(want.begin(), want.end(), [](double v) { return v > 0.0; });
      out.require(gt.has_value() == any, "gt_3d presence differs in trial " + std::to_string(trial));
      if (gt && gt->raw != want) out.require(false, "gt_3d raw differs in trial " + std::to_string(trial));

      ConfidenceCloud first, second;
      for (std::size_t i = 0; i < in_cam.size(); ++i) (i < in_cam.size() / 3 ? first : second).points.push_back(in_cam.points[i]);
      if (any && aggregate_3d_raw({first, second}, dom, "a").raw != want) {
        out.require(false, "aggregate_3d raw differs in trial " + std::to_string(trial));
      }

      auto shuffled = in_cam;
      std::shuffle(shuffled.points.begin(), shuffled.points.end(), rng);
      if (any && aggregate_3d_raw({shuffled}, dom, "a").raw != want) {
        out.require(false, "order dependence in trial " + std::to_string(trial));
      }
    }
  });
  return out;
}

Outcome criterion7() {
  Outcome out;
  SceneSpec spec;
  spec.scene_id = "mixture";
  spec.objects = {{"cup", Vec3(-3.0, 1.0, 4.0), Vec3(1.5, 1.0, 1.5), 0.3},
                  {"cup", Vec3(3.0, 1.0, 6.0), Vec3(1.5, 1.0, 1.5), 0.7},
                  {"lamp", Vec3(0.0, -2.0, -3.0), Vec3(1.0, 2.0, 1.0), 1.0}};
  double worst_tv = 0.0;
  double worst_delta = 0.0;
  timed(out, 60.0, [&] {
    const auto scene = make_scene(spec, 7);
    SimulatedSampler sampler;
    sampler.scene = &scene;
    sampler.seed = 7;
    const auto cam = synthetic_camera(ImageDomain{});
    std::vector<PairMetrics> pairs;
    for (int run = 0; run < 2; ++run) {
      const auto samples = draw_samples(sampler, cam, 200);
      std::vector<ConfidenceCloud> clouds;
      for (const auto& s : samples) clouds.push_back(s.cloud);
      for (const auto& label : scene.labels()) {
        const auto d = aggregate_3d(clouds, spec.domain, label);
        if (run == 0) {
          worst_tv = std::max(worst_tv, total_variation(d.values, scene.analytic_ssd(label).values));
          const auto m = analytic_metrics(scene, d, Thresholds{});
          worst_delta = std::max(worst_delta, m.delta.value_or(0.0));
          pairs.push_back(m);
        } else {
          const auto again = aggregate_3d(clouds, spec.domain, label);
          out.require(again.values == d.values, "aggregation not deterministic");
        }
      }
      if (run == 1) {
        const auto first = draw_samples(sampler, cam, 200);
        bool same = first.size() == samples.size();
        for (std::size_t i = 0; same && i < first.size(); ++i) {
          for (std::size_t p = 0; same && p < first[i].cloud.size(); ++p) {
            same = first[i].cloud.points[p].position == samples[i].cloud.points[p].position;
          }
        }
        out.require(same, "sampling not deterministic per seed");
      }
    }
    out.require(fnr(pairs) == 0.0, "FNR != 0");
  });
  out.require(worst_tv < kTvLimit, "TV " + std::to_string(worst_tv) + " >= " + std::to_string(kTvLimit));
  out.require(worst_delta < kDeltaLimit, "Delta " + std::to_string(worst_delta) + " >= " + std::to_string(kDeltaLimit));
  out.detail << "; measured TV " << worst_tv << ", Delta " << worst_delta;
  return out;
}

Outcome criterion8() {
  Outcome out;
  timed(out, 5.0, [&] {
    const auto lambdas = linspace_step(1.0, 3.0, 0.05);
    for (const double brk : {1.2, 1.4, 2.0}) {
      RetentionCurve curve;
      for (const double l : lambdas) {
        const double r = l <= brk ? 40.0 - 30.0 * (l - 1.0) : 40.0 - 30.0 * (brk - 1.0) - 2.0 * (l - brk);
        curve.points.push_back({l, r});
      }
      const double k = knee(curve);
      out.require(std::abs(k - brk) <= kKneeTol, "knee " + std::to_string(k) + " for break " + std::to_string(brk));
    }

    std::mt19937_64 rng(808);
    std::uniform_int_distribution<int> count(1, 6), side(2, 24);
    for (int corpus = 0; corpus < 100; ++corpus) {
      std::vector<SpatialDistribution> grids;
      const int n = count(rng);
      for (int i = 0; i < n; ++i) {
        const int h = side(rng), w = side(rng);
        grids.push_back(oracle::image_distribution(oracle::random_distribution(rng, h * w, i % 2 == 0), h, w));
      }
      const auto c = retention_curve(grids, lambdas);
      for (std::size_t i = 1; i < c.points.size(); ++i) {
        if (c.points[i].retention > c.points[i - 1].retention) {
          out.require(false, "retention increases in corpus " + std::to_string(corpus));
          break;
        }
      }
    }
  });
  return out;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = "SSD_BENCH_CONFIG=" + (g_toy / "config.json").string() + " " + g_cli.string() + " " +
                          args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() != "log") {
      out[fs::relative(e.path(), root).string()] = io::read_text(e.path());
    }
  }
  return out;
}

bool toy_pipeline(const fs::path& root, Outcome& out) {
  const std::string manifests =
      (g_toy / "toy01/manifest.json").string() + " " + (g_toy / "toy02/manifest.json").string();
  const std::string samples = (g_toy / "samples").string();
  const std::vector<std::string> steps{
      "build-gt " + manifests + " --task 2d --out " + (root / "gt2d").string(),
      "build-gt " + manifests + " --task 3d --out " + (root / "gt3d").string(),
      "build-gt " + manifests + " --task 2.5d --out " + (root / "gt25d").string(),
      "aggregate --pipeline sdxl2d --task 2d --samples " + samples + " --out " + (root / "sdxl2d").string(),
      "aggregate --pipeline vlm --task 2d --samples " + samples + " --out " + (root / "vlm").string(),
      "aggregate --pipeline dfm3d --task 3d --samples " + samples + " --out " + (root / "dfm3d").string(),
      "aggregate --pipeline dfm3d --task 2.5d --samples " + samples + " --out " + (root / "dfm25d").string(),
      "evaluate --task 2d --gt " + (root / "gt2d").string() + " --pred " + (root / "sdxl2d").string() +
          " --method sdxl2d --out " + (root / "eval_sdxl2d").string(),
      "evaluate --task 3d --gt " + (root / "gt3d").string() + " --pred " + (root / "dfm3d").string() +
          " --method dfm3d --out " + (root / "eval_dfm3d").string(),
      "evaluate --task 2.5d --gt " + (root / "gt25d").string() + " --predictor oracle --out " +
          (root / "eval_oracle25d").string(),
  };
  fs::create_directories(root);
  for (const auto& step : steps) {
    if (run_cli(step, root / "log") != 0) {
      out.require(false, "command failed: " + step.substr(0, step.find(' ', 10)) + ": " + io::read_text(root / "log"));
      return false;
    }
  }
  return true;
}

Outcome criterion9() {
  Outcome out;
  const auto base = fs::temp_directory_path() / "ssdbench_acceptance_c9";
  fs::remove_all(base);
  bool ok = true;
  timed(out, 10.0, [&] { ok = toy_pipeline(base / "run1", out); });
  if (!ok) return out;
  if (!toy_pipeline(base / "run2", out)) return out;
  out.require(tree_bytes(base / "run1") == tree_bytes(base / "run2"), "outputs differ between runs");

  const auto run = base / "run1";
  const Thresholds thr{};
  const ImageDomain image{72, 72, 28, 28};
  std::size_t compared = 0;
  for (const auto* id : {"toy01", "toy02"}) {
    const auto scene = load_scene(load_manifest(g_toy / id / "manifest.json"));
    const auto& input = scene.input_frame();
    const auto recon = preprocess_reconstruction(scene.reconstruction, input.camera);
    for (const auto& label : scene.manifest.objects) {
      const auto file = io::label_filename(label) + ".json";
      const auto g2 = gt_2d(input, label, image, thr.tau_conf);
      out.require(g2.has_value() == fs::exists(run / "gt2d" / id / file), "2d presence differs for " + label);
      if (g2 && io::format_distribution(*g2) != io::read_text(run / "gt2d" / id / file)) {
        out.require(false, std::string("gt2d differs for ") + id + "/" + label);
      }
      const auto g3 = gt_3d(scene.frames, recon, label, input.camera, VoxelDomain::centered(), thr.tau_conf);
      out.require(g3.has_value() == fs::exists(run / "gt3d" / id / file), "3d presence differs for " + label);
      if (g3 && io::format_distribution(*g3) != io::read_text(run / "gt3d" / id / file)) {
        out.require(false, std::string("gt3d differs for ") + id + "/" + label);
      }
      compared += g2.has_value() + g3.has_value();
    }
  }
  for (const auto& sc : scan_samples(g_toy / "samples")) {
    const auto clouds = load_cloud_samples(sc);
    for (const auto& e : fs::directory_iterator(run / "dfm3d" / sc.scene_id)) {
      const auto file_text = io::read_text(e.path());
      const auto label = io::parse_distribution(file_text, e.path().string()).label;
      if (io::format_distribution(aggregate_3d(clouds, VoxelDomain::centered(), label)) != file_text) {
        out.require(false, "dfm3d differs for " + sc.scene_id + "/" + label);
      }
      ++compared;
    }
  }
  out.require(compared > 0, "nothing compared");
  if (out.pass) out.detail << ", " << compared << " files match direct library calls";
  return out;
}

Outcome criterion10() {
  Outcome out;
  auto rec = [](const char* scene, std::optional<double> delta) {
    PairMetrics m;
    m.y = delta.has_value();
    m.y_hat = m.y;
    m.delta = delta;
    return PairRecord{scene, "obj", m};
  };
  const double inf = std::numeric_limits<double>::infinity();
  const auto r = aggregate_report({rec("a", 0.25), rec("b", inf), rec("c", 0.5), rec("d", inf), rec("e", 0.125),
                                   rec("f", std::nullopt)},
                                  "mixed", Task::k3D);
  out.require(r.delta.count == 3, "finite count " + std::to_string(r.delta.count));
  out.require(r.delta.mean == 0.875 / 3.0, "finite mean " + std::to_string(r.delta.mean));
  out.require(r.delta_infinite == 2, "excluded count " + std::to_string(r.delta_infinite));
  out.require(r.delta_not_applicable == 1, "not-applicable count " + std::to_string(r.delta_not_applicable));
  out.require(report_to_json(r, "acceptance").find("\"excluded_infinite\": 2") != std::string::npos,
              "exclusion count missing from the JSON report");

  const auto all_inf = aggregate_report({rec("a", inf), rec("b", inf)}, "baseline", Task::k3D);
  out.require(all_inf.delta.count == 0 && all_inf.delta_infinite == 2, "all-infinite set miscounted");
  if (out.pass) out.detail << "finite mean " << r.delta.mean << " over 3, 2 excluded";
  return out;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"uniform baseline row", criterion1},    {"oracle baseline row", criterion2},
    {"metric oracle equivalence", criterion3}, {"Gibbs inequality", criterion4},
    {"geometry round trip", criterion5},      {"voxelization oracle", criterion6},
    {"synthetic end-to-end", criterion7},     {"calibration knee", criterion8},
    {"CLI determinism and equivalence", criterion9}, {"report conventions", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <ssdbench> <toy-dir> [criterion]\n", argv[0]);
    return 2;
  }
  g_cli = argv[1];
  g_toy = argv[2];
  const int only = argc > 3 ? std::atoi(argv[3]) : 0;

  int failures = 0;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (only != 0 && only != number) continue;
    Outcome out;
    try {
      out = kCriteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    std::printf("%s criterion %d (%s): %s\n", out.pass ? "PASS" : "FAIL", number, kCriteria[i].first.c_str(),
                out.detail.str().c_str());
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
