#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ssdbench/errors.hpp"
#include "ssdbench/synth.hpp"

using namespace ssdbench;

namespace {

SceneSpec spec_with(std::vector<SyntheticObject> objects, VoxelDomain domain = VoxelDomain::centered({10, 10, 10}, 1.0)) {
  SceneSpec s;
  s.domain = domain;
  s.room_min = Vec3(-5, -5, -5);
  s.room_max = Vec3(5, 5, 5);
  s.objects = std::move(objects);
  return s;
}

}  // namespace

TEST_CASE("analytic distributions integrate the boxes exactly") {
  const auto dom = VoxelDomain::centered({10, 10, 10}, 1.0);
  const auto one = make_scene(spec_with({{"a", Vec3(0.5, 0.5, 0.5), Vec3(1, 1, 1), 1.0}}), 1);
  const auto& d = one.analytic_ssd("a");
  CHECK(d.values[*dom.cell_of(Vec3(0.5, 0.5, 0.5))] == 1.0);

  const auto two = make_scene(
      spec_with({{"a", Vec3(0.5, 0.5, 0.5), Vec3(1, 1, 1), 2.0}, {"a", Vec3(-2.5, 0.5, 0.5), Vec3(1, 1, 1), 2.0}}), 1);
  CHECK(two.analytic_ssd("a").values[*dom.cell_of(Vec3(0.5, 0.5, 0.5))] == 0.5);
  CHECK(two.analytic_ssd("a").values[*dom.cell_of(Vec3(-2.5, 0.5, 0.5))] == 0.5);

  // Straddling x = 0 with 30% on the negative side.
  const auto split = make_scene(spec_with({{"a", Vec3(0.2, 0.5, 0.5), Vec3(1, 1, 1), 1.0}}), 1);
  CHECK(split.analytic_ssd("a").values[*dom.cell_of(Vec3(-0.5, 0.5, 0.5))] == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(split.analytic_ssd("a").values[*dom.cell_of(Vec3(0.5, 0.5, 0.5))] == doctest::Approx(0.7).epsilon(1e-14));

  CHECK(make_scene(spec_with({{"a", Vec3(0, 0, 0), Vec3(1, 1, 1), 1.0}, {"b", Vec3(1, 1, 1), Vec3(2, 2, 2), 1.0}}), 1)
            .labels() == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(make_scene(spec_with({{"a", Vec3(4.8, 0, 0), Vec3(1, 1, 1), 1.0}}), 1), InvalidSpec);
  CHECK_THROWS_AS(make_scene(spec_with({{"a", Vec3(0, 0, 0), Vec3(0, 1, 1), 1.0}}), 1), InvalidSpec);
  CHECK_THROWS_AS(make_scene(spec_with({{"a", Vec3(0, 0, 0), Vec3(1, 1, 1), 0.0}}), 1), InvalidSpec);
}

TEST_CASE("analytic masses agree with Monte-Carlo volumes") {
  const auto spec = random_scene_spec({"a"}, 3, VoxelDomain::centered({6, 6, 6}, 1.0), 77);
  const auto scene = make_scene(spec, 77);
  const auto& dom = spec.domain;
  std::vector<double> hist(dom.size(), 0.0);
  double wsum = 0;
  for (const auto& o : spec.objects) wsum += o.weight;
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const int n = 2000000;
  for (const auto& o : spec.objects) {
    const int m = static_cast<int>(n * o.weight / wsum);
    for (int i = 0; i < m; ++i) {
      const Vec3 p = o.center + Vec3(u(rng) * o.extent.x(), u(rng) * o.extent.y(), u(rng) * o.extent.z());
      if (auto c = dom.cell_of(p)) hist[*c] += 1.0 / n;
    }
  }
  for (std::size_t i = 0; i < hist.size(); ++i) CHECK(std::abs(hist[i] - scene.analytic_ssd("a").values[i]) < 1e-3);
}

TEST_CASE("sampling") {
  const auto scene = make_scene(spec_with({{"a", Vec3(0, 0, 3), Vec3(1e-9, 1e-9, 1e-9), 1.0}}), 3);
  const auto cam = synthetic_camera(ImageDomain{36, 36, 14, 14});
  SimulatedSampler s;
  s.scene = &scene;
  s.detection_noise = 0.0;
  s.seed = 9;
  const auto a = draw_sample(s, cam, 0), b = draw_sample(s, cam, 5);
  REQUIRE(a.detections.size() == 1);
  CHECK(a.detections[0].confidence == 1.0);
  CHECK(a.detections[0].bbox.x_min == doctest::Approx(b.detections[0].bbox.x_min).epsilon(1e-6));
  CHECK(a.cloud.size() == 48);

  s.miss_rate = 1.0;
  for (int i = 0; i < 10; ++i) {
    const auto m = draw_sample(s, cam, i);
    CHECK(m.detections.empty());
    for (const auto& p : m.cloud.points) CHECK(p.confidence == 0.0);
  }
  s.miss_rate = 1.5;
  CHECK_THROWS_AS(draw_sample(s, cam, 0), InvalidInput);

  SimulatedSampler r;
  const auto mix = make_scene(random_scene_spec({"a", "b"}, 2, VoxelDomain::centered({10, 10, 10}, 1.0), 4), 4);
  r.scene = &mix;
  r.seed = 42;
  const auto x = draw_sample(r, cam, 17), y = draw_sample(r, cam, 17);
  CHECK(x.cloud.size() == y.cloud.size());
  for (std::size_t i = 0; i < x.cloud.size(); ++i) {
    CHECK(x.cloud.points[i].position == y.cloud.points[i].position);
    CHECK(x.cloud.points[i].confidence == y.cloud.points[i].confidence);
  }

  // Two cell-aligned 2x2x1 components: eight support cells keep the expected
  // sampling TV at 10,000 draws near 0.011.
  const auto blocks = make_scene(spec_with({{"a", Vec3(-2, -2, 2.5), Vec3(2, 2, 1), 0.3},
                                            {"a", Vec3(2, 1, -1.5), Vec3(2, 2, 1), 0.7}}),
                                 5);
  r.scene = &blocks;
  const auto samples = draw_samples(r, cam, 10000);
  const auto hist = instance_histogram(samples, blocks.spec.domain, "a");
  CHECK(total_variation(hist, blocks.analytic_ssd("a").values) < 0.02);
}

TEST_CASE("analytic metrics") {
  const auto dom = VoxelDomain::centered({10, 10, 10}, 1.0);
  const auto scene = make_scene(spec_with({{"a", Vec3(0.5, 0.5, 0.5), Vec3(1, 1, 1), 1.0}}), 1);
  const auto& g = scene.analytic_ssd("a");
  const auto self = analytic_metrics(scene, g);
  CHECK(self.delta == std::optional<double>(0.0));
  CHECK(self.h_cross == self.h);

  const SpatialDistribution u{dom, std::vector<double>(1000, 1e-3), "a", Task::k3D};
  const auto um = analytic_metrics(scene, u);
  CHECK(std::abs(um.h - 1.0) < 1e-9);
  CHECK_FALSE(um.y_hat);

  std::vector<double> off(1000, 0.0);
  off[*dom.cell_of(Vec3(1.5, 0.5, 0.5))] = 1.0;
  const auto om = analytic_metrics(scene, SpatialDistribution{dom, off, "a", Task::k3D});
  CHECK(std::abs(*om.delta - 1.0 / std::sqrt(243.0)) < 1e-12);
  CHECK(std::abs(*om.delta - 0.0642) < 1e-4);

  CHECK_THROWS_AS(analytic_metrics(scene, SpatialDistribution{dom, off, "zzz", Task::k3D}), InvalidInput);
  const SpatialDistribution wrong{VoxelDomain::centered({5, 5, 5}, 1.0), std::vector<double>(125, 0.008), "a", Task::k3D};
  CHECK_THROWS_AS(analytic_metrics(scene, wrong), InvalidInput);
}
