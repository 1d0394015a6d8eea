#include "ssdbench/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "ssdbench/errors.hpp"

namespace ssdbench {

std::vector<std::string> SyntheticScene::labels() const {
  std::vector<std::string> out;
  for (const auto& [label, _] : analytic) out.push_back(label);
  return out;
}

const SpatialDistribution& SyntheticScene::analytic_ssd(const std::string& label) const {
  const auto it = analytic.find(label);
  if (it == analytic.end()) throw InvalidInput("synthetic scene has no object '" + label + "'");
  return it->second;
}

namespace {

double overlap(double lo_a, double hi_a, double lo_b, double hi_b) {
  return std::max(0.0, std::min(hi_a, hi_b) - std::max(lo_a, lo_b));
}

void add_box_mass(const SyntheticObject& obj, double weight, const VoxelDomain& d, std::vector<double>& mass) {
  const Vec3 lo = obj.center - 0.5 * obj.extent;
  const Vec3 hi = obj.center + 0.5 * obj.extent;
  const double volume = obj.extent.prod();
  std::array<int, 3> first{};
  std::array<int, 3> last{};
  for (int a = 0; a < 3; ++a) {
    first[a] = std::max(0, static_cast<int>(std::floor(lo[a] / d.cell_size + d.camera_anchor[a])));
    last[a] = std::min(d.resolution[a] - 1, static_cast<int>(std::floor(hi[a] / d.cell_size + d.camera_anchor[a])));
  }
  auto cell_lo = [&](int a, int i) { return (i - d.camera_anchor[a]) * d.cell_size; };
  for (int i = first[0]; i <= last[0]; ++i) {
    const double ox = overlap(lo.x(), hi.x(), cell_lo(0, i), cell_lo(0, i + 1));
    for (int j = first[1]; j <= last[1]; ++j) {
      const double oy = overlap(lo.y(), hi.y(), cell_lo(1, j), cell_lo(1, j + 1));
      for (int k = first[2]; k <= last[2]; ++k) {
        const double oz = overlap(lo.z(), hi.z(), cell_lo(2, k), cell_lo(2, k + 1));
        const double v = ox * oy * oz;
        if (v > 0.0) {
          mass[(static_cast<std::size_t>(i) * d.resolution[1] + j) * d.resolution[2] + k] += weight * v / volume;
        }
      }
    }
  }
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

SyntheticScene make_scene(const SceneSpec& spec, std::uint64_t seed) {
  try {
    spec.domain.validate();
  } catch (const InvalidInput& e) {
    throw InvalidSpec(e.what());
  }
  if (!(spec.room_max.array() > spec.room_min.array()).all()) throw InvalidSpec("room has non-positive extent");

  std::map<std::string, double> total_weight;
  for (const auto& obj : spec.objects) {
    if (!(obj.extent.array() > 0.0).all()) throw InvalidSpec("object '" + obj.label + "' has non-positive extent");
    if (!(obj.weight > 0.0)) throw InvalidSpec("object '" + obj.label + "' has non-positive weight");
    const Vec3 lo = obj.center - 0.5 * obj.extent;
    const Vec3 hi = obj.center + 0.5 * obj.extent;
    if ((lo.array() < spec.room_min.array()).any() || (hi.array() > spec.room_max.array()).any()) {
      throw InvalidSpec("object '" + obj.label + "' lies outside the room");
    }
    total_weight[obj.label] += obj.weight;
  }

  SyntheticScene scene{spec, seed, {}};
  for (const auto& [label, weight_sum] : total_weight) {
    std::vector<double> mass(spec.domain.size(), 0.0);
    for (const auto& obj : spec.objects) {
      if (obj.label == label) add_box_mass(obj, obj.weight / weight_sum, spec.domain, mass);
    }
    double in_grid = 0.0;
    for (const double m : mass) in_grid += m;
    if (!(in_grid > 0.0)) throw InvalidSpec("object '" + label + "' has no mass inside the voxel grid");
    for (double& m : mass) m /= in_grid;
    scene.analytic.emplace(label, SpatialDistribution{spec.domain, std::move(mass), label, Task::k3D});
  }
  return scene;
}

SceneSpec random_scene_spec(const std::vector<std::string>& labels, int components_per_label,
                            const VoxelDomain& domain, std::uint64_t seed) {
  SceneSpec spec;
  spec.domain = domain;
  for (int a = 0; a < 3; ++a) {
    spec.room_min[a] = -domain.camera_anchor[a] * domain.cell_size;
    spec.room_max[a] = (domain.resolution[a] - domain.camera_anchor[a]) * domain.cell_size;
  }
  auto rng = stream(seed, 0xFFFFFFFFu);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& label : labels) {
    for (int c = 0; c < components_per_label; ++c) {
      SyntheticObject obj;
      obj.label = label;
      for (int a = 0; a < 3; ++a) {
        const double span = spec.room_max[a] - spec.room_min[a];
        obj.extent[a] = domain.cell_size * (1.0 + 2.0 * unit(rng));
        obj.extent[a] = std::min(obj.extent[a], span);
        const double lo = spec.room_min[a] + 0.5 * obj.extent[a];
        const double hi = spec.room_max[a] - 0.5 * obj.extent[a];
        obj.center[a] = lo + (hi - lo) * unit(rng);
      }
      obj.weight = 0.5 + unit(rng);
      spec.objects.push_back(obj);
    }
  }
  return spec;
}

void SimulatedSampler::validate() const {
  if (scene == nullptr) throw InvalidInput("sampler has no scene");
  if (!(miss_rate >= 0.0 && miss_rate <= 1.0)) throw InvalidInput("miss_rate must lie in [0,1]");
  if (!(detection_noise >= 0.0)) throw InvalidInput("detection noise must be non-negative");
  if (!(instance_size > 0.0)) throw InvalidInput("instance size must be positive");
  if (surface_points < 0) throw InvalidInput("surface point count must be non-negative");
}

CameraModel synthetic_camera(const ImageDomain& domain) {
  CameraModel cam;
  cam.width = domain.width_full();
  cam.height = domain.height;
  cam.fx = cam.fy = 0.5 * domain.width_center;
  cam.cx = 0.5 * cam.width;
  cam.cy = 0.5 * cam.height;
  return cam;
}

namespace {

std::optional<BBox> project_cube(const Vec3& center_cam, double size, const CameraModel& cam) {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 off((corner & 1) ? 0.5 : -0.5, (corner & 2) ? 0.5 : -0.5, (corner & 4) ? 0.5 : -0.5);
    const Vec3 p = center_cam + size * off;
    if (!(p.z() > kDefaultNearPlane)) return std::nullopt;
    const double u = cam.fx * p.x() / p.z() + cam.cx;
    const double v = cam.fy * p.y() / p.z() + cam.cy;
    x0 = std::min(x0, u);
    x1 = std::max(x1, u);
    y0 = std::min(y0, v);
    y1 = std::max(y1, v);
  }
  BBox box{std::max(0.0, x0), std::max(0.0, y0), std::min<double>(cam.width, x1), std::min<double>(cam.height, y1)};
  if (!(box.x_min < box.x_max) || !(box.y_min < box.y_max)) return std::nullopt;
  return box;
}

}  // namespace

SyntheticSample draw_sample(const SimulatedSampler& sampler, const CameraModel& cam, std::uint64_t draw_index) {
  sampler.validate();
  const auto& scene = *sampler.scene;
  auto rng = stream(sampler.seed, draw_index);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 1.0);

  SyntheticSample sample;
  const std::string image_id = "sample" + std::to_string(draw_index);
  for (const auto& label : scene.labels()) {
    std::vector<const SyntheticObject*> comps;
    std::vector<double> weights;
    for (const auto& obj : scene.spec.objects) {
      if (obj.label == label) {
        comps.push_back(&obj);
        weights.push_back(obj.weight);
      }
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    const SyntheticObject& comp = *comps[pick(rng)];

    PlacedInstance inst;
    inst.label = label;
    for (int a = 0; a < 3; ++a) inst.position[a] = comp.center[a] + (unit(rng) - 0.5) * comp.extent[a];
    inst.confidence = std::clamp(1.0 - std::abs(sampler.detection_noise * jitter(rng)), 0.0, 1.0);
    const bool missed = unit(rng) < sampler.miss_rate;
    const Vec3 center_cam = cam.pose.apply(inst.position);
    const auto box = project_cube(center_cam, sampler.instance_size, cam);
    inst.detected = !missed && box.has_value();
    if (inst.detected) sample.detections.push_back(Detection{image_id, *box, label, inst.confidence});

    const double point_conf = missed ? 0.0 : inst.confidence;
    for (int s = 0; s < sampler.surface_points; ++s) {
      // Six faces of equal area: pick one, then a uniform point on it.
      const int face = static_cast<int>(unit(rng) * 6.0) % 6;
      const int axis = face / 2;
      Vec3 off(unit(rng) - 0.5, unit(rng) - 0.5, unit(rng) - 0.5);
      off[axis] = (face % 2 == 0) ? -0.5 : 0.5;
      const Vec3 world = inst.position + sampler.instance_size * off;
      sample.cloud.points.push_back({cam.pose.apply(world), point_conf, label});
    }
    sample.instances.push_back(std::move(inst));
  }
  return sample;
}

std::vector<SyntheticSample> draw_samples(const SimulatedSampler& sampler, const CameraModel& cam,
                                          std::size_t count) {
  std::vector<SyntheticSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(draw_sample(sampler, cam, i));
  return out;
}

std::vector<double> instance_histogram(const std::vector<SyntheticSample>& samples, const VoxelDomain& domain,
                                       const std::string& label) {
  std::vector<double> hist(domain.size(), 0.0);
  double n = 0.0;
  for (const auto& s : samples) {
    for (const auto& inst : s.instances) {
      if (inst.label != label) continue;
      if (const auto cell = domain.cell_of(inst.position)) {
        hist[*cell] += 1.0;
        n += 1.0;
      }
    }
  }
  if (n > 0.0) {
    for (double& h : hist) h /= n;
  }
  return hist;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("total_variation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return 0.5 * s;
}

PairMetrics analytic_metrics(const SyntheticScene& scene, const SpatialDistribution& predicted,
                             const Thresholds& thr) {
  return evaluate_pair(scene.analytic_ssd(predicted.label), predicted, thr);
}

}  // namespace ssdbench
