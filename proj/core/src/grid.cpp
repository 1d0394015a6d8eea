#include "ssdbench/grid.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "ssdbench/errors.hpp"

namespace ssdbench {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::k2D: return "2d";
    case Task::k25D: return "2.5d";
    case Task::k3D: return "3d";
  }
  return "?";
}

Task parse_task(std::string_view text) {
  if (text == "2d" || text == "2D") return Task::k2D;
  if (text == "2.5d" || text == "2.5D") return Task::k25D;
  if (text == "3d" || text == "3D") return Task::k3D;
  throw InvalidInput("unknown task '" + std::string(text) + "' (expected 2d, 2.5d or 3d)");
}

void ImageDomain::validate() const {
  if (height <= 0 || width_center <= 0) throw InvalidInput("image domain extent must be positive");
  if (left_margin < 0 || right_margin < 0) throw InvalidInput("image margins must be non-negative");
  if (width_full() <= width_center) throw InvalidInput("image domain must be wider than its center crop");
}

VoxelDomain VoxelDomain::centered(std::array<int, 3> resolution, double cell_size) {
  VoxelDomain d;
  d.resolution = resolution;
  d.cell_size = cell_size;
  for (int a = 0; a < 3; ++a) d.camera_anchor[a] = resolution[a] / 2;
  return d;
}

VoxelDomain VoxelDomain::frustum(std::array<int, 3> resolution, double cell_size) {
  VoxelDomain d = centered(resolution, cell_size);
  d.camera_anchor[2] -= 5.0 / cell_size;
  return d;
}

std::optional<std::size_t> VoxelDomain::cell_of(const Vec3& p) const {
  std::array<int, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double c = std::floor(p[a] / cell_size + camera_anchor[a]);
    if (!(c >= 0.0) || c >= resolution[a]) return std::nullopt;
    idx[a] = static_cast<int>(c);
  }
  return (static_cast<std::size_t>(idx[0]) * static_cast<std::size_t>(resolution[1]) +
          static_cast<std::size_t>(idx[1])) *
             static_cast<std::size_t>(resolution[2]) +
         static_cast<std::size_t>(idx[2]);
}

void VoxelDomain::validate() const {
  for (const int r : resolution) {
    if (r <= 0) throw InvalidInput("voxel resolution must be positive");
  }
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) throw InvalidInput("voxel cell size must be positive");
  for (const double a : camera_anchor) {
    if (!std::isfinite(a)) throw InvalidInput("voxel camera anchor must be finite");
  }
}

std::array<int, 3> GridShape::unflatten(std::size_t index) const {
  const auto e1 = static_cast<std::size_t>(extent[1]);
  const auto e2 = static_cast<std::size_t>(extent[2]);
  return {static_cast<int>(index / (e1 * e2)), static_cast<int>((index / e2) % e1),
          static_cast<int>(index % e2)};
}

double GridShape::diameter() const {
  double s = 0.0;
  for (const int e : extent) s += static_cast<double>(e - 1) * static_cast<double>(e - 1);
  return std::sqrt(s);
}

GridShape shape_of(const Domain& domain) {
  return std::visit(
      [](const auto& d) -> GridShape {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, ImageDomain>) {
          return GridShape{2, {d.height, d.width_full(), 1}};
        } else {
          return GridShape{3, d.resolution};
        }
      },
      domain);
}

std::size_t domain_size(const Domain& domain) {
  return std::visit([](const auto& d) { return d.size(); }, domain);
}

void validate_domain(const Domain& domain) {
  std::visit([](const auto& d) { d.validate(); }, domain);
}

void SpatialDistribution::validate(double tol) const {
  validate_domain(domain);
  if (values.size() != domain_size(domain)) {
    throw InvalidInput("distribution has " + std::to_string(values.size()) +
                       " values but its domain has " + std::to_string(domain_size(domain)) + " cells");
  }
  double sum = 0.0;
  for (const double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("distribution values must be finite and non-negative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw InvalidInput("distribution does not sum to 1 (sum = " + std::to_string(sum) + ")");
  }
}

void Thresholds::validate() const {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be > 1");
  if (!(tau_conf >= 0.0 && tau_conf <= 1.0)) throw InvalidInput("tau_conf must lie in [0,1]");
}

std::vector<double> softmax(std::span<const double> raw) {
  if (raw.empty()) throw InvalidInput("softmax of an empty grid");
  double hi = -std::numeric_limits<double>::infinity();
  for (const double r : raw) {
    if (!std::isfinite(r)) throw InvalidInput("softmax input must be finite");
    hi = std::max(hi, r);
  }
  std::vector<double> out(raw.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = std::exp(raw[i] - hi);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

SpatialDistribution softmax_normalize(const ConfidenceGrid& grid) {
  validate_domain(grid.domain);
  if (grid.raw.size() != domain_size(grid.domain)) {
    throw InvalidInput("confidence grid size does not match its domain");
  }
  return SpatialDistribution{grid.domain, softmax(grid.raw), grid.label, grid.kind};
}

std::vector<std::size_t> threshold(const SpatialDistribution& dist, const Thresholds& thr) {
  const double tau = thr.tau(dist.values.size());
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < dist.values.size(); ++i) {
    if (dist.values[i] > tau) cells.push_back(i);
  }
  return cells;
}

std::vector<double> pool_nonzero_mean(const ConfidenceCloud& camera_cloud, const VoxelDomain& domain,
                                      std::string_view label) {
  domain.validate();
  std::unordered_map<std::size_t, std::vector<double>> buckets;
  for (const auto& p : camera_cloud.points) {
    if (!label.empty() && p.label != label) continue;
    if (p.confidence == 0.0) continue;
    if (const auto cell = domain.cell_of(p.position)) buckets[*cell].push_back(p.confidence);
  }
  std::vector<double> raw(domain.size(), 0.0);
  for (auto& [cell, confs] : buckets) {
    std::sort(confs.begin(), confs.end());
    double sum = 0.0;
    for (const double c : confs) sum += c;
    raw[cell] = sum / static_cast<double>(confs.size());
  }
  return raw;
}

}  // namespace ssdbench
