#include "ssdbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssdbench/errors.hpp"
#include "ssdbench/kdtree.hpp"

namespace ssdbench {

namespace {

double log_cells(std::size_t n) {
  if (n < 2) throw InvalidInput("normalized entropy needs at least two cells");
  return std::log(static_cast<double>(n));
}

void require_same_domain(const SpatialDistribution& a, const SpatialDistribution& b) {
  if (!(a.domain == b.domain) || a.values.size() != b.values.size()) {
    throw InvalidInput("distributions for '" + a.label + "' are defined on different domains");
  }
}

// Sliding-window maximum along one axis, window [i - back, i + fwd] clipped
// to the grid (values are non-negative, so clipping equals zero padding).
std::vector<double> max_along_axis(const std::vector<double>& in, const GridShape& shape, int axis, int back,
                                   int fwd) {
  std::vector<double> out(in.size(), 0.0);
  const auto& e = shape.extent;
  const int len = e[axis];
  for (int i = 0; i < e[0]; ++i) {
    for (int j = 0; j < e[1]; ++j) {
      for (int k = 0; k < e[2]; ++k) {
        const CellIndex at{i, j, k};
        const int pos = at[axis];
        const int lo = std::max(0, pos - back);
        const int hi = std::min(len - 1, pos + fwd);
        double m = 0.0;
        CellIndex probe = at;
        for (int q = lo; q <= hi; ++q) {
          probe[axis] = q;
          m = std::max(m, in[shape.flat(probe[0], probe[1], probe[2])]);
        }
        out[shape.flat(i, j, k)] = m;
      }
    }
  }
  return out;
}

std::vector<double> thresholded_values(const SpatialDistribution& dist, double tau) {
  std::vector<double> t(dist.values.size());
  std::transform(dist.values.begin(), dist.values.end(), t.begin(),
                 [tau](double v) { return v > tau ? v : 0.0; });
  return t;
}

void mark_peaks(const std::vector<double>& t, const GridShape& shape, int kernel_size, std::vector<bool>& flags) {
  if (kernel_size < 1) throw InvalidInput("kernel sizes must be positive");
  const int back = kernel_size / 2;
  const int fwd = kernel_size - 1 - back;
  std::vector<double> m = t;
  for (int axis = 0; axis < 3; ++axis) {
    if (shape.extent[axis] > 1) m = max_along_axis(m, shape, axis, back, fwd);
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0 && t[i] == m[i]) flags[i] = true;
  }
}

PeakSet collect(const std::vector<bool>& flags, const GridShape& shape) {
  PeakSet out{shape, {}};
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (flags[i]) out.cells.push_back(shape.unflatten(i));
  }
  return out;
}

}  // namespace

double entropy(const SpatialDistribution& d) {
  const double norm = log_cells(d.values.size());
  double s = 0.0;
  for (const double p : d.values) {
    if (p > 0.0) s += p * std::log(p);
  }
  return -s / norm;
}

double cross_entropy(const SpatialDistribution& g, const SpatialDistribution& d) {
  require_same_domain(g, d);
  const double norm = log_cells(g.values.size());
  double s = 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const double p = g.values[i];
    if (p > 0.0) s += p * std::log(std::max(d.values[i], kCrossEntropyFloor));
  }
  return -s / norm;
}

PeakSet find_peaks(const SpatialDistribution& dist, const Thresholds& thr, std::span<const int> kernel_sizes) {
  const GridShape shape = dist.shape();
  const auto t = thresholded_values(dist, thr.tau(dist.values.size()));
  std::vector<bool> flags(t.size(), false);
  for (const int s : kernel_sizes) mark_peaks(t, shape, s, flags);
  return collect(flags, shape);
}

PeakSet find_peaks_single(const SpatialDistribution& dist, const Thresholds& thr, int kernel_size) {
  const std::array<int, 1> one{kernel_size};
  return find_peaks(dist, thr, one);
}

double nn_distance(const PeakSet& truth, const PeakSet& predicted) {
  if (truth.empty()) throw InvalidInput("nn_distance: ground truth has no peaks");
  if (!(truth.shape == predicted.shape)) throw InvalidInput("nn_distance: peak sets on different grids");
  const double diam = truth.shape.diameter();
  if (!(diam > 0.0)) throw InvalidInput("nn_distance: grid has zero diameter");
  if (predicted.empty()) return std::numeric_limits<double>::infinity();

  std::vector<KdTree<3>::Point> pts;
  pts.reserve(predicted.size());
  for (const auto& c : predicted.cells) pts.push_back({double(c[0]), double(c[1]), double(c[2])});
  const KdTree<3> tree(std::move(pts));

  double sum = 0.0;
  for (const auto& c : truth.cells) {
    sum += std::sqrt(tree.nearest({double(c[0]), double(c[1]), double(c[2])}).squared_distance);
  }
  return sum / static_cast<double>(truth.size()) / diam;
}

std::vector<Region> standard_regions(const ImageDomain& domain) {
  const int h = domain.height;
  const int a = domain.left_margin;
  const int b = a + domain.width_center;
  return {{0, h, 0, a}, {0, h, a, b}, {0, h, b, domain.width_full()}};
}

namespace {

const ImageDomain& image_domain_of(const SpatialDistribution& d) {
  const auto* img = std::get_if<ImageDomain>(&d.domain);
  if (img == nullptr) throw InvalidInput("region metrics need a 2D image domain");
  return *img;
}

void require_partition(const ImageDomain& domain, const std::vector<Region>& regions) {
  const int w = domain.width_full();
  std::vector<unsigned char> cover(domain.size(), 0);
  for (const auto& r : regions) {
    if (r.row_begin < 0 || r.col_begin < 0 || r.row_end > domain.height || r.col_end > w ||
        r.row_begin > r.row_end || r.col_begin > r.col_end) {
      throw InvalidInput("region outside the image domain");
    }
    for (int row = r.row_begin; row < r.row_end; ++row) {
      for (int col = r.col_begin; col < r.col_end; ++col) {
        auto& c = cover[static_cast<std::size_t>(row) * w + col];
        if (c != 0) throw InvalidInput("regions overlap");
        c = 1;
      }
    }
  }
  if (std::find(cover.begin(), cover.end(), 0) != cover.end()) {
    throw InvalidInput("regions do not cover the image domain");
  }
}

}  // namespace

std::vector<bool> region_labels(const SpatialDistribution& dist, const Thresholds& thr,
                                const std::vector<Region>& regions) {
  const auto& domain = image_domain_of(dist);
  const int w = domain.width_full();
  const double tau = thr.tau(dist.values.size());
  std::vector<bool> labels;
  labels.reserve(regions.size());
  for (const auto& r : regions) {
    bool hit = false;
    for (int row = r.row_begin; row < r.row_end && !hit; ++row) {
      for (int col = r.col_begin; col < r.col_end; ++col) {
        if (dist.values[static_cast<std::size_t>(row) * w + col] > tau) {
          hit = true;
          break;
        }
      }
    }
    labels.push_back(hit);
  }
  return labels;
}

double region_accuracy(const SpatialDistribution& g, const SpatialDistribution& d, const Thresholds& thr,
                       const std::vector<Region>& regions) {
  require_same_domain(g, d);
  if (regions.empty()) throw InvalidInput("region_accuracy: no regions");
  require_partition(image_domain_of(g), regions);
  const auto yg = region_labels(g, thr, regions);
  const auto yd = region_labels(d, thr, regions);
  int agree = 0;
  for (std::size_t i = 0; i < regions.size(); ++i) agree += (yg[i] == yd[i]) ? 1 : 0;
  return static_cast<double>(agree) / static_cast<double>(regions.size());
}

PairMetrics evaluate_pair(const SpatialDistribution& g, const SpatialDistribution& d, const Thresholds& thr,
                          std::span<const int> kernel_sizes) {
  require_same_domain(g, d);
  thr.validate();
  PairMetrics m;
  m.h = entropy(d);
  m.h_cross = cross_entropy(g, d);
  m.y = detection_label(threshold(g, thr));
  m.y_hat = detection_label(threshold(d, thr));
  if (m.y) {
    m.delta = nn_distance(find_peaks(g, thr, kernel_sizes), find_peaks(d, thr, kernel_sizes));
  }
  if (const auto* img = std::get_if<ImageDomain>(&g.domain)) {
    m.region_accuracy = region_accuracy(g, d, thr, standard_regions(*img));
  }
  return m;
}

double fnr(std::span<const PairMetrics> pairs) {
  int positives = 0;
  int misses = 0;
  for (const auto& p : pairs) {
    if (!p.y) continue;
    ++positives;
    if (!p.y_hat) ++misses;
  }
  if (positives == 0) throw UndefinedMetric("FNR undefined: no pair has a non-empty thresholded ground truth");
  return static_cast<double>(misses) / static_cast<double>(positives);
}

}  // namespace ssdbench
