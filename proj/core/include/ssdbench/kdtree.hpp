#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>
#include <vector>

namespace ssdbench {

/// Static k-d tree over points in R^Dim. Built once, queried many times.
/// Distances are returned squared; callers take the root when needed.
template <std::size_t Dim>
class KdTree {
 public:
  using Point = std::array<double, Dim>;

  struct Neighbor {
    std::size_t index;
    double squared_distance;
  };

  KdTree() = default;

  explicit KdTree(std::vector<Point> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(points_.size());
    if (!points_.empty()) {
      root_ = build(0, order_.size());
    }
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point& point(std::size_t i) const { return points_[i]; }

  /// Nearest stored point. Undefined on an empty tree.
  Neighbor nearest(const Point& query) const {
    Neighbor best{0, std::numeric_limits<double>::infinity()};
    search_nearest(root_, query, best);
    return best;
  }

  /// Up to k nearest points sorted by distance, skipping stored index `exclude`.
  std::vector<Neighbor> k_nearest(const Point& query, std::size_t k,
                                  std::size_t exclude = kNone) const {
    std::vector<Neighbor> out;
    if (k == 0 || empty()) return out;
    Heap heap;
    search_k(root_, query, k, exclude, heap);
    out.reserve(heap.size());
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

 private:
  struct Node {
    std::size_t point;  // index into points_
    std::size_t axis;
    std::ptrdiff_t left = -1;
    std::ptrdiff_t right = -1;
  };

  struct FartherFirst {
    bool operator()(const Neighbor& a, const Neighbor& b) const {
      return a.squared_distance < b.squared_distance;
    }
  };
  using Heap = std::priority_queue<Neighbor, std::vector<Neighbor>, FartherFirst>;

  static double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < Dim; ++d) {
      const double diff = a[d] - b[d];
      s += diff * diff;
    }
    return s;
  }

  std::size_t widest_axis(std::size_t begin, std::size_t end) const {
    std::size_t best_axis = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < Dim; ++d) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        lo = std::min(lo, points_[order_[i]][d]);
        hi = std::max(hi, points_[order_[i]][d]);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_axis = d;
      }
    }
    return best_axis;
  }

  std::ptrdiff_t build(std::size_t begin, std::size_t end) {
    if (begin >= end) return -1;
    const std::size_t axis = widest_axis(begin, end);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
    const auto id = static_cast<std::ptrdiff_t>(nodes_.size());
    nodes_.push_back(Node{order_[mid], axis});
    const auto left = build(begin, mid);
    const auto right = build(mid + 1, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search_nearest(std::ptrdiff_t id, const Point& q, Neighbor& best) const {
    if (id < 0) return;
    const Node& node = nodes_[id];
    const Point& p = points_[node.point];
    const double d2 = squared_distance(p, q);
    if (d2 < best.squared_distance) best = {node.point, d2};
    const double delta = q[node.axis] - p[node.axis];
    const auto near_side = delta < 0.0 ? node.left : node.right;
    const auto far_side = delta < 0.0 ? node.right : node.left;
    search_nearest(near_side, q, best);
    if (delta * delta <= best.squared_distance) search_nearest(far_side, q, best);
  }

  void search_k(std::ptrdiff_t id, const Point& q, std::size_t k, std::size_t exclude,
                Heap& heap) const {
    if (id < 0) return;
    const Node& node = nodes_[id];
    const Point& p = points_[node.point];
    if (node.point != exclude) {
      const double d2 = squared_distance(p, q);
      if (heap.size() < k) {
        heap.push({node.point, d2});
      } else if (d2 < heap.top().squared_distance) {
        heap.pop();
        heap.push({node.point, d2});
      }
    }
    const double delta = q[node.axis] - p[node.axis];
    const auto near_side = delta < 0.0 ? node.left : node.right;
    const auto far_side = delta < 0.0 ? node.right : node.left;
    search_k(near_side, q, k, exclude, heap);
    if (heap.size() < k || delta * delta <= heap.top().squared_distance) {
      search_k(far_side, q, k, exclude, heap);
    }
  }

  std::vector<Point> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::ptrdiff_t root_ = -1;
};

}  // namespace ssdbench
