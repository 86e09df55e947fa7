#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "scga/point_cloud.hpp"

namespace scga {

/// kd-tree over a point cloud for radius and nearest-neighbor queries.
/// The index copies the points at construction; queries are read-only and
/// safe to run concurrently. Returned neighbor lists are sorted by original
/// point index, so downstream accumulations are order-deterministic.
class SpatialIndex {
 public:
  explicit SpatialIndex(const PointCloud& cloud) {
    cloud.validate();
    const std::size_t n = cloud.size();
    pts_.resize(n);
    idx_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pts_[i] = cloud.points[i];
      idx_[i] = i;
    }
    nodes_.reserve(2 * n / kLeafSize + 2);
    root_ = build(0, n);
  }

  std::size_t size() const { return pts_.size(); }

  /// Exactly the indices i with ||p_i - q|| <= radius, ascending.
  std::vector<std::size_t> radius_neighbors(const Eigen::Vector3d& q,
                                            double radius) const {
    std::vector<std::size_t> out;
    radius_neighbors(q, radius, out);
    return out;
  }

  void radius_neighbors(const Eigen::Vector3d& q, double radius,
                        std::vector<std::size_t>& out) const {
    if (!(radius > 0.0))
      throw std::domain_error("radius_neighbors: radius must be positive");
    out.clear();
    search_radius(root_, q, radius, radius * radius, out);
    std::sort(out.begin(), out.end());
  }

  /// Index of the point nearest to q; ties resolve to the smallest index.
  std::size_t nearest(const Eigen::Vector3d& q) const {
    std::size_t best_idx = std::numeric_limits<std::size_t>::max();
    double best_d2 = std::numeric_limits<double>::infinity();
    search_nearest(root_, q, best_idx, best_d2);
    return best_idx;
  }

 private:
  static constexpr std::size_t kLeafSize = 16;
  static constexpr std::uint32_t kNone = 0xffffffffu;

  struct Node {
    std::uint32_t begin = 0, end = 0;     // leaf payload range in pts_
    std::uint32_t left = kNone, right = kNone;
    double split = 0.0;
    int axis = -1;                        // -1 marks a leaf
  };

  std::uint32_t build(std::size_t begin, std::size_t end) {
    Node node;
    node.begin = static_cast<std::uint32_t>(begin);
    node.end = static_cast<std::uint32_t>(end);
    if (end - begin > kLeafSize) {
      Eigen::Vector3d lo = pts_[begin], hi = pts_[begin];
      for (std::size_t i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(pts_[i]);
        hi = hi.cwiseMax(pts_[i]);
      }
      int axis = 0;
      (hi - lo).maxCoeff(&axis);
      if (hi[axis] > lo[axis]) {
        const std::size_t mid = begin + (end - begin) / 2;
        sort_range(begin, mid, end, axis);
        node.axis = axis;
        node.split = pts_[mid][axis];
        const std::uint32_t self =
            static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back(node);
        const std::uint32_t left = build(begin, mid);
        const std::uint32_t right = build(mid, end);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
      }
      // All points coincide along every axis; keep as one leaf.
    }
    const std::uint32_t self = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(node);
    return self;
  }

  void sort_range(std::size_t begin, std::size_t mid, std::size_t end,
                  int axis) {
    std::vector<std::size_t> order(end - begin);
    std::iota(order.begin(), order.end(), begin);
    std::nth_element(order.begin(), order.begin() + (mid - begin), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       if (pts_[a][axis] != pts_[b][axis])
                         return pts_[a][axis] < pts_[b][axis];
                       return idx_[a] < idx_[b];  // deterministic ties
                     });
    apply_order(begin, order);
  }

  void apply_order(std::size_t begin, const std::vector<std::size_t>& order) {
    std::vector<Eigen::Vector3d> tmp_p(order.size());
    std::vector<std::size_t> tmp_i(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      tmp_p[k] = pts_[order[k]];
      tmp_i[k] = idx_[order[k]];
    }
    std::copy(tmp_p.begin(), tmp_p.end(), pts_.begin() + begin);
    std::copy(tmp_i.begin(), tmp_i.end(), idx_.begin() + begin);
  }

  void search_radius(std::uint32_t node_id, const Eigen::Vector3d& q,
                     double radius, double r2,
                     std::vector<std::size_t>& out) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i)
        if ((pts_[i] - q).squaredNorm() <= r2) out.push_back(idx_[i]);
      return;
    }
    if (q[node.axis] - radius <= node.split)
      search_radius(node.left, q, radius, r2, out);
    if (q[node.axis] + radius >= node.split)
      search_radius(node.right, q, radius, r2, out);
  }

  void search_nearest(std::uint32_t node_id, const Eigen::Vector3d& q,
                      std::size_t& best_idx, double& best_d2) const {
    const Node& node = nodes_[node_id];
    if (node.axis < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const double d2 = (pts_[i] - q).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && idx_[i] < best_idx)) {
          best_d2 = d2;
          best_idx = idx_[i];
        }
      }
      return;
    }
    const double delta = q[node.axis] - node.split;
    const std::uint32_t near = delta <= 0.0 ? node.left : node.right;
    const std::uint32_t far = delta <= 0.0 ? node.right : node.left;
    search_nearest(near, q, best_idx, best_d2);
    if (delta * delta <= best_d2) search_nearest(far, q, best_idx, best_d2);
  }

  std::vector<Eigen::Vector3d> pts_;
  std::vector<std::size_t> idx_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

}  // namespace scga
