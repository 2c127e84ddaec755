#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include "sharpfit/core.hpp"

namespace sharpfit {

/// Static kd-tree over 3D points. Built once, queried concurrently.
/// Used by sample elimination, clustering, annotation and the metrics.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(std::vector<Vec3> points) : pts_(std::move(points)) {
    index_.resize(pts_.size());
    std::iota(index_.begin(), index_.end(), 0);
    nodes_.reserve(pts_.size());
    if (!pts_.empty()) root_ = build(0, int(pts_.size()));
  }

  std::size_t size() const { return pts_.size(); }
  const Vec3& point(int i) const { return pts_[std::size_t(i)]; }

  /// Index of the nearest point, -1 when empty. Squared distance out-param optional.
  int nearest(const Vec3& q, double* sq_dist_out = nullptr) const {
    int best = -1;
    double best_sq = std::numeric_limits<double>::max();
    nearest_rec(root_, q, best, best_sq);
    if (sq_dist_out) *sq_dist_out = best_sq;
    return best;
  }

  /// All point indices within `radius` of q (inclusive), in ascending index order.
  std::vector<int> radius_search(const Vec3& q, double radius) const {
    std::vector<int> out;
    radius_rec(root_, q, radius * radius, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  /// k nearest neighbors, nearest first; ties broken by index.
  std::vector<int> knn(const Vec3& q, int k) const {
    if (k <= 0 || pts_.empty()) return {};
    // max-heap of (sq_dist, index)
    std::priority_queue<std::pair<double, int>> heap;
    knn_rec(root_, q, k, heap);
    std::vector<std::pair<double, int>> tmp;
    tmp.reserve(heap.size());
    while (!heap.empty()) {
      tmp.push_back(heap.top());
      heap.pop();
    }
    std::sort(tmp.begin(), tmp.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second < b.second;
    });
    std::vector<int> out;
    out.reserve(tmp.size());
    for (auto& [d, i] : tmp) out.push_back(i);
    return out;
  }

 private:
  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int build(int lo, int hi) {
    if (lo >= hi) return -1;
    Vec3 mn = pts_[std::size_t(index_[std::size_t(lo)])];
    Vec3 mx = mn;
    for (int i = lo; i < hi; ++i) {
      const Vec3& p = pts_[std::size_t(index_[std::size_t(i)])];
      mn = mn.cwiseMin(p);
      mx = mx.cwiseMax(p);
    }
    Vec3 ext = mx - mn;
    int axis = 0;
    if (ext.y() > ext.x()) axis = 1;
    if (ext.z() > ext[axis]) axis = 2;

    int mid = lo + (hi - lo) / 2;
    std::nth_element(index_.begin() + lo, index_.begin() + mid, index_.begin() + hi,
                     [&](int a, int b) {
                       double pa = pts_[std::size_t(a)][axis], pb = pts_[std::size_t(b)][axis];
                       return pa != pb ? pa < pb : a < b;
                     });
    Node node;
    node.point = index_[std::size_t(mid)];
    node.axis = axis;
    int self = int(nodes_.size());
    nodes_.push_back(node);
    int l = build(lo, mid);
    int r = build(mid + 1, hi);
    nodes_[std::size_t(self)].left = l;
    nodes_[std::size_t(self)].right = r;
    return self;
  }

  void nearest_rec(int ni, const Vec3& q, int& best, double& best_sq) const {
    if (ni < 0) return;
    const Node& n = nodes_[std::size_t(ni)];
    const Vec3& p = pts_[std::size_t(n.point)];
    double sq = (p - q).squaredNorm();
    if (sq < best_sq || (sq == best_sq && n.point < best)) {
      best_sq = sq;
      best = n.point;
    }
    double delta = q[n.axis] - p[n.axis];
    int near = delta <= 0 ? n.left : n.right;
    int far = delta <= 0 ? n.right : n.left;
    nearest_rec(near, q, best, best_sq);
    if (delta * delta <= best_sq) nearest_rec(far, q, best, best_sq);
  }

  void radius_rec(int ni, const Vec3& q, double sq_radius, std::vector<int>& out) const {
    if (ni < 0) return;
    const Node& n = nodes_[std::size_t(ni)];
    const Vec3& p = pts_[std::size_t(n.point)];
    if ((p - q).squaredNorm() <= sq_radius) out.push_back(n.point);
    double delta = q[n.axis] - p[n.axis];
    int near = delta <= 0 ? n.left : n.right;
    int far = delta <= 0 ? n.right : n.left;
    radius_rec(near, q, sq_radius, out);
    if (delta * delta <= sq_radius) radius_rec(far, q, sq_radius, out);
  }

  void knn_rec(int ni, const Vec3& q, int k,
               std::priority_queue<std::pair<double, int>>& heap) const {
    if (ni < 0) return;
    const Node& n = nodes_[std::size_t(ni)];
    const Vec3& p = pts_[std::size_t(n.point)];
    double sq = (p - q).squaredNorm();
    if (int(heap.size()) < k) {
      heap.emplace(sq, n.point);
    } else if (sq < heap.top().first) {
      heap.pop();
      heap.emplace(sq, n.point);
    }
    double delta = q[n.axis] - p[n.axis];
    int near = delta <= 0 ? n.left : n.right;
    int far = delta <= 0 ? n.right : n.left;
    knn_rec(near, q, k, heap);
    if (int(heap.size()) < k || delta * delta <= heap.top().first) knn_rec(far, q, k, heap);
  }

  std::vector<Vec3> pts_;
  std::vector<int> index_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace sharpfit
