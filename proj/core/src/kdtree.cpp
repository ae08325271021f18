#include "hybridnav/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace hybridnav {

namespace {

inline double coord(const Point3& p, int axis) {
  switch (axis) {
    case 0: return p.x;
    case 1: return p.y;
    default: return p.z;
  }
}

}  // namespace

KdIndex::KdIndex(const PointCloud& cloud) : KdIndex(cloud.points) {}

KdIndex::KdIndex(const std::vector<Point3>& points) {
  std::vector<std::pair<Point3, std::size_t>> pts;
  pts.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) pts.emplace_back(points[i], i);
  nodes_.reserve(points.size());
  root_ = build(pts, 0, static_cast<int>(pts.size()), 0);
}

int KdIndex::build(std::vector<std::pair<Point3, std::size_t>>& pts, int lo, int hi,
                   int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 3;
  const int mid = lo + (hi - lo) / 2;
  std::nth_element(pts.begin() + lo, pts.begin() + mid, pts.begin() + hi,
                   [axis](const auto& a, const auto& b) {
                     return coord(a.first, axis) < coord(b.first, axis);
                   });
  Node node;
  node.point = pts[mid].first;
  node.source_index = pts[mid].second;
  node.axis = axis;
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  nodes_[self].left = build(pts, lo, mid, depth + 1);
  nodes_[self].right = build(pts, mid + 1, hi, depth + 1);
  return self;
}

std::vector<KdIndex::Neighbor> KdIndex::knn(const Point3& query, int k) const {
  std::vector<Neighbor> result;
  if (empty() || k < 1) return result;

  // Max-heap of the best k so far; ties prefer the earlier source index,
  // so the "worst" element of equal distance is the later one.
  struct Entry {
    double dist;
    std::size_t index;
    Point3 point;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.index < b.index);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);

  auto visit = [&](auto&& self, int ni) -> void {
    if (ni < 0) return;
    const Node& node = nodes_[ni];
    const double d = distance(node.point, query);
    Entry e{d, node.source_index, node.point};
    if (static_cast<int>(heap.size()) < k) {
      heap.push(e);
    } else if (worse(e, heap.top())) {
      heap.pop();
      heap.push(e);
    }
    const double split = coord(node.point, node.axis) - coord(query, node.axis);
    const int near = split > 0 ? node.left : node.right;
    const int far = split > 0 ? node.right : node.left;
    self(self, near);
    if (static_cast<int>(heap.size()) < k || std::abs(split) <= heap.top().dist) {
      self(self, far);
    }
  };
  visit(visit, root_);

  result.resize(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    const Entry& e = heap.top();
    result[i] = {e.point, e.dist, e.index};
    heap.pop();
  }
  return result;
}

double KdIndex::nearest_distance(const Point3& query) const {
  if (empty()) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](auto&& self, int ni) -> void {
    if (ni < 0) return;
    const Node& node = nodes_[ni];
    best = std::min(best, distance(node.point, query));
    const double split = coord(node.point, node.axis) - coord(query, node.axis);
    const int near = split > 0 ? node.left : node.right;
    const int far = split > 0 ? node.right : node.left;
    self(self, near);
    if (std::abs(split) <= best) self(self, far);
  };
  visit(visit, root_);
  return best;
}

std::vector<KdIndex::Neighbor> KdIndex::radius_search(const Point3& query,
                                                      double radius) const {
  std::vector<Neighbor> result;
  if (empty() || radius < 0.0) return result;
  auto visit = [&](auto&& self, int ni) -> void {
    if (ni < 0) return;
    const Node& node = nodes_[ni];
    const double d = distance(node.point, query);
    if (d <= radius) result.push_back({node.point, d, node.source_index});
    const double split = coord(node.point, node.axis) - coord(query, node.axis);
    const int near = split > 0 ? node.left : node.right;
    const int far = split > 0 ? node.right : node.left;
    self(self, near);
    if (std::abs(split) <= radius) self(self, far);
  };
  visit(visit, root_);
  return result;
}

}  // namespace hybridnav
