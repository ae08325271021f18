#pragma once

#include <cstddef>
#include <vector>

#include "hybridnav/cloud.hpp"

namespace hybridnav {

/// Immutable balanced k-d tree over a cloud snapshot. Ties in query distance
/// are broken by the point's insertion order in the source cloud.
class KdIndex {
 public:
  KdIndex() = default;
  explicit KdIndex(const PointCloud& cloud);
  explicit KdIndex(const std::vector<Point3>& points);

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }

  struct Neighbor {
    Point3 point;
    double distance = 0.0;
    std::size_t index = 0;  // index into the source cloud
  };

  /// k nearest neighbors in non-decreasing distance order.
  std::vector<Neighbor> knn(const Point3& query, int k) const;

  /// Distance to the nearest point; +inf on an empty index.
  double nearest_distance(const Point3& query) const;

  /// All points with distance <= radius, unordered.
  std::vector<Neighbor> radius_search(const Point3& query, double radius) const;

 private:
  struct Node {
    Point3 point;
    std::size_t source_index = 0;
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int build(std::vector<std::pair<Point3, std::size_t>>& pts, int lo, int hi, int depth);

  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace hybridnav
