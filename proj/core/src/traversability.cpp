#include "hybridnav/traversability.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace hybridnav {

ElevationMap::ElevationMap(const PointCloud& cloud, double vehicle_height,
                           double resolution)
    : resolution_(resolution) {
  for (const Point3& p : cloud.points) {
    if (!p.finite()) continue;
    if (p.z > vehicle_height) continue;
    points_.push_back(p);
  }
  if (points_.empty()) return;

  double max_x = points_[0].x, max_y = points_[0].y;
  min_x_ = points_[0].x;
  min_y_ = points_[0].y;
  for (const Point3& p : points_) {
    min_x_ = std::min(min_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  width_ = static_cast<int>(std::floor((max_x - min_x_) / resolution_)) + 1;
  height_ = static_cast<int>(std::floor((max_y - min_y_) / resolution_)) + 1;

  // Flatten to 2D for the per-cell lookup; the height stays in z.
  std::vector<Point3> flat;
  flat.reserve(points_.size());
  for (const Point3& p : points_) flat.emplace_back(p.x, p.y, 0.0);
  index_ = KdIndex(flat);
}

std::vector<Point3> ElevationMap::cell_points(int i, int j) const {
  std::vector<Point3> out;
  if (i < 0 || j < 0 || i >= width_ || j >= height_) return out;
  const double cx = min_x_ + (i + 0.5) * resolution_;
  const double cy = min_y_ + (j + 0.5) * resolution_;
  // Circumscribing radius of the square cell, then an exact in-cell check.
  const double radius = resolution_ * M_SQRT1_2 + 1e-9;
  for (const auto& nb : index_.radius_search(Point3(cx, cy, 0.0), radius)) {
    const Point3& p = points_[nb.index];
    if (static_cast<int>(std::floor((p.x - min_x_) / resolution_)) != i) continue;
    if (static_cast<int>(std::floor((p.y - min_y_) / resolution_)) != j) continue;
    out.push_back(p);
  }
  return out;
}

const char* terrain_class_name(TerrainClass c) {
  switch (c) {
    case TerrainClass::Easy: return "easy";
    case TerrainClass::Difficult: return "difficult";
    case TerrainClass::Untraversable: return "untraversable";
    case TerrainClass::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<CellAnalysis> analyze_cell(const std::vector<Point3>& points) {
  if (points.size() < 4) return std::nullopt;

  std::optional<Plane> plane;
  if (points.size() > 50) {
    PointCloud cell;
    cell.points = points;
    plane = fit_plane(cell, 0.05, 200, 12345);
  }
  if (!plane) plane = fit_plane_least_squares(points);

  CellAnalysis out;
  if (!plane) {
    // Degenerate fit (e.g. a vertical line of points): treat as a wall.
    out.slope = M_PI / 2.0;
    out.variance = 0.0;
    return out;
  }

  double sum_sq = 0.0;
  for (const Point3& p : points) {
    const double d = plane->signed_distance(p);
    sum_sq += d * d;
  }
  out.variance = sum_sq / static_cast<double>(points.size());

  const Eigen::Vector3d n = plane->normal();
  const double nn = n.norm();
  if (nn < 1e-12) {
    out.slope = M_PI / 2.0;
  } else {
    out.slope = std::acos(std::clamp(std::abs(n.z()) / nn, 0.0, 1.0));
  }
  return out;
}

TerrainGrid build_terrain_maps(const ElevationMap& map) {
  TerrainGrid grid;
  grid.resolution = map.resolution();
  grid.min_x = map.min_x();
  grid.min_y = map.min_y();
  grid.width = map.width();
  grid.height = map.height();
  grid.cells.assign(static_cast<std::size_t>(grid.width) * grid.height, TerrainCell{});
  for (int j = 0; j < grid.height; ++j) {
    for (int i = 0; i < grid.width; ++i) {
      const auto points = map.cell_points(i, j);
      const auto analysis = analyze_cell(points);
      TerrainCell& cell = grid.at(i, j);
      if (analysis) {
        cell.variance = analysis->variance;
        cell.slope = analysis->slope;
        cell.cls = TerrainClass::Easy;  // provisional; classify_grid decides
      } else {
        cell.cls = TerrainClass::Unknown;
      }
    }
  }
  return grid;
}

TerrainClass classify(const TerrainCell& cell, const TerrainThresholds& th) {
  if (cell.cls == TerrainClass::Unknown) return TerrainClass::Unknown;
  if (cell.variance > th.var_max || cell.slope > th.slope_max) {
    return TerrainClass::Untraversable;
  }
  if (cell.variance <= th.var_easy && cell.slope <= th.slope_easy) {
    return TerrainClass::Easy;
  }
  return TerrainClass::Difficult;
}

double traversability_cost(const TerrainCell& cell, const TerrainThresholds& th) {
  const TerrainClass cls = classify(cell, th);
  switch (cls) {
    case TerrainClass::Easy: return 0.0;
    case TerrainClass::Untraversable: return th.collision_cost;
    case TerrainClass::Unknown: return th.collision_cost;  // conservative
    case TerrainClass::Difficult: break;
  }
  const double nv =
      std::clamp((cell.variance - th.var_easy) / (th.var_max - th.var_easy), 0.0, 1.0);
  const double ns =
      std::clamp((cell.slope - th.slope_easy) / (th.slope_max - th.slope_easy), 0.0, 1.0);
  // Scales up to 1% of the collision cost (the near-collision weight), so
  // rough-but-passable ground can never outweigh an actual collision.
  return 0.5 * (nv + ns) * (th.collision_cost / 100.0);
}

void classify_grid(TerrainGrid& grid, const TerrainThresholds& th) {
  for (TerrainCell& cell : grid.cells) cell.cls = classify(cell, th);
}

void write_terrain_grid(std::ostream& os, const TerrainGrid& grid) {
  os << "travv1 " << grid.resolution << " " << grid.width << " " << grid.height << "\n";
  for (const TerrainCell& cell : grid.cells) {
    os << cell.variance << " " << cell.slope << " " << terrain_class_name(cell.cls)
       << "\n";
  }
}

}  // namespace hybridnav
