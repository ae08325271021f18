#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "hybridnav/cloud.hpp"
#include "hybridnav/kdtree.hpp"

namespace hybridnav {

/// Ground points below vehicle height, kept as a flat cloud (the per-cell
/// point sets are gathered with a k-d radius search at analysis time, the
/// same way the per-square lookup works on the real elevation cloud).
class ElevationMap {
 public:
  ElevationMap() = default;
  ElevationMap(const PointCloud& cloud, double vehicle_height, double resolution);

  double resolution() const { return resolution_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double min_x() const { return min_x_; }
  double min_y() const { return min_y_; }
  std::size_t point_count() const { return points_.size(); }

  /// Points falling inside grid cell (i, j).
  std::vector<Point3> cell_points(int i, int j) const;

 private:
  double resolution_ = 0.2;
  double min_x_ = 0.0, min_y_ = 0.0;
  int width_ = 0, height_ = 0;
  std::vector<Point3> points_;
  KdIndex index_;
};

enum class TerrainClass { Easy, Difficult, Untraversable, Unknown };

const char* terrain_class_name(TerrainClass c);

struct TerrainCell {
  double variance = 0.0;  // mean squared point-to-plane distance, m^2
  double slope = 0.0;     // plane normal vs vertical, radians
  TerrainClass cls = TerrainClass::Unknown;
};

struct CellAnalysis {
  double variance = 0.0;
  double slope = 0.0;
};

/// Plane-fit roughness and slope of one cell's points. Fewer than four
/// points -> nullopt (Unknown). Cells with many points use the seeded RANSAC
/// fit; small cells use the least-squares fit directly.
std::optional<CellAnalysis> analyze_cell(const std::vector<Point3>& points);

struct TerrainGrid {
  double resolution = 0.2;
  double min_x = 0.0, min_y = 0.0;
  int width = 0, height = 0;
  std::vector<TerrainCell> cells;  // row-major, j * width + i

  const TerrainCell& at(int i, int j) const { return cells[j * width + i]; }
  TerrainCell& at(int i, int j) { return cells[j * width + i]; }
};

TerrainGrid build_terrain_maps(const ElevationMap& map);

struct TerrainThresholds {
  double var_easy = 0.001;   // m^2
  double var_max = 0.01;     // m^2
  double slope_easy = 0.17;  // rad
  double slope_max = 0.52;   // rad
  double collision_cost = 10000.0;  // prohibitive cost, matches the planner's c_col
};

TerrainClass classify(const TerrainCell& cell, const TerrainThresholds& th);

/// Easy -> 0; Untraversable and Unknown -> the prohibitive collision cost;
/// Difficult -> a finite cost between the two, monotone in variance and slope.
double traversability_cost(const TerrainCell& cell, const TerrainThresholds& th);

/// Apply classify() across a grid in place.
void classify_grid(TerrainGrid& grid, const TerrainThresholds& th);

/// "travv1 <res> <w> <h>" then one "var slope class" line per cell, row-major.
void write_terrain_grid(std::ostream& os, const TerrainGrid& grid);

}  // namespace hybridnav
