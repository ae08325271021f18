#include "hybridnav/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <queue>
#include <unordered_map>

namespace hybridnav {

VoxelKey LocalMap::voxel_of(const Point3& p) const {
  return {static_cast<int>(std::floor(p.x / resolution_)),
          static_cast<int>(std::floor(p.y / resolution_)),
          static_cast<int>(std::floor(p.z / resolution_))};
}

Point3 LocalMap::voxel_center(const VoxelKey& v) const {
  return {(v.i + 0.5) * resolution_, (v.j + 0.5) * resolution_, (v.k + 0.5) * resolution_};
}

void LocalMap::insert_cloud(const PointCloud& cloud) {
  for (const Point3& p : cloud.points) {
    if (p.finite()) occupied_.insert(voxel_of(p));
  }
}

void LocalMap::insert_point(const Point3& p) {
  if (p.finite()) occupied_.insert(voxel_of(p));
}

void LocalMap::prune_radius(const Point3& center) {
  for (auto it = occupied_.begin(); it != occupied_.end();) {
    if (distance(voxel_center(*it), center) > retain_radius_) {
      it = occupied_.erase(it);
    } else {
      ++it;
    }
  }
}

void LocalMap::reset() { occupied_.clear(); }

void LocalMap::dump(std::ostream& os) const {
  os << "mapv1 " << resolution_ << "\n";
  std::vector<VoxelKey> keys(occupied_.begin(), occupied_.end());
  std::sort(keys.begin(), keys.end(), [](const VoxelKey& a, const VoxelKey& b) {
    return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
  });
  for (const VoxelKey& v : keys) os << v.i << " " << v.j << " " << v.k << "\n";
}

namespace {

struct NodeHash {
  std::size_t operator()(const HybridNode& n) const {
    return VoxelKeyHash{}(n.voxel) * 2 + (n.mode == TravelMode::Air ? 1 : 0);
  }
};

bool in_bounds(const VoxelKey& v, const PlanningBounds& b) {
  return v.i >= b.min.i && v.i <= b.max.i && v.j >= b.min.j && v.j <= b.max.j &&
         v.k >= b.min.k && v.k <= b.max.k;
}

}  // namespace

std::optional<PlanResult> astar_plan(
    const LocalMap& map, const HybridNode& start, const HybridNode& goal,
    const PlanningCosts& costs, const PlanningBounds& bounds,
    const std::function<bool(int, int)>& ground_blocked) {
  auto node_valid = [&](const HybridNode& n) {
    if (!in_bounds(n.voxel, bounds)) return false;
    if (map.occupied(n.voxel)) return false;
    if (n.mode == TravelMode::Ground) {
      if (n.voxel.k != bounds.ground_k) return false;
      if (ground_blocked && ground_blocked(n.voxel.i, n.voxel.j)) return false;
    }
    return true;
  };
  if (!node_valid(start) || !node_valid(goal)) return std::nullopt;

  const double res = map.resolution();
  const double min_rate = std::min(costs.ground_cost, costs.air_cost);
  auto heuristic = [&](const HybridNode& n) {
    const double di = (n.voxel.i - goal.voxel.i) * res;
    const double dj = (n.voxel.j - goal.voxel.j) * res;
    const double dk = (n.voxel.k - goal.voxel.k) * res;
    return std::sqrt(di * di + dj * dj + dk * dk) * min_rate;
  };

  struct OpenEntry {
    double f;
    double g;
    std::uint64_t seq;  // FIFO tie-break keeps expansion deterministic
    HybridNode node;
  };
  auto cmp = [](const OpenEntry& a, const OpenEntry& b) {
    return a.f > b.f || (a.f == b.f && a.seq > b.seq);
  };
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, decltype(cmp)> open(cmp);
  std::unordered_map<HybridNode, double, NodeHash> cost_to_reach;
  std::unordered_map<HybridNode, HybridNode, NodeHash> predecessor;

  std::uint64_t seq = 0;
  cost_to_reach[start] = 0.0;
  open.push({heuristic(start), 0.0, seq++, start});

  auto expand = [&](const HybridNode& from, const HybridNode& to, double edge_cost) {
    if (!node_valid(to)) return;
    const double g = cost_to_reach[from] + edge_cost;
    auto it = cost_to_reach.find(to);
    if (it == cost_to_reach.end() || g < it->second) {
      cost_to_reach[to] = g;
      predecessor[to] = from;
      open.push({g + heuristic(to), g, seq++, to});
    }
  };

  std::unordered_set<HybridNode, NodeHash> checked;
  while (!open.empty()) {
    const OpenEntry cur = open.top();
    open.pop();
    if (checked.count(cur.node)) continue;
    checked.insert(cur.node);
    if (cur.node == goal) {
      PlanResult result;
      result.total_cost = cur.g;
      HybridNode n = goal;
      result.path.push_back(n);
      while (!(n == start)) {
        n = predecessor.at(n);
        result.path.push_back(n);
      }
      std::reverse(result.path.begin(), result.path.end());
      return result;
    }

    static const int moves[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                    {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    for (const auto& m : moves) {
      HybridNode next = cur.node;
      next.voxel.i += m[0];
      next.voxel.j += m[1];
      next.voxel.k += m[2];
      expand(cur.node, next, res * costs.mode_cost(next.mode));
    }
    if (cur.node.voxel.k == bounds.ground_k) {
      HybridNode flipped = cur.node;
      flipped.mode =
          cur.node.mode == TravelMode::Ground ? TravelMode::Air : TravelMode::Ground;
      expand(cur.node, flipped,
             costs.mode_change_factor * res * costs.mode_cost(flipped.mode));
    }
  }
  return std::nullopt;
}

std::vector<Point3> path_points(const LocalMap& map, const std::vector<HybridNode>& path) {
  std::vector<Point3> pts;
  pts.reserve(path.size());
  for (const HybridNode& n : path) pts.push_back(map.voxel_center(n.voxel));
  return pts;
}

Point3 extract_waypoint(const std::vector<Point3>& path, double dist) {
  if (path.empty()) throw std::invalid_argument("extract_waypoint: empty path");
  if (dist <= 0.0) return path.front();
  double walked = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = distance(path[i - 1], path[i]);
    if (walked + seg >= dist && seg > 0.0) {
      const double frac = (dist - walked) / seg;
      return path[i - 1] + (path[i] - path[i - 1]) * frac;
    }
    walked += seg;
  }
  return path.back();
}

ModeAnnotation annotate_modes(const LocalMap& map, const std::vector<HybridNode>& path) {
  ModeAnnotation out;
  out.points.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    out.points.emplace_back(map.voxel_center(path[i].voxel), path[i].mode);
    if (i > 0 && path[i].mode != path[i - 1].mode) out.transitions.push_back(i);
  }
  return out;
}

}  // namespace hybridnav
