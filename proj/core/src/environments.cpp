#include "hybridnav/environments.hpp"

#include <cmath>

namespace hybridnav {

const char* env_kind_name(EnvKind k) {
  switch (k) {
    case EnvKind::Corridor: return "corridor";
    case EnvKind::HorizontalSine: return "horizontal_sine";
    case EnvKind::VerticalSine: return "vertical_sine";
    case EnvKind::TJunction: return "t_junction";
    case EnvKind::Doorway: return "doorway";
  }
  return "unknown";
}

std::optional<EnvKind> env_kind_from_name(const std::string& name) {
  if (name == "corridor") return EnvKind::Corridor;
  if (name == "horizontal_sine") return EnvKind::HorizontalSine;
  if (name == "vertical_sine") return EnvKind::VerticalSine;
  if (name == "t_junction") return EnvKind::TJunction;
  if (name == "doorway") return EnvKind::Doorway;
  return std::nullopt;
}

namespace {

/// Vertical wall sheet along the segment (x0,y0) -> (x1,y1).
void add_wall(PointCloud& cloud, double x0, double y0, double x1, double y1, double z0,
              double z1, double spacing) {
  const double len = std::hypot(x1 - x0, y1 - y0);
  const int n_along = std::max(1, static_cast<int>(std::ceil(len / spacing)));
  const int n_up = std::max(1, static_cast<int>(std::ceil((z1 - z0) / spacing)));
  for (int i = 0; i <= n_along; ++i) {
    const double f = static_cast<double>(i) / n_along;
    const double x = x0 + f * (x1 - x0);
    const double y = y0 + f * (y1 - y0);
    for (int j = 0; j <= n_up; ++j) {
      cloud.points.emplace_back(x, y, z0 + (z1 - z0) * static_cast<double>(j) / n_up);
    }
  }
}

void add_pillar(PointCloud& cloud, double cx, double cy, double radius, double z0,
                double z1, double spacing) {
  const int n_circ = std::max(8, static_cast<int>(std::ceil(2 * M_PI * radius / spacing)));
  const int n_up = std::max(1, static_cast<int>(std::ceil((z1 - z0) / spacing)));
  for (int i = 0; i < n_circ; ++i) {
    const double a = 2 * M_PI * i / n_circ;
    for (int j = 0; j <= n_up; ++j) {
      cloud.points.emplace_back(cx + radius * std::cos(a), cy + radius * std::sin(a),
                                z0 + (z1 - z0) * static_cast<double>(j) / n_up);
    }
  }
}

}  // namespace

GeneratedEnvironment generate_environment(const EnvSpec& spec, double vehicle_radius) {
  GeneratedEnvironment out;
  out.mode = spec.mode;
  out.passable = spec.width > 2.0 * vehicle_radius;

  PointCloud& pts = out.world.obstacles;
  pts.frame = Frame::Odometry;
  const double s = spec.point_spacing;
  const double w2 = spec.width / 2.0;
  const double h = spec.ceiling;
  const double len = spec.length;

  Environment& env = out.environment;
  env.name = spec.name;
  env.enabled = spec.enabled;
  env.ceiling_height = h;
  out.world.ceiling_height = h;
  env.start.position = Point3(0.3, 0.0, 0.15);
  env.start.yaw = 0.0;
  env.end_x_range[0] = len;
  env.end_x_range[1] = len + 2.0;
  env.end_y_range[0] = -w2 - 0.5;
  env.end_y_range[1] = w2 + 0.5;

  switch (spec.kind) {
    case EnvKind::Corridor:
      add_wall(pts, 0.0, -w2, len, -w2, 0.0, h, s);
      add_wall(pts, 0.0, w2, len, w2, 0.0, h, s);
      break;

    case EnvKind::HorizontalSine: {
      auto center = [&](double x) {
        return spec.amplitude * std::sin(2.0 * M_PI * x / spec.period);
      };
      double prev_x = 0.0, prev_c = center(0.0);
      const int n = std::max(2, static_cast<int>(std::ceil(len / (s * 0.5))));
      for (int i = 1; i <= n; ++i) {
        const double x = len * static_cast<double>(i) / n;
        const double c = center(x);
        add_wall(pts, prev_x, prev_c - w2, x, c - w2, 0.0, h, s);
        add_wall(pts, prev_x, prev_c + w2, x, c + w2, 0.0, h, s);
        prev_x = x;
        prev_c = c;
      }
      // Interior obstacle on the centerline.
      const double px = spec.period / 2.0;
      add_pillar(pts, px, center(px), spec.pillar_radius, 0.0, h, s * 0.8);
      env.start.position = Point3(0.3, center(0.3), 0.15);
      env.start.yaw = std::atan2(center(0.4) - center(0.2), 0.2);
      env.end_y_range[0] = center(len) - w2 - 0.5;
      env.end_y_range[1] = center(len) + w2 + 0.5;
      break;
    }

    case EnvKind::VerticalSine: {
      add_wall(pts, 0.0, -w2, len, -w2, 0.0, h, s);
      add_wall(pts, 0.0, w2, len, w2, 0.0, h, s);
      // Alternating floor and ceiling slabs force altitude changes.
      const double rise = 0.45 * h;
      bool from_floor = true;
      for (double x = len * 0.25; x < len - 1.0; x += len * 0.25) {
        if (from_floor) {
          add_wall(pts, x, -w2, x, w2, 0.0, rise, s);
        } else {
          add_wall(pts, x, -w2, x, w2, h - rise, h, s);
        }
        from_floor = !from_floor;
      }
      break;
    }

    case EnvKind::TJunction: {
      const double arm = spec.arm_length;
      const double bar_near = len;
      const double bar_far = len + spec.width;
      // Stem.
      add_wall(pts, 0.0, -w2, bar_near, -w2, 0.0, h, s);
      add_wall(pts, 0.0, w2, bar_near, w2, 0.0, h, s);
      // Near bar wall, leaving the stem opening.
      add_wall(pts, bar_near, -arm, bar_near, -w2, 0.0, h, s);
      add_wall(pts, bar_near, w2, bar_near, arm, 0.0, h, s);
      // Far bar wall.
      add_wall(pts, bar_far, -arm, bar_far, arm, 0.0, h, s);
      // End range at the negative-y arm exit.
      env.end_x_range[0] = bar_near - 0.5;
      env.end_x_range[1] = bar_far + 0.5;
      env.end_y_range[0] = -arm - 2.0;
      env.end_y_range[1] = -arm;
      break;
    }

    case EnvKind::Doorway: {
      add_wall(pts, 0.0, -w2, len, -w2, 0.0, h, s);
      add_wall(pts, 0.0, w2, len, w2, 0.0, h, s);
      const double xd = len / 2.0;
      const double dw2 = spec.door_width / 2.0;
      add_wall(pts, xd, -w2, xd, -dw2, 0.0, h, s);
      add_wall(pts, xd, dw2, xd, w2, 0.0, h, s);
      break;
    }
  }

  if (spec.has_start) env.start = spec.start;
  if (spec.has_end) {
    env.end_x_range[0] = spec.end_x[0];
    env.end_x_range[1] = spec.end_x[1];
    env.end_y_range[0] = spec.end_y[0];
    env.end_y_range[1] = spec.end_y[1];
  }

  out.world.rebuild_index();
  return out;
}

}  // namespace hybridnav
