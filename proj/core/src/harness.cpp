#include "hybridnav/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hybridnav/mapping.hpp"
#include "hybridnav/mobility.hpp"

namespace hybridnav {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1") { out = true; return true; }
  if (s == "false" || s == "0") { out = false; return true; }
  return false;
}

bool parse_range(const std::string& s, double out[2]) {
  std::istringstream is(s);
  if (!(is >> out[0] >> out[1])) return false;
  std::string rest;
  if (is >> rest) return false;
  return out[0] <= out[1];
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

ParseResult parse_config_text(const std::string& text) {
  ParseResult result;
  SuiteConfig& cfg = result.config;

  enum class Section { None, Planner, Sim, Env };
  Section section = Section::None;
  EnvSpec* env = nullptr;

  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    result.ok = false;
    result.error = {lineno, msg};
    return result;
  };

  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') return fail("unterminated section header");
      const std::string inside = trim(line.substr(1, line.size() - 2));
      if (inside == "planner") {
        section = Section::Planner;
      } else if (inside == "sim") {
        section = Section::Sim;
      } else if (inside.rfind("env ", 0) == 0) {
        const std::string name = trim(inside.substr(4));
        if (name.empty()) return fail("environment section needs a name");
        for (const EnvSpec& e : cfg.environments) {
          if (e.name == name) return fail("duplicate environment name: " + name);
        }
        cfg.environments.emplace_back();
        env = &cfg.environments.back();
        env->name = name;
        section = Section::Env;
      } else {
        return fail("unknown section: [" + inside + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) return fail("expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) return fail("empty key or value");

    double d = 0.0;
    bool b = false;
    switch (section) {
      case Section::None:
        return fail("key outside any section: " + key);

      case Section::Planner: {
        PlannerConfig& p = cfg.planner;
        if (key == "voxel_size" && parse_double(value, d)) { p.voxel_size = d; break; }
        if (key == "min_points_per_voxel" && parse_double(value, d)) {
          p.min_points_per_voxel = static_cast<int>(d);
          break;
        }
        if (key == "horizon" && parse_double(value, d)) { p.horizon = d; break; }
        if (key == "primitive_T" && parse_double(value, d)) { p.primitive_T = d; break; }
        if (key == "n_azimuth" && parse_double(value, d)) {
          p.n_azimuth = static_cast<int>(d);
          break;
        }
        if (key == "sensor_azimuth_fov_deg" && parse_double(value, d)) {
          p.sensor_azimuth_fov = d * M_PI / 180.0;
          break;
        }
        if (key == "elevation_row_deg" && parse_double(value, d)) {
          p.elevation_row = d * M_PI / 180.0;
          break;
        }
        if (key == "yaw_escape" && parse_bool(value, b)) { p.yaw_escape = b; break; }
        if (key == "collision_buffer" && parse_double(value, d)) {
          p.cost.collision_buffer = d;
          break;
        }
        if (key == "near_buffer" && parse_double(value, d)) { p.cost.near_buffer = d; break; }
        if (key == "goal_weight" && parse_double(value, d)) { p.cost.goal_weight = d; break; }
        if (key == "dust_filter" && parse_bool(value, b)) { p.dust_filter_enabled = b; break; }
        if (key == "dust_window" && parse_double(value, d)) {
          p.dust_window = static_cast<int>(d);
          break;
        }
        if (key == "dust_variance_threshold" && parse_double(value, d)) {
          p.dust_variance_threshold = d;
          break;
        }
        if (key == "min_bottom_clearance" && parse_double(value, d)) {
          p.vertical.min_bottom_clearance = d;
          break;
        }
        if (key == "min_top_clearance" && parse_double(value, d)) {
          p.vertical.min_top_clearance = d;
          break;
        }
        if (key == "vertical_speed" && parse_double(value, d)) {
          p.vertical.vertical_speed = d;
          break;
        }
        if (key == "yaw_gain" && parse_double(value, d)) { p.yaw_gain = d; break; }
        if (key == "max_yaw_rate" && parse_double(value, d)) { p.max_yaw_rate = d; break; }
        return fail("unknown planner key: " + key);
      }

      case Section::Sim: {
        if (key == "timeout" && parse_double(value, d)) { cfg.timeout = d; break; }
        if (key == "seed" && parse_double(value, d)) {
          cfg.seed = static_cast<std::uint64_t>(d);
          break;
        }
        if (key == "sim_rate" && parse_double(value, d)) { cfg.sim_rate = d; break; }
        if (key == "planner_rate" && parse_double(value, d)) { cfg.planner_rate = d; break; }
        if (key == "cloud_rate" && parse_double(value, d)) { cfg.cloud_rate = d; break; }
        if (key == "yaw_rate_limit" && parse_double(value, d)) {
          cfg.sim.yaw_rate_limit = d;
          break;
        }
        if (key == "z_rate_limit" && parse_double(value, d)) { cfg.sim.z_rate_limit = d; break; }
        if (key == "wheel_radius" && parse_double(value, d)) { cfg.sim.wheel_radius = d; break; }
        if (key == "vehicle_radius" && parse_double(value, d)) {
          cfg.sim.vehicle_radius = d;
          break;
        }
        if (key == "lidar_max_range" && parse_double(value, d)) {
          cfg.sim.lidar_max_range = d;
          break;
        }
        if (key == "lidar_min_depth" && parse_double(value, d)) {
          cfg.sim.lidar_min_depth = d;
          break;
        }
        return fail("unknown sim key: " + key);
      }

      case Section::Env: {
        EnvSpec& e = *env;
        if (key == "kind") {
          const auto kind = env_kind_from_name(value);
          if (!kind) return fail("unknown environment kind: " + value);
          e.kind = *kind;
          break;
        }
        if (key == "enabled" && parse_bool(value, b)) { e.enabled = b; break; }
        if (key == "mode") {
          if (value == "ground") { e.mode = Mobility::Ground; break; }
          if (value == "aerial") { e.mode = Mobility::Aerial; break; }
          return fail("unknown mode: " + value);
        }
        if (key == "width" && parse_double(value, d)) { e.width = d; break; }
        if (key == "length" && parse_double(value, d)) { e.length = d; break; }
        if (key == "ceiling" && parse_double(value, d)) { e.ceiling = d; break; }
        if (key == "amplitude" && parse_double(value, d)) { e.amplitude = d; break; }
        if (key == "period" && parse_double(value, d)) { e.period = d; break; }
        if (key == "pillar_radius" && parse_double(value, d)) { e.pillar_radius = d; break; }
        if (key == "door_width" && parse_double(value, d)) { e.door_width = d; break; }
        if (key == "arm_length" && parse_double(value, d)) { e.arm_length = d; break; }
        if (key == "point_spacing" && parse_double(value, d)) { e.point_spacing = d; break; }
        if (key == "start") {
          std::istringstream ss(value);
          double x, y, yaw;
          if (!(ss >> x >> y >> yaw)) return fail("start needs: x y yaw");
          e.has_start = true;
          e.start.position = Point3(x, y, 0.15);
          e.start.yaw = yaw;
          break;
        }
        if (key == "end_x") {
          if (!parse_range(value, e.end_x)) return fail("bad end_x range (min max)");
          e.has_end = true;
          break;
        }
        if (key == "end_y") {
          if (!parse_range(value, e.end_y)) return fail("bad end_y range (min max)");
          e.has_end = true;
          break;
        }
        return fail("unknown environment key: " + key);
      }
    }
  }

  if (cfg.environments.empty()) {
    lineno = 0;
    return fail("config defines no environments");
  }
  result.ok = true;
  return result;
}

ParseResult parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) {
    ParseResult r;
    r.error = {0, "cannot open config file: " + path};
    return r;
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const SuiteConfig& cfg) {
  std::ostringstream os;
  const PlannerConfig& p = cfg.planner;
  os << "[planner]\n";
  os << "voxel_size = " << fmt(p.voxel_size) << "\n";
  os << "min_points_per_voxel = " << p.min_points_per_voxel << "\n";
  os << "horizon = " << fmt(p.horizon) << "\n";
  os << "primitive_T = " << fmt(p.primitive_T) << "\n";
  os << "n_azimuth = " << p.n_azimuth << "\n";
  os << "sensor_azimuth_fov_deg = " << fmt(p.sensor_azimuth_fov * 180.0 / M_PI) << "\n";
  os << "elevation_row_deg = " << fmt(p.elevation_row * 180.0 / M_PI) << "\n";
  os << "yaw_escape = " << (p.yaw_escape ? "true" : "false") << "\n";
  os << "collision_buffer = " << fmt(p.cost.collision_buffer) << "\n";
  os << "near_buffer = " << fmt(p.cost.near_buffer) << "\n";
  os << "goal_weight = " << fmt(p.cost.goal_weight) << "\n";
  os << "dust_filter = " << (p.dust_filter_enabled ? "true" : "false") << "\n";
  os << "dust_window = " << p.dust_window << "\n";
  os << "dust_variance_threshold = " << fmt(p.dust_variance_threshold) << "\n";
  os << "min_bottom_clearance = " << fmt(p.vertical.min_bottom_clearance) << "\n";
  os << "min_top_clearance = " << fmt(p.vertical.min_top_clearance) << "\n";
  os << "vertical_speed = " << fmt(p.vertical.vertical_speed) << "\n";
  os << "yaw_gain = " << fmt(p.yaw_gain) << "\n";
  os << "max_yaw_rate = " << fmt(p.max_yaw_rate) << "\n";
  os << "\n[sim]\n";
  os << "timeout = " << fmt(cfg.timeout) << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "sim_rate = " << fmt(cfg.sim_rate) << "\n";
  os << "planner_rate = " << fmt(cfg.planner_rate) << "\n";
  os << "cloud_rate = " << fmt(cfg.cloud_rate) << "\n";
  os << "yaw_rate_limit = " << fmt(cfg.sim.yaw_rate_limit) << "\n";
  os << "z_rate_limit = " << fmt(cfg.sim.z_rate_limit) << "\n";
  os << "wheel_radius = " << fmt(cfg.sim.wheel_radius) << "\n";
  os << "vehicle_radius = " << fmt(cfg.sim.vehicle_radius) << "\n";
  os << "lidar_max_range = " << fmt(cfg.sim.lidar_max_range) << "\n";
  os << "lidar_min_depth = " << fmt(cfg.sim.lidar_min_depth) << "\n";
  for (const EnvSpec& e : cfg.environments) {
    os << "\n[env " << e.name << "]\n";
    os << "kind = " << env_kind_name(e.kind) << "\n";
    os << "enabled = " << (e.enabled ? "true" : "false") << "\n";
    os << "mode = " << (e.mode == Mobility::Aerial ? "aerial" : "ground") << "\n";
    os << "width = " << fmt(e.width) << "\n";
    os << "length = " << fmt(e.length) << "\n";
    os << "ceiling = " << fmt(e.ceiling) << "\n";
    os << "amplitude = " << fmt(e.amplitude) << "\n";
    os << "period = " << fmt(e.period) << "\n";
    os << "pillar_radius = " << fmt(e.pillar_radius) << "\n";
    os << "door_width = " << fmt(e.door_width) << "\n";
    os << "arm_length = " << fmt(e.arm_length) << "\n";
    os << "point_spacing = " << fmt(e.point_spacing) << "\n";
    if (e.has_start) {
      os << "start = " << fmt(e.start.position.x) << " " << fmt(e.start.position.y) << " "
         << fmt(e.start.yaw) << "\n";
    }
    if (e.has_end) {
      os << "end_x = " << fmt(e.end_x[0]) << " " << fmt(e.end_x[1]) << "\n";
      os << "end_y = " << fmt(e.end_y[0]) << " " << fmt(e.end_y[1]) << "\n";
    }
  }
  return os.str();
}

bool glob_match(const std::string& pattern, const std::string& text) {
  std::size_t p = 0, t = 0, star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

namespace {

/// Runs one environment to a terminal status on the shared virtual clock.
struct EnvRunner {
  const SuiteConfig& cfg;
  const GeneratedEnvironment& gen;
  EnvManager& manager;
  std::ofstream* tick_log;
  std::string map_path;

  EnvAction run(double start_time, const Pose& start_pose) {
    LocalPlanner::LogSink sink;
    if (tick_log) {
      sink = [this](const std::string& line) { (*tick_log) << line << "\n"; };
    }
    LocalPlanner planner(cfg.planner, std::move(sink));
    LocalMap map(0.2, 12.0);
    auto finish = [&](EnvAction action) {
      if (!map_path.empty()) {
        std::ofstream mf(map_path);
        map.dump(mf);
      }
      return action;
    };

    VehicleState state;
    state.pose = start_pose;
    state.pose.position.z = cfg.sim.wheel_radius;
    state.mobility = Mobility::Ground;
    state.stamp = start_time;

    ServiceRunner services;
    ServiceParams sp;
    const bool aerial = gen.mode == Mobility::Aerial;

    // Idle -> DriveForward, or Idle -> TakeOff -> FlyForward.
    double bottom = bottom_clearance(sonar_reading(state, cfg.sim, gen.world.ground_z),
                                     sonar_reading(state, cfg.sim, gen.world.ground_z),
                                     cfg.sim.wheel_radius);
    services.start(aerial ? MobilityMode::TakeOff : MobilityMode::DriveForward, sp,
                   state.pose, bottom);

    PositionTarget latest_target;
    latest_target.mobility = Mobility::Ground;
    latest_target.xy_frame = XyFrame::Body;
    latest_target.xy_mode = ControlMode::Velocity;
    bool have_target = false;

    std::uint64_t sim_ticks = 0, plan_ticks = 0, cloud_ticks = 0;
    const double sim_dt = 1.0 / cfg.sim_rate;

    while (true) {
      const double t_sim = start_time + (sim_ticks + 1) / cfg.sim_rate;
      const double t_plan = start_time + (plan_ticks + 1) / cfg.planner_rate;
      const double t_cloud = start_time + (cloud_ticks + 1) / cfg.cloud_rate;
      const double t_next = std::min({t_sim, t_plan, t_cloud});

      if (t_cloud <= t_next) {
        ++cloud_ticks;
        const PointCloud cloud = sense_lidar(gen.world, state.pose, cfg.sim);
        planner.on_point_cloud(cloud, state.pose);
        map.insert_cloud(planner.processed_cloud());
        map.prune_radius(state.pose.position);
      }

      if (t_plan <= t_next) {
        ++plan_ticks;
        const double sonar = sonar_reading(state, cfg.sim, gen.world.ground_z);
        bottom = bottom_clearance(sonar, sonar, cfg.sim.wheel_radius);
        const double top = gen.world.ceiling_height - state.pose.position.z;
        planner.on_pose(state.pose, t_plan);
        planner.on_clearance(bottom, top);

        ServiceInputs in;
        in.latest = state.pose;
        in.bottom_clearance = bottom;
        in.top_clearance = top;
        in.dt = 1.0 / cfg.planner_rate;
        const ServiceTick svc = services.tick(in);

        if (svc.done && services.mode() == MobilityMode::TakeOff) {
          services.start(MobilityMode::FlyForward, sp, state.pose, bottom);
        }

        if (svc.goal.via_planner) {
          PlannerGoal goal;
          goal.mobility = svc.goal.target.mobility;
          if (svc.goal.target.xy_frame == XyFrame::Body) {
            goal.frame = XyFrame::Body;
            goal.point = svc.goal.target.position;
          } else {
            goal.frame = XyFrame::Odometry;
            goal.point = svc.goal.target.position;
          }
          goal.z_frame = svc.goal.target.z_frame;
          goal.z_value = svc.goal.target.position.z;
          planner.on_goal(goal);

          const auto tick = planner.tick_publish(t_plan);
          latest_target = tick.target;
          have_target = true;

          if (tick.status == PlannerStatus::Stuck &&
              latest_target.mobility == Mobility::Ground) {
            const EnvAction action =
                manager.step({EnvEvent::Kind::StuckReported, t_plan, {}});
            if (!std::holds_alternative<Continue>(action)) return finish(action);
          }
        } else {
          latest_target = svc.goal.target;
          have_target = true;
          planner.tick_publish(t_plan);  // keep the tick log continuous
        }
      }

      if (t_sim <= t_next) {
        ++sim_ticks;
        if (have_target) {
          state = advance(state, latest_target, sim_dt, cfg.sim, gen.world);
        } else {
          state.stamp = t_sim;
        }

        if (collision_check(gen.world, state.pose, cfg.sim.vehicle_radius,
                            gen.world.ceiling_height)) {
          const EnvAction action = manager.step({EnvEvent::Kind::Collided, t_sim, {}});
          if (!std::holds_alternative<Continue>(action)) return finish(action);
        }
        if (manager.current().inside_end_range(state.pose.position)) {
          const EnvAction action =
              manager.step({EnvEvent::Kind::ReachedEnd, t_sim, state.pose.position});
          if (!std::holds_alternative<Continue>(action)) return finish(action);
        }
        const EnvAction action = manager.step({EnvEvent::Kind::Tick, t_sim, {}});
        if (!std::holds_alternative<Continue>(action)) return finish(action);
      }
    }
  }
};

}  // namespace

std::string format_report(const SuiteConfig& config,
                          const std::vector<EnvReportEntry>& report, ReportFormat format) {
  std::ostringstream os;
  char buf[160];
  if (format == ReportFormat::Text) {
    os << "# suite seed=" << config.seed << " timeout=" << fmt(config.timeout)
       << " envs=" << config.environments.size() << "\n";
    os << "# planner horizon=" << fmt(config.planner.horizon)
       << " collision_buffer=" << fmt(config.planner.cost.collision_buffer)
       << " near_buffer=" << fmt(config.planner.cost.near_buffer)
       << " goal_weight=" << fmt(config.planner.cost.goal_weight) << "\n";
  }
  std::size_t successful = 0, enabled = 0;
  for (const EnvReportEntry& e : report) {
    std::snprintf(buf, sizeof buf, "env %s status=%s t=%.3f\n", e.name.c_str(),
                  env_status_name(e.status), e.event_time);
    os << buf;
    if (e.status != EnvStatus::NotTesting) ++enabled;
    if (e.status == EnvStatus::Successful) ++successful;
  }
  if (format == ReportFormat::Text) {
    os << "summary: " << successful << "/" << enabled << " successful\n";
  }
  return os.str();
}

SuiteResult run_suite(const SuiteConfig& config, const RunOptions& options) {
  SuiteResult result;

  std::vector<GeneratedEnvironment> generated;
  std::vector<Environment> envs;
  generated.reserve(config.environments.size());
  for (const EnvSpec& spec : config.environments) {
    generated.push_back(generate_environment(spec, config.sim.vehicle_radius));
    envs.push_back(generated.back().environment);
  }

  EnvManager manager(std::move(envs), config.timeout);

  if (!options.out_dir.empty()) {
    std::filesystem::create_directories(options.out_dir);
  }

  double now = 0.0;
  EnvAction action = manager.start(now);
  while (std::holds_alternative<AdvanceTo>(action)) {
    const AdvanceTo& adv = std::get<AdvanceTo>(action);
    const GeneratedEnvironment& gen = generated[adv.env_index];

    std::ofstream tick_log;
    std::string map_path;
    if (!options.out_dir.empty()) {
      tick_log.open(options.out_dir + "/" + gen.environment.name + ".ticks.log");
      map_path = options.out_dir + "/" + gen.environment.name + ".map.txt";
    }

    EnvRunner runner{config, gen, manager, tick_log.is_open() ? &tick_log : nullptr,
                     map_path};
    // Each course starts on its own local clock continuation.
    now = manager.current().start_time;
    action = runner.run(now, adv.start);

    if (tick_log.is_open()) tick_log.flush();
  }

  if (std::holds_alternative<Finished>(action)) {
    result.report = std::get<Finished>(action).report;
  }
  result.report_text = format_report(config, result.report, options.format);

  bool all_ok = true;
  for (const EnvReportEntry& e : result.report) {
    if (e.status == EnvStatus::NotTesting) continue;
    if (e.status != EnvStatus::Successful) all_ok = false;
  }
  result.exit_code = all_ok ? 0 : 1;
  return result;
}

}  // namespace hybridnav
