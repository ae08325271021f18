#pragma once

#include <optional>
#include <string>

#include "hybridnav/sim.hpp"

namespace hybridnav {

enum class EnvKind { Corridor, HorizontalSine, VerticalSine, TJunction, Doorway };

const char* env_kind_name(EnvKind k);
std::optional<EnvKind> env_kind_from_name(const std::string& name);

/// Parameters for one generated course. Geometry-specific fields are ignored
/// by kinds that do not use them; zeroed start/end fields mean "use the
/// kind's default".
struct EnvSpec {
  std::string name;
  EnvKind kind = EnvKind::Corridor;
  bool enabled = true;
  Mobility mode = Mobility::Ground;

  double width = 1.5;
  double length = 8.0;
  double ceiling = 2.5;
  double amplitude = 0.8;      // horizontal sine lateral swing
  double period = 8.0;         // horizontal sine wavelength
  double pillar_radius = 0.12; // horizontal sine interior obstacle
  double door_width = 1.0;     // doorway gap
  double arm_length = 4.0;     // t-junction bar half-length
  double point_spacing = 0.1;  // wall sampling density

  bool has_start = false;
  Pose start;
  bool has_end = false;
  double end_x[2] = {0.0, 0.0};
  double end_y[2] = {0.0, 0.0};
};

struct GeneratedEnvironment {
  WorldGeometry world;
  Environment environment;
  Mobility mode = Mobility::Ground;
  bool passable = true;  // width clears twice the vehicle radius
};

GeneratedEnvironment generate_environment(const EnvSpec& spec,
                                          double vehicle_radius = 0.35);

}  // namespace hybridnav
