#pragma once

// JSON system descriptions.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ifsg/intersection.hpp"

namespace ifsg {

enum class AngleUnit { Degrees, Radians };

struct MapSpec {
  double r = 0.5;
  double theta = 0.0;  // in the file's angle unit, normalized to (-180, 180] or (-pi, pi]
  bool reflect = false;
  double t_re = 0.0;
  double t_im = 0.0;
  friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

struct SystemSpec {
  std::string name;
  AngleUnit angle_unit = AngleUnit::Radians;
  std::vector<MapSpec> maps;
  std::optional<std::vector<Rect>> open_set;
  bool osc_asserted = false;
  bool wsp_asserted = false;
  std::map<std::string, double> tolerances;

  SimSystem system() const;
  /// Override from `tolerances`, or the fallback.
  double tolerance(const std::string& key, double fallback) const;
  friend bool operator==(const SystemSpec& a, const SystemSpec& b);
};

/// Keys accepted under "tolerances".
const std::vector<std::string>& tolerance_keys();

/// Throws ValidationError naming the offending map or field.
SystemSpec parse_spec(const std::string& text);
std::string serialize_spec(const SystemSpec& spec);
SystemSpec load_spec(const std::string& path);

}  // namespace ifsg
