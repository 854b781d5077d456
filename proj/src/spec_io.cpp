#include "ifsg/spec_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace ifsg {

using nlohmann::json;

namespace {

double normalize_in(double theta, AngleUnit unit) {
  if (unit == AngleUnit::Radians) return normalize_angle(theta);
  double d = std::fmod(theta, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d == 0.0 ? 0.0 : d;
}

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
  if (!j[key].is_number()) throw ValidationError(where + ": '" + key + "' must be a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) throw ValidationError(where + ": '" + key + "' must be finite");
  return v;
}

}  // namespace

const std::vector<std::string>& tolerance_keys() {
  static const std::vector<std::string> keys{"address_tol", "arc_eps",   "max_level",   "pair_budget",
                                             "render_eps",  "slope_tol", "zerner_depth"};
  return keys;
}

SimSystem SystemSpec::system() const {
  std::vector<Similarity> out;
  for (const auto& m : maps) {
    const double theta = angle_unit == AngleUnit::Degrees ? m.theta * std::numbers::pi / 180.0 : m.theta;
    out.emplace_back(m.r, theta, m.reflect, Point{m.t_re, m.t_im});
  }
  return SimSystem(std::move(out));
}

double SystemSpec::tolerance(const std::string& key, double fallback) const {
  auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

bool operator==(const SystemSpec& a, const SystemSpec& b) {
  auto rects = [](const std::optional<std::vector<Rect>>& r) {
    std::vector<std::array<double, 4>> out;
    if (r)
      for (auto x : *r) out.push_back({x.x0, x.y0, x.x1, x.y1});
    return std::make_pair(r.has_value(), out);
  };
  return a.name == b.name && a.angle_unit == b.angle_unit && a.maps == b.maps && rects(a.open_set) == rects(b.open_set) &&
         a.osc_asserted == b.osc_asserted && a.wsp_asserted == b.wsp_asserted && a.tolerances == b.tolerances;
}

SystemSpec parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("spec must be a JSON object");
  SystemSpec s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ValidationError("'name' must be a string");
    s.name = j["name"].get<std::string>();
  }
  if (!j.contains("angle_unit") || !j["angle_unit"].is_string())
    throw ValidationError("angle_unit must be \"degrees\" or \"radians\"");
  const auto unit = j["angle_unit"].get<std::string>();
  if (unit == "degrees") {
    s.angle_unit = AngleUnit::Degrees;
  } else if (unit == "radians") {
    s.angle_unit = AngleUnit::Radians;
  } else {
    throw ValidationError("angle_unit must be \"degrees\" or \"radians\"");
  }

  if (!j.contains("maps") || !j["maps"].is_array()) throw ValidationError("'maps' must be a list");
  for (std::size_t k = 0; k < j["maps"].size(); ++k) {
    const json& m = j["maps"][k];
    const std::string where = "map " + std::to_string(k + 1);
    if (!m.is_object()) throw ValidationError(where + ": must be an object");
    MapSpec ms;
    ms.r = number(m, "r", where);
    if (!(ms.r > 0.0)) throw ValidationError(where + ": ratio must be > 0");
    if (!(ms.r < 1.0)) throw ValidationError(where + ": ratio must be < 1");
    ms.theta = m.contains("theta") ? normalize_in(number(m, "theta", where), s.angle_unit) : 0.0;
    if (m.contains("reflect")) {
      if (!m["reflect"].is_boolean()) throw ValidationError(where + ": 'reflect' must be true or false");
      ms.reflect = m["reflect"].get<bool>();
    }
    if (!m.contains("t") || !m["t"].is_array() || m["t"].size() != 2 || !m["t"][0].is_number() ||
        !m["t"][1].is_number())
      throw ValidationError(where + ": 't' must be [re, im]");
    ms.t_re = m["t"][0].get<double>();
    ms.t_im = m["t"][1].get<double>();
    s.maps.push_back(ms);
  }
  if (s.maps.size() < 2) throw ValidationError("at least 2 maps are required");
  if (s.maps.size() > 255) throw ValidationError("at most 255 maps are supported");

  if (j.contains("open_set") && !j["open_set"].is_null()) {
    if (!j["open_set"].is_array()) throw ValidationError("'open_set' must be a list of [x0, y0, x1, y1]");
    std::vector<Rect> rects;
    for (const auto& r : j["open_set"]) {
      if (!r.is_array() || r.size() != 4 || !std::all_of(r.begin(), r.end(), [](const json& v) { return v.is_number(); }))
        throw ValidationError("'open_set' must be a list of [x0, y0, x1, y1]");
      Rect q{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
      if (!(q.x0 < q.x1 && q.y0 < q.y1)) throw ValidationError("open_set rectangle must have x0 < x1 and y0 < y1");
      rects.push_back(q);
    }
    s.open_set = std::move(rects);
  }
  if (j.contains("assertions")) {
    const json& a = j["assertions"];
    if (!a.is_object()) throw ValidationError("'assertions' must be an object");
    for (const auto& [k, v] : a.items()) {
      if (!v.is_boolean()) throw ValidationError("assertion '" + k + "' must be true or false");
      if (k == "osc_asserted") {
        s.osc_asserted = v.get<bool>();
      } else if (k == "wsp_asserted") {
        s.wsp_asserted = v.get<bool>();
      } else {
        throw ValidationError("unknown assertion '" + k + "'");
      }
    }
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (!t.is_object()) throw ValidationError("'tolerances' must be an object");
    const auto& keys = tolerance_keys();
    for (const auto& [k, v] : t.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ValidationError("unknown tolerance '" + k + "'");
      if (!v.is_number() || !(v.get<double>() >= 0.0)) throw ValidationError("tolerance '" + k + "' must be >= 0");
      s.tolerances[k] = v.get<double>();
    }
  }
  return s;
}

std::string serialize_spec(const SystemSpec& spec) {
  json j;
  if (!spec.name.empty()) j["name"] = spec.name;
  j["angle_unit"] = spec.angle_unit == AngleUnit::Degrees ? "degrees" : "radians";
  j["maps"] = json::array();
  for (const auto& m : spec.maps)
    j["maps"].push_back({{"r", m.r}, {"theta", m.theta}, {"reflect", m.reflect}, {"t", {m.t_re, m.t_im}}});
  if (spec.open_set) {
    j["open_set"] = json::array();
    for (auto r : *spec.open_set) j["open_set"].push_back({r.x0, r.y0, r.x1, r.y1});
  }
  if (spec.osc_asserted || spec.wsp_asserted)
    j["assertions"] = {{"osc_asserted", spec.osc_asserted}, {"wsp_asserted", spec.wsp_asserted}};
  if (!spec.tolerances.empty()) j["tolerances"] = spec.tolerances;
  return j.dump(2) + "\n";
}

SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read spec file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_spec(text.str());
}

}  // namespace ifsg
