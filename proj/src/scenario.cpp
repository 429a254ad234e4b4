#include "iabsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "iabsim/errors.hpp"

namespace iabsim {

namespace {

using nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Kind { Number, Integer, Boolean, Text };

struct Key {
  Kind kind;
  double min = -kInf;
  double max = kInf;
  std::function<void(ScenarioConfig&, const json&)> set;
  std::function<json(const ScenarioConfig&)> get;
  bool sweepable = false;
};

template <class Field>
Key number(Field field, double min, double max, bool sweepable = false) {
  return {Kind::Number, min, max,
          [field](ScenarioConfig& c, const json& v) { field(c) = v.get<double>(); },
          [field](const ScenarioConfig& c) { return json(field(const_cast<ScenarioConfig&>(c))); },
          sweepable};
}

template <class Field>
Key boolean(Field field, bool sweepable = false) {
  return {Kind::Boolean, 0, 1,
          [field](ScenarioConfig& c, const json& v) { field(c) = v.get<bool>(); },
          [field](const ScenarioConfig& c) { return json(field(const_cast<ScenarioConfig&>(c))); },
          sweepable};
}

#define FIELD(expr) [](ScenarioConfig& c) -> auto& { return c.expr; }

const std::map<std::string, Key>& key_table() {
  static const std::map<std::string, Key> table = [] {
    std::map<std::string, Key> t;
    t["region.radius_m"] = number(FIELD(region.radius_m), 1e-9, kInf);
    t["density.mbs"] = number(FIELD(mbs_density), 0, kInf);
    t["density.sbs"] = number(FIELD(sbs_density), 0, kInf, true);
    t["density.ue"] = number(FIELD(ue_density), 0, kInf);
    t["nodes.mbs_count"] = {Kind::Integer, -1, 1e6,
                            [](ScenarioConfig& c, const json& v) { c.mbs_count = v.get<int>(); },
                            [](const ScenarioConfig& c) { return json(c.mbs_count); }};
    t["blockage.density"] = number(FIELD(wall_density), 0, kInf, true);
    t["blockage.length_m"] = number(FIELD(wall_length_m), 0, kInf, true);
    t["trees.density"] = number(FIELD(tree_density), 0, kInf, true);
    t["trees.length_m"] = number(FIELD(tree_length_m), 0, kInf, true);
    t["trees.depth_m"] = number(FIELD(radio.foliage.depth_m), 0, kInf);
    t["trees.in_leaf_probability"] = number(FIELD(in_leaf_probability), 0, 1);
    t["power.mbs_dbm"] = number(FIELD(radio.mbs_power_dbm), -kInf, kInf);
    t["power.sbs_dbm"] = number(FIELD(radio.sbs_power_dbm), -kInf, kInf);
    t["power.ue_dbm"] = number(FIELD(radio.ue_power_dbm), -kInf, kInf);
    t["channel.frequency_ghz"] = number(FIELD(radio.channel.frequency_ghz), 1e-9, kInf);
    t["channel.alpha_los"] = number(FIELD(radio.channel.alpha_los), 1, kInf);
    t["channel.alpha_nlos"] = number(FIELD(radio.channel.alpha_nlos), 1, kInf);
    t["antenna.mbs.main_dbi"] = number(FIELD(radio.mbs_antenna.max_gain_dbi), -kInf, kInf);
    t["antenna.mbs.side_dbi"] = number(FIELD(radio.mbs_antenna.side_gain_dbi), -kInf, kInf);
    t["antenna.sbs.main_dbi"] = number(FIELD(radio.sbs_antenna.max_gain_dbi), -kInf, kInf);
    t["antenna.sbs.side_dbi"] = number(FIELD(radio.sbs_antenna.side_gain_dbi), -kInf, kInf);
    t["antenna.ue.main_dbi"] = number(FIELD(radio.ue_antenna.max_gain_dbi), -kInf, kInf);
    t["antenna.ue.side_dbi"] = number(FIELD(radio.ue_antenna.side_gain_dbi), -kInf, kInf);
    t["antenna.hpbw_azimuth_deg"] = {
        Kind::Number, 1e-9, 359.999999,
        [](ScenarioConfig& c, const json& v) {
          c.radio.mbs_antenna.hpbw_azimuth_deg = c.radio.sbs_antenna.hpbw_azimuth_deg = v.get<double>();
        },
        [](const ScenarioConfig& c) { return json(c.radio.mbs_antenna.hpbw_azimuth_deg); }};
    t["antenna.hpbw_elevation_deg"] = {
        Kind::Number, 1e-9, 359.999999,
        [](ScenarioConfig& c, const json& v) {
          c.radio.mbs_antenna.hpbw_elevation_deg = c.radio.sbs_antenna.hpbw_elevation_deg = v.get<double>();
        },
        [](const ScenarioConfig& c) { return json(c.radio.mbs_antenna.hpbw_elevation_deg); }};
    t["rain.rate_mm_hr"] = number(FIELD(radio.rain_rate_mm_per_hr), 0, kInf, true);
    t["rain.polarization"] = {
        Kind::Text, 0, 0,
        [](ScenarioConfig& c, const json& v) {
          const auto s = v.get<std::string>();
          if (s == "horizontal") {
            c.radio.polarization = Polarization::Horizontal;
          } else if (s == "vertical") {
            c.radio.polarization = Polarization::Vertical;
          } else {
            throw ConfigError("expected \"horizontal\" or \"vertical\"");
          }
        },
        [](const ScenarioConfig& c) {
          return json(c.radio.polarization == Polarization::Horizontal ? "horizontal" : "vertical");
        }};
    t["interference.gain_model"] = {
        Kind::Text, 0, 0,
        [](ScenarioConfig& c, const json& v) {
          const auto s = v.get<std::string>();
          if (s == "side_lobe") {
            c.radio.interference_gain = InterferenceGain::SideLobe;
          } else if (s == "steered") {
            c.radio.interference_gain = InterferenceGain::Steered;
          } else {
            throw ConfigError("expected \"side_lobe\" or \"steered\"");
          }
        },
        [](const ScenarioConfig& c) {
          return json(c.radio.interference_gain == InterferenceGain::SideLobe ? "side_lobe" : "steered");
        }};
    t["noise.figure_db"] = number(FIELD(radio.noise_figure_db), -kInf, kInf);
    t["bandwidth.total_hz"] = number(FIELD(bandwidth_hz), 1e-9, kInf);
    t["bandwidth.mu"] = {
        Kind::Text, 0, 1,
        [](ScenarioConfig& c, const json& v) {
          if (v.is_string()) {
            if (v.get<std::string>() != "optimize") throw ConfigError("expected a number or \"optimize\"");
            c.optimize_mu = true;
            return;
          }
          if (!v.is_number()) throw ConfigError("expected a number or \"optimize\"");
          const double mu = v.get<double>();
          if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("value out of range [0, 1]");
          c.mu = mu;
          c.optimize_mu = false;
        },
        [](const ScenarioConfig& c) { return c.optimize_mu ? json("optimize") : json(c.mu); },
        true};
    t["bandwidth.mu_grid_step"] = number(FIELD(mu_grid_step), 1e-6, 1);
    t["rate.threshold_bps"] = number(FIELD(rate_threshold_bps), 0, kInf, true);
    t["fiber.fraction"] = number(FIELD(fiber_fraction), 0, 1, true);
    t["backhaul.interference"] = boolean(FIELD(backhaul_interference), true);
    t["mode"] = {Kind::Text, 0, 0,
                 [](ScenarioConfig& c, const json& v) {
                   const auto s = v.get<std::string>();
                   if (s == "2d") {
                     c.mode = Mode::TwoD;
                   } else if (s == "3d") {
                     c.mode = Mode::ThreeD;
                   } else {
                     throw ConfigError("expected \"2d\" or \"3d\"");
                   }
                 },
                 [](const ScenarioConfig& c) { return json(c.mode == Mode::TwoD ? "2d" : "3d"); }};
    t["height.mbs_m"] = number(FIELD(mbs_height_m), 1e-9, kInf);
    t["height.sbs_m"] = number(FIELD(sbs_height_m), 1e-9, kInf, true);
    t["height.ue_m"] = number(FIELD(ue_height_m), 0, kInf);
    t["city.footprints"] = {Kind::Text, 0, 0,
                            [](ScenarioConfig& c, const json& v) { c.buildings_path = v.get<std::string>(); },
                            [](const ScenarioConfig& c) { return json(c.buildings_path); }};
    t["city.origin_lat_deg"] = {
        Kind::Number, -90, 90,
        [](ScenarioConfig& c, const json& v) {
          if (!c.buildings_origin) c.buildings_origin = GeoOrigin{};
          c.buildings_origin->latitude_deg = v.get<double>();
        },
        [](const ScenarioConfig& c) {
          return c.buildings_origin ? json(c.buildings_origin->latitude_deg) : json(nullptr);
        }};
    t["city.origin_lon_deg"] = {
        Kind::Number, -180, 180,
        [](ScenarioConfig& c, const json& v) {
          if (!c.buildings_origin) c.buildings_origin = GeoOrigin{};
          c.buildings_origin->longitude_deg = v.get<double>();
        },
        [](const ScenarioConfig& c) {
          return c.buildings_origin ? json(c.buildings_origin->longitude_deg) : json(nullptr);
        }};
    t["city.density"] = number(FIELD(city.density), 0, kInf);
    t["city.size_min_m"] = number(FIELD(city.size_min_m), 1e-9, kInf);
    t["city.size_max_m"] = number(FIELD(city.size_max_m), 1e-9, kInf);
    t["city.height_min_m"] = number(FIELD(city.height_min_m), 1e-9, kInf);
    t["city.height_max_m"] = number(FIELD(city.height_max_m), 1e-9, kInf);
    t["mc.realizations"] = {Kind::Integer, 1, 1e9,
                            [](ScenarioConfig& c, const json& v) { c.realizations = v.get<int>(); },
                            [](const ScenarioConfig& c) { return json(c.realizations); }};
    t["mc.seed"] = {Kind::Integer, 0, kInf,
                    [](ScenarioConfig& c, const json& v) { c.seed = v.get<std::uint64_t>(); },
                    [](const ScenarioConfig& c) { return json(c.seed); }};
    t["mc.common_random_numbers"] = boolean(FIELD(common_random_numbers));
    return t;
  }();
  return table;
}

#undef FIELD

const std::map<std::string, std::string>& axis_aliases() {
  static const std::map<std::string, std::string> aliases = {
      {"lambda_s", "density.sbs"},       {"lambda_b", "blockage.density"},
      {"l_b", "blockage.length_m"},      {"rain", "rain.rate_mm_hr"},
      {"r", "rain.rate_mm_hr"},          {"l_t", "trees.length_m"},
      {"lambda_t", "trees.density"},     {"mu", "bandwidth.mu"},
      {"f", "fiber.fraction"},           {"fiber", "fiber.fraction"},
      {"v", "height.sbs_m"},             {"r_th", "rate.threshold_bps"},
      {"threshold", "rate.threshold_bps"}};
  return aliases;
}

int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

[[noreturn]] void key_error(const std::string& key, int line, const std::string& what) {
  std::ostringstream msg;
  msg << "scenario key '" << key << "'";
  if (line > 0) msg << " (line " << line << ")";
  msg << ": " << what;
  throw ConfigError(msg.str());
}

void apply(ScenarioConfig& c, const std::string& key, const json& value, int line) {
  const auto& table = key_table();
  const auto it = table.find(key);
  if (it == table.end()) key_error(key, line, "unknown key");
  const Key& k = it->second;
  switch (k.kind) {
    case Kind::Number:
      if (!value.is_number()) key_error(key, line, "expected a number");
      if (!(value.get<double>() >= k.min && value.get<double>() <= k.max)) {
        std::ostringstream msg;
        msg << "value " << value.get<double>() << " out of range [" << k.min << ", " << k.max << "]";
        key_error(key, line, msg.str());
      }
      break;
    case Kind::Integer:
      if (!value.is_number_integer()) key_error(key, line, "expected an integer");
      if (!(value.get<double>() >= k.min && value.get<double>() <= k.max)) {
        key_error(key, line, "value out of range");
      }
      break;
    case Kind::Boolean:
      if (!value.is_boolean()) key_error(key, line, "expected true or false");
      break;
    case Kind::Text:
      if (key != "bandwidth.mu" && !value.is_string()) key_error(key, line, "expected a string");
      break;
  }
  try {
    k.set(c, value);
  } catch (const ConfigError& e) {
    key_error(key, line, e.what());
  }
}

}  // namespace

void ScenarioConfig::validate() const {
  const auto fail = [](const std::string& key, const std::string& what) { key_error(key, 0, what); };
  if (!(region.radius_m > 0.0)) fail("region.radius_m", "must be positive");
  if (mbs_density < 0 || sbs_density < 0 || ue_density < 0) fail("density", "must be non-negative");
  if (!(mu >= 0.0 && mu <= 1.0)) fail("bandwidth.mu", "must lie in [0, 1]");
  if (!(fiber_fraction >= 0.0 && fiber_fraction <= 1.0)) fail("fiber.fraction", "must lie in [0, 1]");
  if (!(in_leaf_probability >= 0.0 && in_leaf_probability <= 1.0)) {
    fail("trees.in_leaf_probability", "must lie in [0, 1]");
  }
  if (realizations < 1) fail("mc.realizations", "must be at least 1");
  if (!(bandwidth_hz > 0.0)) fail("bandwidth.total_hz", "must be positive");
  if (radio.channel.alpha_nlos < radio.channel.alpha_los) {
    fail("channel.alpha_nlos", "must not be below channel.alpha_los");
  }
  if (radio.mbs_antenna.max_gain_dbi < radio.mbs_antenna.side_gain_dbi) {
    fail("antenna.mbs.main_dbi", "must not be below the side lobe gain");
  }
  if (radio.sbs_antenna.max_gain_dbi < radio.sbs_antenna.side_gain_dbi) {
    fail("antenna.sbs.main_dbi", "must not be below the side lobe gain");
  }
  if (city.size_max_m < city.size_min_m) fail("city.size_max_m", "must not be below city.size_min_m");
  if (city.height_max_m < city.height_min_m) {
    fail("city.height_max_m", "must not be below city.height_min_m");
  }
  if (radio.rain_rate_mm_per_hr > 0.0) {
    try {
      rain_coefficients(radio.channel.frequency_ghz);
    } catch (const InvalidParameter& e) {
      fail("rain.rate_mm_hr", e.what());
    }
  }
}

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& base_dir) {
  ScenarioConfig config;
  const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char ch) { return std::isspace(ch); });
  if (blank) return config;

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object of dotted keys");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_null()) continue;
    apply(config, key, value, line_of_key(text, key));
  }
  if (!config.buildings_path.empty() && !base_dir.empty() &&
      std::filesystem::path(config.buildings_path).is_relative()) {
    config.buildings_path = (std::filesystem::path(base_dir) / config.buildings_path).lexically_normal().string();
  }
  config.validate();
  return config;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario_text(buf.str(), std::filesystem::path(path).parent_path().string());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

nlohmann::json scenario_to_json(const ScenarioConfig& config) {
  json out = json::object();
  for (const auto& [key, k] : key_table()) out[key] = k.get(config);
  return out;
}

std::string emit_scenario(const ScenarioConfig& config) { return scenario_to_json(config).dump(2) + "\n"; }

std::vector<std::string> scenario_keys() {
  std::vector<std::string> keys;
  for (const auto& entry : key_table()) keys.push_back(entry.first);
  return keys;
}

std::string canonical_axis(const std::string& axis) {
  std::string lower = axis;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (const auto it = axis_aliases().find(lower); it != axis_aliases().end()) return it->second;
  const auto& table = key_table();
  if (const auto it = table.find(axis); it != table.end() && it->second.sweepable) return axis;
  throw ConfigError("unknown sweep axis '" + axis + "'");
}

void set_axis(ScenarioConfig& config, const std::string& axis, double value) {
  const std::string key = canonical_axis(axis);
  if (key_table().at(key).kind == Kind::Boolean) {
    if (value != 0.0 && value != 1.0) {
      throw ConfigError("key '" + key + "': sweep values must be 0 or 1");
    }
    apply(config, key, json(value == 1.0), 0);
  } else {
    apply(config, key, json(value), 0);
  }
  config.validate();
}

std::vector<double> mu_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw InvalidParameter("mu grid step must lie in (0, 1]");
  const int n = static_cast<int>(std::floor(1.0 / step + 1e-9));
  std::vector<double> grid;
  for (int i = 0; i <= n; ++i) grid.push_back(std::min(1.0, std::round(i * step * 1e9) / 1e9));
  if (grid.back() < 1.0) grid.push_back(1.0);
  return grid;
}

}  // namespace iabsim
