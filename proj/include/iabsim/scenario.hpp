#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iabsim/network.hpp"
#include "iabsim/terrain3d.hpp"

namespace iabsim {

enum class Mode { TwoD, ThreeD };

/// Every knob of one experiment. Defaults reproduce the dense-urban
/// parameter set (28 GHz, 1 GHz, 100 Mbps, (8, 100, 500)/km^2, ...).
struct ScenarioConfig {
  Region region;

  double mbs_density = 8.0;  // per km^2
  double sbs_density = 100.0;
  double ue_density = 500.0;
  int mbs_count = -1;  // >= 0 places exactly this many donors instead of a Poisson draw

  double wall_density = 500.0;
  double wall_length_m = 5.0;
  double tree_density = 0.0;
  double tree_length_m = 0.0;
  double in_leaf_probability = 0.2;

  RadioParams radio;

  double bandwidth_hz = 1e9;
  double mu = 0.5;
  bool optimize_mu = false;
  double mu_grid_step = 0.05;
  double rate_threshold_bps = 100e6;
  double fiber_fraction = 0.0;
  bool backhaul_interference = false;

  Mode mode = Mode::TwoD;
  double mbs_height_m = 25.0;
  double sbs_height_m = 10.0;
  double ue_height_m = 1.0;
  std::string buildings_path;  // empty: synthetic city
  std::optional<GeoOrigin> buildings_origin;
  CityParams city;

  int realizations = 1000;
  std::uint64_t seed = 1;
  bool common_random_numbers = true;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses a flat JSON object with dotted keys. Unknown keys, wrong types and
/// out-of-range values raise ConfigError with the key and its line number.
/// Relative footprint paths resolve against `base_dir`.
ScenarioConfig parse_scenario_text(const std::string& text, const std::string& base_dir = "");

ScenarioConfig parse_scenario(const std::string& path);

/// Canonical form: every key, sorted, with its resolved value.
nlohmann::json scenario_to_json(const ScenarioConfig& config);
std::string emit_scenario(const ScenarioConfig& config);

/// All keys understood by the parser.
std::vector<std::string> scenario_keys();

/// Canonical key of a sweepable axis (accepts the dotted key or a short alias
/// such as "lambda_s", "mu", "rain"). Throws ConfigError otherwise.
std::string canonical_axis(const std::string& axis);

/// Sets a sweepable axis to `value`, validating the range.
void set_axis(ScenarioConfig& config, const std::string& axis, double value);

/// Builds the canonical default grid {0, step, ..., 1}.
std::vector<double> mu_grid(double step);

}  // namespace iabsim
