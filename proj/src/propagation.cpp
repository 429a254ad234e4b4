#include "iabsim/propagation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "iabsim/errors.hpp"

namespace iabsim {

namespace {

struct RainRow {
  double frequency_ghz;
  RainCoefficients coeffs;
};

// ITU-R P.838-3.
constexpr RainRow kRainTable[] = {
    {28.0, {0.2051, 0.9679, 0.1964, 0.9277}},
};

double normalize_deg(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d < -180.0) d += 360.0;
  return d;
}

}  // namespace

void ChannelParams::validate() const {
  if (!(frequency_ghz > 0.0)) throw InvalidParameter("carrier frequency must be positive");
  if (!(alpha_los >= 1.0) || !(alpha_nlos >= alpha_los)) {
    throw InvalidParameter("path loss exponents must satisfy alpha_nlos >= alpha_los >= 1");
  }
}

void AntennaPattern::validate() const {
  if (!(max_gain_dbi >= side_gain_dbi)) {
    throw InvalidParameter("antenna main lobe gain must not be below the side lobe gain");
  }
  if (!(hpbw_azimuth_deg > 0.0 && hpbw_azimuth_deg < 360.0) ||
      !(hpbw_elevation_deg > 0.0 && hpbw_elevation_deg < 360.0)) {
    throw InvalidParameter("half power beamwidth must lie in (0, 360) degrees");
  }
}

RainCoefficients rain_coefficients(double frequency_ghz) {
  for (const auto& row : kRainTable) {
    if (std::abs(row.frequency_ghz - frequency_ghz) < 1e-9) return row.coeffs;
  }
  std::ostringstream msg;
  msg << "no rain coefficients for " << frequency_ghz << " GHz";
  throw InvalidParameter(msg.str());
}

double LinkBudget::recompose_dbm() const {
  return tx_power_dbm + tx_gain_dbi + rx_gain_dbi - pathloss_db - rain_loss_db -
         foliage_loss_db + linear_to_db(fading_power);
}

double path_loss_db(double distance_m, bool los, const ChannelParams& channel) {
  if (!(distance_m > 0.0)) throw InvalidParameter("link distance must be positive");
  const double r = std::max(distance_m, 1.0);
  const double alpha = los ? channel.alpha_los : channel.alpha_nlos;
  return 32.4 + 10.0 * alpha * std::log10(r) + 20.0 * std::log10(channel.frequency_ghz);
}

double antenna_gain_db(double offset_deg, const AntennaPattern& pattern) {
  return std::abs(normalize_deg(offset_deg)) <= 0.5 * pattern.hpbw_azimuth_deg
             ? pattern.max_gain_dbi
             : pattern.side_gain_dbi;
}

double antenna_gain_db(double azimuth_offset_deg, double elevation_offset_deg,
                       const AntennaPattern& pattern) {
  const bool in_beam =
      std::abs(normalize_deg(azimuth_offset_deg)) <= 0.5 * pattern.hpbw_azimuth_deg &&
      std::abs(normalize_deg(elevation_offset_deg)) <= 0.5 * pattern.hpbw_elevation_deg;
  return in_beam ? pattern.max_gain_dbi : pattern.side_gain_dbi;
}

double rain_loss_db(double rate_mm_per_hr, double distance_m, const RainCoefficients& coeffs,
                    Polarization polarization) {
  if (!(rate_mm_per_hr >= 0.0)) throw InvalidParameter("rain rate must be non-negative");
  if (rate_mm_per_hr == 0.0) return 0.0;
  const bool h = polarization == Polarization::Horizontal;
  const double k = h ? coeffs.k_h : coeffs.k_v;
  const double beta = h ? coeffs.beta_h : coeffs.beta_v;
  return k * std::pow(rate_mm_per_hr, beta) * (distance_m / 1000.0);
}

double tree_line_loss_db(bool in_leaf, double depth_m, double frequency_mhz) {
  if (!(depth_m >= 0.0)) throw InvalidParameter("vegetation depth must be non-negative");
  return in_leaf ? 0.39 * std::pow(frequency_mhz, 0.39) * std::pow(depth_m, 0.25)
                 : 0.37 * std::pow(frequency_mhz, 0.18) * std::pow(depth_m, 0.59);
}

double foliage_loss_db(const std::vector<bool>& crossings, double depth_m, double frequency_mhz) {
  int in_leaf = 0;
  for (bool leaf : crossings) in_leaf += leaf ? 1 : 0;
  return foliage_loss_db(in_leaf, static_cast<int>(crossings.size()) - in_leaf, depth_m,
                         frequency_mhz);
}

double foliage_loss_db(int in_leaf_count, int out_of_leaf_count, double depth_m,
                       double frequency_mhz) {
  if (!(depth_m >= 0.0)) throw InvalidParameter("vegetation depth must be non-negative");
  double loss = 0.0;
  if (in_leaf_count > 0) loss += in_leaf_count * tree_line_loss_db(true, depth_m, frequency_mhz);
  if (out_of_leaf_count > 0) {
    loss += out_of_leaf_count * tree_line_loss_db(false, depth_m, frequency_mhz);
  }
  return loss;
}

double sample_fading_power(Rng& rng) { return std::exponential_distribution<double>(1.0)(rng); }

LinkBudget received_power_dbm(double tx_power_dbm, const LinkInputs& in,
                              const ChannelParams& channel) {
  LinkBudget b;
  b.distance_m = in.distance_m;
  b.los = in.los;
  b.tx_power_dbm = tx_power_dbm;
  b.pathloss_db = path_loss_db(in.distance_m, in.los, channel);
  b.tx_gain_dbi = in.tx_gain_dbi;
  b.rx_gain_dbi = in.rx_gain_dbi;
  b.rain_loss_db = in.rain_loss_db;
  b.foliage_loss_db = in.foliage_loss_db;
  b.fading_power = in.fading_power;
  b.received_power_dbm = b.recompose_dbm();
  return b;
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
  if (!(bandwidth_hz > 0.0)) return -std::numeric_limits<double>::infinity();
  return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

}  // namespace iabsim
