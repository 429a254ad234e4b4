#pragma once

#include <cmath>
#include <vector>

#include "iabsim/geometry.hpp"

namespace iabsim {

/// Close-in path loss parameters (1 m reference distance).
struct ChannelParams {
  double frequency_ghz = 28.0;
  double alpha_los = 2.0;
  double alpha_nlos = 3.0;

  void validate() const;
};

/// Sectored (flat-top) pattern: `max_gain_dbi` inside the half-power beam,
/// `side_gain_dbi` everywhere else.
struct AntennaPattern {
  double max_gain_dbi = 24.0;
  double side_gain_dbi = -2.0;
  double hpbw_azimuth_deg = 60.0;
  double hpbw_elevation_deg = 25.0;

  void validate() const;
};

enum class Polarization { Horizontal, Vertical };

/// ITU-R P.838 specific attenuation coefficients, gamma = k R^beta [dB/km].
struct RainCoefficients {
  double k_h = 0.0;
  double beta_h = 0.0;
  double k_v = 0.0;
  double beta_v = 0.0;
};

/// Built-in coefficient table. Throws InvalidParameter for an unknown frequency.
RainCoefficients rain_coefficients(double frequency_ghz);

struct FoliageParams {
  double depth_m = 5.0;
};

/// Everything that enters the received power of one link, in dB units.
struct LinkBudget {
  double distance_m = 0.0;
  bool los = true;
  double tx_power_dbm = 0.0;
  double pathloss_db = 0.0;
  double tx_gain_dbi = 0.0;
  double rx_gain_dbi = 0.0;
  double rain_loss_db = 0.0;
  double foliage_loss_db = 0.0;
  double fading_power = 1.0;
  double received_power_dbm = 0.0;

  /// Recomposes the received power from the stored components.
  double recompose_dbm() const;
};

/// Inputs of received_power_dbm() besides transmit power and channel.
struct LinkInputs {
  double distance_m = 1.0;
  bool los = true;
  double tx_gain_dbi = 0.0;
  double rx_gain_dbi = 0.0;
  double rain_loss_db = 0.0;
  double foliage_loss_db = 0.0;
  double fading_power = 1.0;
};

/// 32.4 + 10 alpha log10(r) + 20 log10(fc[GHz]); distances below 1 m clamp to 1 m.
double path_loss_db(double distance_m, bool los, const ChannelParams& channel);

/// Azimuth-only sectored gain; `offset_deg` is normalised to [-180, 180] first.
double antenna_gain_db(double offset_deg, const AntennaPattern& pattern);

/// Main lobe iff both azimuth and elevation offsets fall inside their half beamwidths.
double antenna_gain_db(double azimuth_offset_deg, double elevation_offset_deg,
                       const AntennaPattern& pattern);

double rain_loss_db(double rate_mm_per_hr, double distance_m, const RainCoefficients& coeffs,
                    Polarization polarization = Polarization::Horizontal);

/// Vegetation loss of a single tree line, frequency in MHz.
double tree_line_loss_db(bool in_leaf, double depth_m, double frequency_mhz);

/// Sum of tree_line_loss_db over the crossed tree lines.
double foliage_loss_db(const std::vector<bool>& crossings, double depth_m, double frequency_mhz);
double foliage_loss_db(int in_leaf_count, int out_of_leaf_count, double depth_m,
                       double frequency_mhz);

/// |h|^2 for unit-power Rayleigh fading.
double sample_fading_power(Rng& rng);

LinkBudget received_power_dbm(double tx_power_dbm, const LinkInputs& inputs,
                              const ChannelParams& channel);

/// Thermal noise over `bandwidth_hz` plus the receiver noise figure.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace iabsim
