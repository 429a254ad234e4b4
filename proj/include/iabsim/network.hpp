#pragma once

#include <vector>

#include <Eigen/Core>

#include "iabsim/geometry.hpp"
#include "iabsim/grid_index.hpp"
#include "iabsim/propagation.hpp"
#include "iabsim/terrain3d.hpp"

namespace iabsim {

/// One sampled world. Base stations are indexed MBSs first, then SBSs.
struct Scene {
  Region region;
  NodeSet mbs{NodeKind::Mbs, {}, {}};
  NodeSet sbs{NodeKind::Sbs, {}, {}};
  NodeSet ue{NodeKind::Ue, {}, {}};
  WallSet walls;
  TreeLineSet trees;
  std::vector<BuildingPrism> buildings;
  std::vector<bool> fiber_sbs;  // empty means no fiber-connected SBS
  bool three_d = false;

  int num_mbs() const { return static_cast<int>(mbs.size()); }
  int num_sbs() const { return static_cast<int>(sbs.size()); }
  int num_bs() const { return num_mbs() + num_sbs(); }
  int num_ue() const { return static_cast<int>(ue.size()); }
  bool is_fiber(int sbs_index) const {
    return !fiber_sbs.empty() && fiber_sbs[static_cast<std::size_t>(sbs_index)];
  }
};

/// Antenna gain applied on interfering links. `SideLobe` evaluates every
/// interfering transmitter (and, on backhaul, the victim's receive beam) at the
/// side-lobe gain; `Steered` points each interferer at one of its own served
/// nodes and evaluates the sectored pattern at the actual offset angle.
enum class InterferenceGain { SideLobe, Steered };

struct RadioParams {
  ChannelParams channel;
  AntennaPattern mbs_antenna{24.0, -2.0, 60.0, 25.0};
  AntennaPattern sbs_antenna{24.0, -2.0, 60.0, 25.0};
  AntennaPattern ue_antenna{0.0, 0.0, 359.0, 359.0};
  double mbs_power_dbm = 40.0;
  double sbs_power_dbm = 24.0;
  double ue_power_dbm = 0.0;
  double rain_rate_mm_per_hr = 0.0;
  Polarization polarization = Polarization::Horizontal;
  FoliageParams foliage;
  double noise_figure_db = 5.0;
  InterferenceGain interference_gain = InterferenceGain::SideLobe;
};

/// Geometric facts about one link.
struct LinkGeometry {
  double distance_m = 0.0;
  bool los = true;
  int in_leaf = 0;
  int out_of_leaf = 0;
};

/// Propagation environment of a Scene. Holds the obstacle indexes and answers
/// per-link queries; 2D scenes use walls, 3D scenes use building prisms and
/// 3D distances. Tree lines are crossed in the ground plane in both modes.
class LinkModel {
 public:
  LinkModel(const Scene& scene, const RadioParams& radio);

  const Scene& scene() const { return *scene_; }
  const RadioParams& radio() const { return *radio_; }

  Point3 bs_position(int bs) const;
  Point3 ue_position(int ue) const { return scene_->ue.position3(static_cast<std::size_t>(ue)); }
  bool is_mbs(int bs) const { return bs < scene_->num_mbs(); }
  double bs_power_dbm(int bs) const;
  const AntennaPattern& bs_antenna(int bs) const;

  LinkGeometry geometry(const Point3& a, const Point3& b) const;

  /// Path loss of the blockage state of the link, no weather.
  double path_loss_db(const LinkGeometry& g) const;

  /// Path loss plus rain and foliage.
  double propagation_loss_db(const LinkGeometry& g) const;

  /// Tx gain of `pattern` at `from` steered to `boresight_target`, towards `towards`.
  double steered_gain_db(const AntennaPattern& pattern, const Point3& from,
                         const Point3& boresight_target, const Point3& towards) const;

 private:
  const Scene* scene_;
  const RadioParams* radio_;
  RainCoefficients rain_;
  SegmentIndex walls_;
  SegmentIndex trees_;
  PrismIndex buildings_;
};

struct AssociationMap {
  std::vector<int> ue_to_bs;    // combined BS index
  std::vector<int> sbs_to_mbs;  // parent donor, -1 for fiber-connected SBSs
  std::vector<bool> fiber_sbs;
  int num_mbs = 0;
  int num_sbs = 0;
};

struct LoadTable {
  std::vector<int> per_bs;     // UEs served by each BS
  std::vector<int> per_donor;  // summed load of the IAB children of each MBS
};

struct BandwidthPlan {
  double mu = 0.0;
  double total_hz = 0.0;
  std::vector<double> backhaul_hz;  // per SBS
  std::vector<double> access_hz;    // per UE
};

struct RateReport {
  std::vector<double> ue_rate_bps;
  std::vector<double> ue_sinr_db;
  std::vector<double> backhaul_rate_bps;  // per SBS, +inf for fiber-connected SBSs
};

/// Per-slot random state: small-scale fading and the boresight of every
/// transmitter (a uniformly chosen UE, or SBS child for donors).
struct SlotDraws {
  Eigen::MatrixXd access_fading;                 // UE x BS
  Eigen::VectorXd backhaul_fading;               // per SBS, towards its parent
  Eigen::MatrixXd backhaul_interference_fading;  // SBS x MBS
  std::vector<int> access_boresight;             // per BS, UE index or -1 (silent)
  std::vector<int> backhaul_boresight;           // per MBS, SBS index or -1 (silent)
};

/// Received signal and interference in mW for the access (per UE) and
/// backhaul (per SBS) hops.
struct LinkSignals {
  std::vector<double> signal_mw;
  std::vector<double> interference_mw;
};

/// UE x BS propagation loss (path loss + rain + foliage) in dB.
Eigen::MatrixXd access_loss_db(const LinkModel& model);

/// UE x BS fading-free received power with boresight gains, in dBm.
Eigen::MatrixXd mean_access_power_dbm(const LinkModel& model, const Eigen::MatrixXd& loss_db);

/// Argmax over each row; ties go to the lower BS index.
std::vector<int> associate_ues(const Eigen::MatrixXd& mean_power_dbm);

/// Maximum average received power association computed from scratch.
std::vector<int> associate_ues(const Scene& scene, const RadioParams& radio);

/// Minimum path loss donor for every non-fiber SBS; -1 for fiber SBSs.
std::vector<int> associate_backhaul(const LinkModel& model);

AssociationMap make_association(const Scene& scene, std::vector<int> ue_to_bs,
                                std::vector<int> sbs_to_mbs);

LoadTable compute_loads(const AssociationMap& assoc);

BandwidthPlan allocate_bandwidth(double mu, double total_hz, const LoadTable& loads,
                                 const AssociationMap& assoc);

SlotDraws sample_slot(const AssociationMap& assoc, const LoadTable& loads, Rng& rng);

/// Interference at `ue` from every active BS except its server, mW.
double aggregate_interference(int ue, const AssociationMap& assoc, const LinkModel& model,
                              const Eigen::MatrixXd& path_gain, const SlotDraws& slot);

/// Linear path gains 10^(-loss/10).
Eigen::MatrixXd path_gain_from_loss(const Eigen::MatrixXd& loss_db);

LinkSignals access_signals(const AssociationMap& assoc, const LinkModel& model,
                           const Eigen::MatrixXd& path_gain, const SlotDraws& slot);

/// Donor-to-SBS signals; interference from other transmitting donors only when
/// `with_interference` is set. Fiber SBSs get zero entries.
LinkSignals backhaul_signals(const AssociationMap& assoc, const LinkModel& model,
                             const SlotDraws& slot, bool with_interference);

RateReport compute_rates(const BandwidthPlan& plan, const AssociationMap& assoc,
                         const LinkSignals& access, const LinkSignals& backhaul,
                         double noise_figure_db);

/// Fraction of UEs with rate >= threshold. Throws UndefinedCoverage without UEs.
double coverage_fraction(const RateReport& report, double threshold_bps);

/// Distances from every IAB SBS to its donor.
std::vector<double> hop_lengths(const AssociationMap& assoc, const LinkModel& model);

}  // namespace iabsim
