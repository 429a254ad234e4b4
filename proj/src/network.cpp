#include "iabsim/network.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "iabsim/errors.hpp"

namespace iabsim {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double dbm_to_mw(double dbm) { return db_to_linear(dbm); }

int uniform_index(std::size_t n, Rng& rng) {
  return static_cast<int>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
}

}  // namespace

LinkModel::LinkModel(const Scene& scene, const RadioParams& radio)
    : scene_(&scene), radio_(&radio) {
  radio.channel.validate();
  if (radio.rain_rate_mm_per_hr > 0.0) rain_ = rain_coefficients(radio.channel.frequency_ghz);

  if (!scene.three_d && !scene.walls.segments.empty()) {
    std::vector<Segment> walls;
    walls.reserve(scene.walls.segments.size());
    for (const auto& w : scene.walls.segments) walls.push_back(w.endpoints());
    walls_ = SegmentIndex(std::move(walls), scene.region);
  }
  if (!scene.trees.segments.empty()) {
    std::vector<Segment> trees;
    trees.reserve(scene.trees.segments.size());
    for (const auto& t : scene.trees.segments) trees.push_back(t.endpoints());
    trees_ = SegmentIndex(std::move(trees), scene.region);
  }
  if (scene.three_d && !scene.buildings.empty()) {
    buildings_ = PrismIndex(scene.buildings, scene.region);
  }
}

Point3 LinkModel::bs_position(int bs) const {
  const int m = scene_->num_mbs();
  return bs < m ? scene_->mbs.position3(static_cast<std::size_t>(bs))
                : scene_->sbs.position3(static_cast<std::size_t>(bs - m));
}

double LinkModel::bs_power_dbm(int bs) const {
  return is_mbs(bs) ? radio_->mbs_power_dbm : radio_->sbs_power_dbm;
}

const AntennaPattern& LinkModel::bs_antenna(int bs) const {
  return is_mbs(bs) ? radio_->mbs_antenna : radio_->sbs_antenna;
}

LinkGeometry LinkModel::geometry(const Point3& a, const Point3& b) const {
  LinkGeometry g;
  const Point2 a2 = a.head<2>();
  const Point2 b2 = b.head<2>();
  if (scene_->three_d) {
    g.distance_m = (a - b).norm();
    if (a != b) g.los = buildings_.los(a, b);
  } else {
    g.distance_m = (a2 - b2).norm();
    if (a2 != b2 && walls_.size() > 0) g.los = !walls_.blocks(a2, b2);
  }
  if (a2 != b2 && trees_.size() > 0) {
    for (int id : trees_.crossings(a2, b2)) {
      if (scene_->trees.in_leaf[static_cast<std::size_t>(id)]) {
        ++g.in_leaf;
      } else {
        ++g.out_of_leaf;
      }
    }
  }
  return g;
}

double LinkModel::path_loss_db(const LinkGeometry& g) const {
  return iabsim::path_loss_db(std::max(g.distance_m, 1.0), g.los, radio_->channel);
}

double LinkModel::propagation_loss_db(const LinkGeometry& g) const {
  double loss = path_loss_db(g);
  if (radio_->rain_rate_mm_per_hr > 0.0) {
    loss += rain_loss_db(radio_->rain_rate_mm_per_hr, g.distance_m, rain_, radio_->polarization);
  }
  if (g.in_leaf + g.out_of_leaf > 0) {
    loss += foliage_loss_db(g.in_leaf, g.out_of_leaf, radio_->foliage.depth_m,
                            radio_->channel.frequency_ghz * 1000.0);
  }
  return loss;
}

double LinkModel::steered_gain_db(const AntennaPattern& pattern, const Point3& from,
                                  const Point3& boresight_target, const Point3& towards) const {
  const Point3 aim = boresight_target - from;
  const Point3 dir = towards - from;
  const double az = (std::atan2(dir.y(), dir.x()) - std::atan2(aim.y(), aim.x())) * kRadToDeg;
  if (!scene_->three_d) return antenna_gain_db(az, pattern);
  const double el_aim = std::atan2(aim.z(), aim.head<2>().norm());
  const double el_dir = std::atan2(dir.z(), dir.head<2>().norm());
  return antenna_gain_db(az, (el_dir - el_aim) * kRadToDeg, pattern);
}

Eigen::MatrixXd access_loss_db(const LinkModel& model) {
  const Scene& s = model.scene();
  Eigen::MatrixXd loss(s.num_ue(), s.num_bs());
  for (int j = 0; j < s.num_bs(); ++j) {
    const Point3 bs = model.bs_position(j);
    for (int u = 0; u < s.num_ue(); ++u) {
      loss(u, j) = model.propagation_loss_db(model.geometry(bs, model.ue_position(u)));
    }
  }
  return loss;
}

Eigen::MatrixXd mean_access_power_dbm(const LinkModel& model, const Eigen::MatrixXd& loss_db) {
  const Scene& s = model.scene();
  Eigen::RowVectorXd eirp(s.num_bs());
  for (int j = 0; j < s.num_bs(); ++j) {
    eirp(j) = model.bs_power_dbm(j) + model.bs_antenna(j).max_gain_dbi +
              model.radio().ue_antenna.max_gain_dbi;
  }
  return (-loss_db).rowwise() + eirp;
}

std::vector<int> associate_ues(const Eigen::MatrixXd& mean_power_dbm) {
  if (mean_power_dbm.cols() == 0) throw EmptyNetwork("no base station to associate with");
  std::vector<int> serving(static_cast<std::size_t>(mean_power_dbm.rows()));
  for (Eigen::Index u = 0; u < mean_power_dbm.rows(); ++u) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < mean_power_dbm.cols(); ++j) {
      if (mean_power_dbm(u, j) > mean_power_dbm(u, best)) best = j;
    }
    serving[static_cast<std::size_t>(u)] = static_cast<int>(best);
  }
  return serving;
}

std::vector<int> associate_ues(const Scene& scene, const RadioParams& radio) {
  const LinkModel model(scene, radio);
  return associate_ues(mean_access_power_dbm(model, access_loss_db(model)));
}

std::vector<int> associate_backhaul(const LinkModel& model) {
  const Scene& s = model.scene();
  std::vector<int> parent(static_cast<std::size_t>(s.num_sbs()), -1);
  for (int k = 0; k < s.num_sbs(); ++k) {
    if (s.is_fiber(k)) continue;
    if (s.num_mbs() == 0) throw EmptyNetwork("IAB node without any donor");
    const Point3 sbs = s.sbs.position3(static_cast<std::size_t>(k));
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m < s.num_mbs(); ++m) {
      const double pl = model.path_loss_db(model.geometry(sbs, model.bs_position(m)));
      if (pl < best) {
        best = pl;
        parent[static_cast<std::size_t>(k)] = m;
      }
    }
  }
  return parent;
}

AssociationMap make_association(const Scene& scene, std::vector<int> ue_to_bs,
                                std::vector<int> sbs_to_mbs) {
  AssociationMap a;
  a.ue_to_bs = std::move(ue_to_bs);
  a.sbs_to_mbs = std::move(sbs_to_mbs);
  a.num_mbs = scene.num_mbs();
  a.num_sbs = scene.num_sbs();
  a.fiber_sbs.resize(static_cast<std::size_t>(a.num_sbs));
  for (int k = 0; k < a.num_sbs; ++k) a.fiber_sbs[static_cast<std::size_t>(k)] = scene.is_fiber(k);
  return a;
}

LoadTable compute_loads(const AssociationMap& assoc) {
  LoadTable t;
  t.per_bs.assign(static_cast<std::size_t>(assoc.num_mbs + assoc.num_sbs), 0);
  t.per_donor.assign(static_cast<std::size_t>(assoc.num_mbs), 0);
  for (int j : assoc.ue_to_bs) ++t.per_bs[static_cast<std::size_t>(j)];
  for (int k = 0; k < assoc.num_sbs; ++k) {
    const int parent = assoc.sbs_to_mbs[static_cast<std::size_t>(k)];
    if (assoc.fiber_sbs[static_cast<std::size_t>(k)] || parent < 0) continue;
    t.per_donor[static_cast<std::size_t>(parent)] +=
        t.per_bs[static_cast<std::size_t>(assoc.num_mbs + k)];
  }
  return t;
}

BandwidthPlan allocate_bandwidth(double mu, double total_hz, const LoadTable& loads,
                                 const AssociationMap& assoc) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidParameter("mu must lie in [0, 1]");
  if (!(total_hz > 0.0)) throw InvalidParameter("total bandwidth must be positive");
  BandwidthPlan plan;
  plan.mu = mu;
  plan.total_hz = total_hz;
  plan.backhaul_hz.assign(static_cast<std::size_t>(assoc.num_sbs), 0.0);
  for (int k = 0; k < assoc.num_sbs; ++k) {
    const int parent = assoc.sbs_to_mbs[static_cast<std::size_t>(k)];
    if (assoc.fiber_sbs[static_cast<std::size_t>(k)] || parent < 0) continue;
    const int donor_load = loads.per_donor[static_cast<std::size_t>(parent)];
    if (donor_load == 0) continue;
    plan.backhaul_hz[static_cast<std::size_t>(k)] =
        mu * total_hz * loads.per_bs[static_cast<std::size_t>(assoc.num_mbs + k)] / donor_load;
  }
  plan.access_hz.resize(assoc.ue_to_bs.size());
  for (std::size_t u = 0; u < assoc.ue_to_bs.size(); ++u) {
    const int n = loads.per_bs[static_cast<std::size_t>(assoc.ue_to_bs[u])];
    plan.access_hz[u] = (1.0 - mu) * total_hz / n;
  }
  return plan;
}

SlotDraws sample_slot(const AssociationMap& assoc, const LoadTable& loads, Rng& rng) {
  const int num_bs = assoc.num_mbs + assoc.num_sbs;
  const auto num_ue = static_cast<Eigen::Index>(assoc.ue_to_bs.size());
  SlotDraws slot;

  std::vector<std::vector<int>> served(static_cast<std::size_t>(num_bs));
  for (std::size_t u = 0; u < assoc.ue_to_bs.size(); ++u) {
    served[static_cast<std::size_t>(assoc.ue_to_bs[u])].push_back(static_cast<int>(u));
  }
  slot.access_boresight.assign(static_cast<std::size_t>(num_bs), -1);
  for (int j = 0; j < num_bs; ++j) {
    const auto& ues = served[static_cast<std::size_t>(j)];
    if (!ues.empty()) slot.access_boresight[static_cast<std::size_t>(j)] = ues[uniform_index(ues.size(), rng)];
  }

  std::vector<std::vector<int>> children(static_cast<std::size_t>(assoc.num_mbs));
  for (int k = 0; k < assoc.num_sbs; ++k) {
    const int parent = assoc.sbs_to_mbs[static_cast<std::size_t>(k)];
    if (parent >= 0 && !assoc.fiber_sbs[static_cast<std::size_t>(k)] &&
        loads.per_bs[static_cast<std::size_t>(assoc.num_mbs + k)] > 0) {
      children[static_cast<std::size_t>(parent)].push_back(k);
    }
  }
  slot.backhaul_boresight.assign(static_cast<std::size_t>(assoc.num_mbs), -1);
  for (int m = 0; m < assoc.num_mbs; ++m) {
    const auto& kids = children[static_cast<std::size_t>(m)];
    if (!kids.empty()) slot.backhaul_boresight[static_cast<std::size_t>(m)] = kids[uniform_index(kids.size(), rng)];
  }

  std::exponential_distribution<double> fading(1.0);
  slot.access_fading.resize(num_ue, num_bs);
  for (Eigen::Index j = 0; j < num_bs; ++j)
    for (Eigen::Index u = 0; u < num_ue; ++u) slot.access_fading(u, j) = fading(rng);
  slot.backhaul_fading.resize(assoc.num_sbs);
  for (int k = 0; k < assoc.num_sbs; ++k) slot.backhaul_fading(k) = fading(rng);
  slot.backhaul_interference_fading.resize(assoc.num_sbs, assoc.num_mbs);
  for (int m = 0; m < assoc.num_mbs; ++m)
    for (int k = 0; k < assoc.num_sbs; ++k) slot.backhaul_interference_fading(k, m) = fading(rng);
  return slot;
}

Eigen::MatrixXd path_gain_from_loss(const Eigen::MatrixXd& loss_db) {
  return (loss_db.array() * (-std::log(10.0) / 10.0)).exp().matrix();
}

double aggregate_interference(int ue, const AssociationMap& assoc, const LinkModel& model,
                              const Eigen::MatrixXd& path_gain, const SlotDraws& slot) {
  const int serving = assoc.ue_to_bs[static_cast<std::size_t>(ue)];
  const Point3 victim = model.ue_position(ue);
  const double rx_gain = db_to_linear(model.radio().ue_antenna.max_gain_dbi);
  double total = 0.0;
  for (int j = 0; j < static_cast<int>(slot.access_boresight.size()); ++j) {
    const int target = slot.access_boresight[static_cast<std::size_t>(j)];
    if (j == serving || target < 0) continue;
    const double tx_gain =
        model.radio().interference_gain == InterferenceGain::SideLobe
            ? model.bs_antenna(j).side_gain_dbi
            : model.steered_gain_db(model.bs_antenna(j), model.bs_position(j),
                                    model.ue_position(target), victim);
    total += dbm_to_mw(model.bs_power_dbm(j) + tx_gain) * rx_gain * path_gain(ue, j) *
             slot.access_fading(ue, j);
  }
  return total;
}

LinkSignals access_signals(const AssociationMap& assoc, const LinkModel& model,
                           const Eigen::MatrixXd& path_gain, const SlotDraws& slot) {
  const std::size_t n = assoc.ue_to_bs.size();
  LinkSignals out;
  out.signal_mw.resize(n);
  out.interference_mw.resize(n);
  const double rx_gain_db = model.radio().ue_antenna.max_gain_dbi;
  for (std::size_t u = 0; u < n; ++u) {
    const int j = assoc.ue_to_bs[u];
    const auto ui = static_cast<Eigen::Index>(u);
    out.signal_mw[u] =
        dbm_to_mw(model.bs_power_dbm(j) + model.bs_antenna(j).max_gain_dbi + rx_gain_db) *
        path_gain(ui, j) * slot.access_fading(ui, j);
    out.interference_mw[u] = aggregate_interference(static_cast<int>(u), assoc, model, path_gain, slot);
  }
  return out;
}

LinkSignals backhaul_signals(const AssociationMap& assoc, const LinkModel& model,
                             const SlotDraws& slot, bool with_interference) {
  const auto n = static_cast<std::size_t>(assoc.num_sbs);
  LinkSignals out;
  out.signal_mw.assign(n, 0.0);
  out.interference_mw.assign(n, 0.0);
  const auto& radio = model.radio();
  for (int k = 0; k < assoc.num_sbs; ++k) {
    const int parent = assoc.sbs_to_mbs[static_cast<std::size_t>(k)];
    if (assoc.fiber_sbs[static_cast<std::size_t>(k)] || parent < 0) continue;
    const int sbs_bs = assoc.num_mbs + k;
    const Point3 sbs = model.bs_position(sbs_bs);
    const Point3 donor = model.bs_position(parent);
    const double loss = model.propagation_loss_db(model.geometry(donor, sbs));
    out.signal_mw[static_cast<std::size_t>(k)] =
        dbm_to_mw(radio.mbs_power_dbm + radio.mbs_antenna.max_gain_dbi +
                  radio.sbs_antenna.max_gain_dbi - loss) *
        slot.backhaul_fading(k);
    if (!with_interference) continue;
    double total = 0.0;
    for (int m = 0; m < assoc.num_mbs; ++m) {
      const int target = slot.backhaul_boresight[static_cast<std::size_t>(m)];
      if (m == parent || target < 0) continue;
      const Point3 other = model.bs_position(m);
      double tx_gain = radio.mbs_antenna.side_gain_dbi;
      double rx_gain = radio.sbs_antenna.side_gain_dbi;
      if (radio.interference_gain == InterferenceGain::Steered) {
        tx_gain = model.steered_gain_db(radio.mbs_antenna, other,
                                        model.bs_position(assoc.num_mbs + target), sbs);
        rx_gain = model.steered_gain_db(radio.sbs_antenna, sbs, donor, other);
      }
      const double il = model.propagation_loss_db(model.geometry(other, sbs));
      total += dbm_to_mw(radio.mbs_power_dbm + tx_gain + rx_gain - il) *
               slot.backhaul_interference_fading(k, m);
    }
    out.interference_mw[static_cast<std::size_t>(k)] = total;
  }
  return out;
}

RateReport compute_rates(const BandwidthPlan& plan, const AssociationMap& assoc,
                         const LinkSignals& access, const LinkSignals& backhaul,
                         double noise_figure_db) {
  const auto shannon = [&](double bandwidth, double signal, double interference, double* sinr_db) {
    const double noise = bandwidth > 0.0 ? dbm_to_mw(noise_power_dbm(bandwidth, noise_figure_db)) : 0.0;
    const double sinr = signal / (interference + noise);
    if (sinr_db) *sinr_db = linear_to_db(sinr);
    return bandwidth > 0.0 ? bandwidth * std::log2(1.0 + sinr) : 0.0;
  };

  RateReport r;
  r.backhaul_rate_bps.assign(static_cast<std::size_t>(assoc.num_sbs),
                             std::numeric_limits<double>::infinity());
  for (int k = 0; k < assoc.num_sbs; ++k) {
    const auto ki = static_cast<std::size_t>(k);
    if (assoc.fiber_sbs[ki] || assoc.sbs_to_mbs[ki] < 0) continue;
    r.backhaul_rate_bps[ki] =
        shannon(plan.backhaul_hz[ki], backhaul.signal_mw[ki], backhaul.interference_mw[ki], nullptr);
  }

  const std::size_t n = assoc.ue_to_bs.size();
  r.ue_rate_bps.resize(n);
  r.ue_sinr_db.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    double rate = shannon(plan.access_hz[u], access.signal_mw[u], access.interference_mw[u],
                          &r.ue_sinr_db[u]);
    const int j = assoc.ue_to_bs[u];
    if (j >= assoc.num_mbs) rate = std::min(rate, r.backhaul_rate_bps[static_cast<std::size_t>(j - assoc.num_mbs)]);
    r.ue_rate_bps[u] = rate;
  }
  return r;
}

double coverage_fraction(const RateReport& report, double threshold_bps) {
  if (report.ue_rate_bps.empty()) throw UndefinedCoverage("coverage of a realization without UEs");
  std::size_t covered = 0;
  for (double rate : report.ue_rate_bps) covered += rate >= threshold_bps ? 1 : 0;
  return static_cast<double>(covered) / static_cast<double>(report.ue_rate_bps.size());
}

std::vector<double> hop_lengths(const AssociationMap& assoc, const LinkModel& model) {
  std::vector<double> hops;
  for (int k = 0; k < assoc.num_sbs; ++k) {
    const int parent = assoc.sbs_to_mbs[static_cast<std::size_t>(k)];
    if (assoc.fiber_sbs[static_cast<std::size_t>(k)] || parent < 0) continue;
    hops.push_back(model.geometry(model.bs_position(assoc.num_mbs + k), model.bs_position(parent)).distance_m);
  }
  return hops;
}

}  // namespace iabsim
