#include "iabsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "iabsim/errors.hpp"

namespace iabsim {

namespace {

bool evaluation_only(const std::string& key) {
  return key == "bandwidth.mu" || key == "rate.threshold_bps" || key == "backhaul.interference";
}

// Runs task(i) for i in [0, n) on `workers` threads. Results are written by
// index, so the outcome never depends on scheduling.
template <class Task>
void parallel_for(int n, int workers, Task&& task) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<BuildingPrism> load_fixed_buildings(const ScenarioConfig& config) {
  if (config.mode != Mode::ThreeD || config.buildings_path.empty()) return {};
  return load_buildings(config.buildings_path, config.buildings_origin);
}

}  // namespace

Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(salt),
                    static_cast<std::uint32_t>(salt >> 32)};
  return Rng(seq);
}

Realization Realization::build(const ScenarioConfig& config, std::uint64_t seed,
                               const std::vector<BuildingPrism>* buildings) {
  Realization r;
  r.radio_ = config.radio;
  r.bandwidth_hz_ = config.bandwidth_hz;
  Scene& s = r.scene_;
  s.region = config.region;
  s.three_d = config.mode == Mode::ThreeD;

  {
    Rng rng = make_stream(seed, Stream::Mbs);
    auto pts = config.mbs_count >= 0
                   ? sample_uniform_points(static_cast<std::size_t>(config.mbs_count), s.region, rng)
                   : sample_fhppp(config.mbs_density, s.region, rng);
    s.mbs = make_node_set(NodeKind::Mbs, std::move(pts), config.mbs_height_m);
  }
  {
    Rng rng = make_stream(seed, Stream::Sbs);
    s.sbs = make_node_set(NodeKind::Sbs, sample_fhppp(config.sbs_density, s.region, rng),
                          config.sbs_height_m);
  }
  {
    Rng rng = make_stream(seed, Stream::Ue);
    s.ue = make_node_set(NodeKind::Ue, sample_fhppp(config.ue_density, s.region, rng),
                         config.ue_height_m);
  }
  if (!s.three_d) {
    Rng rng = make_stream(seed, Stream::Walls);
    s.walls = sample_walls(config.wall_density, config.wall_length_m, s.region, rng);
  } else if (buildings) {
    s.buildings = *buildings;
  } else {
    Rng rng = make_stream(seed, Stream::Buildings);
    s.buildings = generate_synthetic_city(config.city, s.region, rng);
  }
  {
    Rng rng = make_stream(seed, Stream::Trees);
    s.trees = sample_tree_lines(config.tree_density, config.tree_length_m,
                                config.in_leaf_probability, s.region, rng);
  }
  if (config.fiber_fraction > 0.0 && s.num_sbs() > 0) {
    Rng rng = make_stream(seed, Stream::Fiber);
    std::vector<int> order(static_cast<std::size_t>(s.num_sbs()));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto fibered = static_cast<std::size_t>(std::lround(config.fiber_fraction * s.num_sbs()));
    s.fiber_sbs.assign(order.size(), false);
    for (std::size_t i = 0; i < fibered; ++i) s.fiber_sbs[static_cast<std::size_t>(order[i])] = true;
  }

  if (s.num_ue() == 0 || s.num_bs() == 0) {
    r.discarded_ = true;
    return r;
  }

  const LinkModel model(r.scene_, r.radio_);
  std::vector<int> parents;
  try {
    parents = associate_backhaul(model);
  } catch (const EmptyNetwork&) {
    r.discarded_ = true;
    return r;
  }
  const Eigen::MatrixXd loss = access_loss_db(model);
  r.assoc_ = make_association(s, associate_ues(mean_access_power_dbm(model, loss)), std::move(parents));
  r.loads_ = compute_loads(r.assoc_);

  Rng slot_rng = make_stream(seed, Stream::Slot);
  const SlotDraws slot = sample_slot(r.assoc_, r.loads_, slot_rng);
  r.access_ = access_signals(r.assoc_, model, path_gain_from_loss(loss), slot);
  r.backhaul_ = backhaul_signals(r.assoc_, model, slot, false);
  r.backhaul_interfered_ = backhaul_signals(r.assoc_, model, slot, true);
  r.hops_ = hop_lengths(r.assoc_, model);
  return r;
}

RealizationRecord Realization::evaluate(const Evaluation& eval) const {
  RealizationRecord rec;
  if (discarded_) {
    rec.discarded = true;
    return rec;
  }
  const BandwidthPlan plan = allocate_bandwidth(eval.mu, bandwidth_hz_, loads_, assoc_);
  const RateReport report =
      compute_rates(plan, assoc_, access_, eval.backhaul_interference ? backhaul_interfered_ : backhaul_,
                    radio_.noise_figure_db);
  rec.coverage = coverage_fraction(report, eval.threshold_bps);
  rec.ue_rates_bps = report.ue_rate_bps;
  rec.ue_count = rec.ue_rates_bps.size();
  rec.mean_rate_bps = std::accumulate(rec.ue_rates_bps.begin(), rec.ue_rates_bps.end(), 0.0) /
                      static_cast<double>(rec.ue_rates_bps.size());
  rec.hop_lengths_m = hops_;
  return rec;
}

RealizationRecord run_realization(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  const auto buildings = load_fixed_buildings(config);
  const auto r = Realization::build(config, seed, buildings.empty() ? nullptr : &buildings);
  return r.evaluate({config.mu, config.rate_threshold_bps, config.backhaul_interference});
}

std::optional<double> mean_hop_length(const std::vector<RealizationRecord>& records) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& rec : records) {
    for (double h : rec.hop_lengths_m) {
      sum += h;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

CoverageResult summarize(const std::vector<RealizationRecord>& records, double mu) {
  CoverageResult out;
  out.mu = mu;
  out.realizations = static_cast<int>(records.size());
  double rate_sum = 0.0;
  std::size_t rate_n = 0;
  for (const auto& rec : records) {
    if (rec.discarded) {
      ++out.discarded;
      continue;
    }
    out.fractions.push_back(rec.coverage);
    rate_sum += rec.mean_rate_bps * static_cast<double>(rec.ue_count);
    rate_n += rec.ue_count;
  }
  if (out.fractions.empty()) throw EstimationError("every realization was discarded");
  const auto n = static_cast<double>(out.fractions.size());
  out.coverage = std::accumulate(out.fractions.begin(), out.fractions.end(), 0.0) / n;
  if (out.fractions.size() > 1) {
    double ss = 0.0;
    for (double f : out.fractions) ss += (f - out.coverage) * (f - out.coverage);
    out.ci_halfwidth = 1.959963984540054 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  out.mean_rate_bps = rate_n > 0 ? rate_sum / static_cast<double>(rate_n) : 0.0;
  out.mean_hop_m = mean_hop_length(records);
  return out;
}

std::uint64_t realization_seed(const ScenarioConfig& config, int index, int stream) {
  // Non-CRN sweep points get disjoint seed blocks.
  return config.seed + static_cast<std::uint64_t>(index) +
         static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ULL;
}

std::vector<CoverageResult> run_evaluations(const ScenarioConfig& config,
                                            const std::vector<Evaluation>& evals,
                                            const RunOptions& options, int stream) {
  config.validate();
  const auto buildings = load_fixed_buildings(config);
  const int n = config.realizations;
  std::vector<std::vector<RealizationRecord>> records(evals.size(),
                                                      std::vector<RealizationRecord>(static_cast<std::size_t>(n)));
  parallel_for(n, options.workers, [&](int i) {
    const auto r = Realization::build(config, realization_seed(config, i, stream),
                                      buildings.empty() ? nullptr : &buildings);
    for (std::size_t e = 0; e < evals.size(); ++e) {
      auto rec = r.evaluate(evals[e]);
      rec.ue_rates_bps = {};
      records[e][static_cast<std::size_t>(i)] = std::move(rec);
    }
  });
  std::vector<CoverageResult> out;
  out.reserve(evals.size());
  for (std::size_t e = 0; e < evals.size(); ++e) out.push_back(summarize(records[e], evals[e].mu));
  return out;
}

namespace {

MuOptimum optimize_over(const ScenarioConfig& config, const std::vector<double>& grid,
                        const RunOptions& options, int stream) {
  if (grid.empty()) throw InvalidParameter("mu grid must not be empty");
  for (double mu : grid) {
    if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidParameter("mu grid values must lie in [0, 1]");
  }
  std::vector<Evaluation> evals;
  for (double mu : grid) evals.push_back({mu, config.rate_threshold_bps, config.backhaul_interference});
  const auto results = run_evaluations(config, evals, options, stream);

  MuOptimum best;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    best.curve.push_back({grid[i], results[i]});
    const double c = results[i].coverage;
    const double b = results[arg].coverage;
    if (c > b || (c == b && grid[i] < grid[arg])) arg = i;
  }
  best.mu = grid[arg];
  best.result = results[arg];
  return best;
}

}  // namespace

MuOptimum optimize_mu(const ScenarioConfig& config, const std::vector<double>& grid,
                      const RunOptions& options) {
  return optimize_over(config, grid, options, 0);
}

CoverageResult run_monte_carlo(const ScenarioConfig& config, const RunOptions& options) {
  if (config.optimize_mu) return optimize_mu(config, mu_grid(config.mu_grid_step), options).result;
  return run_evaluations(config, {{config.mu, config.rate_threshold_bps, config.backhaul_interference}},
                         options)
      .front();
}

std::vector<SweepRow> sweep(const ScenarioConfig& config, const std::string& axis,
                            const std::vector<double>& values, const RunOptions& options) {
  const std::string key = canonical_axis(axis);
  std::vector<SweepRow> rows;
  if (values.empty()) return rows;

  // Settings that only touch the rate stage share the sampled worlds.
  // Sweeping mu itself replaces the optimisation.
  if (evaluation_only(key) && config.common_random_numbers &&
      (!config.optimize_mu || key == "bandwidth.mu")) {
    std::vector<Evaluation> evals;
    for (double v : values) {
      ScenarioConfig c = config;
      set_axis(c, key, v);
      evals.push_back({c.mu, c.rate_threshold_bps, c.backhaul_interference});
    }
    const auto results = run_evaluations(config, evals, options);
    for (std::size_t i = 0; i < values.size(); ++i) rows.push_back({values[i], results[i]});
    return rows;
  }

  for (std::size_t i = 0; i < values.size(); ++i) {
    ScenarioConfig c = config;
    set_axis(c, key, values[i]);
    const int stream = c.common_random_numbers ? 0 : static_cast<int>(i) + 1;
    CoverageResult result;
    if (c.optimize_mu) {
      result = optimize_over(c, mu_grid(c.mu_grid_step), options, stream).result;
    } else {
      result = run_evaluations(c, {{c.mu, c.rate_threshold_bps, c.backhaul_interference}}, options, stream)
                   .front();
    }
    rows.push_back({values[i], result});
  }
  return rows;
}

}  // namespace iabsim
