#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iabsim/network.hpp"
#include "iabsim/scenario.hpp"

namespace iabsim {

/// Outcome of one realization for one (mu, threshold, backhaul interference) setting.
struct RealizationRecord {
  bool discarded = false;
  double coverage = 0.0;
  double mean_rate_bps = 0.0;
  std::size_t ue_count = 0;
  std::vector<double> ue_rates_bps;  // cleared by the Monte Carlo driver to bound memory
  std::vector<double> hop_lengths_m;
};

/// Settings that only change the rate stage, so one sampled world can be
/// evaluated under many of them.
struct Evaluation {
  double mu = 0.5;
  double threshold_bps = 100e6;
  bool backhaul_interference = false;
};

/// Named random sub-streams of a realization.
enum class Stream : std::uint32_t { Mbs = 1, Sbs, Ue, Walls, Trees, Buildings, Fiber, Slot };

Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t salt = 0);

/// One sampled world with its association and fading-dependent signals.
class Realization {
 public:
  /// `buildings` overrides the synthetic city in 3D mode (a loaded footprint file).
  static Realization build(const ScenarioConfig& config, std::uint64_t seed,
                           const std::vector<BuildingPrism>* buildings = nullptr);

  RealizationRecord evaluate(const Evaluation& eval) const;

  const Scene& scene() const { return scene_; }
  const AssociationMap& association() const { return assoc_; }
  bool discarded() const { return discarded_; }

 private:
  Scene scene_;
  RadioParams radio_;
  double bandwidth_hz_ = 0.0;
  bool discarded_ = false;
  AssociationMap assoc_;
  LoadTable loads_;
  LinkSignals access_;
  LinkSignals backhaul_;
  LinkSignals backhaul_interfered_;
  std::vector<double> hops_;
};

/// Samples and evaluates one realization at the configured mu.
RealizationRecord run_realization(const ScenarioConfig& config, std::uint64_t seed);

struct CoverageResult {
  double coverage = 0.0;
  double ci_halfwidth = 0.0;  // 95 %, normal approximation
  std::vector<double> fractions;
  std::optional<double> mean_hop_m;
  double mean_rate_bps = 0.0;
  int discarded = 0;
  int realizations = 0;
  double mu = 0.0;
};

struct RunOptions {
  int workers = 1;
};

/// Reduces records in index order. Throws EstimationError when all were discarded.
CoverageResult summarize(const std::vector<RealizationRecord>& records, double mu);

std::optional<double> mean_hop_length(const std::vector<RealizationRecord>& records);

/// Seed of realization `index`; `stream` separates non-CRN sweep points.
std::uint64_t realization_seed(const ScenarioConfig& config, int index, int stream = 0);

CoverageResult run_monte_carlo(const ScenarioConfig& config, const RunOptions& options = {});

/// Evaluates every setting in `evals` on the same realizations.
std::vector<CoverageResult> run_evaluations(const ScenarioConfig& config,
                                            const std::vector<Evaluation>& evals,
                                            const RunOptions& options = {}, int stream = 0);

struct SweepRow {
  double value = 0.0;
  CoverageResult result;
};

std::vector<SweepRow> sweep(const ScenarioConfig& config, const std::string& axis,
                            const std::vector<double>& values, const RunOptions& options = {});

struct MuOptimum {
  double mu = 0.0;
  CoverageResult result;
  std::vector<SweepRow> curve;
};

/// Grid search over mu with common random numbers; ties go to the smaller mu.
MuOptimum optimize_mu(const ScenarioConfig& config, const std::vector<double>& grid,
                      const RunOptions& options = {});

}  // namespace iabsim
