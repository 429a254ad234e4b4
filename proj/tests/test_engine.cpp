#include <doctest.h>

#include <cmath>

#include "iabsim/engine.hpp"
#include "iabsim/errors.hpp"
#include "oracle.hpp"

using namespace iabsim;

namespace {

// Small dense-like world so each realization takes milliseconds.
ScenarioConfig small_config() {
  ScenarioConfig c;
  c.region.radius_m = 300.0;
  c.mbs_density = 8.0;
  c.sbs_density = 60.0;
  c.ue_density = 300.0;
  c.realizations = 20;
  return c;
}

}  // namespace

TEST_CASE("run_realization is deterministic") {
  const ScenarioConfig c = small_config();
  const RealizationRecord a = run_realization(c, 42);
  const RealizationRecord b = run_realization(c, 42);
  CHECK(a.coverage == b.coverage);
  CHECK(a.ue_rates_bps == b.ue_rates_bps);
  CHECK(a.hop_lengths_m == b.hop_lengths_m);
  const RealizationRecord other = run_realization(c, 43);
  CHECK(other.ue_rates_bps != a.ue_rates_bps);
}

TEST_CASE("run_monte_carlo is bit-identical for a fixed seed and worker count") {
  const ScenarioConfig c = small_config();
  const CoverageResult a = run_monte_carlo(c, {1});
  const CoverageResult b = run_monte_carlo(c, {1});
  CHECK(a.fractions == b.fractions);
  CHECK(a.coverage == b.coverage);
  CHECK(a.ci_halfwidth == b.ci_halfwidth);
  // Results are written by index, so the worker count does not matter either.
  const CoverageResult c3 = run_monte_carlo(c, {3});
  CHECK(c3.fractions == a.fractions);
  CHECK(c3.coverage == a.coverage);
}

TEST_CASE("tiny realization equals the straight-line oracle") {
  ScenarioConfig c;
  c.region.radius_m = 200.0;
  c.mbs_count = 1;
  c.sbs_density = 2.0 / c.region.area_km2();
  c.ue_density = 5.0 / c.region.area_km2();
  c.wall_density = 300.0;
  c.wall_length_m = 10.0;
  c.radio.rain_rate_mm_per_hr = 10.0;
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Realization r = Realization::build(c, seed);
    if (r.discarded()) continue;
    const Scene& s = r.scene();
    if (s.num_bs() > 6 || s.num_ue() > 10) continue;
    Rng slot_rng = make_stream(seed, Stream::Slot);
    const LoadTable loads = compute_loads(r.association());
    const SlotDraws slot = sample_slot(r.association(), loads, slot_rng);
    const oracle::Result ref = oracle::run(s, c.radio, slot, 0.3, c.bandwidth_hz, false);
    CHECK(r.association().ue_to_bs == ref.ue_to_bs);
    CHECK(r.association().sbs_to_mbs == ref.sbs_to_mbs);
    const RealizationRecord rec = r.evaluate({0.3, 100e6, false});
    REQUIRE(rec.ue_rates_bps.size() == ref.ue_rate.size());
    for (std::size_t u = 0; u < ref.ue_rate.size(); ++u) {
      CHECK(std::abs(rec.ue_rates_bps[u] - ref.ue_rate[u]) <= 1e-9 * std::max(ref.ue_rate[u], 1e-300));
    }
    ++compared;
  }
  CHECK(compared >= 10);
}

TEST_CASE("boundary settings") {
  ScenarioConfig c = small_config();
  c.rate_threshold_bps = 0.0;
  const CoverageResult all = run_monte_carlo(c);
  CHECK(all.coverage == 1.0);
  CHECK(all.ci_halfwidth == 0.0);

  c = small_config();
  c.mu = 1.0;
  CHECK(run_monte_carlo(c).coverage == 0.0);

  // No SBSs: an MBS-only network, without hops.
  c = small_config();
  c.sbs_density = 0.0;
  const CoverageResult mbs_only = run_monte_carlo(c);
  CHECK_FALSE(mbs_only.mean_hop_m.has_value());
  CHECK(mbs_only.coverage > 0.0);
  const Realization r = Realization::build(c, 3);
  CHECK(r.scene().num_sbs() == 0);
}

TEST_CASE("discarded realizations are counted, all-discarded is an error") {
  ScenarioConfig c = small_config();
  c.ue_density = 0.0;
  CHECK_THROWS_AS(run_monte_carlo(c), EstimationError);

  std::vector<RealizationRecord> recs(3);
  recs[0].discarded = true;
  recs[1].coverage = 0.5;
  recs[1].ue_count = 2;
  recs[2].coverage = 1.0;
  recs[2].ue_count = 2;
  const CoverageResult s = summarize(recs, 0.5);
  CHECK(s.discarded == 1);
  CHECK(s.realizations == 3);
  CHECK(s.coverage == doctest::Approx(0.75));
}

TEST_CASE("summarize: normal-approximation interval") {
  std::vector<RealizationRecord> recs;
  const std::vector<double> f{0.2, 0.4, 0.6, 0.8};
  for (double x : f) {
    RealizationRecord r;
    r.coverage = x;
    r.ue_count = 1;
    recs.push_back(r);
  }
  const CoverageResult s = summarize(recs, 0.5);
  // Sample sd of {0.2, 0.4, 0.6, 0.8} is sqrt(0.2/3).
  CHECK(s.coverage == doctest::Approx(0.5));
  CHECK(s.ci_halfwidth == doctest::Approx(1.959963984540054 * std::sqrt(0.2 / 3.0) / 2.0));
}

TEST_CASE("confidence interval shrinks like 1/sqrt(n)") {
  ScenarioConfig c = small_config();
  c.realizations = 50;
  const double w1 = run_monte_carlo(c).ci_halfwidth;
  c.realizations = 200;
  const double w4 = run_monte_carlo(c).ci_halfwidth;
  REQUIRE(w1 > 0.0);
  CHECK(w4 / w1 == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("mean hop length") {
  std::vector<RealizationRecord> recs(2);
  recs[0].hop_lengths_m = {300.0};
  recs[1].hop_lengths_m = {};
  CHECK(mean_hop_length(recs).value() == doctest::Approx(300.0));
  CHECK_FALSE(mean_hop_length({RealizationRecord{}}).has_value());

  ScenarioConfig c;
  c.region.radius_m = 500.0;
  c.mbs_count = 1;
  c.sbs_density = 0.0;
  c.ue_density = 50.0;
  const Realization r = Realization::build(c, 1);
  CHECK(r.evaluate({}).hop_lengths_m.empty());
}

TEST_CASE("sweep: empty, evaluation axes and structural axes") {
  const ScenarioConfig c = small_config();
  CHECK(sweep(c, "lambda_s", {}).empty());
  CHECK_THROWS_AS(sweep(c, "nonsense", {1.0}), ConfigError);

  const auto mu = sweep(c, "mu", {0.0, 0.2, 1.0});
  REQUIRE(mu.size() == 3);
  CHECK(mu[2].result.coverage == 0.0);
  CHECK(mu[0].result.coverage < mu[1].result.coverage);

  // Evaluation-only sweep values equal independent runs on the same seeds.
  ScenarioConfig at = c;
  at.mu = 0.2;
  CHECK(run_monte_carlo(at).fractions == mu[1].result.fractions);

  const auto dens = sweep(c, "density.sbs", {20.0, 80.0});
  REQUIRE(dens.size() == 2);
  ScenarioConfig d = c;
  d.sbs_density = 80.0;
  CHECK(run_monte_carlo(d).fractions == dens[1].result.fractions);

  const auto bh = sweep(c, "backhaul.interference", {0.0, 1.0});
  REQUIRE(bh.size() == 2);
  CHECK(bh[1].result.coverage <= bh[0].result.coverage);
  CHECK_THROWS_AS(sweep(c, "backhaul.interference", {0.5}), ConfigError);
}

TEST_CASE("optimize_mu") {
  const ScenarioConfig c = small_config();
  CHECK(optimize_mu(c, {0.4}).mu == 0.4);

  const MuOptimum best = optimize_mu(c, {0.0, 0.15, 1.0});
  CHECK(best.mu == 0.15);

  const auto grid = mu_grid(0.05);
  CHECK(grid.size() == 21);
  const MuOptimum opt = optimize_mu(c, grid);
  const auto curve = sweep(c, "mu", grid);
  double best_cov = -1.0;
  double best_mu = -1.0;
  for (const auto& row : curve) {
    if (row.result.coverage > best_cov) {
      best_cov = row.result.coverage;
      best_mu = row.value;
    }
  }
  CHECK(opt.mu == best_mu);
  CHECK(opt.result.coverage == best_cov);
}

TEST_CASE("fiber and density trends hold under common random numbers") {
  ScenarioConfig c = small_config();
  c.realizations = 60;
  c.mu = 0.2;
  const auto dens = sweep(c, "lambda_s", {10.0, 40.0, 120.0});
  for (std::size_t i = 1; i < dens.size(); ++i) {
    const double slack = dens[i].result.ci_halfwidth + dens[i - 1].result.ci_halfwidth;
    CHECK(dens[i].result.coverage + slack >= dens[i - 1].result.coverage);
  }
  const auto fib = sweep(c, "fiber", {0.0, 1.0});
  CHECK(fib[1].result.coverage + fib[1].result.ci_halfwidth + fib[0].result.ci_halfwidth >=
        fib[0].result.coverage);
}

TEST_CASE("fiber subset has the exact requested size") {
  ScenarioConfig c = small_config();
  c.fiber_fraction = 0.3;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Realization r = Realization::build(c, seed);
    int fiber = 0;
    for (bool f : r.scene().fiber_sbs) fiber += f;
    CHECK(fiber == static_cast<int>(std::lround(0.3 * r.scene().num_sbs())));
  }
}

TEST_CASE("3D mode runs on a synthetic city and raises SBS heights") {
  ScenarioConfig c = small_config();
  c.mode = Mode::ThreeD;
  c.sbs_height_m = 15.0;
  const Realization r = Realization::build(c, 5);
  CHECK(r.scene().three_d);
  CHECK_FALSE(r.scene().buildings.empty());
  for (double h : r.scene().sbs.heights) CHECK(h == 15.0);
  CHECK(run_monte_carlo(c).coverage >= 0.0);
}
