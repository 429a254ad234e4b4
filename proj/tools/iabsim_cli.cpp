// Batch front end: iabsim run|sweep|optimize-mu --scenario <file> ...

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iabsim/engine.hpp"
#include "iabsim/errors.hpp"
#include "iabsim/results.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kIoError = 3, kEstimationError = 4 };

struct Manifest {
  std::string scenario;
  std::string axis;
  std::string values;
  std::string out = "out";
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 1;
  int realizations = 0;
  double grid_step = 0.0;
};

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw iabsim::ConfigError("--values: '" + item + "' is not a number");
    values.push_back(v);
  }
  return values;
}

iabsim::ScenarioConfig resolve_config(const Manifest& m) {
  auto config = m.scenario.empty() ? iabsim::ScenarioConfig{} : iabsim::parse_scenario(m.scenario);
  if (const char* env = std::getenv("IABSIM_SEED"); env && *env) {
    try {
      config.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw iabsim::ConfigError(std::string("IABSIM_SEED is not an unsigned integer: ") + env);
    }
  }
  if (m.seed_given) config.seed = m.seed;
  if (m.realizations > 0) config.realizations = m.realizations;
  if (m.grid_step > 0.0) config.mu_grid_step = m.grid_step;
  config.validate();
  return config;
}

iabsim::OutputFormat output_format(const std::string& f) {
  return f == "json" ? iabsim::OutputFormat::Json : iabsim::OutputFormat::Csv;
}

void report(const std::vector<std::string>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p << '\n';
}

int run_command(const std::string& command, const Manifest& m) {
  const auto config = resolve_config(m);
  const iabsim::RunOptions options{m.workers};
  iabsim::ResultTable table;
  table.command = command;
  nlohmann::json extra = nlohmann::json::object();

  if (command == "run") {
    iabsim::CoverageResult result;
    if (config.optimize_mu) {
      const auto best = iabsim::optimize_mu(config, iabsim::mu_grid(config.mu_grid_step), options);
      result = best.result;
      extra["mu_optimal"] = best.mu;
    } else {
      result = iabsim::run_monte_carlo(config, options);
    }
    table.axis = "bandwidth.mu";
    table.rows.push_back({result.mu, result});
    std::cout << "coverage " << result.coverage << " +/- " << result.ci_halfwidth << '\n';
  } else if (command == "sweep") {
    if (m.axis.empty()) throw iabsim::ConfigError("sweep requires --axis");
    table.axis = iabsim::canonical_axis(m.axis);
    table.rows = iabsim::sweep(config, table.axis, parse_values(m.values), options);
    if (table.rows.empty()) throw iabsim::ConfigError("sweep requires a non-empty --values list");
    for (const auto& row : table.rows) {
      std::cout << table.axis << '=' << row.value << " coverage " << row.result.coverage << " +/- "
                << row.result.ci_halfwidth << '\n';
    }
  } else {
    const auto grid = m.values.empty() ? iabsim::mu_grid(config.mu_grid_step) : parse_values(m.values);
    const auto best = iabsim::optimize_mu(config, grid, options);
    table.axis = "bandwidth.mu";
    table.rows = best.curve;
    extra["mu_optimal"] = best.mu;
    extra["coverage_optimal"] = best.result.coverage;
    std::cout << "mu* " << best.mu << " coverage " << best.result.coverage << " +/- "
              << best.result.ci_halfwidth << '\n';
  }
  report(iabsim::emit_results(table, config, m.out, output_format(m.format), extra));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo coverage simulator for two-hop IAB mmWave networks"};
  app.require_subcommand(1);
  Manifest m;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", m.scenario, "Scenario file (flat JSON, dotted keys)")->check(CLI::ExistingFile);
    sub->add_option("--out", m.out, "Output directory")->capture_default_str();
    sub->add_option("--format", m.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { m.seed = s; m.seed_given = true; },
                                            "Master seed (overrides IABSIM_SEED and the file)");
    sub->add_option("--workers", m.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--realizations", m.realizations, "Override mc.realizations")->check(CLI::PositiveNumber);
    sub->add_option("--grid-step", m.grid_step, "Override bandwidth.mu_grid_step")->check(CLI::Range(1e-6, 1.0));
  };

  auto* run = app.add_subcommand("run", "Estimate coverage for one scenario");
  add_common(run);
  auto* sw = app.add_subcommand("sweep", "One-dimensional parameter sweep");
  add_common(sw);
  sw->add_option("--axis", m.axis, "Swept parameter (dotted key or alias)")->required();
  sw->add_option("--values", m.values, "Comma separated values")->required();
  auto* opt = app.add_subcommand("optimize-mu", "Grid search of the backhaul bandwidth fraction");
  add_common(opt);
  opt->add_option("--values", m.values, "Comma separated mu grid (default: 0..1 by the grid step)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run_command(command, m);
  } catch (const iabsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const iabsim::InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const iabsim::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const iabsim::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIoError;
  } catch (const iabsim::EstimationError& e) {
    std::cerr << "estimation failed: " << e.what() << '\n';
    return kEstimationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
