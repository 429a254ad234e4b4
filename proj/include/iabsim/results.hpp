#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "iabsim/engine.hpp"

namespace iabsim {

inline constexpr const char* kToolVersion = "1.0.0";

enum class OutputFormat { Csv, Json };

/// Rows in sweep order; `axis` is the canonical key of the swept parameter.
struct ResultTable {
  std::string command;
  std::string axis;
  std::vector<SweepRow> rows;
};

inline constexpr const char* kCsvHeader =
    "axis_value,coverage,ci_halfwidth,mean_rate_bps,mean_hop_m,discarded,n_realizations";

std::string results_csv(const ResultTable& table);

/// Rows plus the resolved scenario and tool version.
nlohmann::json results_json(const ResultTable& table, const ScenarioConfig& config,
                            const nlohmann::json& extra = nlohmann::json::object());

/// Writes `<out_dir>/results.csv` and the sidecar `<out_dir>/results.json`
/// (Csv), or only `<out_dir>/results.json` with embedded rows (Json).
/// Returns the written paths. Throws IoError naming the path.
std::vector<std::string> emit_results(const ResultTable& table, const ScenarioConfig& config,
                                      const std::string& out_dir, OutputFormat format,
                                      const nlohmann::json& extra = nlohmann::json::object());

}  // namespace iabsim
