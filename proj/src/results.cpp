#include "iabsim/results.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "iabsim/errors.hpp"

namespace iabsim {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json row_json(const SweepRow& row) {
  nlohmann::json j;
  j["axis_value"] = row.value;
  j["coverage"] = row.result.coverage;
  j["ci_halfwidth"] = row.result.ci_halfwidth;
  j["mean_rate_bps"] = row.result.mean_rate_bps;
  j["mean_hop_m"] = row.result.mean_hop_m ? nlohmann::json(*row.result.mean_hop_m) : nlohmann::json(nullptr);
  j["discarded"] = row.result.discarded;
  j["n_realizations"] = row.result.realizations;
  j["mu"] = row.result.mu;
  return j;
}

}  // namespace

std::string results_csv(const ResultTable& table) {
  std::ostringstream out;
  out << kCsvHeader << '\n';
  for (const auto& row : table.rows) {
    const auto& r = row.result;
    out << fmt_double(row.value) << ',' << fmt_double(r.coverage) << ',' << fmt_double(r.ci_halfwidth)
        << ',' << fmt_double(r.mean_rate_bps) << ',' << (r.mean_hop_m ? fmt_double(*r.mean_hop_m) : "")
        << ',' << r.discarded << ',' << r.realizations << '\n';
  }
  return out.str();
}

nlohmann::json results_json(const ResultTable& table, const ScenarioConfig& config,
                            const nlohmann::json& extra) {
  nlohmann::json j;
  j["tool"] = "iabsim";
  j["version"] = kToolVersion;
  j["command"] = table.command;
  j["axis"] = table.axis;
  j["scenario"] = scenario_to_json(config);
  j["rows"] = nlohmann::json::array();
  for (const auto& row : table.rows) j["rows"].push_back(row_json(row));
  for (const auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

std::vector<std::string> emit_results(const ResultTable& table, const ScenarioConfig& config,
                                      const std::string& out_dir, OutputFormat format,
                                      const nlohmann::json& extra) {
  if (table.rows.empty()) throw InvalidParameter("no results to write");
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::vector<std::string> written;
  const auto json_path = dir / "results.json";
  if (format == OutputFormat::Csv) {
    const auto csv_path = dir / "results.csv";
    write_file(csv_path, results_csv(table));
    written.push_back(csv_path.string());
  }
  write_file(json_path, results_json(table, config, extra).dump(2) + "\n");
  written.push_back(json_path.string());
  return written;
}

}  // namespace iabsim
