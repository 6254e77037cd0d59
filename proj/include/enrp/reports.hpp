#pragma once

// Run manifests, CSV/JSON reports and SVG plots. Every CSV starts with a
// "# enrp <kind> v<N>" schema line followed by the column header.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "enrp/search.hpp"
#include "enrp/trainer.hpp"

namespace enrp {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct RunManifest {
  std::string experiment;
  std::string input_path;
  std::string input_sha256;
  GridSpec grid;
  SubNetworkConfig network;
  nlohmann::json run_config;  // TrainConfig or SearchConfig
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  SourceRange source;
};

nlohmann::json manifest_json(const RunManifest& manifest);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

void write_train_csv(const TrainReport& report, std::ostream& out);
nlohmann::json train_summary_json(const TrainReport& report, const RunManifest& manifest);

void write_search_csv(const SearchTrace& trace, std::ostream& out);
nlohmann::json search_trace_json(const SearchTrace& trace, const RunManifest& manifest);

void write_divergence_csv(const DivergenceTable& table, std::ostream& out);
void write_divergence_runs_csv(const DivergenceTable& table, std::ostream& out);
void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out);

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series, bool log_x = false);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace enrp
