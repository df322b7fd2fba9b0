#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sitesel_cli/config.hpp"
#include "sitesel_cli/output.hpp"

namespace sitesel::cli {

struct OutputFile {
  std::string name;  ///< relative to the output directory
  std::string content;
};

struct RunResult {
  std::vector<OutputFile> files;
  /// Free-form remarks copied into the manifest (conventions, warnings).
  std::vector<std::string> notes;
};

/// Runs one scenario entirely in memory.
RunResult run_scenario(const RunConfig& cfg);

/// Power-law fits for every curve of a trade-off table.
CsvTable fit_tradeoff_table(const CsvData& tradeoff, const FitConfig& fit);

/// Inverts a spectrum CSV held in memory; returns (density CSV, summary CSV).
std::pair<std::string, std::string> invert_spectrum_text(const std::string& spectrum_csv,
                                                         const InvertConfig& inv);

struct NamedConfig {
  std::string name;  ///< resolved config is written to <name>.resolved.yaml
  RunConfig config;
};

struct ManifestInfo {
  std::string config_text;  ///< verbatim input config, empty for canned runs
  std::string origin;       ///< "simulate" or "reproduce <tag>"
  double duration_s = 0.0;
};

/// Writes every output file, the resolved configs and manifest.json.
/// Returns the manifest path.
std::filesystem::path write_run(const RunResult& result, const std::vector<NamedConfig>& configs,
                                const ManifestInfo& info, const std::filesystem::path& out_dir);

const std::vector<std::string>& figure_tags();

/// Canned configurations for a figure tag; throws ConfigError for unknown tags.
std::vector<NamedConfig> figure_configs(const std::string& tag);

/// Runs the canned configs of a figure in memory and merges their files,
/// prefixing each with the config name. Derived files (fits, inversions) are
/// added on top.
RunResult reproduce_figure(const std::string& tag);

const char* software_version();

}  // namespace sitesel::cli
