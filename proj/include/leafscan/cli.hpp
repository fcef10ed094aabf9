#pragma once

#include "leafscan/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace leafscan::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
};

/// Fixed CSV header of `analyze`.
inline constexpr const char *kAnalyzeCsvHeader =
    "path,leaf_px,internal_px,border_px,total_px,ratio,total_cm2,damage_cm2,threshold,overridden,error";
/// Fixed CSV header of `report`.
inline constexpr const char *kReportCsvHeader = "label,n,r_percent,slope,intercept,p_value,sd_diff";

struct RunConfig {
  AnalysisConfig analysis;
  std::optional<std::filesystem::path> curves_file;
  std::filesystem::path out_dir = "leafscan-out";
  /// Defaults to <out_dir>/report.csv (analyze) or <out_dir>/correlation.csv (report).
  std::optional<std::filesystem::path> csv;
  /// Worker threads for batch analysis; 0 = hardware concurrency.
  unsigned jobs = 0;
};

/// Session document written next to each analyzed image; the "result"
/// member matches the service's result document for the same inputs.
struct ImageOutcome {
  std::string path;
  std::optional<AnalysisResult> result;
  std::string error;
};

/// Expands directories (PNG/TIFF files, sorted) and keeps files as given.
std::vector<std::filesystem::path> collect_inputs(const std::vector<std::string> &inputs);

int cmd_analyze(const std::vector<std::string> &inputs, const RunConfig &config, std::ostream &out,
                std::ostream &err);

/// `spec_file` holds a "leaf_spec" or "leaf_template" document. Writes
/// synth_NNN.png, synth_NNN.truth.json and synth_NNN.spec.json.
int cmd_synth(const std::filesystem::path &spec_file, std::size_t count, std::uint64_t seed,
              const std::filesystem::path &out_dir, std::ostream &out, std::ostream &err);

/// Input CSV: header "label,manual,automatic" (label optional).
int cmd_report(const std::filesystem::path &pairs_csv, const RunConfig &config, std::ostream &out,
               std::ostream &err);

/// Blocks until SIGINT/SIGTERM; returns kExitOk after a clean shutdown.
int cmd_serve(const std::string &bind, const std::filesystem::path &store_dir, std::ostream &out,
              std::ostream &err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, char **argv);

} // namespace leafscan::cli
