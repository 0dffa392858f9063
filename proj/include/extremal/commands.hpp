#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "extremal/config.hpp"

namespace extremal {

/// Process exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitVerificationFailed = 1, kExitConfigError = 2 };

/// Environment variable that overrides the default output directory.
inline constexpr const char* kOutDirEnv = "EXTREMAL_OUT_DIR";

/// Command-line overrides applied on top of a scenario file.
struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool printed_term = false;
  std::ostream* log = nullptr;

  /// --out, else $EXTREMAL_OUT_DIR, else the working directory.
  std::filesystem::path resolved_out_dir() const;
};

/// Writes <name>_argmins.csv (and <name>_points.csv when export_points is set).
int cmd_sample(const ScenarioConfig& config, const CommandOptions& options);
/// Writes <name>_density.csv, plus <name>_density.svg for one-dimensional grids.
int cmd_density(const ScenarioConfig& config, const CommandOptions& options);
/// Writes <name>_reports.jsonl and <name>_summary.csv. Returns 1 if any test fails.
int cmd_verify(const ScenarioConfig& config, const CommandOptions& options);
/// Writes <name>_sec4_{curves,histograms,terms}.csv and <name>_sec4_figure.svg.
int cmd_example_sec4(const ScenarioConfig& config, const CommandOptions& options);

/// Parses `extremal <command> --config <path> [...]`, runs it and maps errors
/// to exit codes. Messages go to `err`, progress to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace extremal
