#pragma once

// Dispatch of a RunConfig to its pipeline and persistence of the artifacts:
// report.json, field.csv, plotdata.csv and metadata.json, or error.json.

#include "orlicz/config.hpp"
#include "orlicz/report_io.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace orlicz {

enum class ExitStatus : int { ok = 0, failure = 1, parse_error = 2, criteria_failed = 3 };

struct RunOutcome {
    ExitStatus status = ExitStatus::ok;
    std::filesystem::path out_dir;
    Json report;                  ///< empty on error
    std::optional<Json> error;    ///< {code, message} on error
};

/// Output directory precedence: explicit, [run] output, $ORLICZ_LAB_OUT/<stem>,
/// ./orlicz_out/<stem>.
std::filesystem::path resolve_output_dir(const RunConfig& config,
                                         const std::optional<std::filesystem::path>& explicit_dir);

/// Builds the report for a config without touching the filesystem except
/// through `out_dir` for field and plot files.
Json run_pipeline(const RunConfig& config, const std::filesystem::path& out_dir);

/// Runs and persists; library errors are caught and written to error.json.
RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir);

/// Parses then runs; parse errors are persisted the same way when an
/// output directory can be determined.
RunOutcome run_config_file(const std::filesystem::path& path, std::optional<RunKind> expected_kind,
                           const std::optional<std::filesystem::path>& explicit_dir);

}  // namespace orlicz
