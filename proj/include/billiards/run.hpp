#pragma once
// Experiment driver behind the `billiard` subcommands.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "billiards/config.hpp"

namespace billiards {

/// Process exit statuses. Every non-zero status comes with an error.json record.
enum ExitStatus : int {
    kExitOk = 0,
    kExitFailure = 1,      ///< solver failure, I/O error, anything unexpected
    kExitConfig = 2,       ///< invalid configuration or usage
    kExitCornerHit = 3,    ///< trajectory stopped at a boundary corner (partial outputs written)
    kExitLeakedBall = 4,   ///< geometry inconsistency: no wall ahead, or a tangential hit
};

struct RunOptions {
    std::filesystem::path out_dir;
    int jobs{1};
};

/// Runs one configured experiment, writing resolved-config.json and the
/// experiment's outputs into out_dir. Errors are caught, recorded in
/// out_dir/error.json and mapped to an ExitStatus.
int run(const RunConfig& config, const RunOptions& options);

/// Parses the config file and runs it. Configuration errors are recorded like
/// run-time errors (error.json plus kExitConfig).
int run_config_file(const std::filesystem::path& config_path, ExperimentKind kind, const RunOptions& options);

/// Writes {"error": kind, "message": ..., plus extra fields} to out_dir/error.json.
/// Returns false when the record could not be written.
bool write_error_record(const std::filesystem::path& out_dir, const std::string& kind, const std::string& message,
                        const nlohmann::json& extra = nlohmann::json::object());

}  // namespace billiards
