#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "torusdyn/harness/config.hpp"
#include "torusdyn/harness/output.hpp"

namespace torusdyn::harness {

enum ExitCode : int { kExitPass = 0, kExitCheckFailure = 1, kExitUsage = 2, kExitNumerical = 3 };

/// A check that ran to completion and did not hold.
class CheckFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CheckRow {
    std::string check;
    std::string status;  ///< pass | fail | inconclusive | hypothesis not met, skipped
    std::string value;
    std::string detail;
};

struct RunResult {
    int exit_code = kExitPass;
    OutputSet outputs;
    std::string manifest;
    std::vector<CheckRow> checks;  ///< filled by check-all
    std::string summary;           ///< one human-readable line
};

/// Command-specific requirements on the config (homotopy class, horizons,
/// graph file). Throws ConfigError.
void validate(const RunConfig& config);

/// Runs the configured command and builds every output in memory, including
/// the manifest. Library errors propagate.
RunResult execute(const RunConfig& config);

/// The check-all pipeline alone; rows in a fixed order.
std::vector<CheckRow> check_all(const RunConfig& config, OutputSet& outputs);

/// Renders the check table as aligned text.
std::string format_checks(const std::vector<CheckRow>& rows);

struct RunOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

/// Loads, validates, runs and writes outputs, mapping failures to exit codes.
/// Nothing is written unless the run finishes (with pass or check failure).
int run_config_file(const std::string& path, const RunOptions& options, std::ostream& log);

}  // namespace torusdyn::harness
