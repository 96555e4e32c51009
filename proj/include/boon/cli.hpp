#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "boon/error.hpp"

namespace boon::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kSeedEnvVar = "BOON_SEED";

/// Process exit statuses. Stable; documented in the README.
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kUsageError = 2,
  kUnreadableFile = 3,
  kUnknownColumns = 4,
  kMalformedRows = 5,
  kNoValidRows = 6,
  kEstimatorError = 7,
  kIncompatiblePools = 8,
};

int exit_code_for(ErrorCode code);

/// Runs the command line (args[0] is the program name). Human-readable output
/// goes to `out`, diagnostics and warnings to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace boon::cli
