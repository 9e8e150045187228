#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tauber {

inline constexpr const char* kArtifactVersion = "tauber 0.1.0";

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitParse = 2,
  kExitScaleCap = 3,
  kExitPrecondition = 4,  // also "not regular"
  kExitSearchCap = 5,     // also "diagnostic only" and unsupported inputs
  kExitVerification = 6,
  kExitIllegalMove = 7,
};

/// Runs one command. args excludes the program name. Primary output goes to `out`;
/// a run record is appended to the run log unless --no-log is given.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tauber
