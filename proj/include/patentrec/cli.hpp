#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace patentrec {

// Environment variable naming the default artifact directory.
inline constexpr const char* kArtifactDirEnv = "PATENTREC_ARTIFACT_DIR";

// Exit statuses of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitArtifact = 3;
inline constexpr int kExitInvalid = 4;
inline constexpr int kExitNumeric = 5;

// Runs one subcommand. `args` excludes the program name. Failures print a
// single line `error: <kind>: <message>` to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace patentrec
