#pragma once

#include <string>
#include <vector>

namespace ornithopter {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;     // unreadable, malformed or out-of-range input
inline constexpr int kExitNumerical = 2;  // NonFiniteState, singular mass, failed validation

// Runs one subcommand. args[0] is the program name. Log verbosity comes from
// the ORNITHOPTER_LOG environment variable (trace, debug, info, warn, error, off).
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace ornithopter
