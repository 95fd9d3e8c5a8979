#pragma once

#include <string>
#include <vector>

namespace qcr::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_error = 3;
inline constexpr int exit_insufficient_linear_region = 4;

// Parses argv (excluding the program name) and runs the selected subcommand.
int run_cli(const std::vector<std::string>& args);

}  // namespace qcr::cli
