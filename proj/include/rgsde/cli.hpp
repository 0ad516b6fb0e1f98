#pragma once

namespace rgsde {

// Exit status: 0 success, 2 config error, 3 numeric failure, 4 suite failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitSuite = 4;

// Entry point of the `rgsde` tool: simulate | solve | expect | check | refine.
int run_cli(int argc, char** argv);

}  // namespace rgsde
