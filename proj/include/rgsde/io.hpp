#pragma once

#include <cstdint>
#include <string>

#include "rgsde/scenario.hpp"
#include "rgsde/solver.hpp"

namespace rgsde {

// Decimal rendering with 17 significant digits (round-trips doubles).
std::string format_real(double v);

// Replaces dB by the differences of the stored B path, so a scenario read back
// from CSV and a freshly sampled one feed the solver identical increments.
ScenarioPath canonicalize(ScenarioPath path);

// Header `t,B,QV,theta_sq`, one row per node, theta_sq blank on the last node.
std::string scenario_csv(const ScenarioPath& path);
// Inverse of scenario_csv on the given grid; throws Io on malformed content.
ScenarioPath parse_scenario_csv(const std::string& text, const TimeGrid& grid);

// Header `t,X,K,S,B,QV`.
std::string solution_csv(const ScenarioPath& path, const SolveResult& result);

std::string read_file(const std::string& path);
// Writes atomically enough for a single writer: temp file, then rename.
void write_file(const std::string& path, const std::string& content);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace rgsde
