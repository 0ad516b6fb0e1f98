#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rgsde/coefficients.hpp"
#include "rgsde/harness.hpp"
#include "rgsde/problem.hpp"
#include "rgsde/scenario.hpp"
#include "rgsde/solver.hpp"

namespace rgsde {

// Sectioned `key = value` text. '#' and ';' start comments. Section names may
// carry a suffix after a dot (e.g. [comparison.ordered_drift]).
struct IniEntry {
  std::string value;
  std::size_t line = 0;
};
struct IniSection {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, IniEntry> entries;
};
std::vector<IniSection> parse_ini(const std::string& text, const std::string& source);

struct ComparisonSuite {
  ComparisonCase kase;
  std::size_t n_paths = 0;
};
struct TruncationSuite {
  std::string name;
  Problem problem;
  std::vector<double> ladder;
  std::size_t n_paths = 0;
};
struct UniquenessSuite {
  std::string name;
  Problem problem;
  std::vector<double> deltas;
  std::size_t n_paths = 0;
};

// Fully validated run configuration. See README for the schema.
struct RunConfig {
  std::string source;
  VolatilitySpec vol;
  TimeGrid grid;
  std::string f_text = "0", h_text = "0", g_text = "0", obstacle_text = "constant(value=0)";
  Problem problem;
  std::string control_family = "constant";
  std::vector<VolatilityControl> controls;
  std::size_t n_paths = 2;
  std::uint64_t master_seed = 1;
  std::string output_dir;
  // [expect]
  std::string functional = "terminal_value";
  double functional_param = 0.0;
  std::string event;
  // [refine]
  std::size_t refine_levels = 5;
  std::size_t refine_paths = 16;
  double refine_theta_sq = 1.0;
  std::vector<ComparisonSuite> comparisons;
  std::vector<TruncationSuite> truncations;
  std::vector<UniquenessSuite> uniqueness;
  // Canonical text of every field that determines the scenarios.
  std::string scenario_identity() const;
};

// Parses and validates; every problem is reported as a Config error with
// `source:line:`. Suite sections (comparison.*, truncation.*, uniqueness.*)
// are validated structurally; their hypothesis probes run in `check`.
RunConfig parse_config(const std::string& text, const std::string& source);
RunConfig load_config(const std::string& path);

}  // namespace rgsde
