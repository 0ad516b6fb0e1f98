#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rgsde/coefficients.hpp"
#include "rgsde/scenario.hpp"
#include "rgsde/solver.hpp"

namespace rgsde {

// Everything needed to solve one reflected equation on a scenario.
struct Problem {
  CoefficientSet coeffs;
  ObstacleSpec obstacle;
  double x0 = 0.0;
  SolverConfig cfg;
  TimeGrid grid = make_uniform_grid(1.0, 1);
  VolatilitySpec vol;
};

// Runs validate_assumptions and throws (ObstacleViolation for S0 > x0,
// ConstraintViolation otherwise) on failure.
void require_valid(const Problem& problem);

// Read-only view of one solved scenario.
struct PathView {
  const GridPath& X;
  const GridPath& K;
  const GridPath& S;
  const GridPath& B;
  const GridPath& QV;
  const ScenarioPath& scenario;
  double x0;
};

// Per-scenario observation: a small vector of numbers computed from the solution.
using Observer = std::function<std::vector<double>(const PathView&)>;

struct SweepResult {
  std::vector<std::string> labels;                    // one per control
  std::vector<std::vector<std::vector<double>>> obs;  // [control][scenario][component]
};

// Solves `problem` for every (control, scenario index) pair. Scenario j uses
// the seed scenario_seed(master_seed, j) under every control. Solver errors are
// rethrown with the offending control label and scenario index.
SweepResult sweep(const Problem& problem, const std::vector<VolatilityControl>& controls,
                  std::size_t n_paths, std::uint64_t master_seed, unsigned jobs,
                  const Observer& observer);

}  // namespace rgsde
