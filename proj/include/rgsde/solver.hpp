#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rgsde/coefficients.hpp"
#include "rgsde/reflection.hpp"
#include "rgsde/scenario.hpp"

namespace rgsde {

struct SolverConfig {
  double p_exponent = 3.0;
  double picard_tol = 1e-10;
  std::size_t max_picard = 200;
  bool oracle_check = false;

  void validate() const;
};

struct SolveResult {
  ReflectedSolution solution;
  GridPath S;
  std::size_t picard_iters = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
  std::optional<double> oracle_gap;
};

struct ValidationReport {
  bool passed = true;
  std::string failure;  // e.g. "obstacle-violation", "invalid-growth"
  std::string detail;
  std::optional<double> time;
};

// Probes the standing assumptions: S0 <= x0, the declared growth bound on a
// deterministic (x, k) lattice at fixed and random grid times, and the declared
// integral-Lipschitz modulus on sampled pairs. Reports the first violation.
ValidationReport validate_assumptions(const CoefficientSet& coeffs, double x0,
                                      const ObstacleSpec& obstacle, const TimeGrid& grid,
                                      double p = 3.0);

// Picard iteration for the reflected equation, starting from X^0 = x0 + offset,
// K^0 = 0. Each sweep integrates
//   Y[i+1] = Y[i] + f(X[i], K[i+1]) dt + h(X[i], K[i+1]) dQV[i] + g(X[i], K[i]) dB[i]
// over the previous iterate and reflects Y off S. The resistance enters the
// drift terms at the right end of the step (resolved by the iteration); the
// dB integrand is non-anticipating. Once the sup-norm defect is <= picard_tol
// the sweep continues until the defect is exactly zero (the discrete fixed
// point) or stops shrinking for several sweeps, within max_picard.
// Errors: NonConvergence (with residual history), NumericFailure, ObstacleViolation.
SolveResult picard_solve(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                         const ScenarioPath& scenario, double x0, const SolverConfig& cfg,
                         double initial_offset = 0.0);

// Explicit single pass with the resistance taken at the left end of each step.
ReflectedSolution stepwise_solve(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                                 const ScenarioPath& scenario, double x0);

// Plain explicit scheme without reflection (K = 0).
GridPath euler_unreflected(const CoefficientSet& coeffs, const ScenarioPath& scenario, double x0);

// sup|X1 - X2| + sup|K1 - K2|.
double sup_gap(const ReflectedSolution& a, const ReflectedSolution& b);

// Clamps f, h, g to [-N, N]; the growth path becomes min(beta1, N 3^(1/p)).
CoefficientSet truncate_coefficients(const CoefficientSet& coeffs, double N, double p = 3.0);

// S^N = min(S, N).
ObstacleSpec truncate_obstacle(const ObstacleSpec& obstacle, double N);

struct RefinementLevel {
  std::size_t n_steps = 0;
  double mean_gap_to_finer = 0.0;  // mean over paths of sup gap to the next level
  double mean_oracle_gap = 0.0;    // mean over paths of picard vs stepwise gap
  double mean_terminal_K = 0.0;
};

struct ConvergenceTable {
  std::vector<RefinementLevel> levels;
  std::vector<double> gap_ratios;         // gap(level l+1) / gap(level l)
  std::vector<double> oracle_gap_ratios;  // oracle gap(l+1) / oracle gap(l)
  double mean_gap_ratio = 0.0;
};

// Solves on n, 2n, ..., 2^(levels-1) n steps with nested increments (coarse dB
// is the sum of fine dB), `control` given on the base grid.
ConvergenceTable richardson_refine(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                                   const VolatilityControl& control, double x0,
                                   const SolverConfig& cfg, std::size_t levels,
                                   const TimeGrid& base_grid, const VolatilitySpec& spec,
                                   std::size_t n_paths = 16, std::uint64_t master_seed = 1,
                                   unsigned jobs = 1);

}  // namespace rgsde
