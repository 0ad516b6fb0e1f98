#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rgsde/problem.hpp"

namespace rgsde {

// Hypothesis profiles of the comparison results.
//   thm36_bounded:  ordered data, f1/h1 nonincreasing in k, f2/h2 nondecreasing
//                   in k, bounded coefficients, obstacles bounded above
//   thm37_general:  as above without boundedness
//   cor38_case1:    f1, h1 independent of k; f2, h2 nondecreasing in k
//   cor38_case2:    f2, h2 independent of k; f1, h1 nonincreasing in k
enum class HypothesisProfile { Thm36Bounded, Thm37General, Cor38Case1, Cor38Case2 };
const char* to_string(HypothesisProfile p);
HypothesisProfile profile_from_string(const std::string& s);

struct ProblemData {
  CoefficientSet coeffs;
  ObstacleSpec obstacle;
  double x0 = 0.0;
};

struct ComparisonCase {
  std::string name;
  ProblemData lower;  // problem 1, expected below
  ProblemData upper;  // problem 2
  HypothesisProfile profile = HypothesisProfile::Thm37General;
  TimeGrid grid = make_uniform_grid(1.0, 64);
  VolatilitySpec vol;
};

// Checks the profile's hypotheses on a finite (step, x, k) lattice and throws
// IllPosedCase naming the first failing probe.
void probe_hypotheses(const ComparisonCase& c);

struct ScenarioWorst {
  std::string control;
  std::size_t scenario = 0;
  std::size_t node = 0;
  double violation = 0.0;  // (X1 - X2)^+ at the worst node
};

struct ComparisonReport {
  std::string name;
  HypothesisProfile profile = HypothesisProfile::Thm37General;
  double max_violation = 0.0;       // max over scenarios and nodes of (X1 - X2)^+
  double max_scaled_violation = 0.0;  // max of violation / (1 + sup|X2|)
  std::size_t n_scenarios = 0;
  std::vector<ScenarioWorst> worst;  // per scenario
  bool passed = false;               // scaled violation <= 1e-9 everywhere
};

// Probes hypotheses, then solves both problems on identical scenarios.
ComparisonReport run_comparison(const ComparisonCase& c,
                                const std::vector<VolatilityControl>& controls,
                                std::size_t n_paths, const SolverConfig& cfg,
                                std::uint64_t master_seed, unsigned jobs = 1);

struct TruncationRow {
  double N = 0.0;
  double gap_p = 0.0;         // E^[sup |X^N - X|^p]
  double gap_p_se = 0.0;      // standard error at the argmax control
  double max_sup_gap = 0.0;   // max over scenarios of sup|X^N - X| + sup|K^N - K|
  bool beyond_path_bound = false;  // N exceeds the realized bound on every path
};

struct TruncationReport {
  std::vector<TruncationRow> rows;
  double realized_bound = 0.0;  // max over paths of sup |f|, |h|, |g|, |S|
  bool nonincreasing = false;   // within 3 standard errors
  bool zero_beyond_bound = false;
  bool passed = false;
};

// Solves the problem truncated at each N of an increasing ladder and compares
// with the untruncated solution on identical scenarios.
TruncationReport run_truncation_study(const Problem& problem, const std::vector<double>& n_ladder,
                                      const std::vector<VolatilityControl>& controls,
                                      std::size_t n_paths, std::uint64_t master_seed,
                                      unsigned jobs = 1);

struct UniquenessReport {
  std::vector<double> deltas;
  double max_gap = 0.0;  // over scenarios and deltas, sup-norm distance of fixed points
  double threshold = 0.0;
  std::size_t n_scenarios = 0;
  bool passed = false;
};

// Re-solves every scenario from X^0 = x0 + delta and checks all runs reach the
// same fixed point within 10 picard_tol.
UniquenessReport run_uniqueness_probe(const Problem& problem,
                                      const std::vector<VolatilityControl>& controls,
                                      std::size_t n_paths, const std::vector<double>& deltas,
                                      std::uint64_t master_seed, unsigned jobs = 1);

}  // namespace rgsde
