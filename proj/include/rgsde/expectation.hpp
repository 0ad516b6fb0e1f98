#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rgsde/problem.hpp"

namespace rgsde {

// Real-valued functional of a solved path.
struct PathFunctional {
  std::string id;
  std::function<double(const PathView&)> eval;

  static PathFunctional terminal_value();              // X_T
  static PathFunctional running_sup();                 // sup |X|
  static PathFunctional running_sup_positive_part();   // sup X^+
  static PathFunctional terminal_K();                  // K_T
  static PathFunctional flatness();                    // flatness defect
  static PathFunctional constant(double c);
  static PathFunctional terminal_B();
  static PathFunctional terminal_B_squared();
  static PathFunctional sup_abs_X_pow(double p);       // sup |X|^p
  static PathFunctional terminal_K_pow(double p);      // K_T^p
};

// Registry lookup; `param` feeds constant(c) and the *_pow functionals.
PathFunctional functional_from_id(const std::string& id, double param = 0.0);
std::vector<std::string> functional_ids();

// Event on a solved path; capacity estimates use its indicator.
struct PathEvent {
  std::string id;
  std::function<bool(const PathView&)> holds;
};

// Registry: x0_mismatch (X[0] != x0), k0_zero (K[0] == 0), terminal_B_positive,
// touches_obstacle (K_T > 0).
PathEvent event_from_id(const std::string& id);

struct ControlStat {
  std::string label;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
};

struct UpperExpectationEstimate {
  std::string functional;
  double value = 0.0;
  std::string argmax_control;
  std::vector<ControlStat> per_control;
  std::uint64_t master_seed = 0;

  const ControlStat& argmax() const;
  // sqrt of the summed squared standard errors over controls.
  double pooled_std_error() const;
};

// Sample mean with exact constant preservation (identical samples return the
// common value). Plain left-to-right summation keeps the mean monotone in every
// sample.
double sample_mean(const std::vector<double>& xs);
double sample_std_error(const std::vector<double>& xs, double mean);

// Builds the estimate from per-control samples: value is the largest mean,
// argmax the first control attaining it.
UpperExpectationEstimate aggregate(const std::string& functional,
                                   const std::vector<std::string>& labels,
                                   const std::vector<std::vector<double>>& samples,
                                   std::uint64_t master_seed);

// Sup over the finite control family of Monte Carlo means under common random
// numbers. Requires n_paths >= 2 and a nonempty family.
UpperExpectationEstimate upper_expectation(const PathFunctional& functional,
                                           const Problem& problem,
                                           const std::vector<VolatilityControl>& controls,
                                           std::size_t n_paths, std::uint64_t master_seed,
                                           unsigned jobs = 1);

// Several functionals from one sweep (shared scenarios and solutions).
std::vector<UpperExpectationEstimate> upper_expectations(
    const std::vector<PathFunctional>& functionals, const Problem& problem,
    const std::vector<VolatilityControl>& controls, std::size_t n_paths,
    std::uint64_t master_seed, unsigned jobs = 1);

// Capacity c(A): the same maximization over indicator frequencies.
UpperExpectationEstimate capacity(const PathEvent& event, const Problem& problem,
                                  const std::vector<VolatilityControl>& controls,
                                  std::size_t n_paths, std::uint64_t master_seed,
                                  unsigned jobs = 1);

}  // namespace rgsde
