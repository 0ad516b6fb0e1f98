#include "rgsde/problem.hpp"

#include <sstream>

#include "rgsde/error.hpp"
#include "rgsde/parallel.hpp"
#include "rgsde/random.hpp"

namespace rgsde {

void require_valid(const Problem& problem) {
  problem.vol.validate();
  problem.cfg.validate();
  const ValidationReport rep = validate_assumptions(problem.coeffs, problem.x0, problem.obstacle,
                                                    problem.grid, problem.cfg.p_exponent);
  if (!rep.passed)
    fail(rep.failure == "obstacle-violation" ? ErrorKind::ObstacleViolation
                                             : ErrorKind::ConstraintViolation,
         rep.failure + ": " + rep.detail);
}

SweepResult sweep(const Problem& problem, const std::vector<VolatilityControl>& controls,
                  std::size_t n_paths, std::uint64_t master_seed, unsigned jobs,
                  const Observer& observer) {
  if (controls.empty()) fail(ErrorKind::InvalidArgument, "control family is empty");
  for (const auto& c : controls) check_control(c, problem.grid, problem.vol);

  SweepResult out;
  out.obs.assign(controls.size(), std::vector<std::vector<double>>(n_paths));
  for (const auto& c : controls) out.labels.push_back(c.label);

  const std::size_t total = controls.size() * n_paths;
  parallel_for(total, jobs, [&](std::size_t item) {
    const std::size_t ci = item / n_paths;
    const std::size_t j = item % n_paths;
    try {
      const ScenarioPath path = sample_scenario(controls[ci], problem.grid, problem.vol,
                                                scenario_seed(master_seed, j));
      const SolveResult r =
          picard_solve(problem.coeffs, problem.obstacle, path, problem.x0, problem.cfg);
      const PathView view{r.solution.X, r.solution.K, r.S, path.B, path.QV, path, problem.x0};
      out.obs[ci][j] = observer(view);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "control '" << controls[ci].label << "', scenario " << j;
      rethrow_with_context(e, os.str());
    }
  });
  return out;
}

}  // namespace rgsde
