#include "rgsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rgsde/error.hpp"
#include "rgsde/parallel.hpp"
#include "rgsde/random.hpp"

namespace rgsde {
namespace {

// Polishing sweeps tolerated without a residual decrease once converged.
constexpr int kMaxStall = 8;

double sup_abs_diff(const GridPath& a, const GridPath& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

[[noreturn]] void numeric_failure(std::size_t step, std::size_t iteration) {
  std::ostringstream os;
  os << "coefficient evaluation produced a non-finite value at step " << step;
  if (iteration > 0) os << " (Picard iteration " << iteration << ")";
  fail(ErrorKind::NumericFailure, os.str());
}

std::string describe_probe(double t, double x, double k) {
  std::ostringstream os;
  os.precision(6);
  os << "t=" << t << ", x=" << x << ", k=" << k;
  return os.str();
}

}  // namespace

void SolverConfig::validate() const {
  if (!(p_exponent > 2.0)) fail(ErrorKind::InvalidArgument, "p_exponent must exceed 2");
  if (!(picard_tol > 0.0)) fail(ErrorKind::InvalidArgument, "picard_tol must be positive");
  if (max_picard == 0) fail(ErrorKind::InvalidArgument, "max_picard must be positive");
}

ValidationReport validate_assumptions(const CoefficientSet& coeffs, double x0,
                                      const ObstacleSpec& obstacle, const TimeGrid& grid,
                                      double p) {
  ValidationReport rep;
  auto reject = [&rep](std::string kind, std::string detail, std::optional<double> t) {
    rep.passed = false;
    rep.failure = std::move(kind);
    rep.detail = std::move(detail);
    rep.time = t;
    return rep;
  };

  if (!(p > 2.0)) return reject("invalid-exponent", "growth exponent p must exceed 2", {});
  if (!std::isfinite(x0)) return reject("invalid-initial", "x0 must be finite", {});
  if (obstacle.start_value() > x0) {
    std::ostringstream os;
    os.precision(17);
    os << "obstacle must start at or below the initial condition: S0 = "
       << obstacle.start_value() << " > x0 = " << x0;
    return reject("obstacle-violation", os.str(), 0.0);
  }
  if (!(coeffs.beta2 >= 0.0) || !std::isfinite(coeffs.beta2))
    return reject("invalid-growth", "beta2 must be a finite nonnegative constant", {});
  if (!coeffs.f || !coeffs.h || !coeffs.g)
    return reject("invalid-coefficients", "f, h and g must all be set", {});

  // Probe times: fixed steps plus a few random ones from a fixed-seed generator.
  std::vector<std::size_t> steps = {0, grid.n_steps / 2, grid.n_steps - 1};
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<std::size_t> pick(0, grid.n_steps - 1);
  for (int r = 0; r < 5; ++r) steps.push_back(pick(rng));

  const std::vector<double> xs = {0.0, 0.1, -0.1, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0,
                                  5.0, -5.0, 10.0, -10.0, 100.0, -100.0};
  const std::vector<double> ks = {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0};
  const double b2p = std::pow(coeffs.beta2, p);

  for (std::size_t step : steps) {
    const double t = grid.nodes[step];
    const double b1p = std::pow(std::abs(coeffs.beta1.at(step)), p);
    for (double x : xs) {
      for (double k : ks) {
        const double lhs = std::pow(std::abs(coeffs.f(step, x, k)), p) +
                           std::pow(std::abs(coeffs.h(step, x, k)), p) +
                           std::pow(std::abs(coeffs.g(step, x, k)), p);
        const double rhs = b1p + b2p * (std::pow(std::abs(x), p) + std::pow(k, p));
        if (!std::isfinite(lhs) || lhs > rhs * (1.0 + 1e-12) + 1e-300)
          return reject("growth-bound", "declared growth bound fails at " + describe_probe(t, x, k),
                        t);
      }
    }
  }

  if (coeffs.modulus.kind == ModulusKind::Custom && !coeffs.modulus.custom)
    return reject("unsupported-modulus", "custom modulus has no evaluator", {});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::vector<double> scales = {1e-8, 1e-5, 1e-3, 1e-1, 1.0, 10.0};
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t step = steps[static_cast<std::size_t>(trial) % steps.size()];
    const double scale = scales[static_cast<std::size_t>(trial) % scales.size()];
    const double x = 5.0 * unit(rng);
    const double k = 5.0 * std::abs(unit(rng));
    const double x2 = x + scale * unit(rng);
    const double k2 = std::max(0.0, k + scale * unit(rng));
    const double lhs = std::pow(std::abs(coeffs.f(step, x, k) - coeffs.f(step, x2, k2)), p) +
                       std::pow(std::abs(coeffs.h(step, x, k) - coeffs.h(step, x2, k2)), p) +
                       std::pow(std::abs(coeffs.g(step, x, k) - coeffs.g(step, x2, k2)), p);
    const double r = std::pow(std::abs(x - x2), p) + std::pow(std::abs(k - k2), p);
    const double rhs = coeffs.modulus.beta_weight.at(step) * coeffs.modulus.rho(r);
    if (!std::isfinite(lhs) || lhs > rhs * (1.0 + 1e-9) + 1e-300)
      return reject("modulus-bound",
                    "declared modulus fails between (" + describe_probe(grid.nodes[step], x, k) +
                        ") and (x=" + std::to_string(x2) + ", k=" + std::to_string(k2) + ")",
                    grid.nodes[step]);
  }
  return rep;
}

SolveResult picard_solve(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                         const ScenarioPath& scenario, double x0, const SolverConfig& cfg,
                         double initial_offset) {
  cfg.validate();
  const std::size_t n = scenario.n_steps();
  const double dt = scenario.grid.dt;

  SolveResult res;
  res.S = obstacle.build(scenario);
  ReflectedSolution cur{GridPath(n + 1, x0 + initial_offset), GridPath(n + 1, 0.0)};
  GridPath Y(n + 1);

  bool converged = false;
  double prev = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (std::size_t iter = 1; iter <= cfg.max_picard; ++iter) {
    Y[0] = x0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = cur.X[i];
      Y[i + 1] = Y[i] + coeffs.f(i, x, cur.K[i + 1]) * dt +
                 coeffs.h(i, x, cur.K[i + 1]) * scenario.dQV[i] +
                 coeffs.g(i, x, cur.K[i]) * scenario.dB[i];
      if (!std::isfinite(Y[i + 1])) numeric_failure(i, iter);
    }
    ReflectedSolution next = skorokhod_map(Y, res.S);
    const double r = sup_abs_diff(next.X, cur.X) + sup_abs_diff(next.K, cur.K);
    res.residual_history.push_back(r);
    cur = std::move(next);
    res.picard_iters = iter;
    res.residual = r;

    if (!converged && r <= cfg.picard_tol) converged = true;
    stalled = r < prev ? 0 : stalled + 1;
    if (converged && (r == 0.0 || stalled >= kMaxStall)) break;
    prev = r;
  }
  if (!converged) {
    std::ostringstream os;
    os << "Picard iteration did not reach tolerance " << cfg.picard_tol << " within "
       << cfg.max_picard << " iterations (last residual " << res.residual << ")";
    Error e(ErrorKind::NonConvergence, os.str());
    e.with_residuals(res.residual_history);
    throw e;
  }
  res.solution = std::move(cur);
  if (cfg.oracle_check)
    res.oracle_gap = sup_gap(res.solution, stepwise_solve(coeffs, obstacle, scenario, x0));
  return res;
}

ReflectedSolution stepwise_solve(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                                 const ScenarioPath& scenario, double x0) {
  const std::size_t n = scenario.n_steps();
  const double dt = scenario.grid.dt;
  const GridPath S = obstacle.build(scenario);
  if (x0 < S[0]) {
    std::ostringstream os;
    os.precision(17);
    os << "obstacle starts above the initial condition: S[0] = " << S[0] << " > x0 = " << x0;
    fail(ErrorKind::ObstacleViolation, os.str());
  }
  ReflectedSolution out{GridPath(n + 1, x0), GridPath(n + 1, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = out.X[i], k = out.K[i];
    const double free = x + coeffs.f(i, x, k) * dt + coeffs.h(i, x, k) * scenario.dQV[i] +
                        coeffs.g(i, x, k) * scenario.dB[i];
    if (!std::isfinite(free)) numeric_failure(i, 0);
    out.K[i + 1] = k + std::max(0.0, S[i + 1] - free);
    out.X[i + 1] = free + (out.K[i + 1] - k);
  }
  return out;
}

GridPath euler_unreflected(const CoefficientSet& coeffs, const ScenarioPath& scenario, double x0) {
  const std::size_t n = scenario.n_steps();
  const double dt = scenario.grid.dt;
  GridPath X(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) {
    X[i + 1] = X[i] + coeffs.f(i, X[i], 0.0) * dt + coeffs.h(i, X[i], 0.0) * scenario.dQV[i] +
               coeffs.g(i, X[i], 0.0) * scenario.dB[i];
    if (!std::isfinite(X[i + 1])) numeric_failure(i, 0);
  }
  return X;
}

double sup_gap(const ReflectedSolution& a, const ReflectedSolution& b) {
  return sup_abs_diff(a.X, b.X) + sup_abs_diff(a.K, b.K);
}

CoefficientSet truncate_coefficients(const CoefficientSet& coeffs, double N, double p) {
  if (!(N > 0.0)) fail(ErrorKind::InvalidArgument, "truncation level N must be positive");
  CoefficientSet out = coeffs;
  auto clamp_eval = [N](Evaluator e) -> Evaluator {
    return [e = std::move(e), N](std::size_t i, double x, double k) {
      return std::clamp(e(i, x, k), -N, N);
    };
  };
  out.f = clamp_eval(coeffs.f);
  out.h = clamp_eval(coeffs.h);
  out.g = clamp_eval(coeffs.g);

  const double cap = N * std::pow(3.0, 1.0 / p);
  if (out.beta1.is_constant()) {
    out.beta1.constant = std::min(std::abs(out.beta1.constant), cap);
  } else {
    for (double& v : out.beta1.path) v = std::min(std::abs(v), cap);
  }
  out.bound = out.bound ? std::min(*out.bound, N) : N;

  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", N);
  out.family_name += "+truncated";
  out.params.emplace_back("N", buf);
  return out;
}

ObstacleSpec truncate_obstacle(const ObstacleSpec& obstacle, double N) {
  if (!(N > 0.0)) fail(ErrorKind::InvalidArgument, "truncation level N must be positive");
  ObstacleSpec out = obstacle;
  out.cap = out.cap ? std::min(*out.cap, N) : N;
  return out;
}

ConvergenceTable richardson_refine(const CoefficientSet& coeffs, const ObstacleSpec& obstacle,
                                   const VolatilityControl& control, double x0,
                                   const SolverConfig& cfg, std::size_t levels,
                                   const TimeGrid& base_grid, const VolatilitySpec& spec,
                                   std::size_t n_paths, std::uint64_t master_seed,
                                   unsigned jobs) {
  if (levels < 2) fail(ErrorKind::InvalidArgument, "refinement needs at least two levels");
  if (levels > 24) fail(ErrorKind::ResourceLimit, "refinement limited to 24 levels");
  if (n_paths == 0) fail(ErrorKind::InvalidArgument, "refinement needs at least one path");
  check_control(control, base_grid, spec);

  const std::size_t finest_factor = std::size_t{1} << (levels - 1);
  const TimeGrid fine_grid = make_uniform_grid(base_grid.horizon, base_grid.n_steps * finest_factor);
  const VolatilityControl fine_control = refine_control(control, finest_factor);

  // per path, per level: gap to the next level, oracle gap, K_T
  std::vector<std::vector<double>> gaps(n_paths, std::vector<double>(levels, 0.0));
  std::vector<std::vector<double>> oracle(n_paths, std::vector<double>(levels, 0.0));
  std::vector<std::vector<double>> terminal_k(n_paths, std::vector<double>(levels, 0.0));

  parallel_for(n_paths, jobs, [&](std::size_t j) {
    const ScenarioPath fine =
        sample_scenario(fine_control, fine_grid, spec, scenario_seed(master_seed, j));
    std::vector<ReflectedSolution> sols;
    for (std::size_t l = 0; l < levels; ++l) {
      const ScenarioPath path = coarsen(fine, std::size_t{1} << (levels - 1 - l));
      SolveResult r = picard_solve(coeffs, obstacle, path, x0, cfg);
      oracle[j][l] = sup_gap(r.solution, stepwise_solve(coeffs, obstacle, path, x0));
      terminal_k[j][l] = r.solution.K.back();
      sols.push_back(std::move(r.solution));
    }
    for (std::size_t l = 0; l + 1 < levels; ++l) {
      double gx = 0.0, gk = 0.0;
      for (std::size_t i = 0; i < sols[l].X.size(); ++i) {
        gx = std::max(gx, std::abs(sols[l].X[i] - sols[l + 1].X[2 * i]));
        gk = std::max(gk, std::abs(sols[l].K[i] - sols[l + 1].K[2 * i]));
      }
      gaps[j][l] = gx + gk;
    }
  });

  ConvergenceTable table;
  for (std::size_t l = 0; l < levels; ++l) {
    RefinementLevel row;
    row.n_steps = base_grid.n_steps << l;
    for (std::size_t j = 0; j < n_paths; ++j) {
      row.mean_gap_to_finer += gaps[j][l];
      row.mean_oracle_gap += oracle[j][l];
      row.mean_terminal_K += terminal_k[j][l];
    }
    row.mean_gap_to_finer /= static_cast<double>(n_paths);
    row.mean_oracle_gap /= static_cast<double>(n_paths);
    row.mean_terminal_K /= static_cast<double>(n_paths);
    if (l + 1 == levels) row.mean_gap_to_finer = 0.0;
    table.levels.push_back(row);
  }
  auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
  for (std::size_t l = 0; l + 2 < levels; ++l)
    table.gap_ratios.push_back(
        ratio(table.levels[l + 1].mean_gap_to_finer, table.levels[l].mean_gap_to_finer));
  for (std::size_t l = 0; l + 1 < levels; ++l)
    table.oracle_gap_ratios.push_back(
        ratio(table.levels[l + 1].mean_oracle_gap, table.levels[l].mean_oracle_gap));
  if (!table.gap_ratios.empty()) {
    double s = 0.0;
    for (double r : table.gap_ratios) s += r;
    table.mean_gap_ratio = s / static_cast<double>(table.gap_ratios.size());
  }
  return table;
}

}  // namespace rgsde
