#include "rgsde/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rgsde/error.hpp"
#include "rgsde/expectation.hpp"
#include "rgsde/parallel.hpp"
#include "rgsde/random.hpp"

namespace rgsde {
namespace {

struct Lattice {
  std::vector<std::size_t> steps;
  std::vector<double> xs;
  std::vector<double> ks;
};

Lattice probe_lattice(const TimeGrid& grid) {
  Lattice l;
  l.steps = {0, grid.n_steps / 2, grid.n_steps - 1};
  for (int i = 0; i <= 40; ++i) l.xs.push_back(-10.0 + 0.5 * i);
  for (int i = 0; i <= 40; ++i) l.ks.push_back(0.25 * i);
  return l;
}

[[noreturn]] void ill_posed(const std::string& case_name, const std::string& what) {
  fail(ErrorKind::IllPosedCase, "comparison case '" + case_name + "': " + what);
}

std::string at(std::size_t step, double x, double k) {
  std::ostringstream os;
  os << " (step " << step << ", x=" << x << ", k=" << k << ")";
  return os.str();
}

enum class KShape { Nonincreasing, Nondecreasing, Independent };

void probe_k_shape(const std::string& name, const char* which, const Evaluator& fn, KShape shape,
                   const Lattice& l) {
  for (std::size_t s : l.steps) {
    for (double x : l.xs) {
      const double base = fn(s, x, 0.0);
      double prev = base;
      for (std::size_t j = 1; j < l.ks.size(); ++j) {
        const double v = fn(s, x, l.ks[j]);
        const bool ok = shape == KShape::Nonincreasing   ? v <= prev
                        : shape == KShape::Nondecreasing ? v >= prev
                                                         : v == base;
        if (!ok) {
          const char* expect = shape == KShape::Nonincreasing   ? "nonincreasing"
                               : shape == KShape::Nondecreasing ? "nondecreasing"
                                                                : "independent";
          ill_posed(name, std::string(which) + " is not " + expect + " in k" + at(s, x, l.ks[j]));
        }
        prev = v;
      }
    }
  }
}

void probe_order_at_zero(const std::string& name, const char* which, const Evaluator& lower,
                         const Evaluator& upper, const Lattice& l) {
  for (std::size_t s : l.steps)
    for (double x : l.xs)
      if (lower(s, x, 0.0) > upper(s, x, 0.0))
        ill_posed(name, std::string(which) + "1(x, 0) > " + which + "2(x, 0)" + at(s, x, 0.0));
}

void probe_bounded(const std::string& name, const char* which, const CoefficientSet& cs,
                   const Lattice& l) {
  if (!cs.bound) ill_posed(name, std::string(which) + " declares no coefficient bound");
  for (std::size_t s : l.steps)
    for (double x : l.xs)
      for (double k : l.ks)
        for (const Evaluator* e : {&cs.f, &cs.h, &cs.g})
          if (std::abs((*e)(s, x, k)) > *cs.bound)
            ill_posed(name, std::string(which) + " exceeds its declared bound" + at(s, x, k));
}

void check_obstacle_order(const std::string& name, const GridPath& s1, const GridPath& s2,
                          const std::string& where) {
  for (std::size_t i = 0; i < s1.size(); ++i)
    if (s1[i] > s2[i]) {
      std::ostringstream os;
      os << "obstacles out of order at node " << i << where;
      ill_posed(name, os.str());
    }
}

double sup_abs(const GridPath& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

const char* to_string(HypothesisProfile p) {
  switch (p) {
    case HypothesisProfile::Thm36Bounded: return "thm36_bounded";
    case HypothesisProfile::Thm37General: return "thm37_general";
    case HypothesisProfile::Cor38Case1: return "cor38_case1";
    case HypothesisProfile::Cor38Case2: return "cor38_case2";
  }
  return "unknown";
}

HypothesisProfile profile_from_string(const std::string& s) {
  if (s == "thm36_bounded") return HypothesisProfile::Thm36Bounded;
  if (s == "thm37_general") return HypothesisProfile::Thm37General;
  if (s == "cor38_case1") return HypothesisProfile::Cor38Case1;
  if (s == "cor38_case2") return HypothesisProfile::Cor38Case2;
  fail(ErrorKind::InvalidArgument, "unknown hypothesis profile '" + s + "'");
}

void probe_hypotheses(const ComparisonCase& c) {
  const std::string& name = c.name;
  const CoefficientSet& a = c.lower.coeffs;
  const CoefficientSet& b = c.upper.coeffs;

  for (const ProblemData* pd : {&c.lower, &c.upper}) {
    const ValidationReport rep =
        validate_assumptions(pd->coeffs, pd->x0, pd->obstacle, c.grid, 3.0);
    if (!rep.passed) ill_posed(name, rep.failure + ": " + rep.detail);
  }
  if (c.lower.x0 > c.upper.x0) ill_posed(name, "initial values out of order (x0_1 > x0_2)");
  if (!a.g_k_independent || !b.g_k_independent)
    ill_posed(name, "diffusion coefficient g must be declared independent of k");

  const Lattice l = probe_lattice(c.grid);
  for (std::size_t s : l.steps)
    for (double x : l.xs) {
      const double g0 = a.g(s, x, 0.0);
      if (b.g(s, x, 0.0) != g0) ill_posed(name, "g1 and g2 differ" + at(s, x, 0.0));
      for (double k : l.ks)
        if (a.g(s, x, k) != g0 || b.g(s, x, k) != g0)
          ill_posed(name, "g depends on k" + at(s, x, k));
    }

  const bool lower_indep = c.profile == HypothesisProfile::Cor38Case1;
  const bool upper_indep = c.profile == HypothesisProfile::Cor38Case2;
  const KShape lower_shape = lower_indep ? KShape::Independent : KShape::Nonincreasing;
  const KShape upper_shape = upper_indep ? KShape::Independent : KShape::Nondecreasing;
  probe_k_shape(name, "f1", a.f, lower_shape, l);
  probe_k_shape(name, "h1", a.h, lower_shape, l);
  probe_k_shape(name, "f2", b.f, upper_shape, l);
  probe_k_shape(name, "h2", b.h, upper_shape, l);
  probe_order_at_zero(name, "f", a.f, b.f, l);
  probe_order_at_zero(name, "h", a.h, b.h, l);

  if (c.profile == HypothesisProfile::Thm36Bounded) {
    probe_bounded(name, "problem 1", a, l);
    probe_bounded(name, "problem 2", b, l);
    if (!c.lower.obstacle.upper_bound() || !c.upper.obstacle.upper_bound())
      ill_posed(name, "obstacles must be uniformly bounded above");
  }

  const bool deterministic = c.lower.obstacle.mode == ObstacleSpec::Mode::GridPath &&
                             c.upper.obstacle.mode == ObstacleSpec::Mode::GridPath;
  if (deterministic) {
    const ScenarioPath flat =
        sample_scenario(constant_control(c.grid, c.vol.sigma_hi_sq), c.grid, c.vol, 0);
    check_obstacle_order(name, c.lower.obstacle.build(flat), c.upper.obstacle.build(flat), "");
  }
}

ComparisonReport run_comparison(const ComparisonCase& c,
                                const std::vector<VolatilityControl>& controls,
                                std::size_t n_paths, const SolverConfig& cfg,
                                std::uint64_t master_seed, unsigned jobs) {
  if (controls.empty()) fail(ErrorKind::InvalidArgument, "control family is empty");
  if (n_paths == 0) fail(ErrorKind::InvalidArgument, "comparison needs at least one scenario");
  cfg.validate();
  probe_hypotheses(c);
  for (const auto& ctl : controls) check_control(ctl, c.grid, c.vol);

  const std::size_t total = controls.size() * n_paths;
  std::vector<ScenarioWorst> worst(total);
  std::vector<double> scaled(total, 0.0);
  parallel_for(total, jobs, [&](std::size_t item) {
    const std::size_t ci = item / n_paths, j = item % n_paths;
    const ScenarioPath path =
        sample_scenario(controls[ci], c.grid, c.vol, scenario_seed(master_seed, j));
    std::ostringstream where;
    where << " (control '" << controls[ci].label << "', scenario " << j << ")";
    check_obstacle_order(c.name, c.lower.obstacle.build(path), c.upper.obstacle.build(path),
                         where.str());
    SolveResult r1, r2;
    try {
      r1 = picard_solve(c.lower.coeffs, c.lower.obstacle, path, c.lower.x0, cfg);
      r2 = picard_solve(c.upper.coeffs, c.upper.obstacle, path, c.upper.x0, cfg);
    } catch (const Error& e) {
      rethrow_with_context(e, "comparison case '" + c.name + "'" + where.str());
    }
    ScenarioWorst w{controls[ci].label, j, 0, 0.0};
    for (std::size_t i = 0; i < r1.solution.X.size(); ++i) {
      const double v = std::max(0.0, r1.solution.X[i] - r2.solution.X[i]);
      if (v > w.violation) {
        w.violation = v;
        w.node = i;
      }
    }
    worst[item] = w;
    scaled[item] = w.violation / (1.0 + sup_abs(r2.solution.X));
  });

  ComparisonReport rep;
  rep.name = c.name;
  rep.profile = c.profile;
  rep.n_scenarios = total;
  for (std::size_t k = 0; k < total; ++k) {
    rep.max_violation = std::max(rep.max_violation, worst[k].violation);
    rep.max_scaled_violation = std::max(rep.max_scaled_violation, scaled[k]);
  }
  rep.worst = std::move(worst);
  rep.passed = rep.max_scaled_violation <= 1e-9;
  return rep;
}

TruncationReport run_truncation_study(const Problem& problem, const std::vector<double>& n_ladder,
                                      const std::vector<VolatilityControl>& controls,
                                      std::size_t n_paths, std::uint64_t master_seed,
                                      unsigned jobs) {
  if (n_ladder.empty()) fail(ErrorKind::InvalidArgument, "truncation ladder is empty");
  for (std::size_t k = 0; k < n_ladder.size(); ++k) {
    if (!(n_ladder[k] > 0.0)) fail(ErrorKind::InvalidArgument, "truncation levels must be positive");
    if (k > 0 && !(n_ladder[k] > n_ladder[k - 1]))
      fail(ErrorKind::InvalidArgument, "truncation ladder must be increasing");
  }
  if (controls.empty()) fail(ErrorKind::InvalidArgument, "control family is empty");
  if (n_paths < 2) fail(ErrorKind::InvalidArgument, "truncation study needs n_paths >= 2");
  require_valid(problem);
  const double p = problem.cfg.p_exponent;

  std::vector<CoefficientSet> truncated;
  std::vector<ObstacleSpec> capped;
  for (double N : n_ladder) {
    truncated.push_back(truncate_coefficients(problem.coeffs, N, p));
    capped.push_back(truncate_obstacle(problem.obstacle, N));
  }

  const std::size_t total = controls.size() * n_paths;
  const std::size_t levels = n_ladder.size();
  std::vector<double> path_bound(total, 0.0);
  std::vector<std::vector<double>> gap_p(total, std::vector<double>(levels));
  std::vector<std::vector<double>> sup_gap_v(total, std::vector<double>(levels));

  parallel_for(total, jobs, [&](std::size_t item) {
    const std::size_t ci = item / n_paths, j = item % n_paths;
    const ScenarioPath path =
        sample_scenario(controls[ci], problem.grid, problem.vol, scenario_seed(master_seed, j));
    try {
      const SolveResult base =
          picard_solve(problem.coeffs, problem.obstacle, path, problem.x0, problem.cfg);
      const auto& X = base.solution.X;
      const auto& K = base.solution.K;
      double bound = sup_abs(base.S);
      for (std::size_t i = 0; i + 1 < X.size(); ++i) {
        bound = std::max({bound, std::abs(problem.coeffs.f(i, X[i], K[i + 1])),
                          std::abs(problem.coeffs.h(i, X[i], K[i + 1])),
                          std::abs(problem.coeffs.g(i, X[i], K[i]))});
      }
      path_bound[item] = bound;
      for (std::size_t k = 0; k < levels; ++k) {
        const SolveResult tr = picard_solve(truncated[k], capped[k], path, problem.x0, problem.cfg);
        double gx = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i)
          gx = std::max(gx, std::abs(tr.solution.X[i] - X[i]));
        gap_p[item][k] = std::pow(gx, p);
        sup_gap_v[item][k] = sup_gap(tr.solution, base.solution);
      }
    } catch (const Error& e) {
      std::ostringstream os;
      os << "truncation study, control '" << controls[ci].label << "', scenario " << j;
      rethrow_with_context(e, os.str());
    }
  });

  TruncationReport rep;
  rep.realized_bound = *std::max_element(path_bound.begin(), path_bound.end());
  std::vector<std::string> labels;
  for (const auto& c : controls) labels.push_back(c.label);
  for (std::size_t k = 0; k < levels; ++k) {
    std::vector<std::vector<double>> samples(controls.size());
    TruncationRow row;
    row.N = n_ladder[k];
    for (std::size_t item = 0; item < total; ++item) {
      samples[item / n_paths].push_back(gap_p[item][k]);
      row.max_sup_gap = std::max(row.max_sup_gap, sup_gap_v[item][k]);
    }
    const auto est = aggregate("truncation_gap", labels, samples, master_seed);
    row.gap_p = est.value;
    row.gap_p_se = est.argmax().std_error;
    row.beyond_path_bound = row.N >= rep.realized_bound;
    rep.rows.push_back(row);
  }
  rep.nonincreasing = true;
  for (std::size_t k = 1; k < levels; ++k) {
    const double slack = 3.0 * std::hypot(rep.rows[k].gap_p_se, rep.rows[k - 1].gap_p_se);
    if (rep.rows[k].gap_p > rep.rows[k - 1].gap_p + slack) rep.nonincreasing = false;
  }
  rep.zero_beyond_bound = true;
  for (const auto& row : rep.rows)
    if (row.beyond_path_bound && row.max_sup_gap != 0.0) rep.zero_beyond_bound = false;
  rep.passed = rep.nonincreasing && rep.zero_beyond_bound;
  return rep;
}

UniquenessReport run_uniqueness_probe(const Problem& problem,
                                      const std::vector<VolatilityControl>& controls,
                                      std::size_t n_paths, const std::vector<double>& deltas,
                                      std::uint64_t master_seed, unsigned jobs) {
  if (controls.empty()) fail(ErrorKind::InvalidArgument, "control family is empty");
  require_valid(problem);
  const std::size_t total = controls.size() * n_paths;
  std::vector<double> gaps(total, 0.0);
  parallel_for(total, jobs, [&](std::size_t item) {
    const std::size_t ci = item / n_paths, j = item % n_paths;
    const ScenarioPath path =
        sample_scenario(controls[ci], problem.grid, problem.vol, scenario_seed(master_seed, j));
    try {
      const SolveResult base =
          picard_solve(problem.coeffs, problem.obstacle, path, problem.x0, problem.cfg);
      for (double d : deltas) {
        const SolveResult r =
            picard_solve(problem.coeffs, problem.obstacle, path, problem.x0, problem.cfg, d);
        gaps[item] = std::max(gaps[item], sup_gap(r.solution, base.solution));
      }
    } catch (const Error& e) {
      std::ostringstream os;
      os << "uniqueness probe, control '" << controls[ci].label << "', scenario " << j;
      rethrow_with_context(e, os.str());
    }
  });
  UniquenessReport rep;
  rep.deltas = deltas;
  rep.n_scenarios = total;
  rep.threshold = 10.0 * problem.cfg.picard_tol;
  for (double g : gaps) rep.max_gap = std::max(rep.max_gap, g);
  rep.passed = rep.max_gap <= rep.threshold;
  return rep;
}

}  // namespace rgsde
