// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rgsde/analysis.hpp"
#include "rgsde/config.hpp"
#include "rgsde/error.hpp"
#include "rgsde/expectation.hpp"
#include "rgsde/harness.hpp"
#include "rgsde/io.hpp"
#include "rgsde/random.hpp"
#include "rgsde/reflection.hpp"
#include "rgsde/solver.hpp"

namespace fs = std::filesystem;
using namespace rgsde;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

class Notes {
 public:
  void fail(const std::string& why) {
    if (ok_) first_ = why;
    ok_ = false;
  }
  void require(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
  void note(const std::string& s) { info_ += (info_.empty() ? "" : "; ") + s; }
  Outcome done() const { return {ok_, ok_ ? info_ : first_}; }

 private:
  bool ok_ = true;
  std::string first_, info_;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Problem make_problem(const std::string& f, const std::string& h, const std::string& g,
                     ObstacleSpec s, double x0, std::size_t n_steps, VolatilitySpec vol) {
  Problem p;
  p.coeffs = make_registry_coefficients(parse_term(f), parse_term(h), parse_term(g), 3.0);
  p.obstacle = std::move(s);
  p.x0 = x0;
  p.grid = make_uniform_grid(1.0, n_steps);
  p.vol = vol;
  return p;
}

double sup_abs(const GridPath& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// K[i] = max(K[i-1], S[i] - Y[i]) from K[-1] = 0.
GridPath recursion_oracle(const GridPath& Y, const GridPath& S) {
  GridPath K(Y.size());
  double k = 0.0;
  for (std::size_t i = 0; i < Y.size(); ++i) {
    k = std::max(k, S[i] - Y[i]);
    K[i] = k;
  }
  return K;
}

struct RandomPair {
  GridPath Y, S;
};

RandomPair random_pair(std::mt19937_64& rng, int max_len) {
  std::uniform_int_distribution<int> len(1, max_len);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = len(rng);
  const double vy = 0.01 + u(rng), vs = 0.5 * u(rng), drift = -0.05 * u(rng);
  RandomPair c{GridPath(n), GridPath(n)};
  double y = 0.0, s = -u(rng);
  for (int i = 0; i < n; ++i) {
    y += drift + vy * z(rng);
    s += vs * z(rng);
    c.Y[i] = y;
    c.S[i] = s;
  }
  c.S[0] = std::min(c.S[0], c.Y[0]);
  return c;
}

Outcome criterion1() {
  Notes n;
  std::mt19937_64 rng(101);
  double worst_oracle = 0.0, worst_flat_ratio = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto c = random_pair(rng, 1000);
    const auto r = skorokhod_map(c.Y, c.S);
    const auto K = recursion_oracle(c.Y, c.S);
    for (std::size_t i = 0; i < K.size(); ++i) {
      worst_oracle = std::max(worst_oracle, std::abs(r.K[i] - K[i]));
      if (r.X[i] < c.S[i]) n.fail("X < S at trial " + std::to_string(trial));
      if (i > 0 && r.K[i] < r.K[i - 1]) n.fail("K decreases at trial " + std::to_string(trial));
    }
    if (r.K[0] != 0.0) n.fail("K[0] != 0 at trial " + std::to_string(trial));
    const double defect = flatness_defect(r, c.S), tol = flatness_tolerance(r, c.S);
    if (defect > tol) n.fail("flatness defect " + fmt(defect) + " > " + fmt(tol));
    if (tol > 0.0) worst_flat_ratio = std::max(worst_flat_ratio, defect / tol);
  }
  n.require(worst_oracle <= 1e-12, "oracle gap " + fmt(worst_oracle));
  n.note("10000 pairs, max oracle gap " + fmt(worst_oracle) + ", max defect/tol " +
         fmt(worst_flat_ratio));
  return n.done();
}

Outcome criterion2() {
  Notes n;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int accepted = 0, rejected = 0;
  while (accepted < 1000) {
    const auto c = random_pair(rng, 1000);
    const auto r = skorokhod_map(c.Y, c.S);
    // nondecreasing from zero; kept only if admissible
    GridPath cand(c.Y.size(), 0.0);
    const double scale = 4.0 * u(rng) / static_cast<double>(c.Y.size());
    for (std::size_t i = 1; i < cand.size(); ++i) cand[i] = cand[i - 1] + scale * u(rng);
    bool admissible = true;
    for (std::size_t i = 0; i < cand.size() && admissible; ++i)
      admissible = c.Y[i] + cand[i] >= c.S[i];
    if (!admissible) {
      ++rejected;
      continue;
    }
    ++accepted;
    if (!minimality_check(r, c.Y, c.S, cand)) n.fail("candidate below K");
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (cand[i] < r.K[i]) n.fail("independent comparison: candidate below K");
  }
  n.note("1000 admissible candidates (" + std::to_string(rejected) + " inadmissible skipped)");
  return n.done();
}

Outcome criterion3() {
  Notes n;
  const VolatilitySpec vol{1.0, 1.0};
  const auto grid = make_uniform_grid(1.0, 64);
  const auto ctl = constant_control(grid, 1.0);
  const std::size_t paths = 10000;
  std::vector<double> b(paths);
  for (std::size_t j = 0; j < paths; ++j) {
    const auto s = sample_scenario(ctl, grid, vol, scenario_seed(3, j));
    for (std::size_t i = 0; i < s.QV.size(); ++i)
      if (s.QV[i] != grid.nodes[i]) n.fail("QV(t) != t at node " + std::to_string(i));
    b[j] = s.B.back();
  }
  // sample moments against N(0, 1) with standard errors from the sample itself
  auto moment = [&](int k, double target, const char* name) {
    std::vector<double> v(paths);
    for (std::size_t j = 0; j < paths; ++j) v[j] = std::pow(b[j], k);
    const double m = sample_mean(v), se = sample_std_error(v, m);
    n.require(std::abs(m - target) <= 3.0 * se,
              std::string(name) + " = " + fmt(m) + " (se " + fmt(se) + ")");
    n.note(std::string(name) + " " + fmt(m));
  };
  moment(1, 0.0, "E[B]");
  moment(2, 1.0, "E[B^2]");
  moment(3, 0.0, "E[B^3]");
  moment(4, 3.0, "E[B^4]");
  return n.done();
}

Outcome criterion4() {
  Notes n;
  const auto p = make_problem("linear(a=0.2, b=-0.5, c=-0.3)", "linear(a=0.1, c=0.2)",
                              "sinusoidal(a=1, b=0.3, w=2)", ObstacleSpec::constant(-1e6), 0.5,
                              64, VolatilitySpec{0.25, 1.0});
  const auto controls = bang_bang_family(p.grid, p.vol, 2);
  std::size_t count = 0;
  for (std::size_t j = 0; j < 250; ++j)
    for (const auto& ctl : controls) {
      const auto s = sample_scenario(ctl, p.grid, p.vol, scenario_seed(4, j));
      const auto r = picard_solve(p.coeffs, p.obstacle, s, p.x0, p.cfg);
      const auto e = euler_unreflected(p.coeffs, s, p.x0);
      if (std::any_of(r.solution.K.begin(), r.solution.K.end(), [](double k) { return k != 0.0; }))
        n.fail("K != 0");
      if (r.solution.X != e) n.fail("X differs from the explicit scheme");
      ++count;
    }
  n.note(std::to_string(count) + " scenarios bitwise equal");
  return n.done();
}

Outcome criterion5() {
  Notes n;
  const auto p = make_problem("linear(a=-1, c=-1)", "0", "0", ObstacleSpec::constant(0), 0.0,
                              1u << 14, VolatilitySpec{0.0, 1.0});
  const auto s = sample_scenario(constant_control(p.grid, 1.0), p.grid, p.vol, 1);
  const auto r = picard_solve(p.coeffs, p.obstacle, s, p.x0, p.cfg);
  const double err = std::abs(r.solution.K.back() - (std::exp(1.0) - 1.0));
  n.require(err <= 5e-4, "|K_T - (e - 1)| = " + fmt(err));
  n.note("|K_T - (e - 1)| = " + fmt(err) + " after " + std::to_string(r.picard_iters) + " sweeps");
  return n.done();
}

Outcome criterion6() {
  Notes n;
  const VolatilitySpec vol{0.25, 1.0};
  const auto base = make_uniform_grid(1.0, 64);
  const std::vector<std::pair<std::string, std::string>> families = {
      {"linear(a=-0.5, b=-0.5, c=-0.5)", "linear(a=1, b=0.2)"},
      {"clamped_linear(a=-0.5, b=-0.5, c=-0.5, lo=-3, hi=3)", "clamped_linear(a=1, b=0.2, lo=-2, hi=2)"},
      {"sinusoidal(a=-0.5, b=0.5, w=1, c=-0.5)", "sinusoidal(a=1, b=0.2, w=1)"},
  };
  for (const auto& [f, g] : families) {
    const auto coeffs = make_registry_coefficients(parse_term(f), TermSpec::constant(0),
                                                   parse_term(g), 3.0);
    SolverConfig cfg;
    const auto t = richardson_refine(coeffs, ObstacleSpec::constant(0), constant_control(base, 1.0),
                                     0.0, cfg, 5, base, vol, 32, 6);
    std::string ratios;
    for (double q : t.oracle_gap_ratios) {
      ratios += (ratios.empty() ? "" : " ") + fmt(q);
      n.require(q >= 0.5 / 1.5 && q <= 0.5 * 1.5, f + " gap ratio " + fmt(q));
    }
    n.note(f.substr(0, f.find('(')) + " ratios [" + ratios + "]");
  }
  return n.done();
}

Outcome criterion7() {
  Notes n;
  const RunConfig cfg = load_config(std::string(RGSDE_SOURCE_DIR) + "/configs/default_check.ini");
  std::map<std::string, int> profiles;
  for (const auto& s : cfg.comparisons) {
    const auto rep = run_comparison(s.kase, cfg.controls, s.n_paths, cfg.problem.cfg, cfg.master_seed);
    n.require(rep.n_scenarios >= 1000, s.kase.name + " ran only " + std::to_string(rep.n_scenarios));
    n.require(rep.passed, s.kase.name + " scaled violation " + fmt(rep.max_scaled_violation));
    ++profiles[to_string(s.kase.profile)];
  }
  n.require(profiles.size() == 4, "not every profile exercised");
  ComparisonCase bad = cfg.comparisons.front().kase;
  std::swap(bad.lower, bad.upper);
  bad.name = "misordered";
  try {
    run_comparison(bad, cfg.controls, 1, cfg.problem.cfg, 1);
    n.fail("mis-ordered case was not rejected");
  } catch (const Error& e) {
    n.require(e.kind() == ErrorKind::IllPosedCase, "wrong error kind for the mis-ordered case");
  }
  n.note(std::to_string(cfg.comparisons.size()) + " cases over 4 profiles, mis-ordered rejected");
  return n.done();
}

Outcome criterion8() {
  Notes n;
  const VolatilitySpec vol{0.25, 1.0};
  auto linear = make_problem("linear(a=0.5, b=-1, c=-0.2)", "linear(a=0.1, b=0.2)",
                             "linear(a=1, b=0.3)", ObstacleSpec::constant(-0.5), 0.0, 64, vol);
  const auto controls = bang_bang_family(linear.grid, vol, 2);
  const auto rep = run_truncation_study(linear, {1, 2, 4, 8, 16, 1e6}, controls, 100, 8);
  n.require(rep.nonincreasing, "linear gap increases along the ladder");
  n.require(rep.zero_beyond_bound, "linear gap nonzero beyond the realized bound");
  n.require(rep.rows.back().beyond_path_bound, "1e6 below the realized bound");
  auto bounded = make_problem("clamped_linear(a=0.5, b=-1, lo=-1, hi=1)", "0",
                              "clamped_linear(a=1, b=0.3, lo=-1.5, hi=1.5)",
                              ObstacleSpec::constant(-0.5), 0.0, 64, vol);
  const auto brep = run_truncation_study(bounded, {0.5, 1, 1.5, 2}, controls, 100, 8);
  n.require(brep.passed, "bounded family failed");
  n.require(brep.rows.back().max_sup_gap == 0.0, "bounded gap nonzero at N >= M");
  std::string gaps;
  for (const auto& r : rep.rows) gaps += (gaps.empty() ? "" : " ") + fmt(r.gap_p);
  n.note("linear gaps [" + gaps + "], realized bound " + fmt(rep.realized_bound));
  return n.done();
}

Outcome criterion9() {
  Notes n;
  double worst_lip = 0.0, worst_log = 0.0, worst_t0 = 0.0;
  const double ks[] = {0.1, 0.2, 0.3, 0.4, 0.5};
  const double ts[] = {0.5, 1.0, 1.5, 2.0, 2.5};
  for (double a : {1e-3, 1e-2, 0.1, 1.0, 10.0})
    for (double k : ks)
      for (double t : ts) {
        BihariSpec s;
        s.modulus = ModulusSpec::lipschitz(1.0);
        s.a = a;
        s.kappa = TimeWeight(k);
        const double oracle = a * std::exp(k * t);
        worst_lip = std::max(worst_lip, std::abs(bihari_bound(s, t).bound_value - oracle) / std::max(1.0, oracle));
      }
  for (double a : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2})
    for (double k : ks)
      for (double t : ts) {
        BihariSpec s;
        s.modulus = ModulusSpec::log_modulus(1.0);
        s.a = a;
        s.kappa = TimeWeight(k);
        const double oracle = std::pow(a, std::exp(-k * t));
        worst_log = std::max(worst_log, std::abs(bihari_bound(s, t).bound_value - oracle));
      }
  n.require(worst_lip <= 1e-8, "lipschitz error " + fmt(worst_lip));
  n.require(worst_log <= 1e-6, "log_modulus error " + fmt(worst_log));
  for (auto m : {ModulusSpec::lipschitz(1.0), ModulusSpec::log_modulus(1.0)}) {
    BihariSpec s;
    s.modulus = m;
    s.kappa = TimeWeight(0.3);
    n.require(bihari_bound(s, 2.0).bound_value == 0.0, "a = 0 is not exactly 0");
    s.a = 1e-3;
    const double ref = bihari_bound(s, 2.0).bound_value;
    for (double t0 : {0.1, 0.5, 1.0}) {
      s.t0 = t0;
      worst_t0 = std::max(worst_t0, std::abs(bihari_bound(s, 2.0).bound_value - ref));
    }
  }
  n.require(worst_t0 <= 1e-8, "t0 dependence " + fmt(worst_t0));
  n.note("errors: lipschitz " + fmt(worst_lip) + ", log " + fmt(worst_log) + ", t0 " + fmt(worst_t0));
  return n.done();
}

PathFunctional combine(const std::string& id, std::function<double(const PathView&)> fn) {
  return {id, std::move(fn)};
}

Outcome criterion10() {
  Notes n;
  const VolatilitySpec vol{0.25, 1.0};
  const auto bm = make_problem("0", "0", "1", ObstacleSpec::constant(-100), 0.0, 8, vol);
  const std::vector<VolatilityControl> constants = {constant_control(bm.grid, 0.25),
                                                    constant_control(bm.grid, 1.0)};
  const auto est = upper_expectation(PathFunctional::terminal_B_squared(), bm, constants, 10000, 10);
  n.require(std::abs(est.value - 1.0) <= 3.0 * est.pooled_std_error(),
            "B_T^2 estimate " + fmt(est.value));
  n.require(est.argmax_control == constants[1].label, "argmax is " + est.argmax_control);

  const auto p = make_problem("linear(a=-0.2, b=-0.5, c=-0.3)", "linear(a=0.1)",
                              "linear(a=1, b=0.2)", ObstacleSpec::constant(-0.2), 0.0, 32, vol);
  const auto controls = bang_bang_family(p.grid, vol, 2);
  const auto F = PathFunctional::terminal_value(), G = PathFunctional::terminal_K();
  const auto ests = upper_expectations(
      {F, G, combine("F+G", [&](const PathView& v) { return F.eval(v) + G.eval(v); }),
       combine("2F", [&](const PathView& v) { return 2.0 * F.eval(v); }),
       PathFunctional::running_sup_positive_part(), PathFunctional::constant(0.3)},
      p, controls, 1000, 11);
  const double eF = ests[0].value, eG = ests[1].value;
  n.require(ests[2].value <= eF + eG + 1e-12 * (std::abs(eF) + std::abs(eG)), "sublinearity");
  n.require(ests[3].value == 2.0 * eF, "positive homogeneity");
  n.require(ests[0].value <= ests[4].value, "monotonicity");
  n.require(ests[5].value == 0.3, "constant preservation");
  n.note("B_T^2 = " + fmt(est.value) + " +- " + fmt(est.pooled_std_error()) + ", argmax " +
         est.argmax_control);
  return n.done();
}

Outcome criterion11() {
  Notes n;
  const VolatilitySpec vol{0.25, 1.0};
  const auto p = make_problem("linear(a=0.2, b=-0.5, c=-0.3)", "linear(a=0.1)",
                              "linear(a=1, b=0.2)", ObstacleSpec::constant(-0.2), 0.0, 32, vol);
  const auto controls = bang_bang_family(p.grid, vol, 2);
  double worst = 0.0;
  for (double q : {2.0, 3.0})
    for (const auto& id : integrand_ids()) {
      const auto rep = bdg_check(q, integrand_from_id(id), p, controls, 2000, 12);
      n.require(rep.qv_holds, id + " at p=" + fmt(q) + ": " + fmt(rep.qv_left) + " > " + fmt(rep.qv_right));
      worst = std::max(worst, rep.qv_ratio);
    }
  const auto flat = make_problem("0", "0", "1", ObstacleSpec::constant(-100), 0.0, 64,
                                 VolatilitySpec{1.0, 1.0});
  const auto eq = bdg_check(2.0, integrand_from_id("one"), flat,
                            {constant_control(flat.grid, 1.0)}, 100, 12);
  n.require(eq.qv_ratio == 1.0, "equality witness ratio " + fmt(eq.qv_ratio));
  n.note("max ratio " + fmt(worst) + " over 7 integrands at p in {2, 3}; witness ratio 1");
  return n.done();
}

Outcome criterion12() {
  Notes n;
  const double p = 3.0;
  const VolatilitySpec vol{0.25, 1.0};
  const std::vector<std::size_t> resolutions = {256, 512, 1024};
  const std::size_t paths = 1000;
  const char* g = "linear(a=0.5, b=0.3)";
  std::vector<double> fitted, measured, data;
  std::vector<double> stab_measured;
  for (std::size_t steps : resolutions) {
    const auto p1 = make_problem("linear(a=-0.5, b=-0.5, c=-0.2)", "linear(a=0.1, b=0.1)", g,
                                 ObstacleSpec::constant(0), 1.0, steps, vol);
    auto p2 = p1;
    p2.coeffs = make_registry_coefficients(parse_term("linear(a=-0.4, b=-0.5, c=-0.2)"),
                                           parse_term("linear(a=0.1, b=0.1)"), parse_term(g), p);
    const auto controls = std::vector<VolatilityControl>{constant_control(p1.grid, 0.25),
                                                         constant_control(p1.grid, 1.0)};
    std::vector<std::vector<double>> apriori(controls.size()), stab(controls.size());
    for (std::size_t c = 0; c < controls.size(); ++c)
      for (std::size_t j = 0; j < paths; ++j) {
        const auto s = sample_scenario(controls[c], p1.grid, vol, scenario_seed(12, j));
        const auto r1 = picard_solve(p1.coeffs, p1.obstacle, s, p1.x0, p1.cfg);
        const auto r2 = picard_solve(p2.coeffs, p2.obstacle, s, p2.x0, p2.cfg);
        apriori[c].push_back(std::pow(sup_abs(r1.solution.X), p) + std::pow(r1.solution.K.back(), p));
        double dx = 0.0, dk = 0.0;
        for (std::size_t i = 0; i < r1.solution.X.size(); ++i) {
          dx = std::max(dx, std::abs(r1.solution.X[i] - r2.solution.X[i]));
          dk = std::max(dk, std::abs(r1.solution.K[i] - r2.solution.K[i]));
        }
        stab[c].push_back(std::pow(dx, p) + std::pow(dk, p));
      }
    std::vector<std::string> labels;
    for (const auto& c : controls) labels.push_back(c.label);
    const double m = aggregate("apriori", labels, apriori, 12).value;
    double beta1 = 0.0;
    for (std::size_t i = 0; i < steps; ++i) beta1 += std::pow(p1.coeffs.beta1.at(i), p) * p1.grid.dt;
    // C from |x0|^p + int beta1^p; S = 0 contributes nothing
    const double unit = a_priori_rhs(p, p1.x0, beta1, 0.0, 1.0);
    measured.push_back(m);
    data.push_back(unit);
    fitted.push_back(m / unit);
    stab_measured.push_back(aggregate("stability", labels, stab, 12).value);
  }
  const double C = *std::max_element(fitted.begin(), fitted.end());
  const double spread = C / *std::min_element(fitted.begin(), fitted.end());
  n.require(spread <= 2.0, "fitted C varies by x" + fmt(spread));
  for (std::size_t r = 0; r < resolutions.size(); ++r)
    n.require(measured[r] <= C * data[r], "a priori estimate above the bound");

  const auto tmpl_coeffs = make_registry_coefficients(parse_term("linear(a=-0.5, b=-0.5, c=-0.2)"),
                                                      parse_term("linear(a=0.1, b=0.1)"),
                                                      parse_term(g), p);
  BihariSpec tmpl;
  tmpl.modulus = tmpl_coeffs.modulus;
  const double delta_f = std::pow(0.1, p);  // int |f1 - f2|^p dt on [0, 1]
  const auto bound = stability_rhs(p, 0.0, {delta_f, 0.0, 0.0}, 0.0, 1.0, tmpl, C);
  double worst = 0.0;
  for (double m : stab_measured) {
    n.require(m <= bound.bound_value, "stability estimate " + fmt(m) + " above " + fmt(bound.bound_value));
    worst = std::max(worst, m);
  }
  n.note("fitted C " + fmt(fitted[0]) + "/" + fmt(fitted[1]) + "/" + fmt(fitted[2]) +
         " (spread x" + fmt(spread) + "), stability " + fmt(worst) + " <= " + fmt(bound.bound_value));
  return n.done();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  if (!fs::exists(dir)) return files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files[e.path().filename().string()] = read_file(e.path().string());
  return files;
}

Outcome criterion13() {
  Notes n;
  const fs::path root = fs::temp_directory_path() / "rgsde_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string config = (root / "run.ini").string();
  write_file(config, R"([volatility]
sigma_lo_sq = 0.25
sigma_hi_sq = 1
[grid]
n_steps = 32
[coefficients]
f = linear(a=0.2, b=-0.5, c=-0.3)
h = linear(a=0.1)
g = linear(a=1, b=0.2)
[obstacle]
spec = -0.2
[controls]
family = bang_bang
n_blocks = 2
[monte_carlo]
n_paths = 8
master_seed = 13
[refine]
levels = 3
n_paths = 4
[comparison.drift]
f1 = -1
f2 = 1
g = sinusoidal(a=1, b=0.1, w=1)
obstacle1 = -1
obstacle2 = -1
[truncation.linear]
n_paths = 4
[uniqueness.lipschitz]
n_paths = 4
)");
  std::size_t files = 0;
  for (const std::string cmd : {"simulate", "solve", "expect", "check", "refine"}) {
    std::vector<std::map<std::string, std::string>> runs;
    for (const std::string run : {"a", "b", "c"}) {
      const fs::path out = root / (cmd + "_" + run);
      const std::string jobs = run == "c" ? "4" : "1";
      const std::string line = std::string(RGSDE_CLI_PATH) + " " + cmd + " --config " + config +
                               " --out " + out.string() + " --jobs " + jobs + " > /dev/null";
      const int status = std::system(line.c_str());
      n.require(status == 0, cmd + " exited with status " + std::to_string(status));
      runs.push_back(snapshot(out));
    }
    n.require(!runs[0].empty(), cmd + " wrote nothing");
    n.require(runs[0] == runs[1], cmd + " rerun differs");
    n.require(runs[0] == runs[2], cmd + " differs under --jobs 4");
    files += runs[0].size();
  }
  n.note(std::to_string(files) + " files identical across reruns and --jobs 1/4");
  return n.done();
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
  double time_limit;  // seconds, 0 when unbounded
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "skorokhod correctness", criterion1, 10.0},
      {2, "minimality", criterion2, 5.0},
      {3, "degenerate bounds", criterion3, 10.0},
      {4, "unreflected reduction", criterion4, 0.0},
      {5, "resistance oracle", criterion5, 5.0},
      {6, "picard vs stepwise", criterion6, 0.0},
      {7, "comparison suites", criterion7, 60.0},
      {8, "truncation limit", criterion8, 0.0},
      {9, "bihari bounds", criterion9, 0.0},
      {10, "upper expectation", criterion10, 0.0},
      {11, "bdg inequality", criterion11, 0.0},
      {12, "a priori and stability", criterion12, 0.0},
      {13, "determinism", criterion13, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && secs > c.time_limit) {
      o.ok = false;
      o.detail = "took " + fmt(secs) + " s, limit " + fmt(c.time_limit) + " s; " + o.detail;
    }
    if (!o.ok) ++failures;
    std::printf("%s %2d %s: %s (%.2f s)\n", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d of 13 criteria passed\n", 13 - failures);
  return failures == 0 ? 0 : 1;
}
