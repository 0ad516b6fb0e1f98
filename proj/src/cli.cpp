#include "rgsde/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rgsde/analysis.hpp"
#include "rgsde/config.hpp"
#include "rgsde/error.hpp"
#include "rgsde/expectation.hpp"
#include "rgsde/harness.hpp"
#include "rgsde/io.hpp"
#include "rgsde/parallel.hpp"
#include "rgsde/random.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace rgsde {
namespace {

constexpr int kFormatVersion = 1;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  unsigned jobs = 1;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonConvergence:
    case ErrorKind::NumericFailure: return kExitNumeric;
    case ErrorKind::IllPosedCase: return kExitSuite;
    default: return kExitConfig;
  }
}

std::string file_name(const char* stem, std::size_t control, std::size_t path) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_c%03zu_p%05zu.csv", stem, control, path);
  return buf;
}

void write_json(const fs::path& p, const ordered_json& j) {
  write_file(p.string(), j.dump(2) + "\n");
}

ordered_json real_or_null(std::optional<double> v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

struct Context {
  RunConfig cfg;
  fs::path out;
  unsigned jobs = 1;
};

Context prepare(const Options& opt) {
  Context ctx;
  ctx.cfg = load_config(opt.config);
  if (opt.seed) ctx.cfg.master_seed = *opt.seed;
  ctx.jobs = std::max(1u, opt.jobs);
  const std::string dir = opt.out.empty() ? ctx.cfg.output_dir : opt.out;
  if (dir.empty())
    fail(ErrorKind::Config, "no output directory: pass --out or set [output] dir");
  ctx.out = dir;
  return ctx;
}

void make_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    fail(ErrorKind::Io, "cannot create output directory '" + dir.string() + "'");
}

std::vector<ScenarioPath> generate_scenarios(const RunConfig& cfg, unsigned jobs) {
  const std::size_t n = cfg.n_paths;
  std::vector<ScenarioPath> paths(cfg.controls.size() * n);
  parallel_for(paths.size(), jobs, [&](std::size_t item) {
    const std::size_t ci = item / n, j = item % n;
    paths[item] = canonicalize(sample_scenario(cfg.controls[ci], cfg.grid, cfg.vol,
                                               scenario_seed(cfg.master_seed, j)));
  });
  return paths;
}

ordered_json manifest(const RunConfig& cfg) {
  ordered_json m;
  m["format_version"] = kFormatVersion;
  m["hash"] = hex64(fnv1a64(cfg.scenario_identity()));
  m["master_seed"] = cfg.master_seed;
  m["n_paths"] = cfg.n_paths;
  m["grid"] = {{"horizon", cfg.grid.horizon}, {"n_steps", cfg.grid.n_steps}};
  m["volatility"] = {{"sigma_lo_sq", cfg.vol.sigma_lo_sq}, {"sigma_hi_sq", cfg.vol.sigma_hi_sq}};
  ordered_json labels = ordered_json::array();
  for (const auto& c : cfg.controls) labels.push_back(c.label);
  m["controls"] = labels;
  ordered_json files = ordered_json::array();
  for (std::size_t ci = 0; ci < cfg.controls.size(); ++ci)
    for (std::size_t j = 0; j < cfg.n_paths; ++j) files.push_back(file_name("scenario", ci, j));
  m["files"] = files;
  return m;
}

void write_scenarios(const fs::path& dir, const RunConfig& cfg,
                     const std::vector<ScenarioPath>& paths) {
  make_output_dir(dir);
  for (std::size_t ci = 0; ci < cfg.controls.size(); ++ci)
    for (std::size_t j = 0; j < cfg.n_paths; ++j)
      write_file((dir / file_name("scenario", ci, j)).string(),
                 scenario_csv(paths[ci * cfg.n_paths + j]));
  write_json(dir / "manifest.json", manifest(cfg));
}

// Reuses the cache when its manifest hash matches; otherwise regenerates it.
std::vector<ScenarioPath> load_or_generate(const RunConfig& cfg, unsigned jobs) {
  const char* root = std::getenv("RGSDE_CACHE_DIR");
  if (!root || !*root) return generate_scenarios(cfg, jobs);
  const fs::path dir(root);
  const std::string want = hex64(fnv1a64(cfg.scenario_identity()));
  try {
    const auto m = nlohmann::json::parse(read_file((dir / "manifest.json").string()));
    if (m.at("hash").get<std::string>() == want &&
        m.at("format_version").get<int>() == kFormatVersion) {
      std::vector<ScenarioPath> paths(cfg.controls.size() * cfg.n_paths);
      for (std::size_t ci = 0; ci < cfg.controls.size(); ++ci)
        for (std::size_t j = 0; j < cfg.n_paths; ++j) {
          ScenarioPath p = parse_scenario_csv(
              read_file((dir / file_name("scenario", ci, j)).string()), cfg.grid);
          p.control_label = cfg.controls[ci].label;
          p.seed = scenario_seed(cfg.master_seed, j);
          paths[ci * cfg.n_paths + j] = std::move(p);
        }
      return paths;
    }
  } catch (const std::exception&) {
    // missing or stale cache entries fall through to regeneration
  }
  auto paths = generate_scenarios(cfg, jobs);
  write_scenarios(dir, cfg, paths);
  return paths;
}

int cmd_simulate(const Options& opt) {
  const Context ctx = prepare(opt);
  const auto paths = generate_scenarios(ctx.cfg, ctx.jobs);
  write_scenarios(ctx.out, ctx.cfg, paths);
  std::cout << "wrote " << paths.size() << " scenarios to " << ctx.out.string() << "\n";
  return kExitOk;
}

struct ScenarioOutcome {
  bool ok = false;
  SolveResult result;
  std::string error_kind, error;
  double flatness = 0.0;
};

int cmd_solve(const Options& opt) {
  const Context ctx = prepare(opt);
  const RunConfig& cfg = ctx.cfg;
  require_valid(cfg.problem);
  const auto paths = load_or_generate(cfg, ctx.jobs);
  std::vector<ScenarioOutcome> outcomes(paths.size());
  parallel_for(paths.size(), ctx.jobs, [&](std::size_t item) {
    ScenarioOutcome& o = outcomes[item];
    try {
      o.result = picard_solve(cfg.problem.coeffs, cfg.problem.obstacle, paths[item],
                              cfg.problem.x0, cfg.problem.cfg);
      o.flatness = flatness_defect(o.result.solution, o.result.S);
      o.ok = true;
    } catch (const Error& e) {
      o.error_kind = to_string(e.kind());
      o.error = e.what();
    }
  });

  make_output_dir(ctx.out);
  ordered_json rows = ordered_json::array();
  std::size_t failures = 0, max_iters = 0;
  double max_residual = 0.0, max_flat = 0.0;
  std::optional<double> max_oracle;
  for (std::size_t ci = 0; ci < cfg.controls.size(); ++ci)
    for (std::size_t j = 0; j < cfg.n_paths; ++j) {
      const std::size_t item = ci * cfg.n_paths + j;
      const ScenarioOutcome& o = outcomes[item];
      ordered_json row;
      row["control"] = cfg.controls[ci].label;
      row["scenario"] = j;
      row["seed"] = scenario_seed(cfg.master_seed, j);
      if (!o.ok) {
        ++failures;
        row["status"] = o.error_kind;
        row["error"] = o.error;
        std::cerr << "scenario " << j << " under control '" << cfg.controls[ci].label
                  << "': " << o.error << "\n";
        rows.push_back(row);
        continue;
      }
      const auto& r = o.result;
      write_file((ctx.out / file_name("solution", ci, j)).string(), solution_csv(paths[item], r));
      row["status"] = "ok";
      row["picard_iters"] = r.picard_iters;
      row["residual"] = r.residual;
      row["flatness_defect"] = o.flatness;
      row["oracle_gap"] = real_or_null(r.oracle_gap);
      row["X_T"] = r.solution.X.back();
      row["K_T"] = r.solution.K.back();
      rows.push_back(row);
      max_iters = std::max(max_iters, r.picard_iters);
      max_residual = std::max(max_residual, r.residual);
      max_flat = std::max(max_flat, o.flatness);
      if (r.oracle_gap) max_oracle = std::max(max_oracle.value_or(0.0), *r.oracle_gap);
    }

  ordered_json s;
  s["family"] = cfg.problem.coeffs.family_name;
  ordered_json params;
  for (const auto& [k, v] : cfg.problem.coeffs.params) params[k] = v;
  params["obstacle"] = cfg.problem.obstacle.describe();
  params["x0"] = cfg.problem.x0;
  s["params"] = params;
  s["seed"] = cfg.master_seed;
  s["n_steps"] = cfg.grid.n_steps;
  s["n_paths"] = cfg.n_paths;
  s["n_controls"] = cfg.controls.size();
  s["picard_iters"] = max_iters;
  s["residual"] = max_residual;
  s["oracle_gap"] = real_or_null(max_oracle);
  s["flatness_defect"] = max_flat;
  s["failures"] = failures;
  s["scenarios"] = rows;
  write_json(ctx.out / "summary.json", s);
  std::cout << "solved " << paths.size() - failures << " of " << paths.size() << " scenarios\n";
  return failures ? kExitNumeric : kExitOk;
}

ordered_json estimate_json(const UpperExpectationEstimate& e) {
  ordered_json j;
  j["functional"] = e.functional;
  j["value"] = e.value;
  j["argmax_control"] = e.argmax_control;
  ordered_json controls = ordered_json::array();
  for (const auto& c : e.per_control)
    controls.push_back(
        {{"label", c.label}, {"mean", c.mean}, {"stderr", c.std_error}, {"n_paths", c.n_paths}});
  j["controls"] = controls;
  j["pooled_stderr"] = e.pooled_std_error();
  j["master_seed"] = e.master_seed;
  return j;
}

int cmd_expect(const Options& opt) {
  const Context ctx = prepare(opt);
  const RunConfig& cfg = ctx.cfg;
  if (cfg.n_paths < 2) fail(ErrorKind::Config, "expect needs [monte_carlo] n_paths >= 2");
  const UpperExpectationEstimate est =
      cfg.event.empty()
          ? upper_expectation(functional_from_id(cfg.functional, cfg.functional_param),
                              cfg.problem, cfg.controls, cfg.n_paths, cfg.master_seed, ctx.jobs)
          : capacity(event_from_id(cfg.event), cfg.problem, cfg.controls, cfg.n_paths,
                     cfg.master_seed, ctx.jobs);
  make_output_dir(ctx.out);
  write_json(ctx.out / "expectation.json", estimate_json(est));
  std::cout << est.functional << " = " << format_real(est.value) << " (argmax "
            << est.argmax_control << ")\n";
  return kExitOk;
}

int cmd_check(const Options& opt) {
  const Context ctx = prepare(opt);
  const RunConfig& cfg = ctx.cfg;
  if (cfg.comparisons.empty() && cfg.truncations.empty() && cfg.uniqueness.empty())
    fail(ErrorKind::Config, cfg.source +
                                ": no suite sections ([comparison.*], [truncation.*], "
                                "[uniqueness.*])");
  ordered_json suites = ordered_json::array();
  bool all = true;
  auto record = [&](const char* kind, const std::string& name, auto&& body) {
    ordered_json j;
    j["kind"] = kind;
    j["name"] = name;
    try {
      body(j);
    } catch (const Error& e) {
      j["passed"] = false;
      j["error"] = to_string(e.kind());
      j["message"] = e.what();
      std::cerr << kind << "." << name << ": " << to_string(e.kind()) << ": " << e.what()
                << "\n";
    }
    const bool passed = j.value("passed", false);
    all = all && passed;
    std::cout << (passed ? "PASS " : "FAIL ") << kind << "." << name << "\n";
    suites.push_back(j);
  };

  for (const auto& s : cfg.comparisons)
    record("comparison", s.kase.name, [&](ordered_json& j) {
      const auto r =
          run_comparison(s.kase, cfg.controls, s.n_paths, cfg.problem.cfg, cfg.master_seed,
                         ctx.jobs);
      j["profile"] = to_string(r.profile);
      j["passed"] = r.passed;
      j["max_violation"] = r.max_violation;
      j["max_scaled_violation"] = r.max_scaled_violation;
      j["n_scenarios"] = r.n_scenarios;
      const auto worst = std::max_element(
          r.worst.begin(), r.worst.end(),
          [](const ScenarioWorst& a, const ScenarioWorst& b) { return a.violation < b.violation; });
      if (worst != r.worst.end())
        j["worst"] = {{"control", worst->control},
                      {"scenario", worst->scenario},
                      {"node", worst->node},
                      {"violation", worst->violation}};
    });
  for (const auto& s : cfg.truncations)
    record("truncation", s.name, [&](ordered_json& j) {
      const auto r = run_truncation_study(s.problem, s.ladder, cfg.controls, s.n_paths,
                                          cfg.master_seed, ctx.jobs);
      j["passed"] = r.passed;
      j["realized_bound"] = r.realized_bound;
      j["nonincreasing"] = r.nonincreasing;
      j["zero_beyond_bound"] = r.zero_beyond_bound;
      ordered_json rows = ordered_json::array();
      for (const auto& row : r.rows)
        rows.push_back({{"N", row.N},
                        {"gap_p", row.gap_p},
                        {"gap_p_stderr", row.gap_p_se},
                        {"max_sup_gap", row.max_sup_gap},
                        {"beyond_path_bound", row.beyond_path_bound}});
      j["rows"] = rows;
    });
  for (const auto& s : cfg.uniqueness)
    record("uniqueness", s.name, [&](ordered_json& j) {
      const auto r = run_uniqueness_probe(s.problem, cfg.controls, s.n_paths, s.deltas,
                                          cfg.master_seed, ctx.jobs);
      j["passed"] = r.passed;
      j["deltas"] = r.deltas;
      j["max_gap"] = r.max_gap;
      j["threshold"] = r.threshold;
      j["n_scenarios"] = r.n_scenarios;
    });

  make_output_dir(ctx.out);
  ordered_json report;
  report["passed"] = all;
  report["master_seed"] = cfg.master_seed;
  report["suites"] = suites;
  write_json(ctx.out / "check.json", report);
  return all ? kExitOk : kExitSuite;
}

int cmd_refine(const Options& opt) {
  const Context ctx = prepare(opt);
  const RunConfig& cfg = ctx.cfg;
  require_valid(cfg.problem);
  const VolatilityControl control = constant_control(cfg.grid, cfg.refine_theta_sq);
  const ConvergenceTable t =
      richardson_refine(cfg.problem.coeffs, cfg.problem.obstacle, control, cfg.problem.x0,
                        cfg.problem.cfg, cfg.refine_levels, cfg.grid, cfg.vol, cfg.refine_paths,
                        cfg.master_seed, ctx.jobs);
  make_output_dir(ctx.out);
  std::string csv = "n_steps,mean_gap_to_finer,mean_oracle_gap,mean_terminal_K\n";
  ordered_json levels = ordered_json::array();
  for (const auto& l : t.levels) {
    csv += std::to_string(l.n_steps) + "," + format_real(l.mean_gap_to_finer) + "," +
           format_real(l.mean_oracle_gap) + "," + format_real(l.mean_terminal_K) + "\n";
    levels.push_back({{"n_steps", l.n_steps},
                      {"mean_gap_to_finer", l.mean_gap_to_finer},
                      {"mean_oracle_gap", l.mean_oracle_gap},
                      {"mean_terminal_K", l.mean_terminal_K}});
  }
  write_file((ctx.out / "refine.csv").string(), csv);
  ordered_json j;
  j["family"] = cfg.problem.coeffs.family_name;
  j["control"] = control.label;
  j["n_paths"] = cfg.refine_paths;
  j["master_seed"] = cfg.master_seed;
  j["levels"] = levels;
  j["gap_ratios"] = t.gap_ratios;
  j["oracle_gap_ratios"] = t.oracle_gap_ratios;
  j["mean_gap_ratio"] = t.mean_gap_ratio;
  write_json(ctx.out / "refine.json", j);
  std::cout << "mean gap ratio " << format_real(t.mean_gap_ratio) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Reflected SDEs driven by G-Brownian motion with nonlinear resistance"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
    CLI::App* sub = nullptr;
  };
  std::vector<Command> commands = {
      {"simulate", "Generate scenario paths and a manifest", cmd_simulate},
      {"solve", "Solve every (control, scenario) pair and write solutions", cmd_solve},
      {"expect", "Estimate an upper expectation or capacity", cmd_expect},
      {"check", "Run comparison, truncation and uniqueness suites", cmd_check},
      {"refine", "Grid refinement study of the Picard and stepwise schemes", cmd_refine},
  };
  for (auto& c : commands) {
    c.sub = app.add_subcommand(c.name, c.help);
    c.sub->add_option("--config", opt.config, "Configuration file")->required();
    c.sub->add_option("--seed", seed, "Master seed (overrides the config)");
    c.sub->add_option("--out", opt.out, "Output directory (overrides the config)");
    c.sub->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (const auto& c : commands) {
    if (!c.sub->parsed()) continue;
    if (c.sub->count("--seed")) opt.seed = seed;
    try {
      return c.run(opt);
    } catch (const Error& e) {
      std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
      return exit_code(e.kind());
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitNumeric;
    }
  }
  return kExitConfig;
}

}  // namespace rgsde
