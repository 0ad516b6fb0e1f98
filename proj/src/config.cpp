#include "rgsde/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>

#include "rgsde/error.hpp"
#include "rgsde/expectation.hpp"
#include "rgsde/io.hpp"

namespace rgsde {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

class Reader {
 public:
  Reader(const IniSection* sec, const std::string& source) : sec_(sec), source_(source) {}

  [[noreturn]] void error(std::size_t line, const std::string& msg) const {
    fail(ErrorKind::Config, source_ + ":" + std::to_string(line) + ": " + msg);
  }
  [[noreturn]] void error(const std::string& key, const std::string& msg) const {
    error(line(key), "[" + sec_->name + "] " + key + ": " + msg);
  }

  bool has(const std::string& key) const { return sec_ && sec_->entries.count(key); }
  std::size_t line(const std::string& key) const {
    if (has(key)) return sec_->entries.at(key).line;
    return sec_ ? sec_->line : 0;
  }

  std::string str(const std::string& key, const std::string& dflt) {
    if (!has(key)) return dflt;
    used_.insert(key);
    return sec_->entries.at(key).value;
  }

  double real(const std::string& key, double dflt) {
    if (!has(key)) return dflt;
    const std::string v = str(key, "");
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
      error(key, "expected a finite number, got '" + v + "'");
    return x;
  }

  std::uint64_t uint(const std::string& key, std::uint64_t dflt) {
    if (!has(key)) return dflt;
    const std::string v = str(key, "");
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
      error(key, "expected a nonnegative integer, got '" + v + "'");
    return x;
  }

  bool boolean(const std::string& key, bool dflt) {
    if (!has(key)) return dflt;
    const std::string v = str(key, "");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    error(key, "expected true or false, got '" + v + "'");
  }

  std::vector<std::string> list(const std::string& key, const std::string& dflt) {
    std::vector<std::string> out;
    std::stringstream ss(str(key, dflt));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  std::vector<double> reals(const std::string& key, const std::string& dflt) {
    std::vector<double> out;
    for (const auto& item : list(key, dflt)) {
      char* end = nullptr;
      const double x = std::strtod(item.c_str(), &end);
      if (end != item.c_str() + item.size() || !std::isfinite(x))
        error(key, "expected a list of finite numbers, got '" + item + "'");
      out.push_back(x);
    }
    return out;
  }

  template <class Fn>
  auto wrap(const std::string& key, Fn&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const Error& e) {
      error(key, e.what());
    }
  }

  void reject_unknown() const {
    if (!sec_) return;
    for (const auto& [key, entry] : sec_->entries)
      if (!used_.count(key)) error(entry.line, "unknown key '" + key + "' in [" + sec_->name + "]");
  }

 private:
  const IniSection* sec_;
  const std::string& source_;
  std::set<std::string> used_;
};

std::string suffix_of(const std::string& name) {
  const auto dot = name.find('.');
  return dot == std::string::npos ? std::string() : name.substr(dot + 1);
}

std::string prefix_of(const std::string& name) { return name.substr(0, name.find('.')); }

}  // namespace

std::vector<IniSection> parse_ini(const std::string& text, const std::string& source) {
  std::vector<IniSection> out;
  std::stringstream ss(text);
  std::string raw;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  auto error = [&](const std::string& msg) {
    fail(ErrorKind::Config, source + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(ss, raw)) {
    ++lineno;
    std::string line = raw;
    const auto c = line.find_first_of("#;");
    if (c != std::string::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') error("unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) error("empty section name");
      if (!seen.insert(name).second) error("duplicate section [" + name + "]");
      out.push_back({name, lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) error("expected 'key = value'");
    if (out.empty()) error("key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) error("empty key");
    if (out.back().entries.count(key))
      error("duplicate key '" + key + "' in [" + out.back().name + "]");
    out.back().entries[key] = {trim(line.substr(eq + 1)), lineno};
  }
  return out;
}

std::string RunConfig::scenario_identity() const {
  std::string s = "rgsde-scenarios-v1\n";
  s += "volatility " + format_real(vol.sigma_lo_sq) + " " + format_real(vol.sigma_hi_sq) + "\n";
  s += "grid " + format_real(grid.horizon) + " " + std::to_string(grid.n_steps) + "\n";
  s += "seed " + std::to_string(master_seed) + "\n";
  s += "n_paths " + std::to_string(n_paths) + "\n";
  for (const auto& c : controls) {
    s += "control " + c.label;
    for (double v : c.theta_sq) s += " " + format_real(v);
    s += "\n";
  }
  return s;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  const auto sections = parse_ini(text, source);
  static const std::set<std::string> plain = {"volatility", "grid",   "coefficients", "obstacle",
                                              "solver",     "controls", "monte_carlo", "output",
                                              "expect",     "refine"};
  static const std::set<std::string> suites = {"comparison", "truncation", "uniqueness"};
  std::map<std::string, const IniSection*> by_name;
  for (const auto& sec : sections) {
    const std::string pre = prefix_of(sec.name);
    const bool is_suite = suites.count(pre) && !suffix_of(sec.name).empty();
    if (!(plain.count(sec.name) || is_suite))
      fail(ErrorKind::Config,
           source + ":" + std::to_string(sec.line) + ": unknown section [" + sec.name + "]");
    by_name[sec.name] = &sec;
  }
  auto section = [&](const std::string& name) {
    auto it = by_name.find(name);
    return Reader(it == by_name.end() ? nullptr : it->second, source);
  };

  RunConfig cfg;
  cfg.source = source;

  Reader vol = section("volatility");
  cfg.vol.sigma_lo_sq = vol.real("sigma_lo_sq", 0.0);
  cfg.vol.sigma_hi_sq = vol.real("sigma_hi_sq", 1.0);
  vol.wrap("sigma_hi_sq", [&] { cfg.vol.validate(); });
  vol.reject_unknown();

  Reader grid = section("grid");
  const double horizon = grid.real("horizon", 1.0);
  const std::uint64_t n_steps = grid.uint("n_steps", 64);
  if (!(horizon > 0.0)) grid.error("horizon", "must be positive");
  if (n_steps < 1) grid.error("n_steps", "must be at least 1");
  if (n_steps > (1u << 24)) grid.error("n_steps", "exceeds the limit 2^24");
  cfg.grid = make_uniform_grid(horizon, n_steps);
  grid.reject_unknown();

  Reader sol = section("solver");
  cfg.problem.x0 = sol.real("x0", 0.0);
  cfg.problem.cfg.p_exponent = sol.real("p", 3.0);
  cfg.problem.cfg.picard_tol = sol.real("picard_tol", 1e-10);
  cfg.problem.cfg.max_picard = sol.uint("max_picard", 200);
  cfg.problem.cfg.oracle_check = sol.boolean("oracle_check", false);
  sol.wrap("picard_tol", [&] { cfg.problem.cfg.validate(); });
  sol.reject_unknown();
  const double p = cfg.problem.cfg.p_exponent;

  Reader coef = section("coefficients");
  cfg.f_text = coef.str("f", cfg.f_text);
  cfg.h_text = coef.str("h", cfg.h_text);
  cfg.g_text = coef.str("g", cfg.g_text);
  const TermSpec tf = coef.wrap("f", [&] { return parse_term(cfg.f_text); });
  const TermSpec th = coef.wrap("h", [&] { return parse_term(cfg.h_text); });
  const TermSpec tg = coef.wrap("g", [&] { return parse_term(cfg.g_text); });
  cfg.problem.coeffs = coef.wrap("f", [&] { return make_registry_coefficients(tf, th, tg, p); });
  coef.reject_unknown();

  Reader obs = section("obstacle");
  cfg.obstacle_text = obs.str("spec", cfg.obstacle_text);
  cfg.problem.obstacle = obs.wrap("spec", [&] { return parse_obstacle(cfg.obstacle_text); });
  obs.reject_unknown();
  if (cfg.problem.obstacle.start_value() > cfg.problem.x0)
    sol.error("x0", "initial value " + format_real(cfg.problem.x0) +
                        " lies below the obstacle start S0 = " +
                        format_real(cfg.problem.obstacle.start_value()) + " (S0 <= x0 required)");
  cfg.problem.grid = cfg.grid;
  cfg.problem.vol = cfg.vol;

  Reader ctl = section("controls");
  cfg.control_family = ctl.str("family", "constant");
  if (cfg.control_family == "constant") {
    for (const auto& tok : ctl.list("levels", "lo, hi")) {
      double v;
      if (tok == "lo") v = cfg.vol.sigma_lo_sq;
      else if (tok == "hi") v = cfg.vol.sigma_hi_sq;
      else {
        char* end = nullptr;
        v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) ctl.error("levels", "bad level '" + tok + "'");
      }
      cfg.controls.push_back(constant_control(cfg.grid, v));
      ctl.wrap("levels", [&] { check_control(cfg.controls.back(), cfg.grid, cfg.vol); });
    }
  } else if (cfg.control_family == "bang_bang") {
    const std::uint64_t blocks = ctl.uint("n_blocks", 2);
    const std::uint64_t cap = ctl.uint("max_controls", 1u << 16);
    if (blocks < 1 || blocks > cfg.grid.n_steps)
      ctl.error("n_blocks", "must lie in [1, n_steps]");
    cfg.controls =
        ctl.wrap("n_blocks", [&] { return bang_bang_family(cfg.grid, cfg.vol, blocks, cap); });
  } else {
    ctl.error("family", "expected 'constant' or 'bang_bang', got '" + cfg.control_family + "'");
  }
  if (cfg.controls.empty()) ctl.error("levels", "control family is empty");
  ctl.reject_unknown();

  Reader mc = section("monte_carlo");
  cfg.n_paths = mc.uint("n_paths", 2);
  cfg.master_seed = mc.uint("master_seed", 1);
  if (cfg.n_paths < 1) mc.error("n_paths", "must be at least 1");
  mc.reject_unknown();

  Reader out = section("output");
  cfg.output_dir = out.str("dir", "");
  out.reject_unknown();

  Reader ex = section("expect");
  cfg.functional = ex.str("functional", cfg.functional);
  cfg.functional_param = ex.real("param", 0.0);
  cfg.event = ex.str("event", "");
  if (ex.has("functional") && ex.has("event"))
    ex.error("event", "give either a functional or an event, not both");
  if (!cfg.event.empty()) ex.wrap("event", [&] { event_from_id(cfg.event); });
  else ex.wrap("functional", [&] { functional_from_id(cfg.functional, cfg.functional_param); });
  ex.reject_unknown();

  Reader rf = section("refine");
  cfg.refine_levels = rf.uint("levels", 5);
  cfg.refine_paths = rf.uint("n_paths", 16);
  cfg.refine_theta_sq = rf.real("theta_sq", cfg.vol.sigma_hi_sq);
  if (cfg.refine_levels < 2) rf.error("levels", "must be at least 2");
  if (cfg.refine_paths < 1) rf.error("n_paths", "must be at least 1");
  rf.wrap("theta_sq", [&] {
    check_control(constant_control(cfg.grid, cfg.refine_theta_sq), cfg.grid, cfg.vol);
  });
  rf.reject_unknown();

  for (const auto& sec : sections) {
    const std::string pre = prefix_of(sec.name);
    if (!suites.count(pre)) continue;
    Reader r(&sec, source);
    const std::string name = suffix_of(sec.name);
    const std::size_t n = r.uint("n_paths", cfg.n_paths);
    if (n < 1) r.error("n_paths", "must be at least 1");
    if (pre == "comparison") {
      ComparisonSuite s;
      s.n_paths = n;
      s.kase.name = name;
      s.kase.grid = cfg.grid;
      s.kase.vol = cfg.vol;
      s.kase.profile = r.wrap("profile", [&] {
        return profile_from_string(r.str("profile", "thm37_general"));
      });
      const TermSpec g = r.wrap("g", [&] { return parse_term(r.str("g", "0")); });
      auto build = [&](const char* fk, const char* hk) {
        const TermSpec f = r.wrap(fk, [&] { return parse_term(r.str(fk, "0")); });
        const TermSpec h = r.wrap(hk, [&] { return parse_term(r.str(hk, "0")); });
        return r.wrap(fk, [&] { return make_registry_coefficients(f, h, g, p); });
      };
      s.kase.lower.coeffs = build("f1", "h1");
      s.kase.upper.coeffs = build("f2", "h2");
      s.kase.lower.obstacle =
          r.wrap("obstacle1", [&] { return parse_obstacle(r.str("obstacle1", "0")); });
      s.kase.upper.obstacle =
          r.wrap("obstacle2", [&] { return parse_obstacle(r.str("obstacle2", "0")); });
      s.kase.lower.x0 = r.real("x0_1", 0.0);
      s.kase.upper.x0 = r.real("x0_2", 0.0);
      cfg.comparisons.push_back(std::move(s));
    } else {
      Problem prob = cfg.problem;
      if (r.has("f") || r.has("h") || r.has("g")) {
        const TermSpec f = r.wrap("f", [&] { return parse_term(r.str("f", cfg.f_text)); });
        const TermSpec h = r.wrap("h", [&] { return parse_term(r.str("h", cfg.h_text)); });
        const TermSpec g = r.wrap("g", [&] { return parse_term(r.str("g", cfg.g_text)); });
        prob.coeffs = r.wrap("f", [&] { return make_registry_coefficients(f, h, g, p); });
      }
      if (r.has("obstacle"))
        prob.obstacle = r.wrap("obstacle", [&] { return parse_obstacle(r.str("obstacle", "")); });
      prob.x0 = r.real("x0", prob.x0);
      if (prob.obstacle.start_value() > prob.x0)
        r.error("x0", "initial value lies below the obstacle start (S0 <= x0 required)");
      if (pre == "truncation") {
        TruncationSuite s{name, prob, r.reals("ladder", "1, 2, 4, 8, 16, 1e6"), n};
        if (s.ladder.empty()) r.error("ladder", "is empty");
        for (std::size_t k = 0; k < s.ladder.size(); ++k)
          if (!(s.ladder[k] > 0.0) || (k > 0 && !(s.ladder[k] > s.ladder[k - 1])))
            r.error("ladder", "must be positive and increasing");
        if (n < 2) r.error("n_paths", "must be at least 2");
        cfg.truncations.push_back(std::move(s));
      } else {
        UniquenessSuite s{name, prob, r.reals("deltas", "1, -1, 10, -10"), n};
        cfg.uniqueness.push_back(std::move(s));
      }
    }
    r.reject_unknown();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  return parse_config(text, path);
}

}  // namespace rgsde
