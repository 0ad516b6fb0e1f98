#include "rgsde/coefficients.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "rgsde/error.hpp"

namespace rgsde {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Odd, concave on [0, inf): x ln(1/x)^(1/p) up to 1/e, then linear with slope 1 - 1/p.
double psi(double x, double p) {
  const double ax = std::abs(x);
  double v;
  if (ax == 0.0) {
    v = 0.0;
  } else if (ax <= kLogModulusSwitch) {
    v = ax * std::pow(std::log(1.0 / ax), 1.0 / p);
  } else {
    v = kLogModulusSwitch + (1.0 - 1.0 / p) * (ax - kLogModulusSwitch);
  }
  return x < 0.0 ? -v : v;
}

struct TermBounds {
  double growth_const;  // A in |t| <= A + B|x| + C|k|
  double growth_x;      // B
  double growth_k;      // C
  double modulus_x;     // x-slope of the modulus bound
  double modulus_k;     // k-slope of the modulus bound
  bool log_modulus;
};

TermBounds bounds_of(const TermSpec& t) {
  const double a = std::abs(t.a), b = std::abs(t.b), c = std::abs(t.c);
  switch (t.family) {
    case TermFamily::Constant:
      return {a, 0.0, 0.0, 0.0, 0.0, false};
    case TermFamily::Linear:
      return {a, b, c, b, c, false};
    case TermFamily::ClampedLinear: {
      if (std::isfinite(t.lo) && std::isfinite(t.hi))
        return {std::max(std::abs(t.lo), std::abs(t.hi)), 0.0, 0.0, b, c, false};
      double edge = 0.0;
      if (std::isfinite(t.lo)) edge = std::max(edge, std::abs(t.lo));
      if (std::isfinite(t.hi)) edge = std::max(edge, std::abs(t.hi));
      return {a + edge, b, c, b, c, false};
    }
    case TermFamily::Sinusoidal:
      return {a + b, 0.0, c, b * std::abs(t.w), c, false};
    case TermFamily::LogModulus:
      return {a + b * kLogModulusSwitch, b, c, 2.0 * b, c, true};
  }
  return {};
}

const std::map<std::string, TermFamily>& family_names() {
  static const std::map<std::string, TermFamily> names = {
      {"constant", TermFamily::Constant},
      {"linear", TermFamily::Linear},
      {"clamped_linear", TermFamily::ClampedLinear},
      {"sinusoidal", TermFamily::Sinusoidal},
      {"log_modulus", TermFamily::LogModulus},
  };
  return names;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && !std::isnan(out);
}

}  // namespace

double TimeWeight::at(std::size_t step) const {
  if (path.empty()) return constant;
  return path[std::min(step, path.size() - 1)];
}

double TimeWeight::integral(double t, const std::vector<double>& nodes) const {
  if (path.empty()) return constant * t;
  if (nodes.size() != path.size())
    fail(ErrorKind::InvalidArgument, "weight path and grid nodes differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size() && nodes[i] < t; ++i) {
    const double right = std::min(nodes[i + 1], t);
    const double frac = (right - nodes[i]) / (nodes[i + 1] - nodes[i]);
    const double v_right = path[i] + frac * (path[i + 1] - path[i]);
    sum += 0.5 * (path[i] + v_right) * (right - nodes[i]);
  }
  return sum;
}

double ModulusSpec::rho(double r) const {
  if (r <= 0.0) return 0.0;
  switch (kind) {
    case ModulusKind::Lipschitz:
      return constant * r;
    case ModulusKind::LogModulus:
      return r < kLogModulusSwitch ? constant * r * std::log(1.0 / r) : constant * r;
    case ModulusKind::Custom:
      if (!custom) fail(ErrorKind::UnsupportedModulus, "custom modulus has no evaluator");
      return custom(r);
  }
  return 0.0;
}

const char* ModulusSpec::kind_name() const {
  switch (kind) {
    case ModulusKind::Lipschitz: return "lipschitz";
    case ModulusKind::LogModulus: return "log_modulus";
    case ModulusKind::Custom: return "custom";
  }
  return "unknown";
}

double TermSpec::eval(double x, double k, double p) const {
  switch (family) {
    case TermFamily::Constant:
      return a;
    case TermFamily::Linear:
      return a + b * x + c * k;
    case TermFamily::ClampedLinear:
      return std::clamp(a + b * x + c * k, lo, hi);
    case TermFamily::Sinusoidal:
      return a + b * std::sin(w * x) + c * k;
    case TermFamily::LogModulus:
      return a + b * psi(x, p) + c * k;
  }
  return 0.0;
}

bool TermSpec::depends_on_k() const { return family != TermFamily::Constant && c != 0.0; }

std::optional<double> TermSpec::sup_abs() const {
  const TermBounds tb = bounds_of(*this);
  if (tb.growth_x == 0.0 && tb.growth_k == 0.0) return tb.growth_const;
  return std::nullopt;
}

std::string TermSpec::describe() const {
  switch (family) {
    case TermFamily::Constant:
      return "constant(a=" + num(a) + ")";
    case TermFamily::Linear:
      return "linear(a=" + num(a) + ", b=" + num(b) + ", c=" + num(c) + ")";
    case TermFamily::ClampedLinear:
      return "clamped_linear(a=" + num(a) + ", b=" + num(b) + ", c=" + num(c) +
             ", lo=" + num(lo) + ", hi=" + num(hi) + ")";
    case TermFamily::Sinusoidal:
      return "sinusoidal(a=" + num(a) + ", b=" + num(b) + ", w=" + num(w) + ", c=" + num(c) + ")";
    case TermFamily::LogModulus:
      return "log_modulus(a=" + num(a) + ", b=" + num(b) + ", c=" + num(c) + ")";
  }
  return "?";
}

TermSpec parse_term(const std::string& text) {
  const std::string s = trim(text);
  TermSpec out;
  double v = 0.0;
  if (parse_double(s, v)) return TermSpec::constant(v);

  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    fail(ErrorKind::InvalidArgument, "expected 'family(key=value, ...)' but got '" + s + "'");
  const std::string name = trim(s.substr(0, open));
  const auto it = family_names().find(name);
  if (it == family_names().end())
    fail(ErrorKind::InvalidArgument, "unknown coefficient family '" + name + "'");
  out.family = it->second;

  std::vector<std::string> allowed;
  switch (out.family) {
    case TermFamily::Constant: allowed = {"a"}; break;
    case TermFamily::Linear: allowed = {"a", "b", "c"}; break;
    case TermFamily::ClampedLinear: allowed = {"a", "b", "c", "lo", "hi"}; break;
    case TermFamily::Sinusoidal: allowed = {"a", "b", "w", "c"}; break;
    case TermFamily::LogModulus: allowed = {"a", "b", "c"}; break;
  }

  const std::string body = s.substr(open + 1, s.size() - open - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::InvalidArgument, "expected key=value in '" + trim(item) + "'");
    const std::string key = trim(item.substr(0, eq));
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(ErrorKind::InvalidArgument, "family '" + name + "' has no parameter '" + key + "'");
    if (!parse_double(item.substr(eq + 1), v))
      fail(ErrorKind::InvalidArgument, "parameter '" + key + "' is not a number");
    if (key == "a") out.a = v;
    else if (key == "b") out.b = v;
    else if (key == "c") out.c = v;
    else if (key == "w") out.w = v;
    else if (key == "lo") out.lo = v;
    else if (key == "hi") out.hi = v;
  }
  if (out.family == TermFamily::ClampedLinear && !(out.lo <= out.hi))
    fail(ErrorKind::InvalidArgument, "clamped_linear needs lo <= hi");
  for (double x : {out.a, out.b, out.c, out.w})
    if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "term parameters must be finite");
  return out;
}

CoefficientSet make_registry_coefficients(const TermSpec& f, const TermSpec& h, const TermSpec& g,
                                          double p) {
  if (!(p > 2.0)) fail(ErrorKind::InvalidArgument, "growth exponent p must exceed 2");
  CoefficientSet cs;
  cs.f = [f, p](std::size_t, double x, double k) { return f.eval(x, k, p); };
  cs.h = [h, p](std::size_t, double x, double k) { return h.eval(x, k, p); };
  cs.g = [g, p](std::size_t, double x, double k) { return g.eval(x, k, p); };
  cs.g_k_independent = !g.depends_on_k();

  double sum_a = 0.0, sum_slope = 0.0, sum_lip = 0.0, sum_log = 0.0;
  bool any_log = false;
  for (const TermSpec* t : {&f, &h, &g}) {
    const TermBounds tb = bounds_of(*t);
    sum_a += std::pow(tb.growth_const, p);
    sum_slope += std::pow(std::max(tb.growth_x, tb.growth_k), p);
    sum_lip += std::pow(std::max(tb.modulus_x, tb.modulus_k), p);
    sum_log += std::pow(tb.modulus_x, p) + std::pow(tb.modulus_k, p);
    any_log = any_log || tb.log_modulus;
  }
  const double growth_scale = std::pow(3.0, (p - 1.0) / p);
  cs.beta1 = TimeWeight(growth_scale * std::pow(sum_a, 1.0 / p));
  cs.beta2 = growth_scale * std::pow(sum_slope, 1.0 / p);
  const double two_p = std::pow(2.0, p - 1.0);
  cs.modulus = any_log ? ModulusSpec::log_modulus(two_p * sum_log)
                       : ModulusSpec::lipschitz(two_p * sum_lip);

  const auto bf = f.sup_abs(), bh = h.sup_abs(), bg = g.sup_abs();
  if (bf && bh && bg) cs.bound = std::max({*bf, *bh, *bg});

  cs.family_name = "registry";
  cs.params = {{"f", f.describe()}, {"h", h.describe()}, {"g", g.describe()}};
  return cs;
}

ObstacleSpec ObstacleSpec::from_path(GridPath p) {
  ObstacleSpec o;
  o.mode = Mode::GridPath;
  o.path = std::move(p);
  return o;
}

ObstacleSpec ObstacleSpec::ito(double s0, double drift, double qv_drift, double diffusion) {
  ObstacleSpec o;
  o.mode = Mode::Ito;
  o.s0 = s0;
  o.drift = drift;
  o.qv_drift = qv_drift;
  o.diffusion = diffusion;
  return o;
}

double ObstacleSpec::start_value() const {
  double v = mode == Mode::Ito ? s0 : (path.empty() ? value : path.front());
  if (cap) v = std::min(v, *cap);
  return v;
}

GridPath ObstacleSpec::build(const ScenarioPath& scenario) const {
  const std::size_t n = scenario.n_steps();
  GridPath s;
  if (mode == Mode::GridPath) {
    if (path.empty()) {
      s.assign(n + 1, value);
    } else {
      if (path.size() != n + 1)
        fail(ErrorKind::InvalidArgument, "obstacle path length does not match the grid");
      s = path;
    }
  } else {
    s.assign(n + 1, s0);
    for (std::size_t i = 0; i < n; ++i)
      s[i + 1] = s[i] + drift * scenario.grid.dt + qv_drift * scenario.dQV[i] +
                 diffusion * scenario.dB[i];
  }
  if (cap)
    for (double& v : s) v = std::min(v, *cap);
  return s;
}

std::optional<double> ObstacleSpec::upper_bound() const {
  std::optional<double> ub;
  if (mode == Mode::GridPath)
    ub = path.empty() ? value : *std::max_element(path.begin(), path.end());
  else if (drift == 0.0 && qv_drift == 0.0 && diffusion == 0.0)
    ub = s0;
  if (cap) ub = ub ? std::min(*ub, *cap) : *cap;
  return ub;
}

std::string ObstacleSpec::describe() const {
  std::string out;
  if (mode == Mode::GridPath)
    out = path.empty() ? "constant(" + num(value) + ")" : "grid_path";
  else
    out = "ito(s0=" + num(s0) + ", drift=" + num(drift) + ", qv_drift=" + num(qv_drift) +
          ", diffusion=" + num(diffusion) + ")";
  if (cap) out += " capped at " + num(*cap);
  return out;
}

ObstacleSpec parse_obstacle(const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  if (parse_double(s, v)) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "obstacle value must be finite");
    return ObstacleSpec::constant(v);
  }
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    fail(ErrorKind::InvalidArgument, "expected 'constant(...)' or 'ito(...)' but got '" + s + "'");
  const std::string name = trim(s.substr(0, open));
  std::vector<std::string> allowed;
  if (name == "constant") allowed = {"value", "cap"};
  else if (name == "ito") allowed = {"s0", "drift", "qv_drift", "diffusion", "cap"};
  else fail(ErrorKind::InvalidArgument, "unknown obstacle kind '" + name + "'");

  std::map<std::string, double> kv;
  std::stringstream ss(s.substr(open + 1, s.size() - open - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::InvalidArgument, "expected key=value in '" + trim(item) + "'");
    const std::string key = trim(item.substr(0, eq));
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      fail(ErrorKind::InvalidArgument, "obstacle '" + name + "' has no parameter '" + key + "'");
    if (!parse_double(item.substr(eq + 1), v) || !std::isfinite(v))
      fail(ErrorKind::InvalidArgument, "obstacle parameter '" + key + "' is not a finite number");
    kv[key] = v;
  }
  auto get = [&](const char* k) { return kv.count(k) ? kv[k] : 0.0; };
  ObstacleSpec o = name == "constant"
                       ? ObstacleSpec::constant(get("value"))
                       : ObstacleSpec::ito(get("s0"), get("drift"), get("qv_drift"), get("diffusion"));
  if (kv.count("cap")) o.cap = kv["cap"];
  return o;
}

}  // namespace rgsde
