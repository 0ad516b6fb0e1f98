#include "rgsde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "rgsde/error.hpp"

namespace rgsde {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-10;
constexpr double kBisectTol = 1e-12;
constexpr double kBracketLimit = 1e300;

// Romberg integration of fn on [lo, hi].
template <class Fn>
double romberg(Fn&& fn, double lo, double hi) {
  if (lo == hi) return 0.0;
  constexpr int kMaxLevels = 22;
  std::array<double, kMaxLevels> prev{}, cur{};
  const double width = hi - lo;
  prev[0] = 0.5 * width * (fn(lo) + fn(hi));
  std::size_t panels = 1;
  for (int level = 1; level < kMaxLevels; ++level) {
    const double h = width / static_cast<double>(panels * 2);
    double mid_sum = 0.0;
    for (std::size_t k = 0; k < panels; ++k)
      mid_sum += fn(lo + h * static_cast<double>(2 * k + 1));
    panels *= 2;
    cur[0] = 0.5 * prev[0] + h * mid_sum;
    double factor = 4.0;
    for (int m = 1; m <= level; ++m) {
      cur[m] = cur[m - 1] + (cur[m - 1] - prev[m - 1]) / (factor - 1.0);
      factor *= 4.0;
    }
    const double diff = std::abs(cur[level] - prev[level - 1]);
    if (level >= 4 && diff <= kQuadTol * std::abs(cur[level]) + 1e-300) return cur[level];
    prev = cur;
  }
  return prev[kMaxLevels - 1];
}

double kappa_integral(const BihariSpec& spec, double t) {
  return spec.kappa.integral(t, spec.kappa_nodes);
}

void require_supported(const ModulusSpec& m) {
  if (m.kind == ModulusKind::Custom && (!m.custom || !m.integrability_certified))
    fail(ErrorKind::UnsupportedModulus,
         "custom modulus needs an evaluator and a certificate that 1/rho is not integrable at 0");
}

}  // namespace

const char* to_string(BoundMethod m) {
  return m == BoundMethod::ClosedForm ? "closed_form" : "quadrature_bisection";
}

double bihari_v(const ModulusSpec& modulus, double t0, double x) {
  if (x == t0) return 0.0;
  const double sign = x > t0 ? 1.0 : -1.0;
  const double lo = std::log(std::min(x, t0));
  const double hi = std::log(std::max(x, t0));
  // r = e^s: dr / rho(r) = e^s / rho(e^s) ds
  auto integrand = [&modulus](double s) {
    const double r = std::exp(s);
    return r / modulus.rho(r);
  };
  const double kink = -1.0;  // log of the log-modulus switch point
  double total;
  if (modulus.kind == ModulusKind::LogModulus && lo < kink && kink < hi)
    total = romberg(integrand, lo, kink) + romberg(integrand, kink, hi);
  else
    total = romberg(integrand, lo, hi);
  return sign * total;
}

std::optional<double> bihari_closed_form(const BihariSpec& spec, double t) {
  if (spec.a == 0.0) return 0.0;
  const double K = kappa_integral(spec, t);
  const double c = spec.modulus.constant;
  switch (spec.modulus.kind) {
    case ModulusKind::Lipschitz:
      return spec.a * std::exp(c * K);
    case ModulusKind::LogModulus: {
      if (spec.a >= kLogModulusSwitch) return spec.a * std::exp(c * K);
      const double k_switch = std::log(std::log(1.0 / spec.a)) / c;
      if (K <= k_switch) return std::pow(spec.a, std::exp(-c * K));
      return kLogModulusSwitch * std::exp(c * (K - k_switch));
    }
    case ModulusKind::Custom:
      return std::nullopt;
  }
  return std::nullopt;
}

BoundReport bihari_bound(const BihariSpec& spec, double t) {
  require_supported(spec.modulus);
  if (!(t >= 0.0)) fail(ErrorKind::InvalidArgument, "bihari_bound needs t >= 0");
  if (!(spec.a >= 0.0)) fail(ErrorKind::InvalidArgument, "bihari_bound needs a >= 0");

  BoundReport rep;
  rep.method = BoundMethod::QuadratureBisection;
  rep.tolerance = kBisectTol;
  rep.closed_form = bihari_closed_form(spec, t);
  if (spec.a == 0.0) {
    rep.bound_value = 0.0;
    return rep;
  }
  const double K = kappa_integral(spec, t);
  if (!(K >= 0.0)) fail(ErrorKind::InvalidArgument, "kappa must be nonnegative");
  if (K == 0.0 || spec.modulus.constant == 0.0) {
    rep.bound_value = spec.a;
    return rep;
  }
  const double t0 = spec.t0.value_or(std::min(spec.a, 1.0) / 2.0);
  rep.t0 = t0;
  const double target = bihari_v(spec.modulus, t0, spec.a) + K;

  double lo = spec.a;
  double hi = 2.0 * spec.a;
  while (bihari_v(spec.modulus, t0, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > kBracketLimit) {
      rep.bound_value = kInf;
      return rep;
    }
  }
  while (hi - lo > kBisectTol * std::max(1.0, lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (bihari_v(spec.modulus, t0, mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  rep.bound_value = 0.5 * (lo + hi);
  return rep;
}

double a_priori_rhs(double p, double x0, double beta1_pnorm, double obstacle_sup_plus_p, double C) {
  if (!(p > 2.0)) fail(ErrorKind::InvalidArgument, "a priori bound needs p > 2");
  if (!(beta1_pnorm >= 0.0) || !(obstacle_sup_plus_p >= 0.0) || !(C > 0.0))
    fail(ErrorKind::InvalidArgument, "a priori bound inputs must be nonnegative, C positive");
  return C * (std::pow(std::abs(x0), p) + beta1_pnorm) + obstacle_sup_plus_p;
}

BoundReport stability_rhs(double p, double delta_x, const std::array<double, 3>& delta_coeff_pnorms,
                          double delta_obstacle_sup_p, double beta_integral,
                          const BihariSpec& tmpl, double C) {
  if (!(p > 2.0)) fail(ErrorKind::InvalidArgument, "stability bound needs p > 2");
  if (!(C > 0.0) || !(beta_integral >= 0.0))
    fail(ErrorKind::InvalidArgument, "stability bound needs C > 0 and beta_integral >= 0");
  double data = std::pow(std::abs(delta_x), p) + delta_obstacle_sup_p;
  for (double d : delta_coeff_pnorms) {
    if (!(d >= 0.0)) fail(ErrorKind::InvalidArgument, "coefficient difference norms must be >= 0");
    data += d;
  }
  BihariSpec spec = tmpl;
  spec.a = C * data;
  spec.kappa = TimeWeight(C * beta_integral);
  spec.kappa_nodes.clear();
  spec.t0.reset();
  return bihari_bound(spec, 1.0);
}

std::string bound_report_json(const std::string& kind,
                              const std::vector<std::pair<std::string, double>>& inputs,
                              const BoundReport& report,
                              const std::vector<std::pair<std::string, double>>& fitted_constants) {
  using nlohmann::ordered_json;
  auto number = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json("inf"); };
  ordered_json j;
  j["kind"] = kind;
  ordered_json in = ordered_json::object();
  for (const auto& [k, v] : inputs) in[k] = number(v);
  j["inputs"] = in;
  j["bound"] = number(report.bound_value);
  j["method"] = to_string(report.method);
  j["tolerance"] = report.tolerance;
  j["closed_form"] = report.closed_form ? number(*report.closed_form) : ordered_json(nullptr);
  ordered_json fc = ordered_json::object();
  for (const auto& [k, v] : fitted_constants) fc[k] = number(v);
  j["fitted_constants"] = fc;
  return j.dump();
}

Integrand integrand_from_id(const std::string& id) {
  if (id == "zero") return {id, [](const PathView&, std::size_t) { return 0.0; }};
  if (id == "one") return {id, [](const PathView&, std::size_t) { return 1.0; }};
  if (id == "B") return {id, [](const PathView& v, std::size_t i) { return v.B[i]; }};
  if (id == "X") return {id, [](const PathView& v, std::size_t i) { return v.X[i]; }};
  if (id == "K") return {id, [](const PathView& v, std::size_t i) { return v.K[i]; }};
  if (id == "abs_B") return {id, [](const PathView& v, std::size_t i) { return std::abs(v.B[i]); }};
  if (id == "sin_X")
    return {id, [](const PathView& v, std::size_t i) { return std::sin(v.X[i]); }};
  fail(ErrorKind::InvalidArgument, "unknown integrand '" + id + "'");
}

std::vector<std::string> integrand_ids() { return {"zero", "one", "B", "X", "K", "abs_B", "sin_X"}; }

BdgReport bdg_check(double p, const Integrand& eta, const Problem& problem,
                    const std::vector<VolatilityControl>& controls, std::size_t n_paths,
                    std::uint64_t master_seed, unsigned jobs) {
  if (!(p >= 1.0)) fail(ErrorKind::InvalidArgument, "BDG check needs p >= 1");
  if (n_paths < 2) fail(ErrorKind::InvalidArgument, "BDG check needs n_paths >= 2");
  require_valid(problem);
  const std::size_t n = problem.grid.n_steps;
  const double dt = problem.grid.dt;
  const double T = problem.grid.horizon;

  // Observation layout: [qv_left, db_left, int |eta|^2 dt, |eta_0|^p, ..., |eta_{n-1}|^p]
  const SweepResult sw =
      sweep(problem, controls, n_paths, master_seed, jobs, [&](const PathView& v) {
        std::vector<double> o(3 + n, 0.0);
        double qv_int = 0.0, db_int = 0.0, sup_qv = 0.0, sup_db = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double e = eta.at(v, i);
          qv_int += e * v.scenario.dQV[i];
          db_int += e * v.scenario.dB[i];
          sq += e * e * dt;
          sup_qv = std::max(sup_qv, std::abs(qv_int));
          sup_db = std::max(sup_db, std::abs(db_int));
          o[3 + i] = std::pow(std::abs(e), p);
        }
        o[0] = std::pow(sup_qv, p);
        o[1] = std::pow(sup_db, p);
        o[2] = sq;
        return o;
      });

  auto estimate = [&](std::size_t component) {
    std::vector<std::vector<double>> samples(controls.size());
    for (std::size_t c = 0; c < controls.size(); ++c)
      for (const auto& o : sw.obs[c]) samples[c].push_back(o[component]);
    return aggregate(eta.id, sw.labels, samples, master_seed);
  };

  BdgReport rep;
  rep.integrand = eta.id;
  rep.p = p;
  const auto left = estimate(0);
  rep.qv_left = left.value;
  rep.qv_left_se = left.argmax().std_error;

  // Right side: T^(p-1) sum_i E^[|eta_i|^p] dt with the sup taken per node.
  double integral = 0.0, var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto node = estimate(3 + i);
    integral += node.value * dt;
    var += node.argmax().std_error * dt * node.argmax().std_error * dt;
  }
  const double scale = std::pow(T, p - 1.0);
  rep.qv_right = scale * integral;
  rep.qv_right_se = scale * std::sqrt(var);
  rep.qv_ratio = rep.qv_right > 0.0 ? rep.qv_left / rep.qv_right : 0.0;
  const double pooled = std::hypot(rep.qv_left_se, rep.qv_right_se);
  rep.qv_holds = rep.qv_left <= rep.qv_right * (1.0 + 1e-12) + 3.0 * pooled;

  if (p >= 2.0) {
    rep.db_checked = true;
    rep.db_left = estimate(1).value;
    rep.db_right = std::pow(estimate(2).value, p / 2.0);
    rep.fitted_cp = rep.db_right > 0.0 ? rep.db_left / rep.db_right : 0.0;
  }
  return rep;
}

}  // namespace rgsde
