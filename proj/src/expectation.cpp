#include "rgsde/expectation.hpp"

#include <algorithm>
#include <cmath>

#include "rgsde/error.hpp"

namespace rgsde {
namespace {

double sup_abs(const GridPath& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_budget(std::size_t n_paths, const std::vector<VolatilityControl>& controls) {
  if (n_paths < 2) fail(ErrorKind::InvalidArgument, "upper expectation needs n_paths >= 2");
  if (controls.empty()) fail(ErrorKind::InvalidArgument, "control family is empty");
}

}  // namespace

PathFunctional PathFunctional::terminal_value() {
  return {"terminal_value", [](const PathView& v) { return v.X.back(); }};
}
PathFunctional PathFunctional::running_sup() {
  return {"running_sup", [](const PathView& v) { return sup_abs(v.X); }};
}
PathFunctional PathFunctional::running_sup_positive_part() {
  return {"running_sup_positive_part", [](const PathView& v) {
            double m = 0.0;
            for (double x : v.X) m = std::max(m, x);
            return m;
          }};
}
PathFunctional PathFunctional::terminal_K() {
  return {"terminal_K", [](const PathView& v) { return v.K.back(); }};
}
PathFunctional PathFunctional::flatness() {
  return {"flatness", [](const PathView& v) {
            return flatness_defect(ReflectedSolution{v.X, v.K}, v.S);
          }};
}
PathFunctional PathFunctional::constant(double c) {
  return {"constant", [c](const PathView&) { return c; }};
}
PathFunctional PathFunctional::terminal_B() {
  return {"terminal_B", [](const PathView& v) { return v.B.back(); }};
}
PathFunctional PathFunctional::terminal_B_squared() {
  return {"terminal_B_squared", [](const PathView& v) { return v.B.back() * v.B.back(); }};
}
PathFunctional PathFunctional::sup_abs_X_pow(double p) {
  return {"sup_abs_X_pow", [p](const PathView& v) { return std::pow(sup_abs(v.X), p); }};
}
PathFunctional PathFunctional::terminal_K_pow(double p) {
  return {"terminal_K_pow", [p](const PathView& v) { return std::pow(v.K.back(), p); }};
}

std::vector<std::string> functional_ids() {
  return {"terminal_value", "running_sup", "running_sup_positive_part", "terminal_K",
          "flatness", "constant", "terminal_B", "terminal_B_squared", "sup_abs_X_pow",
          "terminal_K_pow"};
}

PathFunctional functional_from_id(const std::string& id, double param) {
  if (id == "terminal_value") return PathFunctional::terminal_value();
  if (id == "running_sup") return PathFunctional::running_sup();
  if (id == "running_sup_positive_part") return PathFunctional::running_sup_positive_part();
  if (id == "terminal_K") return PathFunctional::terminal_K();
  if (id == "flatness") return PathFunctional::flatness();
  if (id == "constant") return PathFunctional::constant(param);
  if (id == "terminal_B") return PathFunctional::terminal_B();
  if (id == "terminal_B_squared") return PathFunctional::terminal_B_squared();
  if (id == "sup_abs_X_pow") return PathFunctional::sup_abs_X_pow(param);
  if (id == "terminal_K_pow") return PathFunctional::terminal_K_pow(param);
  fail(ErrorKind::InvalidArgument, "unknown functional '" + id + "'");
}

PathEvent event_from_id(const std::string& id) {
  if (id == "x0_mismatch") return {id, [](const PathView& v) { return v.X.front() != v.x0; }};
  if (id == "k0_zero") return {id, [](const PathView& v) { return v.K.front() == 0.0; }};
  if (id == "terminal_B_positive") return {id, [](const PathView& v) { return v.B.back() > 0.0; }};
  if (id == "touches_obstacle") return {id, [](const PathView& v) { return v.K.back() > 0.0; }};
  fail(ErrorKind::InvalidArgument, "unknown event '" + id + "'");
}

const ControlStat& UpperExpectationEstimate::argmax() const {
  for (const auto& c : per_control)
    if (c.label == argmax_control) return c;
  fail(ErrorKind::InvalidArgument, "estimate has no argmax control");
}

double UpperExpectationEstimate::pooled_std_error() const {
  double s = 0.0;
  for (const auto& c : per_control) s += c.std_error * c.std_error;
  return std::sqrt(s);
}

double sample_mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); }))
    return xs.front();
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_std_error(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

UpperExpectationEstimate aggregate(const std::string& functional,
                                   const std::vector<std::string>& labels,
                                   const std::vector<std::vector<double>>& samples,
                                   std::uint64_t master_seed) {
  UpperExpectationEstimate est;
  est.functional = functional;
  est.master_seed = master_seed;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    ControlStat st;
    st.label = labels[c];
    st.mean = sample_mean(samples[c]);
    st.std_error = sample_std_error(samples[c], st.mean);
    st.n_paths = samples[c].size();
    if (c == 0 || st.mean > est.value) {
      est.value = st.mean;
      est.argmax_control = st.label;
    }
    est.per_control.push_back(std::move(st));
  }
  return est;
}

std::vector<UpperExpectationEstimate> upper_expectations(
    const std::vector<PathFunctional>& functionals, const Problem& problem,
    const std::vector<VolatilityControl>& controls, std::size_t n_paths,
    std::uint64_t master_seed, unsigned jobs) {
  check_budget(n_paths, controls);
  require_valid(problem);
  const SweepResult sw = sweep(problem, controls, n_paths, master_seed, jobs,
                               [&](const PathView& v) {
                                 std::vector<double> out;
                                 out.reserve(functionals.size());
                                 for (const auto& f : functionals) out.push_back(f.eval(v));
                                 return out;
                               });
  std::vector<UpperExpectationEstimate> out;
  for (std::size_t k = 0; k < functionals.size(); ++k) {
    std::vector<std::vector<double>> samples(controls.size());
    for (std::size_t c = 0; c < controls.size(); ++c)
      for (const auto& o : sw.obs[c]) samples[c].push_back(o[k]);
    out.push_back(aggregate(functionals[k].id, sw.labels, samples, master_seed));
  }
  return out;
}

UpperExpectationEstimate upper_expectation(const PathFunctional& functional,
                                           const Problem& problem,
                                           const std::vector<VolatilityControl>& controls,
                                           std::size_t n_paths, std::uint64_t master_seed,
                                           unsigned jobs) {
  return upper_expectations({functional}, problem, controls, n_paths, master_seed, jobs).front();
}

UpperExpectationEstimate capacity(const PathEvent& event, const Problem& problem,
                                  const std::vector<VolatilityControl>& controls,
                                  std::size_t n_paths, std::uint64_t master_seed, unsigned jobs) {
  PathFunctional indicator{event.id,
                           [&event](const PathView& v) { return event.holds(v) ? 1.0 : 0.0; }};
  return upper_expectation(indicator, problem, controls, n_paths, master_seed, jobs);
}

}  // namespace rgsde
