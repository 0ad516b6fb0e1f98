#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rgsde/coefficients.hpp"
#include "rgsde/expectation.hpp"
#include "rgsde/problem.hpp"

namespace rgsde {

// u(t) <= a + int_0^t kappa(s) rho(u(s)) ds  with modulus rho.
struct BihariSpec {
  ModulusSpec modulus;
  TimeWeight kappa{1.0};
  std::vector<double> kappa_nodes;  // grid for a path-valued kappa
  double a = 0.0;
  std::optional<double> t0;         // base point of v; defaults to min(a, 1) / 2
};

enum class BoundMethod { ClosedForm, QuadratureBisection };
const char* to_string(BoundMethod m);

struct BoundReport {
  double bound_value = 0.0;  // may be +infinity
  BoundMethod method = BoundMethod::QuadratureBisection;
  double tolerance = 0.0;
  std::optional<double> closed_form;
  double t0 = 0.0;
};

// v(x) = int_{t0}^{x} dr / rho(r), by Romberg-accelerated trapezoid halving in
// log-space, split at the log-modulus switch point.
double bihari_v(const ModulusSpec& modulus, double t0, double x);

// v^{-1}(v(a) + int_0^t kappa). a = 0 gives 0; +infinity when the target
// exceeds the range of v after expanding the bracket up to 1e300.
// Throws UnsupportedModulus for an uncertified custom modulus.
BoundReport bihari_bound(const BihariSpec& spec, double t);

// Closed forms for registry moduli:
//   lipschitz L:   a exp(L K)
//   log_modulus c: a^(exp(-c K)) while below 1/e, then (1/e) exp(c (K - K1))
// where K = int_0^t kappa. nullopt for custom moduli.
std::optional<double> bihari_closed_form(const BihariSpec& spec, double t);

// C (|x0|^p + beta1_pnorm) + obstacle_sup_plus_p. The constant C is caller supplied.
double a_priori_rhs(double p, double x0, double beta1_pnorm, double obstacle_sup_plus_p, double C);

// v^{-1}(v(a) + C beta_integral) with a = C (|dx|^p + sum of coefficient
// difference norms + obstacle term), using the modulus of `tmpl`.
BoundReport stability_rhs(double p, double delta_x, const std::array<double, 3>& delta_coeff_pnorms,
                          double delta_obstacle_sup_p, double beta_integral,
                          const BihariSpec& tmpl, double C);

// JSON bound report {kind, inputs, bound, method, fitted_constants}; an
// infinite bound is written as the string "inf".
std::string bound_report_json(const std::string& kind,
                              const std::vector<std::pair<std::string, double>>& inputs,
                              const BoundReport& report,
                              const std::vector<std::pair<std::string, double>>& fitted_constants);

// Integrand process eta evaluated at node i of a solved path.
struct Integrand {
  std::string id;
  std::function<double(const PathView&, std::size_t)> at;
};

// Registry: zero, one, B, X, K, abs_B, sin_X.
Integrand integrand_from_id(const std::string& id);
std::vector<std::string> integrand_ids();

struct BdgReport {
  std::string integrand;
  double p = 0.0;
  // sup |int eta d<B>|^p versus T^(p-1) int E|eta|^p dt (sigma_hi = 1)
  double qv_left = 0.0, qv_left_se = 0.0;
  double qv_right = 0.0, qv_right_se = 0.0;
  double qv_ratio = 0.0;
  bool qv_holds = false;  // left <= right + 3 pooled standard errors
  // sup |int eta dB|^p versus E[int |eta|^2 dt]^(p/2); ratio reported as fitted C_p
  bool db_checked = false;
  double db_left = 0.0, db_right = 0.0;
  double fitted_cp = 0.0;
};

// Estimates both sides of the BDG-type inequalities. p >= 1 is required; the
// dB side is evaluated only for p >= 2.
BdgReport bdg_check(double p, const Integrand& eta, const Problem& problem,
                    const std::vector<VolatilityControl>& controls, std::size_t n_paths,
                    std::uint64_t master_seed, unsigned jobs = 1);

}  // namespace rgsde
