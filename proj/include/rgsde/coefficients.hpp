#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rgsde/reflection.hpp"
#include "rgsde/scenario.hpp"

namespace rgsde {

// Coefficient evaluator: (step index, x, k) -> value.
using Evaluator = std::function<double(std::size_t, double, double)>;

// Deterministic weight on the grid: a constant, or one value per grid node.
struct TimeWeight {
  double constant = 0.0;
  std::vector<double> path;

  TimeWeight() = default;
  TimeWeight(double c) : constant(c) {}  // NOLINT: implicit from a constant is intended
  explicit TimeWeight(std::vector<double> values) : path(std::move(values)) {}

  bool is_constant() const { return path.empty(); }
  double at(std::size_t step) const;
  // Integral over [0, t]; a path is read as piecewise linear on `nodes`.
  double integral(double t, const std::vector<double>& nodes = {}) const;
};

enum class ModulusKind { Lipschitz, LogModulus, Custom };

// Integral-Lipschitz modulus rho with weight beta:
//   lipschitz:    rho(r) = L r
//   log_modulus:  rho(r) = c r ln(1/r) for r < 1/e, c r above (continuous at 1/e)
// Both are continuous, increasing, and have a divergent integral of 1/rho at 0.
struct ModulusSpec {
  ModulusKind kind = ModulusKind::Lipschitz;
  double constant = 1.0;
  TimeWeight beta_weight{1.0};
  std::function<double(double)> custom;
  bool integrability_certified = false;

  static ModulusSpec lipschitz(double L) {
    ModulusSpec m;
    m.constant = L;
    return m;
  }
  static ModulusSpec log_modulus(double c) {
    ModulusSpec m;
    m.kind = ModulusKind::LogModulus;
    m.constant = c;
    return m;
  }

  double rho(double r) const;
  const char* kind_name() const;
};

inline constexpr double kLogModulusSwitch = 0.36787944117144233;  // 1/e

// One scalar coefficient from the built-in registry.
enum class TermFamily { Constant, Linear, ClampedLinear, Sinusoidal, LogModulus };

// constant:        a
// linear:          a + b x + c k
// clamped_linear:  clamp(a + b x + c k, lo, hi)
// sinusoidal:      a + b sin(w x) + c k
// log_modulus:     a + b psi(x) + c k, psi odd with psi(x) = x ln(1/x)^(1/p) on
//                  (0, 1/e] and linear with matching slope beyond
struct TermSpec {
  TermFamily family = TermFamily::Constant;
  double a = 0.0, b = 0.0, c = 0.0, w = 1.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  static TermSpec constant(double a) { return {TermFamily::Constant, a}; }
  static TermSpec linear(double a, double b, double c) { return {TermFamily::Linear, a, b, c}; }

  double eval(double x, double k, double p) const;
  bool depends_on_k() const;
  std::optional<double> sup_abs() const;
  std::string describe() const;
};

// Parses "name(key=value, ...)", e.g. "linear(a=1, b=-0.5, c=0.2)".
TermSpec parse_term(const std::string& text);

struct CoefficientSet {
  Evaluator f, h, g;
  bool g_k_independent = false;
  TimeWeight beta1;  // growth path beta_1(t)
  double beta2 = 0.0;
  ModulusSpec modulus;
  std::optional<double> bound;  // declared sup of |f|, |h|, |g| when bounded
  std::string family_name;
  std::vector<std::pair<std::string, std::string>> params;
};

// Builds a coefficient set from registry terms and derives its growth and
// modulus declarations for exponent p:
//   |t| <= A + B|x| + C|k|  per term  =>  beta1 = 3^((p-1)/p) (sum A^p)^(1/p),
//                                        beta2 = 3^((p-1)/p) (sum max(B, C)^p)^(1/p)
//   modulus: lipschitz with L = 2^(p-1) sum max(B', C')^p, or log_modulus with
//   c = 2^(p-1) sum (B'^p + C'^p) when any term uses psi, where B' and C' are
//   the x- and k-slopes of the term's modulus (they differ from B, C for
//   bounded terms).
CoefficientSet make_registry_coefficients(const TermSpec& f, const TermSpec& h,
                                          const TermSpec& g, double p);

// Obstacle S: a fixed grid path (or constant), or an Ito process with constant
// coefficients S_t = s0 + drift t + qv_drift <B>_t + diffusion B_t built per
// scenario. An optional cap applies S^N = min(S, N).
struct ObstacleSpec {
  enum class Mode { GridPath, Ito };
  Mode mode = Mode::GridPath;
  double value = 0.0;
  GridPath path;
  double s0 = 0.0, drift = 0.0, qv_drift = 0.0, diffusion = 0.0;
  std::optional<double> cap;

  static ObstacleSpec constant(double v) {
    ObstacleSpec o;
    o.value = v;
    return o;
  }
  static ObstacleSpec from_path(GridPath p);
  static ObstacleSpec ito(double s0, double drift, double qv_drift, double diffusion);

  double start_value() const;
  GridPath build(const ScenarioPath& scenario) const;
  // Supremum over all scenarios when finite (grid paths and capped obstacles).
  std::optional<double> upper_bound() const;
  std::string describe() const;
};

// Parses "constant(value=v)", a bare number, or
// "ito(s0=.., drift=.., qv_drift=.., diffusion=..)"; either form accepts cap=N.
ObstacleSpec parse_obstacle(const std::string& text);

}  // namespace rgsde
