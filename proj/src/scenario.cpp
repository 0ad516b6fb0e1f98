#include "rgsde/scenario.hpp"

#include <cmath>
#include <sstream>

#include "rgsde/error.hpp"
#include "rgsde/random.hpp"

namespace rgsde {

void VolatilitySpec::validate() const {
  if (!(sigma_lo_sq >= 0.0) || !(sigma_hi_sq > 0.0) || !(sigma_lo_sq <= sigma_hi_sq) ||
      !std::isfinite(sigma_hi_sq)) {
    std::ostringstream os;
    os << "volatility bounds must satisfy 0 <= sigma_lo_sq <= sigma_hi_sq, sigma_hi_sq > 0"
       << " (got " << sigma_lo_sq << ", " << sigma_hi_sq << ")";
    fail(ErrorKind::InvalidArgument, os.str());
  }
}

TimeGrid make_uniform_grid(double horizon, std::size_t n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    fail(ErrorKind::InvalidArgument, "grid horizon must be positive and finite");
  if (n_steps == 0) fail(ErrorKind::InvalidArgument, "grid needs at least one step");
  TimeGrid g;
  g.horizon = horizon;
  g.n_steps = n_steps;
  g.dt = horizon / static_cast<double>(n_steps);
  g.nodes.resize(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i)
    g.nodes[i] = static_cast<double>(i) * horizon / static_cast<double>(n_steps);
  return g;
}

VolatilityControl constant_control(const TimeGrid& grid, double theta_sq, std::string label) {
  if (label.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << "const:" << theta_sq;
    label = os.str();
  }
  return {std::vector<double>(grid.n_steps, theta_sq), std::move(label)};
}

VolatilityControl refine_control(const VolatilityControl& control, std::size_t factor) {
  if (factor == 0) fail(ErrorKind::InvalidArgument, "refinement factor must be positive");
  VolatilityControl out{{}, control.label};
  out.theta_sq.reserve(control.theta_sq.size() * factor);
  for (double v : control.theta_sq)
    for (std::size_t r = 0; r < factor; ++r) out.theta_sq.push_back(v);
  return out;
}

void check_control(const VolatilityControl& control, const TimeGrid& grid,
                   const VolatilitySpec& spec) {
  if (control.theta_sq.size() != grid.n_steps) {
    std::ostringstream os;
    os << "control '" << control.label << "' has " << control.theta_sq.size()
       << " steps, grid has " << grid.n_steps;
    fail(ErrorKind::InvalidArgument, os.str());
  }
  for (std::size_t i = 0; i < control.theta_sq.size(); ++i) {
    const double v = control.theta_sq[i];
    if (!(v >= spec.sigma_lo_sq && v <= spec.sigma_hi_sq)) {
      std::ostringstream os;
      os << "control '" << control.label << "' step " << i << ": theta_sq = " << v
         << " outside [" << spec.sigma_lo_sq << ", " << spec.sigma_hi_sq << "]";
      fail(ErrorKind::ConstraintViolation, os.str());
    }
  }
}

std::vector<double> cumulative_qv(const std::vector<double>& theta_sq, const TimeGrid& grid) {
  std::vector<double> qv(grid.n_steps + 1, 0.0);
  std::size_t run_start = 0;
  double base = 0.0;
  for (std::size_t i = 0; i < grid.n_steps; ++i) {
    if (i > 0 && theta_sq[i] != theta_sq[i - 1]) {
      run_start = i;
      base = qv[i];
    }
    qv[i + 1] = base + theta_sq[i] * (grid.nodes[i + 1] - grid.nodes[run_start]);
  }
  return qv;
}

ScenarioPath sample_scenario(const VolatilityControl& control, const TimeGrid& grid,
                             const VolatilitySpec& spec, std::uint64_t seed) {
  check_control(control, grid, spec);
  const std::size_t n = grid.n_steps;
  const NormalStream stream(seed);

  ScenarioPath p;
  p.grid = grid;
  p.theta_sq = control.theta_sq;
  p.control_label = control.label;
  p.seed = seed;
  p.dB.resize(n);
  p.dQV.resize(n);
  p.B.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double var = control.theta_sq[i] * grid.dt;
    p.dB[i] = std::sqrt(var) * stream.normal(i);
    p.dQV[i] = var;
    p.B[i + 1] = p.B[i] + p.dB[i];
  }
  p.QV = cumulative_qv(p.theta_sq, grid);
  return p;
}

ScenarioPath coarsen(const ScenarioPath& fine, std::size_t factor) {
  if (factor == 0 || fine.n_steps() % factor != 0)
    fail(ErrorKind::InvalidArgument, "coarsening factor must divide the step count");
  if (factor == 1) return fine;
  const std::size_t n = fine.n_steps() / factor;
  ScenarioPath c;
  c.grid = make_uniform_grid(fine.grid.horizon, n);
  c.control_label = fine.control_label;
  c.seed = fine.seed;
  c.dB.assign(n, 0.0);
  c.dQV.resize(n);
  c.theta_sq.assign(n, 0.0);
  c.B.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < factor; ++r) {
      c.dB[i] += fine.dB[i * factor + r];
      c.theta_sq[i] += fine.theta_sq[i * factor + r];
    }
    c.theta_sq[i] /= static_cast<double>(factor);
    c.dQV[i] = c.theta_sq[i] * c.grid.dt;
    c.B[i + 1] = c.B[i] + c.dB[i];
  }
  c.QV = cumulative_qv(c.theta_sq, c.grid);
  return c;
}

std::vector<VolatilityControl> bang_bang_family(const TimeGrid& grid, const VolatilitySpec& spec,
                                                std::size_t n_blocks, std::size_t max_controls) {
  spec.validate();
  if (n_blocks == 0 || n_blocks > grid.n_steps)
    fail(ErrorKind::InvalidArgument, "bang-bang family needs 1 <= n_blocks <= n_steps");
  if (n_blocks >= 63 || (std::size_t{1} << n_blocks) > max_controls) {
    std::ostringstream os;
    os << "bang-bang family with " << n_blocks << " blocks exceeds the cap of "
       << max_controls << " controls";
    fail(ErrorKind::ResourceLimit, os.str());
  }
  const std::size_t count = std::size_t{1} << n_blocks;
  std::vector<VolatilityControl> out;
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    VolatilityControl c;
    c.label = "bb:";
    c.theta_sq.resize(grid.n_steps);
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const bool high = (mask >> b) & 1u;
      c.label += high ? 'H' : 'L';
      const std::size_t lo = b * grid.n_steps / n_blocks;
      const std::size_t hi = (b + 1) * grid.n_steps / n_blocks;
      for (std::size_t i = lo; i < hi; ++i)
        c.theta_sq[i] = high ? spec.sigma_hi_sq : spec.sigma_lo_sq;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> qv_from_increments(const ScenarioPath& path) {
  std::vector<double> qv(path.dB.size() + 1, 0.0);
  for (std::size_t i = 0; i < path.dB.size(); ++i) qv[i + 1] = qv[i] + path.dB[i] * path.dB[i];
  return qv;
}

}  // namespace rgsde
