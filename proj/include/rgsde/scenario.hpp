#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rgsde {

// Bounds on the squared volatility; the representing family ranges over
// controls with sigma_lo_sq <= theta^2 <= sigma_hi_sq.
struct VolatilitySpec {
  double sigma_lo_sq = 0.0;
  double sigma_hi_sq = 1.0;

  void validate() const;
};

struct TimeGrid {
  double horizon = 1.0;
  std::size_t n_steps = 1;
  double dt = 1.0;
  std::vector<double> nodes;  // n_steps + 1 entries, nodes[i] = i * horizon / n_steps
};

TimeGrid make_uniform_grid(double horizon, std::size_t n_steps);

// Piecewise-constant squared-volatility schedule, one value per step.
struct VolatilityControl {
  std::vector<double> theta_sq;
  std::string label;
};

VolatilityControl constant_control(const TimeGrid& grid, double theta_sq,
                                   std::string label = {});

// Repeats every step value `factor` times (control on a grid refined by factor).
VolatilityControl refine_control(const VolatilityControl& control, std::size_t factor);

// One discretized G-Brownian scenario under a fixed control.
struct ScenarioPath {
  TimeGrid grid;
  std::vector<double> dB;        // n_steps
  std::vector<double> dQV;       // n_steps, theta_sq[i] * dt
  std::vector<double> B;         // n_steps + 1, B[0] = 0
  std::vector<double> QV;        // n_steps + 1, QV[0] = 0
  std::vector<double> theta_sq;  // n_steps
  std::string control_label;
  std::uint64_t seed = 0;

  std::size_t n_steps() const { return dB.size(); }
};

// Checks control length and bounds against grid and spec.
void check_control(const VolatilityControl& control, const TimeGrid& grid,
                   const VolatilitySpec& spec);

// dB[i] = sqrt(theta_sq[i] * dt) * Z_i with Z_i the i-th draw of the stream
// keyed by seed. Bit-identical for identical inputs.
ScenarioPath sample_scenario(const VolatilityControl& control, const TimeGrid& grid,
                             const VolatilitySpec& spec, std::uint64_t seed);

// Sums blocks of `factor` fine increments into one coarse step. The coarse
// path is the fine path observed on the coarse grid (nested increments).
ScenarioPath coarsen(const ScenarioPath& fine, std::size_t factor);

// All 2^n_blocks controls taking sigma_lo_sq or sigma_hi_sq on each of
// n_blocks contiguous step blocks. Labels read "bb:" + one L/H per block.
std::vector<VolatilityControl> bang_bang_family(const TimeGrid& grid,
                                                const VolatilitySpec& spec,
                                                std::size_t n_blocks,
                                                std::size_t max_controls = 1u << 16);

// Running sum of squared B increments (empirical quadratic variation).
std::vector<double> qv_from_increments(const ScenarioPath& path);

// Cumulative quadratic variation of a piecewise-constant schedule. Within a run
// of equal theta^2 values QV grows as theta^2 * (t - t_run_start), so a
// constant schedule gives QV[i] = theta^2 * nodes[i] exactly.
std::vector<double> cumulative_qv(const std::vector<double>& theta_sq,
                                  const TimeGrid& grid);

}  // namespace rgsde
