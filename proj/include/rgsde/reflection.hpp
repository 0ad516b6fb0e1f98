#pragma once

#include <vector>

namespace rgsde {

// Values of a process on the nodes of a TimeGrid.
using GridPath = std::vector<double>;

struct ReflectedSolution {
  GridPath X;
  GridPath K;
};

// Discrete Skorokhod map: K[i] is the running maximum of (S[j] - Y[j])^+ over
// j <= i, X = Y + K. K is the smallest float pusher with Y + K >= S nodewise,
// so X >= S holds exactly in floating point.
// Throws ObstacleViolation if Y[0] < S[0], InvalidArgument on length mismatch.
ReflectedSolution skorokhod_map(const GridPath& Y, const GridPath& S);

// Sum over i >= 1 of |X[i] - S[i]| * |K[i] - K[i-1]|: the pusher increment is
// weighted by the gap at the node where it lands. Zero for skorokhod_map output.
double flatness_defect(const ReflectedSolution& sol, const GridPath& S);

// Rounding budget for the flatness defect: 1e-10 * (1 + sup|X - S|) * K[T].
double flatness_tolerance(const ReflectedSolution& sol, const GridPath& S);

// True iff sol.K <= candidate_K nodewise. The candidate must itself be an
// admissible pusher (starts at 0, nondecreasing, Y + candidate >= S), else
// InvalidArgument.
bool minimality_check(const ReflectedSolution& sol, const GridPath& Y, const GridPath& S,
                      const GridPath& candidate_K);

}  // namespace rgsde
