#include "rgsde/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rgsde/error.hpp"

namespace rgsde {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest nonnegative float k with y + k >= s (evaluated in floating point).
double minimal_push(double y, double s) {
  if (y >= s) return 0.0;
  double k = s - y;
  while (y + k < s) k = std::nextafter(k, kInf);
  while (k > 0.0) {
    const double lower = std::nextafter(k, 0.0);
    if (y + lower < s) break;
    k = lower;
  }
  return k;
}

void check_lengths(std::size_t a, std::size_t b, const char* what) {
  if (a != b || a == 0) {
    std::ostringstream os;
    os << what << ": path lengths " << a << " and " << b << " differ or are empty";
    fail(ErrorKind::InvalidArgument, os.str());
  }
}

}  // namespace

ReflectedSolution skorokhod_map(const GridPath& Y, const GridPath& S) {
  check_lengths(Y.size(), S.size(), "skorokhod_map");
  if (Y[0] < S[0]) {
    std::ostringstream os;
    os.precision(17);
    os << "obstacle starts above the path: S[0] = " << S[0] << " > Y[0] = " << Y[0];
    fail(ErrorKind::ObstacleViolation, os.str());
  }
  ReflectedSolution out;
  out.X.resize(Y.size());
  out.K.resize(Y.size());
  double k = 0.0;
  for (std::size_t i = 0; i < Y.size(); ++i) {
    k = std::max(k, minimal_push(Y[i], S[i]));
    out.K[i] = k;
    out.X[i] = Y[i] + k;
  }
  return out;
}

double flatness_defect(const ReflectedSolution& sol, const GridPath& S) {
  check_lengths(sol.X.size(), S.size(), "flatness_defect");
  check_lengths(sol.K.size(), S.size(), "flatness_defect");
  double sum = 0.0;
  for (std::size_t i = 1; i < S.size(); ++i)
    sum += std::abs(sol.X[i] - S[i]) * std::abs(sol.K[i] - sol.K[i - 1]);
  return sum;
}

double flatness_tolerance(const ReflectedSolution& sol, const GridPath& S) {
  double gap = 0.0;
  for (std::size_t i = 0; i < S.size(); ++i) gap = std::max(gap, std::abs(sol.X[i] - S[i]));
  return 1e-10 * (1.0 + gap) * std::abs(sol.K.back());
}

bool minimality_check(const ReflectedSolution& sol, const GridPath& Y, const GridPath& S,
                      const GridPath& candidate_K) {
  check_lengths(Y.size(), S.size(), "minimality_check");
  check_lengths(candidate_K.size(), S.size(), "minimality_check");
  check_lengths(sol.K.size(), S.size(), "minimality_check");
  if (candidate_K[0] != 0.0)
    fail(ErrorKind::InvalidArgument, "candidate pusher must start at 0");
  for (std::size_t i = 0; i < S.size(); ++i) {
    if (i > 0 && candidate_K[i] < candidate_K[i - 1])
      fail(ErrorKind::InvalidArgument, "candidate pusher must be nondecreasing");
    if (Y[i] + candidate_K[i] < S[i])
      fail(ErrorKind::InvalidArgument, "candidate pusher leaves the path below the obstacle");
  }
  for (std::size_t i = 0; i < S.size(); ++i)
    if (sol.K[i] > candidate_K[i]) return false;
  return true;
}

}  // namespace rgsde
