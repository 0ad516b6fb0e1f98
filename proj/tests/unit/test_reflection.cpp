#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "rgsde/reflection.hpp"
#include "test_util.hpp"

using namespace rgsde;

namespace {

// Independent oracle: K[i+1] = max(K[i], S[i+1] - Y[i+1]).
GridPath recursion_k(const GridPath& Y, const GridPath& S) {
  GridPath K(Y.size(), 0.0);
  for (std::size_t i = 0; i + 1 < Y.size(); ++i) K[i + 1] = std::max(K[i], S[i + 1] - Y[i + 1]);
  return K;
}

struct RandomCase {
  GridPath Y, S;
};

RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(1, 1000);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = len(rng);
  RandomCase c;
  c.Y.resize(n);
  c.S.resize(n);
  double y = 0.0, s = -1.0;
  for (int i = 0; i < n; ++i) {
    y += 0.1 * z(rng);
    s += 0.05 * z(rng);
    c.Y[i] = y;
    c.S[i] = s;
  }
  c.S[0] = std::min(c.S[0], c.Y[0]);
  return c;
}

}  // namespace

TEST(Skorokhod, NoReflectionNeeded) {
  const auto r = skorokhod_map({1, 1, 1}, {0, 0, 0});
  EXPECT_EQ(r.K, (GridPath{0, 0, 0}));
  EXPECT_EQ(r.X, (GridPath{1, 1, 1}));
}

TEST(Skorokhod, RunningDeficit) {
  const auto r = skorokhod_map({0, -0.5, -1}, {0, 0, 0});
  EXPECT_EQ(r.K, (GridPath{0, 0.5, 1}));
  EXPECT_EQ(r.X, (GridPath{0, 0, 0}));
}

TEST(Skorokhod, RecursionExample) {
  const GridPath Y{0, -1, 0.5, -2}, S{0, 0, 0, 0};
  const auto r = skorokhod_map(Y, S);
  EXPECT_EQ(r.K, (GridPath{0, 1, 1, 2}));
  EXPECT_EQ(r.X, (GridPath{0, 0, 1.5, 0}));
  EXPECT_EQ(r.K, recursion_k(Y, S));
  EXPECT_EQ(flatness_defect(r, S), 0.0);
}

TEST(Skorokhod, Errors) {
  expect_kind(ErrorKind::ObstacleViolation, [] { skorokhod_map({-1, 0}, {0, 0}); });
  expect_kind(ErrorKind::InvalidArgument, [] { skorokhod_map({0, 0}, {0}); });
  expect_kind(ErrorKind::InvalidArgument, [] { skorokhod_map({}, {}); });
}

TEST(Skorokhod, RandomInvariantsAndOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto c = random_case(rng);
    const auto r = skorokhod_map(c.Y, c.S);
    const auto oracle = recursion_k(c.Y, c.S);
    EXPECT_EQ(r.K[0], 0.0);
    for (std::size_t i = 0; i < c.Y.size(); ++i) {
      EXPECT_GE(r.X[i], c.S[i]);
      EXPECT_NEAR(r.K[i], oracle[i], 1e-12);
      if (i > 0) EXPECT_GE(r.K[i], r.K[i - 1]);
    }
    EXPECT_LE(flatness_defect(r, c.S), flatness_tolerance(r, c.S));
  }
}

TEST(Skorokhod, Idempotence) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_case(rng);
    const auto r = skorokhod_map(c.Y, c.S);
    const auto again = skorokhod_map(r.X, c.S);
    for (double k : again.K) EXPECT_EQ(k, 0.0);
    EXPECT_EQ(again.X, r.X);
  }
}

TEST(Skorokhod, ObstacleMonotonicity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_case(rng);
    GridPath S2 = c.S;
    for (std::size_t i = 1; i < S2.size(); ++i) S2[i] += u(rng);
    S2[0] = std::min(S2[0], c.Y[0]);
    const auto r1 = skorokhod_map(c.Y, c.S);
    const auto r2 = skorokhod_map(c.Y, S2);
    for (std::size_t i = 0; i < S2.size(); ++i) {
      EXPECT_LE(r1.K[i], r2.K[i]);
      EXPECT_LE(r1.X[i], r2.X[i]);
    }
  }
}

TEST(Skorokhod, ShiftEquivariance) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_case(rng);
    const double shift = 0.75;  // dyadic shift keeps the comparison tight
    GridPath Y2 = c.Y, S2 = c.S;
    for (auto& v : Y2) v += shift;
    for (auto& v : S2) v += shift;
    if (Y2[0] < S2[0]) continue;
    const auto r = skorokhod_map(c.Y, c.S);
    const auto r2 = skorokhod_map(Y2, S2);
    for (std::size_t i = 0; i < c.Y.size(); ++i) {
      EXPECT_NEAR(r2.X[i], r.X[i] + shift, 1e-12);
      EXPECT_NEAR(r2.K[i], r.K[i], 1e-12);
    }
  }
}

TEST(Flatness, Examples) {
  ReflectedSolution zero{{1, 2, 3}, {0, 0, 0}};
  EXPECT_EQ(flatness_defect(zero, {0, 0, 0}), 0.0);
  ReflectedSolution bad{{1, 1}, {0, 1}};
  EXPECT_EQ(flatness_defect(bad, {0, 0}), 1.0);
}

TEST(Minimality, Examples) {
  const GridPath Y{0, -1, 0.5, -2}, S{0, 0, 0, 0};
  const auto r = skorokhod_map(Y, S);
  EXPECT_TRUE(minimality_check(r, Y, S, r.K));
  GridPath plus = r.K;
  for (std::size_t i = 1; i < plus.size(); ++i) plus[i] += 1.0;
  EXPECT_TRUE(minimality_check(r, Y, S, plus));
}

TEST(Minimality, RejectsInadmissibleCandidates) {
  const GridPath Y{0, -1, 0.5, -2}, S{0, 0, 0, 0};
  const auto r = skorokhod_map(Y, S);
  expect_kind(ErrorKind::InvalidArgument, [&] { minimality_check(r, Y, S, {1, 1, 1, 2}); });
  expect_kind(ErrorKind::InvalidArgument, [&] { minimality_check(r, Y, S, {0, 1, 0.5, 2}); });
  expect_kind(ErrorKind::InvalidArgument, [&] { minimality_check(r, Y, S, {0, 0.5, 1, 2}); });
}

TEST(Minimality, RandomAdmissibleCandidatesDominate) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int accepted = 0;
  while (accepted < 1000) {
    auto c = random_case(rng);
    if (c.Y.size() > 200) {
      c.Y.resize(200);
      c.S.resize(200);
    }
    const auto r = skorokhod_map(c.Y, c.S);
    // random nondecreasing pusher from zero; rejection-sample admissibility
    GridPath cand(c.Y.size(), 0.0);
    const double scale = 3.0 * u(rng);
    for (std::size_t i = 1; i < cand.size(); ++i) cand[i] = cand[i - 1] + scale * u(rng) * u(rng);
    bool admissible = true;
    for (std::size_t i = 0; i < cand.size(); ++i)
      if (c.Y[i] + cand[i] < c.S[i]) admissible = false;
    if (!admissible) continue;
    ++accepted;
    EXPECT_TRUE(minimality_check(r, c.Y, c.S, cand));
  }
}
