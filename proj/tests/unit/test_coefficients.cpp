#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rgsde/coefficients.hpp"
#include "rgsde/solver.hpp"
#include "test_util.hpp"

using namespace rgsde;

namespace {

TermSpec random_term(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> fam(0, 4);
  TermSpec t;
  t.family = static_cast<TermFamily>(fam(rng));
  t.a = u(rng);
  t.b = u(rng);
  t.c = u(rng);
  t.w = u(rng);
  if (t.family == TermFamily::ClampedLinear) {
    t.lo = -1.0 - std::abs(u(rng));
    t.hi = 1.0 + std::abs(u(rng));
  }
  return t;
}

}  // namespace

TEST(Terms, EvaluateFamilies) {
  EXPECT_EQ(TermSpec::constant(2.5).eval(7, 3, 3), 2.5);
  EXPECT_EQ(TermSpec::linear(1, 2, 3).eval(0.5, 2.0, 3), 1 + 1 + 6);
  TermSpec cl{TermFamily::ClampedLinear, 0, 1, 0};
  cl.lo = -1;
  cl.hi = 1;
  EXPECT_EQ(cl.eval(5, 0, 3), 1.0);
  EXPECT_EQ(cl.eval(-5, 0, 3), -1.0);
  EXPECT_EQ(cl.eval(0.25, 0, 3), 0.25);
  TermSpec sn{TermFamily::Sinusoidal, 1, 0.1, 0.0, 2.0};
  EXPECT_DOUBLE_EQ(sn.eval(0.3, 0, 3), 1 + 0.1 * std::sin(0.6));
  TermSpec lm{TermFamily::LogModulus, 0, 1, 0};
  const double x = 0.1;
  EXPECT_DOUBLE_EQ(lm.eval(x, 0, 3), x * std::cbrt(std::log(1 / x)));
  EXPECT_DOUBLE_EQ(lm.eval(-x, 0, 3), -x * std::cbrt(std::log(1 / x)));
  EXPECT_EQ(lm.eval(0, 0, 3), 0.0);
  // continuous at the switch point
  const double e1 = kLogModulusSwitch;
  EXPECT_NEAR(lm.eval(e1 * (1 - 1e-12), 0, 3), lm.eval(e1 * (1 + 1e-12), 0, 3), 1e-11);
}

TEST(Terms, KDependence) {
  EXPECT_FALSE(TermSpec::constant(1).depends_on_k());
  EXPECT_FALSE(TermSpec::linear(1, 1, 0).depends_on_k());
  EXPECT_TRUE(TermSpec::linear(1, 1, -0.5).depends_on_k());
}

TEST(Terms, ParseRoundTrip) {
  const auto t = parse_term("linear(a=1, b=-0.5, c=0.25)");
  EXPECT_EQ(t.family, TermFamily::Linear);
  EXPECT_EQ(t.a, 1.0);
  EXPECT_EQ(t.b, -0.5);
  EXPECT_EQ(t.c, 0.25);
  const auto again = parse_term(t.describe());
  EXPECT_EQ(again.describe(), t.describe());
  EXPECT_EQ(parse_term("  -3 ").a, -3.0);
  EXPECT_EQ(parse_term("sinusoidal(a=1,b=0.1,w=1)").family, TermFamily::Sinusoidal);
  EXPECT_EQ(parse_term("clamped_linear(b=1, lo=-2, hi=2)").hi, 2.0);
  EXPECT_EQ(parse_term("log_modulus(b=1)").family, TermFamily::LogModulus);
}

TEST(Terms, ParseErrors) {
  expect_kind(ErrorKind::InvalidArgument, [] { parse_term("cubic(a=1)"); });
  expect_kind(ErrorKind::InvalidArgument, [] { parse_term("linear(z=1)"); });
  expect_kind(ErrorKind::InvalidArgument, [] { parse_term("linear(a=x)"); });
  expect_kind(ErrorKind::InvalidArgument, [] { parse_term("linear(a)"); });
  expect_kind(ErrorKind::InvalidArgument, [] { parse_term("linear(a=1"); });
  expect_kind(ErrorKind::InvalidArgument, [] { parse_term("clamped_linear(lo=2, hi=1)"); });
}

TEST(Modulus, RhoShape) {
  const auto lip = ModulusSpec::lipschitz(2.0);
  EXPECT_EQ(lip.rho(0.5), 1.0);
  const auto lm = ModulusSpec::log_modulus(1.0);
  EXPECT_DOUBLE_EQ(lm.rho(0.1), 0.1 * std::log(10.0));
  EXPECT_NEAR(lm.rho(kLogModulusSwitch * (1 - 1e-13)), lm.rho(kLogModulusSwitch), 1e-12);
  double prev = 0.0;
  for (double r = 1e-12; r < 10; r *= 1.1) {
    EXPECT_GT(lm.rho(r), prev);
    prev = lm.rho(r);
  }
  EXPECT_EQ(lm.rho(0.0), 0.0);
}

TEST(TimeWeight, Integral) {
  EXPECT_EQ(TimeWeight(2.0).integral(1.5), 3.0);
  TimeWeight w(std::vector<double>{0.0, 1.0, 2.0});
  const std::vector<double> nodes{0.0, 0.5, 1.0};
  EXPECT_DOUBLE_EQ(w.integral(1.0, nodes), 1.0);  // integral of 2t on [0, 1]
  EXPECT_DOUBLE_EQ(w.integral(0.25, nodes), 0.0625);
  EXPECT_EQ(w.at(1), 1.0);
  expect_kind(ErrorKind::InvalidArgument, [&] { w.integral(1.0, {0.0, 1.0}); });
}

TEST(Registry, DeclaredGrowthBoundHoldsAtRandomPoints) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> xs(-50.0, 50.0), ks(0.0, 50.0);
  for (double p : {2.5, 3.0, 4.0}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto f = random_term(rng), h = random_term(rng), g = random_term(rng);
      const auto cs = make_registry_coefficients(f, h, g, p);
      for (int k = 0; k < 50; ++k) {
        const double x = xs(rng), y = ks(rng);
        const double lhs = std::pow(std::abs(cs.f(0, x, y)), p) +
                           std::pow(std::abs(cs.h(0, x, y)), p) +
                           std::pow(std::abs(cs.g(0, x, y)), p);
        const double rhs = std::pow(cs.beta1.constant, p) +
                           std::pow(cs.beta2, p) * (std::pow(std::abs(x), p) + std::pow(y, p));
        ASSERT_LE(lhs, rhs * (1 + 1e-12)) << f.describe() << h.describe() << g.describe();
      }
    }
  }
}

TEST(Registry, DeclaredModulusHoldsAtRandomPairs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double p = 3.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_term(rng), h = random_term(rng), g = random_term(rng);
    const auto cs = make_registry_coefficients(f, h, g, p);
    for (int k = 0; k < 50; ++k) {
      const double scale = std::pow(10.0, -6.0 * std::abs(u(rng)));
      const double x = 3 * u(rng), y = 3 * std::abs(u(rng));
      const double x2 = x + scale * u(rng), y2 = std::max(0.0, y + scale * u(rng));
      const double lhs = std::pow(std::abs(cs.f(0, x, y) - cs.f(0, x2, y2)), p) +
                         std::pow(std::abs(cs.h(0, x, y) - cs.h(0, x2, y2)), p) +
                         std::pow(std::abs(cs.g(0, x, y) - cs.g(0, x2, y2)), p);
      const double r = std::pow(std::abs(x - x2), p) + std::pow(std::abs(y - y2), p);
      ASSERT_LE(lhs, cs.modulus.rho(r) * (1 + 1e-9) + 1e-300)
          << f.describe() << h.describe() << g.describe();
    }
  }
}

TEST(Registry, ModulusKindFollowsTerms) {
  const auto lin = make_registry_coefficients(TermSpec::linear(0, 1, 1), TermSpec::constant(0),
                                              TermSpec::constant(1), 3);
  EXPECT_EQ(lin.modulus.kind, ModulusKind::Lipschitz);
  const auto lm = make_registry_coefficients(parse_term("log_modulus(b=1)"),
                                             TermSpec::constant(0), TermSpec::constant(1), 3);
  EXPECT_EQ(lm.modulus.kind, ModulusKind::LogModulus);
  expect_kind(ErrorKind::InvalidArgument, [] {
    make_registry_coefficients(TermSpec::constant(0), TermSpec::constant(0),
                               TermSpec::constant(0), 2.0);
  });
}

TEST(Registry, BoundOnlyForBoundedFamilies) {
  const auto b = make_registry_coefficients(TermSpec::constant(-2), parse_term("sinusoidal(b=1)"),
                                            TermSpec::constant(0.5), 3);
  ASSERT_TRUE(b.bound.has_value());
  EXPECT_EQ(*b.bound, 2.0);
  const auto u = make_registry_coefficients(TermSpec::linear(0, 1, 0), TermSpec::constant(0),
                                            TermSpec::constant(0), 3);
  EXPECT_FALSE(u.bound.has_value());
}

TEST(Obstacle, BuildModes) {
  const auto g = make_uniform_grid(1.0, 4);
  ScenarioPath sc;
  sc.grid = g;
  sc.dB = {0.5, -0.25, 0.125, 1.0};
  sc.dQV = {0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(ObstacleSpec::constant(-1).build(sc), GridPath(5, -1.0));
  const auto ito = ObstacleSpec::ito(-1.0, 1.0, 2.0, 1.0).build(sc);
  GridPath expect{-1.0};
  for (int i = 0; i < 4; ++i) expect.push_back(expect.back() + 0.25 + 2.0 * 0.25 + sc.dB[i]);
  EXPECT_EQ(ito, expect);
  auto capped = ObstacleSpec::ito(-1.0, 1.0, 2.0, 1.0);
  capped.cap = 0.5;
  for (double v : capped.build(sc)) EXPECT_LE(v, 0.5);
  EXPECT_EQ(*capped.upper_bound(), 0.5);
  EXPECT_FALSE(ObstacleSpec::ito(0, 1, 0, 0).upper_bound().has_value());
  expect_kind(ErrorKind::InvalidArgument, [&] { ObstacleSpec::from_path({0, 0}).build(sc); });
}

TEST(Obstacle, Parse) {
  EXPECT_EQ(parse_obstacle("-2").value, -2.0);
  EXPECT_EQ(parse_obstacle("constant(value=1.5)").value, 1.5);
  const auto o = parse_obstacle("ito(s0=-1, drift=0.5, qv_drift=0.1, diffusion=0.2, cap=3)");
  EXPECT_EQ(o.mode, ObstacleSpec::Mode::Ito);
  EXPECT_EQ(o.s0, -1.0);
  EXPECT_EQ(o.diffusion, 0.2);
  EXPECT_EQ(*o.cap, 3.0);
  expect_kind(ErrorKind::InvalidArgument, [] { parse_obstacle("wall(value=1)"); });
  expect_kind(ErrorKind::InvalidArgument, [] { parse_obstacle("ito(s1=1)"); });
  expect_kind(ErrorKind::InvalidArgument, [] { parse_obstacle("constant(value=inf)"); });
}

TEST(Truncation, Examples) {
  const auto cs = make_registry_coefficients(TermSpec::linear(0, 1, 0), TermSpec::constant(0.5),
                                             parse_term("sinusoidal(a=1, b=0.1)"), 3);
  const auto big = truncate_coefficients(cs, 1e9, 3);
  for (double x : {-100.0, -1.0, 0.0, 2.0, 1e3})
    for (double k : {0.0, 1.0, 10.0}) {
      EXPECT_EQ(big.f(0, x, k), cs.f(0, x, k));
      EXPECT_EQ(big.h(0, x, k), cs.h(0, x, k));
      EXPECT_EQ(big.g(0, x, k), cs.g(0, x, k));
    }
  const auto one = truncate_coefficients(cs, 1.0, 3);
  EXPECT_EQ(one.f(0, 5.0, 0.0), 1.0);
  EXPECT_EQ(one.f(0, -5.0, 0.0), -1.0);
  EXPECT_LE(one.beta1.constant, std::cbrt(3.0));
  EXPECT_EQ(*one.bound, 1.0);
  EXPECT_EQ(one.family_name, "registry+truncated");
  expect_kind(ErrorKind::InvalidArgument, [&] { truncate_coefficients(cs, 0.0, 3); });
}

TEST(Truncation, PreservesOrder) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-10, 10);
  const auto lo = make_registry_coefficients(TermSpec::linear(-1, 2, -1), TermSpec::constant(0),
                                             TermSpec::constant(1), 3);
  const auto hi = make_registry_coefficients(TermSpec::linear(1, 2, 1), TermSpec::constant(0),
                                             TermSpec::constant(1), 3);
  for (double N : {0.5, 1.0, 3.0, 100.0}) {
    const auto a = truncate_coefficients(lo, N), b = truncate_coefficients(hi, N);
    for (int i = 0; i < 1000; ++i) {
      const double x = u(rng), k = std::abs(u(rng));
      ASSERT_LE(lo.f(0, x, k), hi.f(0, x, k));
      EXPECT_LE(a.f(0, x, k), b.f(0, x, k));
    }
  }
}

TEST(Truncation, ObstacleCap) {
  const auto o = truncate_obstacle(ObstacleSpec::constant(5.0), 2.0);
  EXPECT_EQ(*o.cap, 2.0);
  EXPECT_EQ(truncate_obstacle(o, 3.0).cap, 2.0);
  expect_kind(ErrorKind::InvalidArgument, [] { truncate_obstacle(ObstacleSpec::constant(0), -1); });
}

TEST(Validation, Examples) {
  const auto grid = make_uniform_grid(1.0, 64);
  const auto lin = make_registry_coefficients(TermSpec::linear(0.5, -1.0, 0.3),
                                              TermSpec::linear(0, 0.2, 0),
                                              TermSpec::linear(1, 0.1, 0), 3);
  EXPECT_TRUE(validate_assumptions(lin, 0.0, ObstacleSpec::constant(-1), grid).passed);

  const auto bad = validate_assumptions(lin, 0.0, ObstacleSpec::constant(1), grid);
  EXPECT_FALSE(bad.passed);
  EXPECT_EQ(bad.failure, "obstacle-violation");
  ASSERT_TRUE(bad.time.has_value());
  EXPECT_EQ(*bad.time, 0.0);

  auto neg = lin;
  neg.beta2 = -1.0;
  EXPECT_EQ(validate_assumptions(neg, 0.0, ObstacleSpec::constant(-1), grid).failure,
            "invalid-growth");

  auto small = lin;
  small.beta2 = 0.1;
  EXPECT_EQ(validate_assumptions(small, 0.0, ObstacleSpec::constant(-1), grid).failure,
            "growth-bound");

  auto tight = lin;
  tight.modulus = ModulusSpec::lipschitz(0.01);
  EXPECT_EQ(validate_assumptions(tight, 0.0, ObstacleSpec::constant(-1), grid).failure,
            "modulus-bound");

  EXPECT_EQ(validate_assumptions(lin, 0.0, ObstacleSpec::constant(-1), grid, 2.0).failure,
            "invalid-exponent");
}

TEST(Validation, SymbolicLinearDeclaration) {
  // |a + bx + ck|^p <= 3^(p-1) (|a|^p + |b|^p |x|^p + |c|^p |k|^p), so the linear
  // family passes with beta1 = 3^((p-1)/p)|a| and beta2 = 3^((p-1)/p) max(|b|, |c|).
  const double p = 3.0, a = 0.7, b = -1.3, c = 0.4;
  CoefficientSet cs = make_registry_coefficients(TermSpec::linear(a, b, c),
                                                 TermSpec::constant(0), TermSpec::constant(0), p);
  EXPECT_NEAR(cs.beta1.constant, std::pow(3.0, (p - 1) / p) * std::abs(a), 1e-14);
  EXPECT_NEAR(cs.beta2, std::pow(3.0, (p - 1) / p) * std::abs(b), 1e-14);
  EXPECT_TRUE(
      validate_assumptions(cs, 0.0, ObstacleSpec::constant(0), make_uniform_grid(1, 8)).passed);
}
