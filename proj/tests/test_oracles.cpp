#include <gtest/gtest.h>

#include "hopf/oracles.hpp"
#include "hopf/solver.hpp"
#include "test_util.hpp"

namespace hopf {
namespace {

using test::Vec;
using test::vec;
using H = Hamiltonian<double>;
using J = InitialData<double>;

TEST(EllipsoidL1Oracle, Examples) {
  auto r = oracles::ellipsoid_l1(vec({2, 0.5}), 1.0, vec({1, 1}));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.gradient, vec({1, 0}));
  r = oracles::ellipsoid_l1(vec({0.5, -1}), 1.0, vec({1, 3}));
  EXPECT_EQ(r.value, -0.5);
  EXPECT_EQ(r.gradient, vec({0, 0}));
  const Vec x = vec({1.5, -2, 0.25});
  const Vec a = vec({1, 2, 0.5});
  EXPECT_NEAR(oracles::ellipsoid_l1(x, 0.0, a).value, eval_initial(J::ellipsoid_level(a), x), 1e-15);
  EXPECT_NEAR(oracles::ellipsoid_l1(x, 1e-12, a).value, eval_initial(J::ellipsoid_level(a), x), 1e-10);
  EXPECT_THROW(oracles::ellipsoid_l1(x, -1.0, a), InvalidArgument);
}

TEST(SphereL2Oracle, Examples) {
  EXPECT_EQ(oracles::sphere_l2_outward(vec({3, 0}), 1.0), 1.5);
  EXPECT_NEAR(oracles::sphere_l2_outward(Vec(vec({0.6, 0.8}) * 3.5), 2.5), 0.0, 1e-15);
  EXPECT_EQ(oracles::sphere_l2_outward(vec({0, 0}), 1.0), -0.5);
}

TEST(InwardOracles, Examples) {
  EXPECT_DOUBLE_EQ(oracles::ellipsoid_l1_inward(vec({0, 0}), 1.0, vec({2, 2})), -0.25);
  const Vec x = vec({0.3, -0.7, 1.1});
  const Vec a = vec({1, 2, 0.5});
  EXPECT_DOUBLE_EQ(oracles::ellipsoid_l1_inward(x, 0.0, a), eval_initial(J::ellipsoid_level(a), x));
  EXPECT_DOUBLE_EQ(oracles::sphere_l2_inward(x, 0.0), 0.5 * x.squaredNorm() - 0.5);
}

TEST(InwardOracles, LevelSetExtinction) {
  std::mt19937_64 gen(60);
  const Vec a = Vec::Ones(3);
  for (int s = 0; s < 200; ++s) {
    const Vec x = test::uniform(gen, 3, -2, 2);
    EXPECT_GE(oracles::ellipsoid_l1_inward(x, 1.0, a), 0.0);
    EXPECT_GT(oracles::sphere_l2_inward(x, test::uniform(gen, 1.0 + 1e-9, 5)), 0.0);
  }
}

// The paper's text places the inward zero set at |x| = t - 1; the formula
// puts it at |x| = 1 - t.
TEST(InwardOracles, SphereZeroSetFollowsFormula) {
  for (double t : {0.0, 0.25, 0.5, 0.9}) {
    const Vec x = vec({0.6, 0.8}) * (1 - t);
    EXPECT_NEAR(oracles::sphere_l2_inward(x, t), 0.0, 1e-15);
  }
}

TEST(BruteForceHopf, Examples) {
  const Vec x = vec({3, -1.5});
  const auto e = evaluate(x, 1.0, H::l1(), J::half_sq_l2());
  const auto bf = oracles::brute_force_hopf(x, 1.0, H::l1(), J::half_sq_l2());
  EXPECT_NEAR(bf.value, e.value, 1e-4);
  EXPECT_FALSE(bf.boundary_incumbent);

  const auto zero = oracles::brute_force_hopf(Vec(Vec::Zero(2)), 2.0, H::l2(), J::half_sq_l2());
  EXPECT_EQ(zero.minimizer, Vec::Zero(2));

  const auto ell = oracles::brute_force_hopf(vec({2.5, -0.4}), 1.0, H::l1(), J::ellipsoid_level(vec({1, 2})));
  EXPECT_NEAR(ell.value, oracles::ellipsoid_l1(vec({2.5, -0.4}), 1.0, vec({1, 2})).value, 1e-4);
}

TEST(BruteForceHopf, FlagsGridThatDoesNotBracket) {
  oracles::BruteForceOptions opts;
  opts.grid_radius = 1.0;
  const auto r = oracles::brute_force_hopf(vec({8, 0}), 1.0, H::l1(), J::half_sq_l2(), opts);
  EXPECT_TRUE(r.boundary_incumbent);
  EXPECT_THROW(oracles::brute_force_minimize<double>(4, [](const Vec&) { return 0.0; }), InvalidArgument);
}

TEST(BruteForceHopf, AgreesWithClosedForms) {
  std::mt19937_64 gen(61);
  const Vec a = vec({1, 2});
  for (int s = 0; s < 50; ++s) {
    const Vec x = test::uniform(gen, 2, -10, 10);
    const double t = test::uniform(gen, 0, 10);
    const auto e1 = oracles::brute_force_hopf(x, t, H::l1(), J::ellipsoid_level(a));
    EXPECT_NEAR(e1.value, oracles::ellipsoid_l1(x, t, a).value, 2e-4);
    const auto e2 = oracles::brute_force_hopf(x, t, H::l2(), J::ellipsoid_level(Vec::Ones(2)));
    EXPECT_NEAR(e2.value, oracles::sphere_l2_outward(x, t), 2e-4);
  }
}

// phi_t + H(grad phi) = 0 away from the kinks, by central differences.
TEST(OraclePde, ConvexOraclesSatisfyTheirEquation) {
  std::mt19937_64 gen(62);
  const double h = 1e-4;
  const Vec a = vec({1, 2, 0.5});
  int checked = 0;
  for (int s = 0; s < 200; ++s) {
    const Vec x = test::uniform(gen, 3, -10, 10);
    const double t = test::uniform(gen, 0.5, 10);
    auto l1 = [&](const Vec& y, double tt) { return oracles::ellipsoid_l1(y, tt, a).value; };
    auto l2 = [&](const Vec& y, double tt) { return oracles::sphere_l2_outward(y, tt); };
    // Skip points within a step of a kink.
    if (((x.array().abs() - t).abs() < 10 * h).any() || std::abs(x.norm() - t) < 10 * h) continue;
    const double r1 = (l1(x, t + h) - l1(x, t - h)) / (2 * h) +
                      test::central_difference([&](const Vec& y) { return l1(y, t); }, x, h).lpNorm<1>();
    const double r2 =
        (l2(x, t + h) - l2(x, t - h)) / (2 * h) +
        test::central_difference([&](const Vec& y) { return l2(y, t); }, x, h).norm();
    EXPECT_LE(std::abs(r1), 1e-3);
    EXPECT_LE(std::abs(r2), 1e-3);
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(OraclePde, InwardOraclesUseNegatedHamiltonian) {
  std::mt19937_64 gen(63);
  const double h = 1e-4;
  const Vec a = vec({1, 2, 0.5});
  for (int s = 0; s < 50; ++s) {
    const Vec x = test::uniform(gen, 3, -3, 3);
    const double t = test::uniform(gen, 0.5, 2);
    if ((x.array().abs() < 10 * h).any()) continue;
    auto f = [&](const Vec& y, double tt) { return oracles::ellipsoid_l1_inward(y, tt, a); };
    const double r = (f(x, t + h) - f(x, t - h)) / (2 * h) -
                     test::central_difference([&](const Vec& y) { return f(y, t); }, x, h).lpNorm<1>();
    EXPECT_LE(std::abs(r), 1e-3);
  }
}

}  // namespace
}  // namespace hopf
