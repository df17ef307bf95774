#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace airdisk;
using airdisk::testing::make_instance;

namespace {

// Golden-section minimum of a unimodal function on [lo, hi].
template <class F>
double golden_min(F f, double lo, double hi) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  for (int it = 0; it < 300; ++it) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  return f((a + b) / 2.0);
}

}  // namespace

TEST(SolveLb, ZeroCostSingleGroup) {
  const auto g = group_messages(make_instance({1.0}, {0.0}));
  const auto sol = solve_lb(g, 1.0, 1);
  EXPECT_NEAR(sol.lambda, 1.0, 1e-12);
  EXPECT_NEAR(sol.tau[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.value, 0.5, 1e-12);
  EXPECT_TRUE(sol.binding);
}

TEST(SolveLb, UnconstrainedSingleGroup) {
  const auto g = group_messages(make_instance({1.0}, {1.0}));
  const auto sol = solve_lb(g, 1.0, 1);
  EXPECT_EQ(sol.lambda, 0.0);
  EXPECT_FALSE(sol.binding);
  EXPECT_NEAR(sol.tau[0], std::sqrt(2.0), 1e-12);
  // independent 1-d minimization of tau/2 + 1/tau over tau >= 1
  const double oracle = golden_min([](double t) { return t / 2.0 + 1.0 / t; }, 1.0, 10.0);
  EXPECT_NEAR(oracle, 1.4142135623730951, 1e-9);
  EXPECT_NEAR(sol.value, 1.4142135623730951, 1e-12);
}

TEST(SolveLb, TwoZeroCostGroups) {
  const auto g = group_messages(make_instance({0.75, 0.25}, {0, 0}));
  const auto sol = solve_lb(g, 1.0, 1);
  // Oracle: minimize 0.375 t1 + 0.125 t2 on 1/t1 + 1/t2 = 1 by golden section
  // over u = 1/t1 in (0,1).
  const double oracle = golden_min(
      [](double u) { return 0.375 / u + 0.125 / (1.0 - u); }, 1e-9, 1.0 - 1e-9);
  EXPECT_NEAR(oracle, 0.9330127018922193, 1e-9);
  EXPECT_NEAR(sol.value, 0.9330127018922193, 1e-10);
  EXPECT_NEAR(sol.lambda, 1.8660254037844386, 1e-10);
  EXPECT_NEAR(sol.tau[0], 1.5773502691896257, 1e-10);
  EXPECT_NEAR(sol.tau[1], 2.7320508075688772, 1e-10);
}

TEST(ClosedForm, Examples) {
  EXPECT_NEAR(lb_zero_cost_closed_form(group_messages(make_instance({0.75, 0.25}, {0, 0})), 1.0),
              0.9330127018922193, 1e-15);
  const auto one = group_messages(make_instance({1.0}, {0.0}));
  EXPECT_DOUBLE_EQ(lb_zero_cost_closed_form(one, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(lb_zero_cost_closed_form(one, 0.5), 1.0);
  EXPECT_THROW(lb_zero_cost_closed_form(group_messages(make_instance({1.0}, {1.0})), 1.0), Error);
}

TEST(SolveLb, Errors) {
  EXPECT_THROW(solve_lb(Grouping{}, 1.0, 1), Error);
  const auto one = group_messages(make_instance({1.0}, {0.0}));
  EXPECT_THROW(solve_lb(one, 0.0, 1), Error);
  EXPECT_THROW(solve_lb(one, -1.0, 1), Error);
}

TEST(SolveLb, KktResidualsOnRandomGroupings) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto inst = airdisk::testing::random_grouped_instance(rng, 1 + rng() % 50, 6, rep % 3 == 0 ? 0.0 : 5.0);
    const auto g = group_messages(inst);
    const double alpha = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const int W = 1 + static_cast<int>(rng() % 4);
    const auto sol = solve_lb(g, alpha, W);
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double lhs = static_cast<double>(g[j].size()) * sol.tau[j];
      const double rhs = std::sqrt((2.0 * g[j].c + sol.lambda) / g[j].p);
      ASSERT_LE(std::abs(lhs - rhs), 1e-9 * rhs);
    }
    if (sol.binding) {
      ASSERT_LE(std::abs(sol.rate_sum() - alpha * W), 1e-9 * alpha * W);
    } else {
      ASSERT_EQ(sol.lambda, 0.0);
      ASSERT_LE(sol.rate_sum(), alpha * W);
    }
    bool zero = true;
    for (const auto& grp : g.groups) zero = zero && grp.c == 0.0;
    if (zero) {
      const double cf = lb_zero_cost_closed_form(g, alpha, W);
      ASSERT_LE(std::abs(sol.value - cf), 1e-9 * cf);
    }
  }
}

TEST(SolveLb, MonotoneInAlpha) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    const auto g = group_messages(airdisk::testing::random_grouped_instance(rng, 1 + rng() % 10, 4, 3.0));
    double prev = std::numeric_limits<double>::infinity();
    for (double a = 0.05; a <= 1.0 + 1e-12; a += 0.05) {
      const double v = solve_lb(g, a, 1).value;
      EXPECT_TRUE(leq_tol(v, prev, 1e-12));
      prev = v;
    }
  }
}

TEST(SolveLb, BeatsPerturbedFeasiblePoints) {
  // The returned tau must beat any other feasible tau.
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const auto g = group_messages(airdisk::testing::random_grouped_instance(rng, 1 + rng() % 6, 4, 2.0));
    const auto sol = solve_lb(g, 1.0, 1);
    std::uniform_real_distribution<double> jitter(0.8, 1.25);
    for (int k = 0; k < 20; ++k) {
      auto tau = sol.tau;
      for (auto& t : tau) t *= jitter(rng);
      double rate = 0.0;
      for (double t : tau) rate += 1.0 / t;
      if (rate > 1.0) {
        for (auto& t : tau) t *= rate;
      }
      EXPECT_TRUE(leq_tol(sol.value, lb_objective(g, tau), 1e-12));
    }
  }
}
