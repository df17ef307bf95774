#pragma once

// Density-constrained convex relaxation of the broadcast problem.
//
//   minimize   sum_j p_j g_j^2 tau_j / 2 + c_j / tau_j
//   subject to sum_j 1 / tau_j <= alpha * W
//
// The optimum has g_j tau_j = sqrt((2 c_j + lambda) / p_j) for the multiplier
// lambda of the density constraint.

#include <cmath>
#include <cstddef>
#include <vector>

#include "airdisk/error.hpp"
#include "airdisk/model.hpp"

namespace airdisk {

struct LbSolution {
  std::vector<double> tau;  // per-group period, in slots
  double lambda = 0.0;
  double value = 0.0;
  double alpha = 1.0;
  int W = 1;
  bool binding = false;
  int iterations = 0;

  double rate_sum() const {
    double s = 0.0;
    for (double t : tau) s += 1.0 / t;
    return s;
  }
};

inline double lb_objective(const Grouping& g, const std::vector<double>& tau) {
  double v = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double gj = static_cast<double>(g[j].size());
    v += g[j].p * gj * gj * tau[j] / 2.0 + g[j].c / tau[j];
  }
  return v;
}

inline LbSolution solve_lb(const Grouping& g, double alpha, int W) {
  if (g.empty()) fail(ErrorCode::usage, "lower bound of an empty grouping");
  if (!(alpha > 0.0)) fail(ErrorCode::usage, "density alpha must be positive");
  if (W < 1) fail(ErrorCode::usage, "channel count W < 1");
  for (const auto& grp : g.groups) {
    if (!(grp.p > 0.0)) fail(ErrorCode::usage, "group with non-positive probability");
  }
  const double budget = alpha * W;

  LbSolution sol;
  sol.alpha = alpha;
  sol.W = W;
  sol.tau.resize(g.size());

  auto rates = [&](double lambda) {
    double s = 0.0;
    for (const auto& grp : g.groups) {
      s += static_cast<double>(grp.size()) * std::sqrt(grp.p / (2.0 * grp.c + lambda));
    }
    return s;
  };
  auto fill_tau = [&](double lambda) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      sol.tau[j] = std::sqrt((2.0 * g[j].c + lambda) / g[j].p) / static_cast<double>(g[j].size());
    }
  };

  bool any_free = false;
  for (const auto& grp : g.groups) any_free = any_free || grp.c == 0.0;
  if (!any_free && rates(0.0) <= budget) {
    sol.lambda = 0.0;
    sol.binding = false;
    fill_tau(0.0);
    sol.value = lb_objective(g, sol.tau);
    return sol;
  }

  double weight = 0.0;
  for (const auto& grp : g.groups) weight += static_cast<double>(grp.size()) * std::sqrt(grp.p);
  double lo = 0.0;
  double hi = (weight / budget) * (weight / budget);
  int it = 0;
  while (hi - lo > 1e-12 * hi) {
    if (++it > 200) fail(ErrorCode::numeric, "multiplier bisection did not converge");
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (rates(mid) > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // hi keeps the density constraint satisfied.
  sol.lambda = hi;
  sol.binding = true;
  sol.iterations = it;
  fill_tau(hi);
  sol.value = lb_objective(g, sol.tau);
  return sol;
}

/// (sum_j g_j sqrt(p_j))^2 / (2 alpha W); valid only when every cost is zero.
inline double lb_zero_cost_closed_form(const Grouping& g, double alpha, int W = 1) {
  if (g.empty()) fail(ErrorCode::usage, "lower bound of an empty grouping");
  if (!(alpha > 0.0)) fail(ErrorCode::usage, "density alpha must be positive");
  double weight = 0.0;
  for (const auto& grp : g.groups) {
    if (grp.c != 0.0) fail(ErrorCode::usage, "closed form requires zero costs");
    weight += static_cast<double>(grp.size()) * std::sqrt(grp.p);
  }
  return weight * weight / (2.0 * alpha * W);
}

}  // namespace airdisk
