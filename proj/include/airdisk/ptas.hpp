#pragma once

// The approximation pipeline: rounding, the A/B/C partition, bounded-period
// exhaustive scheduling of A, composition with group round-robin for B,
// insertion of the negligible set C, and extraction of the cheapest block.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "airdisk/error.hpp"
#include "airdisk/evaluate.hpp"
#include "airdisk/lower_bound.hpp"
#include "airdisk/model.hpp"
#include "airdisk/numeric.hpp"
#include "airdisk/oracle.hpp"
#include "airdisk/schedule.hpp"
#include "airdisk/schedulers.hpp"
#include "airdisk/transforms.hpp"

namespace airdisk {

struct TheoreticalConstants {
  double T_eps = 0.0;
  double kappa_eps = 0.0;
};

/// T(eps) = 40 ln(1 + 4/eps) / (eps^4 (1 - eps/6)) * max(C, 1) and
/// kappa(eps) = 2 W T(eps) / eps.
inline TheoreticalConstants theoretical_constants(double eps, double cost_bound, int W) {
  if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorCode::usage, "epsilon must lie in (0, 1]");
  TheoreticalConstants out;
  out.T_eps = 40.0 * std::log(1.0 + 4.0 / eps) / (std::pow(eps, 4) * (1.0 - eps / 6.0)) *
              std::max(cost_bound, 1.0);
  out.kappa_eps = 2.0 * W * out.T_eps / eps;
  return out;
}

struct PtasConfig {
  double epsilon = 0.1;
  double kappa = 2.0;                    // B groups need g >= kappa |A|^2
  std::size_t a_period_cap = 8;          // longest period searched for A
  std::size_t a_size_cap = 4;            // most messages allowed in A
  std::size_t alpha_grid_cap = 32;       // most densities tried for A
  std::size_t composite_cap = 200'000;   // longest A+B period
  std::size_t period_cap = kDefaultPeriodCap;
  std::optional<int> j0;                 // default ceil(4 ln(1/eps) / ln(1+eps))
  double mu = 2.0;
  std::optional<std::size_t> repetitions;  // periods of S_A concatenated, default 8m^2+(4C+1)m
  std::uint64_t seed = 0;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0 / 7.0)) fail(ErrorCode::usage, "epsilon must lie in (0, 1/7)");
    if (!(kappa > 0.0)) fail(ErrorCode::usage, "kappa must be positive");
    if (a_period_cap < 1 || a_size_cap < 1 || alpha_grid_cap < 1 || composite_cap < 1 || period_cap < 1) {
      fail(ErrorCode::usage, "caps must be positive");
    }
    if (!(mu > 1.0)) fail(ErrorCode::usage, "mu must exceed 1");
  }

  int j0_value() const {
    return j0.value_or(static_cast<int>(std::ceil(4.0 * std::log(1.0 / epsilon) / std::log1p(epsilon))));
  }
};

struct Certificate {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

inline nlohmann::json to_json(const Certificate& c) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"name", c.name}, {"value", num(c.value)}, {"threshold", num(c.threshold)}, {"passed", c.passed}};
}

// ---------------------------------------------------------------------------
// Negligible set

struct NegligibilityResult {
  bool passed = true;
  double value = 0.0;      // LB over C at one channel, density eps / (10 max(C,1))
  double threshold = 0.0;  // (3 eps / 10) lb_ref
};

inline double negligible_density(double eps, double cost_bound) {
  return eps / (10.0 * std::max(cost_bound, 1.0));
}

inline NegligibilityResult negligibility_check(const Grouping& c, double eps, double cost_bound, double lb_ref) {
  NegligibilityResult out;
  out.threshold = 0.3 * eps * lb_ref;
  if (!c.empty()) out.value = solve_lb(c, negligible_density(eps, cost_bound), 1).value;
  out.passed = leq_tol(out.value, out.threshold);
  return out;
}

// ---------------------------------------------------------------------------
// Partition

struct Partition {
  std::vector<std::size_t> A, B, C;  // group indices
  std::vector<std::size_t> A1, A2, C1, C2;
  double kappa = 0.0;
  std::size_t a_size = 0;
  int block = 0;  // 0: no block, every large group goes to B
  int j0 = 0;
  double weight_total = 0.0;
  double weight_block = 0.0;
  std::vector<Certificate> certificates;
  bool ok = false;
  std::string failed;  // first failed certificate when !ok

  Grouping groups_of(const Grouping& g, const std::vector<std::size_t>& which) const {
    return g.subset(which);
  }
};

struct PartitionOptions {
  double epsilon = 0.1;
  double kappa = 2.0;
  double lb_ref = 0.0;
  double cost_bound = 0.0;
  std::size_t a_size_cap = 4;
  int j0 = 0;
  double mu = 2.0;
};

namespace detail {

inline void fill_partition_certificates(Partition& p, const Grouping& g, const PartitionOptions& o) {
  p.certificates.clear();
  p.a_size = 0;
  for (auto j : p.A) p.a_size += g[j].size();
  const double a2 = static_cast<double>(p.a_size) * static_cast<double>(p.a_size);

  double min_b = std::numeric_limits<double>::infinity();
  for (auto j : p.B) min_b = std::min(min_b, static_cast<double>(g[j].size()));
  const auto neg = negligibility_check(g.subset(p.C), o.epsilon, o.cost_bound, o.lb_ref);

  p.certificates.push_back({"a_size", static_cast<double>(p.a_size), static_cast<double>(o.a_size_cap),
                            p.a_size <= o.a_size_cap});
  p.certificates.push_back({"b_large", min_b, o.kappa * a2, min_b >= o.kappa * a2});
  p.certificates.push_back({"negligible", neg.value, neg.threshold, neg.passed});
  p.certificates.push_back({"pigeonhole", p.weight_block, o.epsilon / 20.0 * p.weight_total,
                            leq_tol(p.weight_block, o.epsilon / 20.0 * p.weight_total)});
  p.ok = true;
  p.failed.clear();
  for (const auto& c : p.certificates) {
    if (!c.passed) {
      p.ok = false;
      p.failed = c.name;
      break;
    }
  }
}

}  // namespace detail

/// Splits the groups of a rounded instance into A (few important messages),
/// B (large groups) and C (negligible).
///
/// Small groups (g <= (1+eps)^(j/4)) go to A1 when j <= j0 and to C1
/// otherwise. Large groups are cut at a block of exponents
/// [mu^h, mu^(h+1)): below it they join A, inside it C, above it B. Block 0
/// stands for no block (every large group in B). Blocks with weight
/// sum g sqrt(p) at most eps/20 of the total are eligible; the first eligible
/// block whose certificates all hold is chosen, else the first eligible one
/// with its failing certificate recorded.
inline Partition build_partition(const Grouping& g, const PartitionOptions& o) {
  if (!(o.epsilon > 0.0 && o.epsilon < 1.0)) fail(ErrorCode::usage, "epsilon must lie in (0,1)");
  for (const auto& grp : g.groups) {
    if (grp.j < 1) fail(ErrorCode::usage, "partition needs a grouping of a rounded instance");
  }
  const double one_eps = 1.0 + o.epsilon;
  std::vector<std::size_t> small_a, small_c, large;
  double total = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    total += g[j].weight();
    const bool small = static_cast<double>(g[j].size()) <= std::pow(one_eps, g[j].j / 4.0);
    if (!small) {
      large.push_back(j);
    } else if (g[j].j <= o.j0) {
      small_a.push_back(j);
    } else {
      small_c.push_back(j);
    }
  }

  const int blocks = static_cast<int>(std::ceil(20.0 / o.epsilon - 1e-9));
  std::optional<Partition> first_eligible;
  for (int h = 0; h <= blocks; ++h) {
    Partition p;
    p.kappa = o.kappa;
    p.block = h;
    p.j0 = o.j0;
    p.weight_total = total;
    p.A1 = small_a;
    p.C1 = small_c;
    const double lo = h == 0 ? 0.0 : std::pow(o.mu, h);
    const double hi = h == 0 ? 0.0 : std::pow(o.mu, h + 1);
    for (auto j : large) {
      const double e = static_cast<double>(g[j].j);
      if (h > 0 && e < lo) {
        p.A2.push_back(j);
      } else if (h > 0 && e < hi) {
        p.C2.push_back(j);
        p.weight_block += g[j].weight();
      } else {
        p.B.push_back(j);
      }
    }
    if (!leq_tol(p.weight_block, o.epsilon / 20.0 * total)) continue;
    p.A = p.A1;
    p.A.insert(p.A.end(), p.A2.begin(), p.A2.end());
    std::sort(p.A.begin(), p.A.end());
    p.C = p.C1;
    p.C.insert(p.C.end(), p.C2.begin(), p.C2.end());
    std::sort(p.C.begin(), p.C.end());
    detail::fill_partition_certificates(p, g, o);
    if (p.ok) return p;
    if (!first_eligible) first_eligible = std::move(p);
  }
  // Block 0 has zero weight, so some block was always eligible.
  return std::move(*first_eligible);
}

/// build_partition that reports a failed certificate as an error.
inline Partition partition(const Grouping& g, const PartitionOptions& o) {
  auto p = build_partition(g, o);
  if (!p.ok) {
    for (const auto& c : p.certificates) {
      if (c.name == p.failed) {
        fail(ErrorCode::certificate, "partition certificate '" + c.name + "' failed: value " +
                                         std::to_string(c.value) + ", threshold " + std::to_string(c.threshold));
      }
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Bounded-period schedule of A

struct BoundedResult {
  Schedule schedule;
  double cost = 0.0;  // continuous COST restricted to A
  std::size_t searched = 0;
};

/// Cheapest periodic schedule of the messages in `a` over W channels with
/// period T <= P and exactly floor(alpha T W) busy cells, every message of A
/// at least once.
inline BoundedResult optimal_bounded_schedule(const Instance& inst, std::span<const MessageIndex> a,
                                              Rational alpha, std::size_t P, int W,
                                              std::optional<double> budget = std::nullopt) {
  if (a.empty()) fail(ErrorCode::usage, "bounded search needs at least one message");
  if (alpha.num == 0 || alpha.num > alpha.den) fail(ErrorCode::usage, "alpha must lie in (0, 1]");
  if (P < 1) fail(ErrorCode::usage, "period cap must be positive");
  const detail::ColumnAlphabet columns(a, W);
  const double states = std::pow(static_cast<double>(columns.size()), static_cast<double>(P));
  const double limit = budget.value_or(search_budget());
  if (states > limit) {
    fail(ErrorCode::budget, "bounded search space " + std::to_string(states) + " exceeds budget " +
                                std::to_string(limit));
  }
  const auto found = detail::search_periodic(
      inst, a, W, P, [&](std::size_t T) -> std::optional<std::size_t> {
        return static_cast<std::size_t>(alpha.floor_times(T * static_cast<std::size_t>(W)));
      });
  if (!found.best) {
    fail(ErrorCode::infeasible, "no period <= " + std::to_string(P) + " fits all of A at this density");
  }
  return {*found.best, found.cost, found.searched};
}

// ---------------------------------------------------------------------------
// A + B composition

struct AbResult {
  Schedule schedule;
  Schedule s_alpha;            // one period of the A schedule
  std::size_t alpha_x = 0;     // alpha0 = alpha_x / alpha_den
  std::size_t alpha_den = 1;
  double beta = 1.0;           // empty fraction of S_alpha, the density left to B
  double objective = 0.0;      // COST(S_alpha, A) + LB(B, beta)
  std::size_t repetitions = 1;
  std::size_t b_greedy_length = 0;
  bool b_greedy_forced = false;
  std::size_t grid_size = 0;
  std::vector<Certificate> certificates;
};

struct AbOptions {
  std::size_t a_period_cap = 8;
  std::size_t alpha_grid_cap = 32;
  std::size_t composite_cap = 200'000;
  std::size_t period_cap = kDefaultPeriodCap;
  std::optional<std::size_t> repetitions;
  std::size_t period_multiple = 1;  // composite period is made a multiple of this
};

namespace detail {

inline std::vector<MessageIndex> members_of(const Grouping& g) { return g.catalog_members(); }

/// Greedy lengths t in [0, t_max] after which every cursor is at its first
/// member.
inline std::vector<char> aligned_lengths(const Grouping& g, const std::vector<double>& tau, std::size_t t_max) {
  std::vector<char> out(t_max + 1, 0);
  auto st = GreedyState::warm_up(g);
  const bool dummy = needs_dummy(tau);
  for (std::size_t t = 0;; ++t) {
    bool aligned = true;
    for (std::size_t j = 0; j < g.size() && aligned; ++j) aligned = st.cursor(j) == 0;
    out[t] = aligned;
    if (t == t_max) break;
    st.advance(g, greedy_step(st, g, tau, dummy));
  }
  return out;
}

}  // namespace detail

/// Schedules A exhaustively at a grid of densities and fills the remaining
/// cells with a periodic greedy schedule of B mapped into them in order.
///
/// `a_groups` and `b_groups` carry the rounded (p, c) values used for the
/// lower bound and the greedy scores; the exact costs driving every choice are
/// taken on `inst`.
inline AbResult schedule_ab(const Instance& inst, const Grouping& a_groups, const Grouping& b_groups,
                            const AbOptions& opt) {
  const int W = inst.channels();
  const auto a = detail::members_of(a_groups);
  const std::size_t m = inst.size();
  if (a.empty() && b_groups.empty()) fail(ErrorCode::usage, "nothing to schedule");

  struct Candidate {
    Schedule s;
    std::size_t x = 0;
    double beta = 1.0;
    double objective = std::numeric_limits<double>::infinity();
    std::optional<LbSolution> lb;
  };
  std::optional<Candidate> best;

  AbResult res;
  if (a.empty()) {
    Candidate c;
    c.s = Schedule(1, W);
    c.beta = 1.0;
    c.lb = solve_lb(b_groups, 1.0, W);
    c.objective = c.lb->value;
    best = std::move(c);
    res.alpha_x = 0;
    res.alpha_den = 1;
  } else {
    const std::size_t asz = a.size();
    const std::size_t den = static_cast<std::size_t>(W) * opt.a_period_cap * asz * asz;
    std::vector<std::size_t> xs;
    if (den - 1 <= opt.alpha_grid_cap) {
      for (std::size_t x = 1; x < den; ++x) xs.push_back(x);
    } else {
      for (std::size_t i = 1; i <= opt.alpha_grid_cap; ++i) {
        xs.push_back(std::max<std::size_t>(1, (i * den + (opt.alpha_grid_cap + 1) / 2) / (opt.alpha_grid_cap + 1)));
      }
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    }
    if (b_groups.empty()) xs.push_back(den);
    res.alpha_den = den;
    res.grid_size = xs.size();
    for (auto x : xs) {
      BoundedResult sa;
      try {
        sa = optimal_bounded_schedule(inst, a, Rational::of(x, den), opt.a_period_cap, W);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::infeasible) continue;
        throw;
      }
      const std::size_t empty = sa.schedule.length() * static_cast<std::size_t>(W) - sa.schedule.busy_cells();
      if (!b_groups.empty() && empty == 0) continue;
      Candidate c;
      c.x = x;
      c.beta = static_cast<double>(empty) / static_cast<double>(sa.schedule.length() * W);
      const auto contrib = exact_contribution(sa.schedule, inst, a);
      c.objective = contrib.ert + 0.5 * contrib.prob + contrib.bc;
      if (!b_groups.empty()) {
        c.lb = solve_lb(b_groups, c.beta, W);
        c.objective += c.lb->value;
      }
      c.s = std::move(sa.schedule);
      if (!best || c.objective < best->objective) best = std::move(c);
    }
    if (!best) fail(ErrorCode::infeasible, "no density on the grid admits a schedule of A");
    res.alpha_x = best->x;
  }

  res.s_alpha = best->s;
  res.beta = best->beta;
  res.objective = best->objective;
  const std::size_t Ta = res.s_alpha.length();
  const std::size_t mult = std::max<std::size_t>(1, opt.period_multiple);
  const std::size_t step = mult / std::gcd(mult, Ta);

  if (b_groups.empty()) {
    res.repetitions = step;
    res.schedule = unroll(res.s_alpha, step, opt.period_cap);
  } else {
    const std::size_t E = Ta * static_cast<std::size_t>(W) - res.s_alpha.busy_cells();
    std::vector<double> tau = best->lb->tau;
    // one-channel periods in the time base of the empty cells
    for (auto& t : tau) t *= static_cast<double>(E) / static_cast<double>(Ta);
    // rounding can leave the rate sum a hair above one
    const double rates = detail::rate_sum(tau);
    if (rates > 1.0) {
      for (auto& t : tau) t *= rates;
    }

    const double C = inst.cost_bound();
    const double md = static_cast<double>(m);
    const auto paper_reps = static_cast<std::size_t>(std::ceil(8.0 * md * md + (4.0 * C + 1.0) * md));
    std::size_t r0 = opt.repetitions.value_or(paper_reps);
    r0 = std::min(r0, std::max<std::size_t>(1, opt.composite_cap / Ta));
    const std::size_t mb = b_groups.message_count();
    // S_B must be longer than its two opening and closing blocks
    const std::size_t r_min = (2 * mb + 1 + E - 1) / E;
    r0 = std::max(r0, r_min);
    r0 = (r0 + step - 1) / step * step;

    // Prefer a repetition count at which the greedy cursors realign.
    std::size_t reps = r0;
    {
      const std::size_t lo = std::max(r_min, r0 / 2);
      const auto flags = detail::aligned_lengths(b_groups, tau, r0 * E - 2 * mb);
      for (std::size_t r = r0; r >= lo && r >= step; r -= step) {
        if (r * E < 2 * mb + 1) break;
        if (flags[r * E - 2 * mb]) {
          reps = r;
          break;
        }
      }
    }
    res.repetitions = reps;
    res.b_greedy_length = reps * E - 2 * mb;
    res.b_greedy_forced = res.b_greedy_length < periodic_greedy_min_t(b_groups);
    const auto sb = periodic_greedy(b_groups, tau, res.b_greedy_length, true);
    const auto mapped = map_into_reserved(sb, ReservedSlots::idle_cells_of(res.s_alpha), opt.period_cap);
    const auto base = unroll(res.s_alpha, reps, opt.period_cap);
    res.schedule = overlay(base, mapped);

    // density accounting and the mapping identity for the broadcast cost
    const std::size_t cells = res.schedule.length() * static_cast<std::size_t>(W);
    const std::size_t a_cells = base.busy_cells();
    const std::size_t b_cells = mapped.busy_cells();
    const std::size_t idle = cells - res.schedule.busy_cells();
    res.certificates.push_back({"density_accounting", static_cast<double>(a_cells + b_cells + idle),
                                static_cast<double>(cells), a_cells + b_cells + idle == cells});
    const double bc_total = exact_cost_finite(res.schedule, inst).bc;
    const double bc_a = exact_cost_finite(res.s_alpha, inst).bc;
    const double bc_b = exact_cost_finite(sb, inst.with_channels(1)).bc;
    const double bc_expect = bc_a + res.beta * W * bc_b;
    res.certificates.push_back({"bc_identity", bc_total, bc_expect,
                                std::abs(bc_total - bc_expect) <= 1e-9 * std::max(1.0, bc_expect)});
  }
  return res;
}

// ---------------------------------------------------------------------------
// Negligible insertion

struct InsertResult {
  Schedule schedule;
  std::size_t offset = 0;      // chosen x, 0 when C is empty
  std::size_t kappa = 0;       // insertion spacing
  std::size_t c_length = 0;    // period of the C schedule
  bool c_greedy_forced = false;
};

inline std::size_t negligible_spacing(double eps, double cost_bound) {
  return static_cast<std::size_t>(std::ceil(10.0 * std::max(cost_bound, 1.0) / eps - 1e-9)) - 1;
}

/// Stretches `s_ab` with one idle column every kappa = ceil(10 max(C,1)/eps) - 1
/// slots and fills channel 0 of those columns with a periodic greedy schedule
/// of C, choosing the cheapest offset.
inline InsertResult insert_negligible(const Schedule& s_ab, const Grouping& c, double eps, double cost_bound,
                                      const Instance& inst, std::size_t period_cap = kDefaultPeriodCap) {
  InsertResult res;
  if (c.empty()) {
    res.schedule = s_ab;
    return res;
  }
  const std::size_t kappa = std::max<std::size_t>(1, negligible_spacing(eps, cost_bound));
  res.kappa = kappa;
  const auto lb = solve_lb(c, negligible_density(eps, cost_bound), 1);
  // Inserted columns come once every kappa+1 slots; express the periods in
  // that time base, slowing down only if the rates do not fit.
  const double scale = std::max(1.0 / static_cast<double>(kappa + 1), lb.rate_sum());
  std::vector<double> tau = lb.tau;
  for (auto& t : tau) t *= scale;
  const double rates = detail::rate_sum(tau);
  if (rates > 1.0) {
    for (auto& t : tau) t *= rates;
  }

  const Schedule base = unroll_to_multiple(s_ab, kappa, period_cap);
  const std::size_t n_ins = base.length() / kappa;
  const std::size_t mc = c.message_count();

  auto sc = minimal_period(periodic_greedy(c, tau, default_greedy_length(c, tau)));
  std::size_t k = 0;
  {
    const std::size_t l = std::lcm(n_ins, sc.length());
    const std::size_t reps = l / n_ins;
    if (reps <= period_cap / (base.length() + n_ins)) {
      k = reps;
    } else {
      k = std::max<std::size_t>(1, period_cap / (base.length() + n_ins));
      while (k * n_ins < 2 * mc + 1) ++k;
      if (k * (base.length() + n_ins) > period_cap) fail(ErrorCode::budget, "negligible insertion exceeds period cap");
      sc = periodic_greedy(c, tau, k * n_ins - 2 * mc, true);
      res.c_greedy_forced = true;
    }
  }
  res.c_length = sc.length();
  const Schedule unrolled = unroll(base, k, period_cap);

  std::optional<Schedule> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t x = 1; x <= kappa; ++x) {
    auto st = stretch_detail(unrolled, 1, kappa, x, period_cap);
    for (std::size_t i = 0; i < st.inserted.size(); ++i) {
      st.schedule.at(st.inserted[i], 0) = sc.at(i % sc.length(), 0);
    }
    const double cost = exact_cost(st.schedule, inst).cost;
    if (!best || cost < best_cost) {
      best_cost = cost;
      best = std::move(st.schedule);
      res.offset = x;
    }
  }
  res.schedule = std::move(*best);
  return res;
}

// ---------------------------------------------------------------------------
// Cheapest block

struct BlockResult {
  Schedule schedule;      // the chosen block, reduced to its minimal period
  std::size_t start = 0;  // window start in the source schedule
  std::size_t length = 0; // block length before reduction
  double cost = 0.0;      // continuous COST of the block
};

inline std::size_t block_length(const Instance& inst, double eps) {
  const double m = static_cast<double>(inst.size());
  return static_cast<std::size_t>(std::ceil((m * m + m * std::max(1.0, inst.cost_bound())) / eps - 1e-9));
}

/// Considers every block made of all m messages in catalog order on channel
/// 0 followed by L - m consecutive columns of the periodic schedule `s`, and
/// returns the cheapest one as a periodic schedule of length L.
inline BlockResult extract_cheapest_block(const Schedule& s, const Instance& inst, std::size_t L) {
  const std::size_t m = inst.size();
  const std::size_t P = s.length();
  const int W = s.channels();
  if (L <= m) fail(ErrorCode::usage, "block must be longer than the message count");
  const std::size_t win = L - m;

  std::vector<std::deque<std::size_t>> occ(m);
  std::vector<std::uint64_t> internal(m, 0);
  double prefix_bc = 0.0;
  for (const auto& msg : inst.messages()) prefix_bc += msg.c;
  long double window_bc = 0.0L;
  std::vector<MessageIndex> col_msgs;

  auto column = [&](std::size_t t) {
    col_msgs.clear();
    for (int w = 0; w < W; ++w) {
      const auto v = s.at(t % P, w);
      if (v == kIdle) continue;
      if (std::find(col_msgs.begin(), col_msgs.end(), v) == col_msgs.end()) col_msgs.push_back(v);
    }
  };
  auto column_cost = [&](std::size_t t) {
    double c = 0.0;
    for (int w = 0; w < W; ++w) {
      const auto v = s.at(t % P, w);
      if (v != kIdle) c += inst[v].c;
    }
    return c;
  };
  auto push = [&](std::size_t t) {
    column(t);
    for (auto v : col_msgs) {
      auto& d = occ[static_cast<std::size_t>(v)];
      if (!d.empty()) internal[static_cast<std::size_t>(v)] += triangular(t - d.back());
      d.push_back(t);
    }
    window_bc += column_cost(t);
  };
  auto pop = [&](std::size_t t) {
    column(t);
    for (auto v : col_msgs) {
      auto& d = occ[static_cast<std::size_t>(v)];
      d.pop_front();
      if (!d.empty()) internal[static_cast<std::size_t>(v)] -= triangular(d.front() - t);
    }
    window_bc -= column_cost(t);
  };
  auto cost_at = [&](std::size_t a) {
    long double ert = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& d = occ[i];
      std::uint64_t sum = 0;
      if (d.empty()) {
        sum = triangular(L);
      } else {
        const std::size_t first = m + (d.front() - a);
        const std::size_t last = m + (d.back() - a);
        sum = internal[i] + triangular(first - i) + triangular(L - last + i);
      }
      ert += static_cast<long double>(inst.messages()[i].p) *
             (static_cast<long double>(sum) / static_cast<long double>(L) + 0.5L);
    }
    return static_cast<double>(ert + (static_cast<long double>(prefix_bc) + window_bc) / static_cast<long double>(L));
  };

  for (std::size_t t = 0; t < win; ++t) push(t);
  std::size_t best_a = 0;
  double best = cost_at(0);
  for (std::size_t a = 1; a < P; ++a) {
    pop(a - 1);
    push(a - 1 + win);
    const double c = cost_at(a);
    if (c < best) {
      best = c;
      best_a = a;
    }
  }

  Schedule block(L, W);
  for (std::size_t i = 0; i < m; ++i) block.at(i, 0) = static_cast<MessageIndex>(i);
  for (std::size_t u = 0; u < win; ++u) {
    for (int w = 0; w < W; ++w) block.at(m + u, w) = s.at((best_a + u) % P, w);
  }
  BlockResult res;
  res.cost = exact_cost(block, inst).cost;
  if (std::abs(res.cost - best) > 1e-9 * std::max(1.0, res.cost)) {
    fail(ErrorCode::numeric, "incremental block cost disagrees with exact evaluation");
  }
  res.start = best_a;
  res.length = L;
  res.schedule = minimal_period(block);
  return res;
}

// ---------------------------------------------------------------------------
// End to end

struct PtasReport {
  double lb = 0.0;
  double cost_slot_start = 0.0;
  double cost_continuous = 0.0;
  double ratio = 0.0;            // cost_continuous / lb
  double ratio_slot_start = 0.0; // cost_slot_start / lb
  std::size_t period = 0;
  std::size_t period_bound = 0;
  TheoreticalConstants theoretical;
  nlohmann::json stages = nlohmann::json::object();
  std::vector<Certificate> certificates;

  bool all_passed() const {
    return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.passed; });
  }

  nlohmann::json to_json() const {
    nlohmann::json certs = nlohmann::json::array();
    for (const auto& c : certificates) certs.push_back(airdisk::to_json(c));
    return {{"lb", lb},
            {"cost_slot_start", cost_slot_start},
            {"cost_continuous", cost_continuous},
            {"ratio", ratio},
            {"ratio_slot_start", ratio_slot_start},
            {"period", period},
            {"period_bound", period_bound},
            {"theoretical", {{"T_eps", theoretical.T_eps}, {"kappa_eps", theoretical.kappa_eps}}},
            {"stages", stages},
            {"stage_certificates", certs}};
  }
};

struct PtasResult {
  Schedule schedule;
  PtasReport report;
};

inline PtasResult ptas(const Instance& inst, const PtasConfig& cfg) {
  cfg.validate();
  const double eps = cfg.epsilon;
  const int W = inst.channels();
  PtasResult out;
  auto& rep = out.report;
  rep.theoretical = theoretical_constants(eps, inst.cost_bound(), W);
  rep.lb = solve_lb(group_messages(inst), 1.0, W).value;

  const auto rounded = round_instance(inst, eps);
  const auto groups = group_messages(rounded);
  PartitionOptions po;
  po.epsilon = eps;
  po.kappa = cfg.kappa;
  po.lb_ref = rep.lb;
  po.cost_bound = inst.cost_bound();
  po.a_size_cap = cfg.a_size_cap;
  po.j0 = cfg.j0_value();
  po.mu = cfg.mu;
  const auto part = build_partition(groups, po);
  for (const auto& c : part.certificates) {
    auto named = c;
    named.name = "partition." + c.name;
    rep.certificates.push_back(named);
  }
  rep.stages["partition"] = {{"A_groups", part.A.size()}, {"B_groups", part.B.size()},
                             {"C_groups", part.C.size()}, {"a_size", part.a_size},
                             {"block", part.block},       {"j0", part.j0},
                             {"r", rounded.r}};
  if (!part.ok) {
    const auto it = std::find_if(part.certificates.begin(), part.certificates.end(),
                                 [&](const Certificate& c) { return c.name == part.failed; });
    throw Error(ErrorCode::certificate, "partition certificate '" + part.failed + "' failed: value " +
                                            std::to_string(it->value) + ", threshold " +
                                            std::to_string(it->threshold));
  }

  const Grouping a_groups = groups.subset(part.A);
  const Grouping b_groups = groups.subset(part.B);
  const Grouping c_groups = groups.subset(part.C);

  AbOptions ab;
  ab.a_period_cap = cfg.a_period_cap;
  ab.alpha_grid_cap = cfg.alpha_grid_cap;
  ab.composite_cap = cfg.composite_cap;
  ab.period_cap = cfg.period_cap;
  ab.repetitions = cfg.repetitions;
  if (!c_groups.empty()) ab.period_multiple = negligible_spacing(eps, inst.cost_bound());
  const auto sab = schedule_ab(inst, a_groups, b_groups, ab);
  for (const auto& c : sab.certificates) {
    auto named = c;
    named.name = "schedule_ab." + c.name;
    rep.certificates.push_back(named);
  }
  rep.stages["schedule_ab"] = {{"alpha0", sab.alpha_den ? static_cast<double>(sab.alpha_x) / sab.alpha_den : 0.0},
                               {"alpha_grid", sab.grid_size},
                               {"s_alpha_period", sab.s_alpha.length()},
                               {"b_density", sab.beta},
                               {"objective", sab.objective},
                               {"repetitions", sab.repetitions},
                               {"b_greedy_length", sab.b_greedy_length},
                               {"b_greedy_forced", sab.b_greedy_forced},
                               {"period", sab.schedule.length()}};

  const auto ins = insert_negligible(sab.schedule, c_groups, eps, inst.cost_bound(), inst, cfg.period_cap);
  rep.stages["insert_negligible"] = {{"kappa", ins.kappa},
                                     {"offset", ins.offset},
                                     {"c_period", ins.c_length},
                                     {"c_greedy_forced", ins.c_greedy_forced},
                                     {"period", ins.schedule.length()}};

  rep.period_bound = block_length(inst, eps);
  const auto blk = extract_cheapest_block(ins.schedule, inst, rep.period_bound);
  rep.stages["cheapest_block"] = {{"start", blk.start}, {"length", blk.length}, {"period", blk.schedule.length()}};

  out.schedule = blk.schedule;
  const auto cost = exact_cost(out.schedule, inst);
  rep.cost_continuous = cost.cost;
  rep.cost_slot_start = cost.cost_slot_start();
  rep.ratio = rep.cost_continuous / rep.lb;
  rep.ratio_slot_start = rep.cost_slot_start / rep.lb;
  rep.period = out.schedule.length();
  rep.certificates.push_back({"period_bound", static_cast<double>(rep.period),
                              static_cast<double>(rep.period_bound), rep.period <= rep.period_bound});
  return out;
}

}  // namespace airdisk
