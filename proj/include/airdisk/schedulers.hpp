#pragma once

// One-channel group schedulers: randomized group round-robin, the greedy
// derandomization, its periodic truncation, and a per-message baseline.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "airdisk/error.hpp"
#include "airdisk/lower_bound.hpp"
#include "airdisk/model.hpp"
#include "airdisk/schedule.hpp"

namespace airdisk {

/// Sum over groups of p g (g+1) tau / 2 + c / tau: the expected slot-start
/// cost of group round-robin at rates 1/tau.
inline double rr_cost_formula(const Grouping& g, const std::vector<double>& tau) {
  double v = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double gj = static_cast<double>(g[j].size());
    v += g[j].p * gj * (gj + 1.0) * tau[j] / 2.0 + g[j].c / tau[j];
  }
  return v;
}

/// Optimal one-channel periods of the relaxation at full density.
inline std::vector<double> tau_from_lb(const Grouping& g) { return solve_lb(g, 1.0, 1).tau; }

namespace detail {

inline double rate_sum(const std::vector<double>& tau) {
  double s = 0.0;
  for (double t : tau) s += 1.0 / t;
  return s;
}

inline void check_rates(const Grouping& g, const std::vector<double>& tau) {
  if (g.empty()) fail(ErrorCode::usage, "scheduler needs at least one group");
  if (tau.size() != g.size()) fail(ErrorCode::usage, "one period per group is required");
  for (double t : tau) {
    if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorCode::usage, "periods must be positive");
  }
  if (rate_sum(tau) > 1.0 + 1e-12) {
    fail(ErrorCode::usage, "broadcast rates sum to more than one slot per slot");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Randomized round-robin

struct RrPolicy {
  Grouping grouping;
  std::vector<double> tau;
  double dummy_rate = 0.0;
  std::vector<std::size_t> rr_cursor;

  RrPolicy(Grouping g, std::vector<double> t) : grouping(std::move(g)), tau(std::move(t)) {
    detail::check_rates(grouping, tau);
    dummy_rate = std::max(0.0, 1.0 - detail::rate_sum(tau));
    rr_cursor.assign(grouping.size(), 0);
  }

  MessageIndex next_member(std::size_t j) {
    const auto& mem = grouping[j].members;
    const auto v = mem[rr_cursor[j]];
    rr_cursor[j] = (rr_cursor[j] + 1) % mem.size();
    return v;
  }
};

/// Each slot draws group j with probability 1/tau_j (idle otherwise) and
/// broadcasts the group's next member in round-robin order.
inline Schedule randomized_rr(RrPolicy policy, std::size_t horizon, std::uint64_t seed) {
  if (horizon < 1) fail(ErrorCode::usage, "horizon must be at least one slot");
  std::vector<double> weights;
  weights.reserve(policy.grouping.size() + 1);
  for (double t : policy.tau) weights.push_back(1.0 / t);
  weights.push_back(policy.dummy_rate);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> draw(weights.begin(), weights.end());
  std::vector<MessageIndex> slots(horizon, kIdle);
  const std::size_t idle = policy.grouping.size();
  for (auto& slot : slots) {
    const std::size_t j = draw(rng);
    if (j != idle) slot = policy.next_member(j);
  }
  return Schedule::from_slots(slots);
}

/// Randomized scheduling with every message in its own group.
inline Schedule per_message_baseline(const Instance& inst, const std::vector<double>& tau_per_message,
                                     std::size_t horizon, std::uint64_t seed) {
  return randomized_rr(RrPolicy(singleton_grouping(inst), tau_per_message), horizon, seed);
}

// ---------------------------------------------------------------------------
// Greedy

/// Start slots of the last g_j broadcasts of every group. The elapsed time
/// s_{j,k} at the decision for slot `now` is now - start, so one broadcast in
/// the previous slot reads as 1.
class GreedyState {
 public:
  GreedyState() = default;

  /// State after broadcasting every member once, in catalog order, in the m
  /// slots just before slot 0.
  static GreedyState warm_up(const Grouping& g) {
    GreedyState st;
    const auto m = static_cast<std::int64_t>(g.message_count());
    std::vector<std::pair<MessageIndex, std::size_t>> owner;
    for (std::size_t j = 0; j < g.size(); ++j) {
      for (auto i : g[j].members) owner.emplace_back(i, j);
    }
    std::sort(owner.begin(), owner.end());
    st.ring_.resize(g.size());
    st.head_.assign(g.size(), 0);
    st.sum_.assign(g.size(), 0);
    st.cursor_.assign(g.size(), 0);
    for (std::int64_t t = 0; t < m; ++t) {
      const auto j = owner[static_cast<std::size_t>(t)].second;
      st.ring_[j].push_back(t - m);
      st.sum_[j] += t - m;
    }
    st.now_ = 0;
    return st;
  }

  std::int64_t now() const { return now_; }
  std::size_t groups() const { return ring_.size(); }

  /// Sum over k of s_{j,k}.
  std::int64_t elapsed_sum(std::size_t j) const {
    return static_cast<std::int64_t>(ring_[j].size()) * now_ - sum_[j];
  }

  /// s_{j,k} for k = 1 (most recent) .. g_j.
  std::vector<std::int64_t> elapsed(std::size_t j) const {
    const auto& r = ring_[j];
    const std::size_t g = r.size();
    std::vector<std::int64_t> out(g);
    for (std::size_t k = 0; k < g; ++k) {
      // head_ points at the oldest entry; the newest is just before it
      out[k] = now_ - r[(head_[j] + g - 1 - k) % g];
    }
    return out;
  }

  std::size_t cursor(std::size_t j) const { return cursor_[j]; }

  /// Advances one slot, recording a broadcast of group j (nullopt = idle).
  /// Returns the broadcast member.
  MessageIndex advance(const Grouping& g, std::optional<std::size_t> j) {
    MessageIndex out = kIdle;
    if (j) {
      auto& r = ring_[*j];
      auto& h = head_[*j];
      sum_[*j] += now_ - r[h];
      r[h] = now_;
      h = (h + 1) % r.size();
      const auto& mem = g[*j].members;
      out = mem[cursor_[*j]];
      cursor_[*j] = (cursor_[*j] + 1) % mem.size();
    }
    ++now_;
    return out;
  }

 private:
  std::vector<std::vector<std::int64_t>> ring_;
  std::vector<std::size_t> head_;
  std::vector<std::int64_t> sum_;
  std::vector<std::size_t> cursor_;
  std::int64_t now_ = 0;
};

/// Whether the idle dummy group takes part for these rates.
inline bool needs_dummy(const std::vector<double>& tau) {
  return detail::rate_sum(tau) < 1.0 - 1e-12;
}

/// Group minimizing c_j - p_j tau_j sum_k s_{j,k}. The dummy group (idle)
/// scores 0 and comes first, so it wins ties; other ties go to the smaller
/// group index.
inline std::optional<std::size_t> greedy_step(const GreedyState& st, const Grouping& g,
                                              const std::vector<double>& tau,
                                              bool with_dummy = true) {
  std::optional<std::size_t> best;
  double best_score = with_dummy ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double score =
        g[j].c - g[j].p * tau[j] * static_cast<double>(st.elapsed_sum(j));
    if (score < best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

/// Greedy one-channel schedule of `horizon` slots starting from the warm-up
/// state.
inline Schedule greedy(const Grouping& g, const std::vector<double>& tau, std::size_t horizon) {
  detail::check_rates(g, tau);
  if (horizon < 1) fail(ErrorCode::usage, "horizon must be at least one slot");
  auto st = GreedyState::warm_up(g);
  const bool dummy = needs_dummy(tau);
  std::vector<MessageIndex> slots(horizon, kIdle);
  for (auto& slot : slots) slot = st.advance(g, greedy_step(st, g, tau, dummy));
  return Schedule::from_slots(slots);
}

/// Smallest greedy length T for which the periodic truncation is covered by
/// the cost bound: 8 m^2 + (4 C - 1) m.
inline std::size_t periodic_greedy_min_t(const Grouping& g) {
  const double m = static_cast<double>(g.message_count());
  return static_cast<std::size_t>(std::ceil(8.0 * m * m + (4.0 * g.max_cost() - 1.0) * m));
}

/// Smallest T' in [T, T + window] after which greedy leaves every group's
/// round-robin cursor back at its first member, or T when there is none. With
/// aligned cursors the final block and the next period's opening block
/// continue each group's cyclic order across the period boundary.
inline std::size_t aligned_greedy_length(const Grouping& g, const std::vector<double>& tau,
                                         std::size_t T, std::size_t window) {
  detail::check_rates(g, tau);
  auto st = GreedyState::warm_up(g);
  const bool dummy = needs_dummy(tau);
  auto aligned = [&] {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (st.cursor(j) != 0) return false;
    }
    return true;
  };
  for (std::size_t t = 0; t < T; ++t) st.advance(g, greedy_step(st, g, tau, dummy));
  for (std::size_t extra = 0; extra <= window; ++extra) {
    if (aligned()) return T + extra;
    st.advance(g, greedy_step(st, g, tau, dummy));
  }
  return T;
}

/// Default greedy length: the cursor-aligned length at or above the minimum.
inline std::size_t default_greedy_length(const Grouping& g, const std::vector<double>& tau) {
  const auto t_min = std::max<std::size_t>(periodic_greedy_min_t(g), 1);
  return aligned_greedy_length(g, tau, t_min, t_min);
}

/// One period of length T + 2m: every message once in catalog order, T greedy
/// slots, then the k-th next member of each group G_j in increasing order of
/// k tau_j.
inline Schedule periodic_greedy(const Grouping& g, const std::vector<double>& tau, std::size_t T,
                                bool force = false) {
  detail::check_rates(g, tau);
  if (!force && T < periodic_greedy_min_t(g)) {
    fail(ErrorCode::usage, "periodic greedy needs T >= " + std::to_string(periodic_greedy_min_t(g)) +
                               " (use force to override)");
  }
  const auto order = g.catalog_members();
  const std::size_t m = order.size();
  std::vector<MessageIndex> slots;
  slots.reserve(T + 2 * m);
  slots.insert(slots.end(), order.begin(), order.end());

  auto st = GreedyState::warm_up(g);
  const bool dummy = needs_dummy(tau);
  for (std::size_t t = 0; t < T; ++t) slots.push_back(st.advance(g, greedy_step(st, g, tau, dummy)));

  std::vector<std::tuple<double, std::size_t, std::size_t>> tail;
  tail.reserve(m);
  for (std::size_t j = 0; j < g.size(); ++j) {
    for (std::size_t k = 1; k <= g[j].size(); ++k) {
      tail.emplace_back(static_cast<double>(k) * tau[j], j, k);
    }
  }
  std::sort(tail.begin(), tail.end());
  for (const auto& [key, j, k] : tail) {
    const auto& mem = g[j].members;
    slots.push_back(mem[(st.cursor(j) + k - 1) % mem.size()]);
  }
  return Schedule::from_slots(slots);
}

}  // namespace airdisk
