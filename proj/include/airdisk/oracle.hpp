#pragma once

// Exhaustive search over short periodic schedules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airdisk/error.hpp"
#include "airdisk/evaluate.hpp"
#include "airdisk/model.hpp"
#include "airdisk/necklace.hpp"
#include "airdisk/schedule.hpp"

namespace airdisk {

inline constexpr double kDefaultSearchBudget = 1e8;

/// Search budget, overridable through AIRDISK_SEARCH_BUDGET.
inline double search_budget() {
  if (const char* env = std::getenv("AIRDISK_SEARCH_BUDGET")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return kDefaultSearchBudget;
}

struct OracleResult {
  Schedule best;
  double cost = 0.0;          // continuous-convention COST
  std::size_t searched = 0;   // schedules evaluated
  std::size_t t_max = 0;
};

namespace detail {

/// Every multiset of W entries from {idle} u messages, one per time slot
/// column. Column 0 is all-idle.
struct ColumnAlphabet {
  std::vector<std::vector<MessageIndex>> columns;
  std::vector<int> busy;

  ColumnAlphabet(std::span<const MessageIndex> messages, int W) {
    const std::size_t k = messages.size() + 1;
    std::vector<std::size_t> pick(static_cast<std::size_t>(W), 0);
    while (true) {
      std::vector<MessageIndex> col;
      int b = 0;
      for (auto s : pick) {
        if (s == 0) continue;
        col.push_back(messages[s - 1]);
        ++b;
      }
      col.resize(static_cast<std::size_t>(W), kIdle);
      columns.push_back(std::move(col));
      busy.push_back(b);
      // next non-decreasing sequence
      int pos = W - 1;
      while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == k - 1) --pos;
      if (pos < 0) break;
      const auto v = pick[static_cast<std::size_t>(pos)] + 1;
      for (int q = pos; q < W; ++q) pick[static_cast<std::size_t>(q)] = v;
    }
  }

  std::size_t size() const { return columns.size(); }
};

/// Continuous COST of the messages in `messages` for a word of columns;
/// infinity when one of them is missing.
class WordCost {
 public:
  WordCost(const Instance& inst, std::span<const MessageIndex> messages)
      : inst_(inst), messages_(messages.begin(), messages.end()), slot_of_(inst.size(), -1) {
    for (std::size_t i = 0; i < messages_.size(); ++i) {
      slot_of_[static_cast<std::size_t>(messages_[i])] = static_cast<int>(i);
    }
    first_.resize(messages_.size());
    last_.resize(messages_.size());
    sum_.resize(messages_.size());
  }

  double operator()(const ColumnAlphabet& alpha, std::span<const std::size_t> word) {
    const std::size_t T = word.size();
    std::fill(first_.begin(), first_.end(), -1);
    std::fill(sum_.begin(), sum_.end(), 0);
    double bc = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const auto& col = alpha.columns[word[t]];
      for (auto v : col) {
        if (v == kIdle) continue;
        bc += inst_[v].c;
        const auto s = static_cast<std::size_t>(slot_of_[static_cast<std::size_t>(v)]);
        const auto tt = static_cast<long>(t);
        if (first_[s] < 0) {
          first_[s] = tt;
        } else if (last_[s] != tt) {
          sum_[s] += triangular(static_cast<std::uint64_t>(tt - last_[s]));
        }
        last_[s] = tt;
      }
    }
    double ert = 0.0;
    for (std::size_t s = 0; s < messages_.size(); ++s) {
      if (first_[s] < 0) return std::numeric_limits<double>::infinity();
      const auto wrap = static_cast<std::uint64_t>(static_cast<long>(T) - last_[s] + first_[s]);
      const auto total = sum_[s] + triangular(wrap);
      ert += inst_[messages_[s]].p * (static_cast<double>(total) / static_cast<double>(T) + 0.5);
    }
    return ert + bc / static_cast<double>(T);
  }

 private:
  const Instance& inst_;
  std::vector<MessageIndex> messages_;
  std::vector<int> slot_of_;
  std::vector<long> first_;
  std::vector<long> last_;
  std::vector<std::uint64_t> sum_;
};

inline Schedule word_to_schedule(const ColumnAlphabet& alpha, std::span<const std::size_t> word, int W) {
  Schedule s(word.size(), W);
  for (std::size_t t = 0; t < word.size(); ++t) {
    const auto& col = alpha.columns[word[t]];
    for (int w = 0; w < W; ++w) s.at(t, w) = col[static_cast<std::size_t>(w)];
  }
  return s;
}

struct SearchOutcome {
  std::optional<Schedule> best;
  double cost = std::numeric_limits<double>::infinity();
  std::size_t searched = 0;
};

/// Minimum of the restricted continuous COST over all periodic schedules with
/// period 1..t_max built from `messages`. If busy_target is set, a period-T
/// schedule must have exactly busy_target(T) non-idle cells. Periods are
/// scanned in increasing order and words in lexicographic order; a later
/// candidate replaces the incumbent only when strictly cheaper beyond a 1e-12
/// relative slack, so ties keep the shortest period and the smallest word.
inline SearchOutcome search_periodic(const Instance& inst, std::span<const MessageIndex> messages, int W,
                                     std::size_t t_max,
                                     const std::function<std::optional<std::size_t>(std::size_t)>& busy_target) {
  const ColumnAlphabet alpha(messages, W);
  WordCost cost(inst, messages);
  SearchOutcome out;
  const std::size_t need = messages.size();
  for (std::size_t T = 1; T <= t_max; ++T) {
    std::optional<std::size_t> target;
    if (busy_target) {
      target = busy_target(T);
      if (!target) continue;
      if (*target < need || *target > T * static_cast<std::size_t>(W)) continue;
    } else if (T * static_cast<std::size_t>(W) < need) {
      continue;
    }
    std::vector<char> seen(inst.size(), 0);
    auto prune = [&](std::span<const std::size_t> prefix) {
      std::size_t busy = 0;
      std::size_t covered = 0;
      std::fill(seen.begin(), seen.end(), 0);
      for (auto sym : prefix) {
        busy += static_cast<std::size_t>(alpha.busy[sym]);
        for (auto v : alpha.columns[sym]) {
          if (v != kIdle && !seen[static_cast<std::size_t>(v)]) {
            seen[static_cast<std::size_t>(v)] = 1;
            ++covered;
          }
        }
      }
      const std::size_t room = (T - prefix.size()) * static_cast<std::size_t>(W);
      if (covered + room < need) return true;
      if (target && (busy > *target || busy + room < *target)) return true;
      return false;
    };
    auto visit = [&](std::span<const std::size_t> word) {
      if (target) {
        std::size_t busy = 0;
        for (auto sym : word) busy += static_cast<std::size_t>(alpha.busy[sym]);
        if (busy != *target) return;
      }
      ++out.searched;
      const double c = cost(alpha, word);
      if (!std::isfinite(c)) return;
      if (!out.best || c < out.cost - 1e-12 * std::abs(out.cost)) {
        out.cost = c;
        out.best = word_to_schedule(alpha, word, W);
      }
    };
    for_each_lyndon(T, alpha.size(), visit, prune);
  }
  return out;
}

}  // namespace detail

/// Cheapest periodic schedule (continuous COST) with period at most t_max.
inline OracleResult brute_force_opt(const Instance& inst, std::size_t t_max,
                                    std::optional<double> budget = std::nullopt) {
  if (t_max < 1) fail(ErrorCode::usage, "t_max must be at least 1");
  const double states = std::pow(static_cast<double>(inst.size() + 1),
                                 static_cast<double>(t_max) * inst.channels());
  const double limit = budget.value_or(search_budget());
  if (states > limit) {
    fail(ErrorCode::budget, "oracle search space (m+1)^(t_max*W) = " + std::to_string(states) +
                                " exceeds budget " + std::to_string(limit));
  }
  std::vector<MessageIndex> all(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) all[i] = static_cast<MessageIndex>(i);
  const auto found = detail::search_periodic(inst, all, inst.channels(), t_max, {});
  if (!found.best) fail(ErrorCode::infeasible, "no schedule of period <= t_max serves every message");
  OracleResult res;
  res.best = *found.best;
  res.cost = exact_cost(res.best, inst).cost;
  res.searched = found.searched;
  res.t_max = t_max;
  return res;
}

}  // namespace airdisk
