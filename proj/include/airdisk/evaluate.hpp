#pragma once

// Exact and Monte-Carlo evaluation of expected response time and broadcast
// cost.
//
// Slot-start convention: a request arriving at the start of slot t for
// message i is served at the end of the first slot s >= t that carries i, so it
// waits s - t + 1. The continuous convention (arrival uniform inside a slot)
// adds exactly 1/2.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "airdisk/error.hpp"
#include "airdisk/model.hpp"
#include "airdisk/numeric.hpp"
#include "airdisk/schedule.hpp"

namespace airdisk {

struct Contribution {
  double ert = 0.0;  // sum over the subset of p_i * wait_i (slot-start)
  double bc = 0.0;   // subset's share of the broadcast cost per slot
  double prob = 0.0; // probability mass of the subset
};

struct CostReport {
  double ert_slot_start = 0.0;
  double ert_continuous = 0.0;
  double bc = 0.0;
  double cost = 0.0;  // ert_continuous + bc
  double density = 0.0;
  std::size_t period = 0;
  std::vector<double> per_message_wait;  // slot-start mean wait, by catalog index
  std::optional<Contribution> per_set_breakdown;

  double cost_slot_start() const { return ert_slot_start + bc; }
};

namespace detail {

/// Slot indices at which each message is broadcast (on any channel), ascending
/// and without duplicates.
inline std::vector<std::vector<std::size_t>> occurrences(const Schedule& s, std::size_t m) {
  std::vector<std::vector<std::size_t>> occ(m);
  for (std::size_t t = 0; t < s.length(); ++t) {
    for (int w = 0; w < s.channels(); ++w) {
      const auto v = s.at(t, w);
      if (v == kIdle) continue;
      if (v < 0 || static_cast<std::size_t>(v) >= m) {
        fail(ErrorCode::input, "schedule references a message outside the instance");
      }
      auto& list = occ[static_cast<std::size_t>(v)];
      if (list.empty() || list.back() != t) list.push_back(t);
    }
  }
  return occ;
}

inline double total_cost_per_slot(const Schedule& s, const Instance& inst) {
  long double total = 0.0L;
  for (auto v : s.cells()) {
    if (v != kIdle) total += inst[v].c;
  }
  return static_cast<double>(total / static_cast<long double>(s.length()));
}

inline void finish_report(CostReport& rep, const Schedule& s, const Instance& inst) {
  long double ert = 0.0L;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    ert += static_cast<long double>(inst.messages()[i].p) * rep.per_message_wait[i];
  }
  // Compute the continuous value first and derive the slot-start value from it
  // so that the two differ by exactly 1/2 in floating point. Waits are >= 1, so
  // the subtraction is exact.
  rep.ert_continuous = static_cast<double>(ert) + 0.5;
  rep.ert_slot_start = rep.ert_continuous - 0.5;
  rep.bc = total_cost_per_slot(s, inst);
  rep.cost = rep.ert_continuous + rep.bc;
  rep.density = s.density();
  rep.period = s.length();
}

inline void check_shape(const Schedule& s, const Instance& inst) {
  if (s.empty()) fail(ErrorCode::input, "schedule has no slots");
  if (s.channels() > inst.channels()) {
    fail(ErrorCode::input, "schedule uses more channels than the instance provides");
  }
}

}  // namespace detail

/// Mean slot-start wait of every message under periodic repetition of `s`.
inline std::vector<double> periodic_waits(const Schedule& s, std::size_t m) {
  const auto occ = detail::occurrences(s, m);
  const std::size_t T = s.length();
  std::vector<double> waits(m, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < m; ++i) {
    const auto& o = occ[i];
    if (o.empty()) continue;
    std::uint64_t sum = triangular(T - o.back() + o.front());
    for (std::size_t k = 1; k < o.size(); ++k) sum += triangular(o[k] - o[k - 1]);
    waits[i] = static_cast<double>(sum) / static_cast<double>(T);
  }
  return waits;
}

/// Exact cost of the periodic extension of `s`. Every message with p > 0 must
/// appear somewhere in the grid.
inline CostReport exact_cost(const Schedule& s, const Instance& inst) {
  detail::check_shape(s, inst);
  CostReport rep;
  rep.per_message_wait = periodic_waits(s, inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    if (std::isinf(rep.per_message_wait[i])) {
      fail(ErrorCode::input, "unserved message '" + inst.messages()[i].id + "'");
    }
  }
  detail::finish_report(rep, s, inst);
  return rep;
}

/// Restriction of the ERT and BC sums of a periodic schedule to `subset`.
inline Contribution exact_contribution(const Schedule& s, const Instance& inst,
                                       std::span<const MessageIndex> subset) {
  detail::check_shape(s, inst);
  const auto waits = periodic_waits(s, inst.size());
  std::vector<char> in(inst.size(), 0);
  Contribution out;
  long double ert = 0.0L;
  for (auto i : subset) {
    if (std::isinf(waits[static_cast<std::size_t>(i)])) {
      fail(ErrorCode::input, "unserved message '" + inst[i].id + "'");
    }
    in[static_cast<std::size_t>(i)] = 1;
    ert += static_cast<long double>(inst[i].p) * waits[static_cast<std::size_t>(i)];
    out.prob += inst[i].p;
  }
  long double bc = 0.0L;
  for (auto v : s.cells()) {
    if (v != kIdle && in[static_cast<std::size_t>(v)]) bc += inst[v].c;
  }
  out.ert = static_cast<double>(ert);
  out.bc = static_cast<double>(bc / static_cast<long double>(s.length()));
  return out;
}

inline CostReport exact_cost(const Schedule& s, const Instance& inst,
                             std::span<const MessageIndex> subset) {
  auto rep = exact_cost(s, inst);
  rep.per_set_breakdown = exact_contribution(s, inst, subset);
  return rep;
}

/// Exact cost of a finite schedule: a request with no later broadcast waits
/// until the end of the schedule. Messages may be absent.
inline CostReport exact_cost_finite(const Schedule& s, const Instance& inst) {
  detail::check_shape(s, inst);
  const auto occ = detail::occurrences(s, inst.size());
  const std::size_t n = s.length();
  CostReport rep;
  rep.per_message_wait.resize(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const auto& o = occ[i];
    std::uint64_t sum = 0;
    if (o.empty()) {
      sum = triangular(n);
    } else {
      sum = triangular(o.front() + 1);
      for (std::size_t k = 1; k < o.size(); ++k) sum += triangular(o[k] - o[k - 1]);
      sum += triangular(n - 1 - o.back());
    }
    rep.per_message_wait[i] = static_cast<double>(sum) / static_cast<double>(n);
  }
  detail::finish_report(rep, s, inst);
  return rep;
}

// ---------------------------------------------------------------------------
// Monte-Carlo

struct SimulationResult {
  double mean_wait = 0.0;  // slot-start ERT estimate
  double std_error = 0.0;
  double bc = 0.0;         // exact, the simulation only samples waits
  std::size_t samples = 0;

  double cost_slot_start() const { return mean_wait + bc; }
  double cost_continuous() const { return mean_wait + 0.5 + bc; }
};

namespace detail {

inline SimulationResult simulate(const Schedule& s, const Instance& inst, std::size_t n_requests,
                                 std::uint64_t seed, bool periodic) {
  if (n_requests < 1) fail(ErrorCode::usage, "simulation needs at least one request");
  check_shape(s, inst);
  const auto occ = occurrences(s, inst.size());
  const std::size_t T = s.length();
  if (periodic) {
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (occ[i].empty()) fail(ErrorCode::input, "unserved message '" + inst.messages()[i].id + "'");
    }
  }
  std::vector<double> weights;
  weights.reserve(inst.size());
  for (const auto& m : inst.messages()) weights.push_back(m.p);

  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> slot(0, T - 1);

  // Welford accumulation keeps the variance stable for long runs.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t r = 0; r < n_requests; ++r) {
    const std::size_t t = slot(rng);
    const std::size_t i = pick(rng);
    const auto& o = occ[i];
    const auto it = std::lower_bound(o.begin(), o.end(), t);
    double wait = 0.0;
    if (it != o.end()) {
      wait = static_cast<double>(*it - t + 1);
    } else if (periodic) {
      wait = static_cast<double>(T - t + o.front() + 1);
    } else {
      wait = static_cast<double>(T - t);
    }
    const double delta = wait - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (wait - mean);
  }
  SimulationResult out;
  out.mean_wait = mean;
  out.samples = n_requests;
  out.std_error = n_requests > 1
                      ? std::sqrt(m2 / static_cast<double>(n_requests - 1) /
                                  static_cast<double>(n_requests))
                      : 0.0;
  out.bc = total_cost_per_slot(s, inst);
  return out;
}

}  // namespace detail

/// Monte-Carlo estimate of the slot-start ERT of a periodic schedule.
inline SimulationResult simulate_cost(const Schedule& s, const Instance& inst,
                                      std::size_t n_requests, std::uint64_t seed) {
  return detail::simulate(s, inst, n_requests, seed, true);
}

/// Same for a finite schedule, with truncation at the schedule end.
inline SimulationResult simulate_cost_finite(const Schedule& s, const Instance& inst,
                                             std::size_t n_requests, std::uint64_t seed) {
  return detail::simulate(s, inst, n_requests, seed, false);
}

}  // namespace airdisk
